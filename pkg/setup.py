"""Build script for the optional compiled kernel backend.

The package is fully functional without the extension (a NumPy fallback is
selected at import time); building it just speeds up the hot kernels.

    python setup.py build_ext --inplace
"""

import sys

from setuptools import Extension, setup


def extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError as exc:
        print(f"skipping compiled backend ({exc}); NumPy fallback will be used",
              file=sys.stderr)
        return []
    ext = Extension(
        "hsicssl._kernels.cython_backend",
        sources=["src/hsicssl/_kernels/cython_backend.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
            "cdivision": True,
        },
    )


setup(ext_modules=extensions())
