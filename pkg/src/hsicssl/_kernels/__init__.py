"""Kernel backend selection.

The hot numeric kernels exist twice: a Cython extension and a NumPy fallback
with identical signatures. The compiled one is used when importable; set
``HSICSSL_BACKEND=numpy`` or ``HSICSSL_BACKEND=cython`` to force a choice.
`benchmarks/bench_backends.py` compares the two.
"""

import os

from ..errors import BackendError
from . import numpy_backend

try:
    from . import cython_backend
except ImportError:
    cython_backend = None

_BACKENDS = {"numpy": numpy_backend, "cython": cython_backend}


def _select():
    forced = os.environ.get("HSICSSL_BACKEND", "").strip().lower()
    if forced:
        if forced not in _BACKENDS:
            raise BackendError(f"unknown backend {forced!r}; use numpy or cython")
        mod = _BACKENDS[forced]
        if mod is None:
            raise BackendError("cython backend requested but the extension is "
                               "not built (run: python setup.py build_ext --inplace)")
        return mod
    return cython_backend if cython_backend is not None else numpy_backend


active = _select()


def backend_name() -> str:
    """Name of the backend the package is currently running on."""
    return active.NAME


def available_backends() -> tuple[str, ...]:
    return tuple(name for name, mod in _BACKENDS.items() if mod is not None)


def get_backend(name: str):
    """Fetch a specific backend module (for tests and benchmarks)."""
    if name not in _BACKENDS:
        raise BackendError(f"unknown backend {name!r}")
    mod = _BACKENDS[name]
    if mod is None:
        raise BackendError(f"backend {name!r} is not available")
    return mod


standardize_columns = active.standardize_columns
standardize_backward = active.standardize_backward
cross_correlation = active.cross_correlation
gram_linear = active.gram_linear
pairwise_sq_dists = active.pairwise_sq_dists
rbf_from_sq_dists = active.rbf_from_sq_dists
center_gram = active.center_gram
hsic_trace_dot = active.hsic_trace_dot
bt_loss_terms = active.bt_loss_terms
hsic_ssl_loss_terms = active.hsic_ssl_loss_terms
loss_grad_wrt_corr = active.loss_grad_wrt_corr
