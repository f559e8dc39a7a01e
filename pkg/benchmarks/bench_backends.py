#!/usr/bin/env python3
"""Time the compiled kernel backend against the NumPy fallback.

Usage: python benchmarks/bench_backends.py [--repeats 7] [--csv out.csv]

Reports the best-of-k wall time per kernel and shape. The compiled loops
win on small batches and elementwise kernels (less call overhead, fused
passes); NumPy delegates the big matrix products to BLAS, so expect it to
pull ahead as shapes grow.
"""

import argparse
import csv
import sys
import time

import numpy as np

from hsicssl._kernels import available_backends, get_backend


def make_cases(rng):
    cases = []
    for n, d in [(64, 32), (256, 128), (1024, 128)]:
        x = rng.standard_normal((n, d))
        y = rng.standard_normal((n, d))
        g = rng.standard_normal((n, d))
        k = x @ x.T
        c = rng.uniform(-1, 1, size=(d, d))
        sq = np.ascontiguousarray(k.max() - k)
        cases += [
            (f"standardize_columns n={n} d={d}",
             "standardize_columns", (x, 1e-8)),
            (f"standardize_backward n={n} d={d}",
             "standardize_backward", (g, x, np.abs(rng.standard_normal(d)) + 0.5, 1e-8)),
            (f"cross_correlation n={n} d={d}", "cross_correlation", (x, y)),
            (f"gram_linear n={n} d={d}", "gram_linear", (x,)),
            (f"pairwise_sq_dists n={n} d={d}", "pairwise_sq_dists", (x,)),
            (f"rbf_from_sq_dists n={n}", "rbf_from_sq_dists", (sq, 1.3)),
            (f"center_gram n={n}", "center_gram", (k,)),
            (f"hsic_trace_dot n={n}", "hsic_trace_dot", (k, k)),
            (f"bt_loss_terms d={d}", "bt_loss_terms", (c,)),
            (f"hsic_ssl_loss_terms d={d}", "hsic_ssl_loss_terms", (c,)),
            (f"loss_grad_wrt_corr d={d}", "loss_grad_wrt_corr", (c, 0.01, True)),
        ]
    return cases


def best_of(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=7)
    parser.add_argument("--csv", default=None, help="also write rows to this file")
    args = parser.parse_args(argv)

    backends = available_backends()
    if "cython" not in backends:
        print("note: compiled backend not built "
              "(python setup.py build_ext --inplace); timing numpy only")
    rng = np.random.default_rng(7)
    cases = make_cases(rng)

    rows = []
    header = f"{'kernel':<38}" + "".join(f"{b + ' (ms)':>14}" for b in backends)
    if len(backends) == 2:
        header += f"{'ratio np/cy':>14}"
    print(header)
    print("-" * len(header))
    for label, fname, fargs in cases:
        times = {}
        for b in backends:
            fn = getattr(get_backend(b), fname)
            fn(*fargs)  # warm up
            times[b] = best_of(fn, fargs, args.repeats)
        line = f"{label:<38}" + "".join(f"{times[b] * 1e3:>14.4f}" for b in backends)
        if len(backends) == 2:
            line += f"{times['numpy'] / times['cython']:>14.2f}"
        print(line)
        rows.append({"kernel": label,
                     **{b: repr(times[b]) for b in backends}})

    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)
        print(f"\nwrote {args.csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
