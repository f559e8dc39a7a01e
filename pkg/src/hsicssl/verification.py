"""Self-contained identity and oracle checks.

Every check re-derives its expected values through an independent route
(scalar loops, materialized centering matrix, central finite differences)
and compares the production path against it at a fixed tolerance. The CLI
`verify` subcommand runs all of them; the test suite asserts on the same
results. No check needs a network, external data, or more than a few
seconds.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import hsic, losses
from .features import cross_correlation, standardize
from .hsic import GramMatrix, KernelSpec, gram, hsic_empirical, hsic_linear_fast
from .losses import (LossKind, barlow_twins_loss, default_lambda,
                     hsic_ssl_loss, loss_gradients, loss_value,
                     squared_view_distance)

_MASTER_SEED = 0x5EED


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    observed: float   # worst error the check measured
    tolerance: float
    cases: int
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        msg = (f"[{status}] {self.name}: max_err={self.observed:.3e} "
               f"tol={self.tolerance:.1e} cases={self.cases}")
        if self.detail:
            msg += f" ({self.detail})"
        return msg


def _rng(tag: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[_MASTER_SEED, tag]))


# ---------------------------------------------------------------------------
# Independent oracle routines (deliberately dumb: scalar loops everywhere)
# ---------------------------------------------------------------------------

def standardize_oracle(a: np.ndarray, eps: float = 1e-8) -> np.ndarray:
    """Column standardization by explicit scalar loops."""
    a = np.asarray(a, dtype=np.float64)
    n, d = a.shape
    out = np.empty_like(a)
    for j in range(d):
        mean = sum(a[i, j] for i in range(n)) / n
        var = sum((a[i, j] - mean) ** 2 for i in range(n)) / n
        denom = max(math.sqrt(var), eps)
        for i in range(n):
            out[i, j] = (a[i, j] - mean) / denom
    return out


def cross_correlation_oracle(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """C = X^T Y / n by explicit triple loop."""
    n, d = x.shape
    c = np.zeros((d, y.shape[1]))
    for i in range(d):
        for j in range(y.shape[1]):
            s = 0.0
            for k in range(n):
                s += x[k, i] * y[k, j]
            c[i, j] = s / n
    return c


def gram_oracle(x: np.ndarray, spec: KernelSpec) -> np.ndarray:
    """Gram matrix by scalar loops (dot products / explicit exp)."""
    n, d = x.shape
    k = np.zeros((n, n))
    if spec.kind == "linear":
        for a in range(n):
            for b in range(n):
                k[a, b] = sum(x[a, j] * x[b, j] for j in range(d))
        return k
    sigma = spec.bandwidth
    if sigma is None:
        dists = sorted(
            math.sqrt(sum((x[a, j] - x[b, j]) ** 2 for j in range(d)))
            for a in range(n) for b in range(a + 1, n))
        sigma = float(np.median(dists))
    for a in range(n):
        for b in range(n):
            sq = sum((x[a, j] - x[b, j]) ** 2 for j in range(d))
            k[a, b] = math.exp(-sq / (2.0 * sigma * sigma))
    return k


def hsic_quadruple_sum_oracle(kx: np.ndarray, ky: np.ndarray) -> float:
    """tr(K_X H K_Y H) / n^2 by the literal four-index sum with H entrywise."""
    n = kx.shape[0]

    def h(a, b):
        return (1.0 if a == b else 0.0) - 1.0 / n

    total = 0.0
    for i in range(n):
        for j in range(n):
            for q in range(n):
                for r in range(n):
                    total += kx[i, j] * h(j, q) * ky[q, r] * h(r, i)
    return total / (n * n)


def bt_loss_oracle(c: np.ndarray, lam: float) -> tuple[float, float, float]:
    d = c.shape[0]
    on = sum((1.0 - c[i, i]) ** 2 for i in range(d))
    off = sum(c[i, j] ** 2 for i in range(d) for j in range(d) if i != j)
    return on + lam * off, on, off


def hsic_ssl_loss_oracle(c: np.ndarray, lam: float) -> tuple[float, float, float]:
    d = c.shape[0]
    on = sum((1.0 - c[i, i]) ** 2 for i in range(d))
    off = sum((1.0 + c[i, j]) ** 2 for i in range(d) for j in range(d) if i != j)
    return on + lam * off, on, off


def finite_difference_gradient(fn, a: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """Central finite differences of a scalar function of a matrix."""
    g = np.zeros_like(a)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            plus = a.copy()
            plus[i, j] += step
            minus = a.copy()
            minus[i, j] -= step
            g[i, j] = (fn(plus) - fn(minus)) / (2.0 * step)
    return g


def gradient_rel_error(analytic: np.ndarray, fd: np.ndarray) -> float:
    """Max per-entry |a - f| / max(|a|, |f|, 1e-3).

    The 1e-3 floor keeps finite-difference noise on near-zero entries from
    dominating what is otherwise a relative comparison.
    """
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(fd)), 1e-3)
    return float((np.abs(analytic - fd) / denom).max())


# ---------------------------------------------------------------------------
# Check families
# ---------------------------------------------------------------------------

def _seeded_pair(rng, n, d):
    x = standardize(rng.normal(size=(n, d)))
    y = standardize(rng.normal(size=(n, d)))
    return x, y


def check_linear_hsic_frobenius_identity(pairs: int = 200) -> CheckResult:
    """Fast path ||C||_F^2 vs tr(K_X H K_Y H)/n^2 with linear kernels."""
    rng = _rng(1)
    tol = 1e-9
    worst = 0.0
    shapes = [(2, 1), (2, 16), (64, 1), (64, 16)]
    while len(shapes) < pairs:
        shapes.append((int(rng.integers(2, 65)), int(rng.integers(1, 17))))
    lin = KernelSpec.linear()
    for n, d in shapes:
        x, y = _seeded_pair(rng, n, d)
        fast = hsic_linear_fast(x, y)
        emp = hsic_empirical(gram(x, lin), gram(y, lin))
        err = abs(fast - emp) / (1.0 + abs(emp))
        worst = max(worst, err)
    return CheckResult("linear_hsic_frobenius_identity", worst <= tol,
                       worst, tol, len(shapes))


def check_estimator_bruteforce_oracle() -> CheckResult:
    """Matrix-form estimator vs the literal four-index sum, both kernels."""
    rng = _rng(2)
    tol = 1e-10
    worst = 0.0
    cases = 0
    for n, d in [(4, 1), (5, 2), (6, 3), (8, 2)]:
        x, y = _seeded_pair(rng, n, d)
        for spec in (KernelSpec.linear(), KernelSpec.rbf(), KernelSpec.rbf(0.7)):
            kx, ky = gram(x, spec), gram(y, spec)
            got = hsic_empirical(kx, ky)
            want = hsic_quadruple_sum_oracle(kx.k, ky.k)
            worst = max(worst, abs(got - want))
            cases += 1
    return CheckResult("estimator_bruteforce_oracle", worst <= tol,
                       worst, tol, cases)


def check_distance_trace_identity(pairs: int = 100) -> CheckResult:
    """||X - Y||_F^2 == 2nd - 2n tr(C); self-pairs give tr(C) = d."""
    rng = _rng(3)
    tol = 1e-8
    worst = 0.0
    worst_trace = 0.0
    for _ in range(pairs):
        n = int(rng.integers(2, 65))
        d = int(rng.integers(1, 17))
        x, y = _seeded_pair(rng, n, d)
        dist, ident = squared_view_distance(x, y)
        worst = max(worst, abs(dist - ident) / (1.0 + dist))
        trace_self = float(np.trace(cross_correlation(x, x).c))
        worst_trace = max(worst_trace, abs(trace_self - d))
    passed = worst <= tol and worst_trace <= 1e-9
    return CheckResult("distance_trace_identity", passed, worst, tol, pairs,
                       f"self-pair trace err {worst_trace:.2e} (tol 1e-9)")


def check_analytic_gradients(instances_per_combo: int = 16) -> CheckResult:
    """Analytic gradients vs central finite differences (step 1e-5)."""
    rng = _rng(4)
    tol = 1e-5
    step = 1e-5
    worst = 0.0
    cases = 0
    for kind in (LossKind.BARLOW_TWINS, LossKind.HSIC_SSL):
        for through in (True, False):
            for _ in range(instances_per_combo):
                n = int(rng.integers(4, 13))
                d = int(rng.integers(1, 6))
                lam = default_lambda(d)
                a = rng.normal(size=(n, d)) * rng.uniform(0.5, 2.0)
                b = rng.normal(size=(n, d)) * rng.uniform(0.5, 2.0)
                if through:
                    rep = loss_gradients(a, b, kind, lam, True)
                    fd_x = finite_difference_gradient(
                        lambda m: loss_value(m, b, kind, lam), a, step)
                    fd_y = finite_difference_gradient(
                        lambda m: loss_value(a, m, kind, lam), b, step)
                else:
                    xs = standardize(a).data
                    ys = standardize(b).data
                    rep = loss_gradients(xs, ys, kind, lam, False)
                    fn = (hsic_ssl_loss if kind is LossKind.HSIC_SSL
                          else barlow_twins_loss)

                    def c_loss(xm, ym):
                        n_ = xm.shape[0]
                        return fn((xm.T @ ym) / n_, lam).total

                    fd_x = finite_difference_gradient(
                        lambda m: c_loss(m, ys), xs.copy(), step)
                    fd_y = finite_difference_gradient(
                        lambda m: c_loss(xs, m), ys.copy(), step)
                worst = max(worst, gradient_rel_error(rep.grad_x, fd_x),
                            gradient_rel_error(rep.grad_y, fd_y))
                cases += 1
    return CheckResult("analytic_gradient_check", worst <= tol, worst, tol,
                       cases, "central differences, step 1e-5")


def check_closed_form_loss_values() -> CheckResult:
    """Identity / all-ones correlation matrices hit their closed forms."""
    tol = 1e-12
    worst = 0.0
    cases = 0
    for d in (1, 2, 3, 8, 32):
        lam = default_lambda(d)
        eye = np.eye(d)
        ones = np.ones((d, d))
        expect = [
            (barlow_twins_loss(eye, lam).total, 0.0),
            (hsic_ssl_loss(eye, lam).total, lam.value * d * (d - 1)),
            (barlow_twins_loss(ones, lam).total, lam.value * d * (d - 1)),
            (hsic_ssl_loss(ones, lam).total, 4.0 * lam.value * d * (d - 1)),
        ]
        if d >= 2:
            opt = 2.0 * eye - ones   # diag +1, off-diag -1
            expect.append((hsic_ssl_loss(opt, lam).total, 0.0))
        for got, want in expect:
            worst = max(worst, abs(got - want))
            cases += 1
    return CheckResult("closed_form_loss_values", worst <= tol, worst, tol, cases)


def check_trivial_solution_values() -> CheckResult:
    """All-ones C maximizes ||C||_F^2 (= d^2) yet hsic_ssl stays positive."""
    tol = 1e-12
    worst = 0.0
    cases = 0
    failed = False
    for d in (2, 3, 8):
        lam = default_lambda(d)
        ones = np.ones((d, d))
        worst = max(worst, abs(hsic.frobenius_sq(ones) - d * d))
        penalty = hsic_ssl_loss(ones, lam).total
        worst = max(worst, abs(penalty - 4.0 * lam.value * d * (d - 1)))
        if not penalty > 0:
            failed = True
        cases += 3
    return CheckResult("trivial_solution_values", not failed and worst <= tol,
                       worst, tol, cases)


def check_centering_projector(pairs: int = 40) -> CheckResult:
    """H is an idempotent mean-remover and a no-op on mean-zero linear Grams."""
    rng = _rng(7)
    tol = 1e-9
    worst = 0.0
    for _ in range(pairs):
        n = int(rng.integers(2, 33))
        h = hsic.centering_matrix(n)
        worst = max(worst, float(np.abs(h @ h - h).max()))
        worst = max(worst, float(np.abs(h @ np.ones(n)).max()))
        x = standardize(rng.normal(size=(n, int(rng.integers(1, 9)))))
        k = gram(x, KernelSpec.linear()).k
        worst = max(worst, float(np.abs(k @ h - k).max()))
    return CheckResult("centering_projector", worst <= tol, worst, tol, pairs)


def check_standardize_idempotence(cases: int = 50) -> CheckResult:
    rng = _rng(8)
    tol = 1e-9
    worst = 0.0
    for _ in range(cases):
        n = int(rng.integers(2, 65))
        d = int(rng.integers(1, 17))
        raw = rng.normal(size=(n, d)) * 3.0 + rng.normal(size=d)
        once = standardize(raw)
        twice = standardize(once)
        worst = max(worst, float(np.abs(twice.data - once.data).max()))
    return CheckResult("standardize_idempotence", worst <= tol, worst, tol, cases)


def check_correlation_bounds(pairs: int = 120) -> CheckResult:
    """Entries of C stay within [-1, 1] up to rounding for unit-std views."""
    rng = _rng(9)
    tol = 1e-9
    worst = 0.0
    for _ in range(pairs):
        n = int(rng.integers(2, 65))
        d = int(rng.integers(1, 17))
        x, y = _seeded_pair(rng, n, d)
        c = cross_correlation(x, y).c
        worst = max(worst, max(0.0, float(np.abs(c).max()) - 1.0))
    return CheckResult("correlation_bounds", worst <= tol, worst, tol, pairs)


ALL_CHECKS = (
    check_linear_hsic_frobenius_identity,
    check_estimator_bruteforce_oracle,
    check_distance_trace_identity,
    check_analytic_gradients,
    check_closed_form_loss_values,
    check_trivial_solution_values,
    check_centering_projector,
    check_standardize_idempotence,
    check_correlation_bounds,
)


def run_all_checks() -> list[CheckResult]:
    return [fn() for fn in ALL_CHECKS]
