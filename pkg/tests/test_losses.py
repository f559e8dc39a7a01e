import numpy as np
import pytest

from hsicssl._kernels import loss_grad_wrt_corr
from hsicssl.errors import DimensionError, InvalidInputError
from hsicssl.features import cross_correlation, standardize
from hsicssl.losses import (Lambda, LambdaOrigin, LossKind, barlow_twins_loss,
                            default_lambda, hsic_ssl_loss, loss_gradients,
                            loss_value, squared_view_distance)
from hsicssl.verification import (bt_loss_oracle, finite_difference_gradient,
                                  gradient_rel_error, hsic_ssl_loss_oracle)


def seeded_views(seed, n, d, standardized=True):
    gen = np.random.Generator(np.random.Philox(key=[seed, 1]))
    a = gen.normal(size=(n, d)) * gen.uniform(0.5, 2.0)
    b = gen.normal(size=(n, d)) * gen.uniform(0.5, 2.0)
    if standardized:
        return standardize(a), standardize(b)
    return a, b


# --- closed forms -----------------------------------------------------------

@pytest.mark.parametrize("d", [1, 2, 5, 16])
def test_barlow_twins_zero_at_identity(d):
    terms = barlow_twins_loss(np.eye(d), default_lambda(d))
    assert terms.total == 0.0
    assert terms.on_diag == 0.0
    assert terms.off_diag == 0.0


def test_barlow_twins_all_ones_3x3():
    terms = barlow_twins_loss(np.ones((3, 3)), Lambda(1.0 / 3.0))
    assert terms.on_diag == 0.0
    assert terms.off_diag == 6.0
    assert terms.total == pytest.approx(2.0, abs=1e-12)


def test_hsic_ssl_zero_at_its_minimizer():
    c = np.array([[1.0, -1.0], [-1.0, 1.0]])
    terms = hsic_ssl_loss(c, Lambda(0.37))
    assert terms.total == 0.0


def test_hsic_ssl_identity_d4():
    terms = hsic_ssl_loss(np.eye(4), Lambda(0.25))
    assert terms.on_diag == 0.0
    assert terms.off_diag == 12.0
    assert terms.total == pytest.approx(3.0, abs=1e-12)


def test_losses_match_double_loop_oracle():
    x, y = seeded_views(31, 32, 8)
    c = cross_correlation(x, y).c
    for lam in (0.005, 1.0 / 8.0):
        got = barlow_twins_loss(c, lam)
        want = bt_loss_oracle(c, lam)
        assert got.total == pytest.approx(want[0], abs=1e-12)
        assert got.on_diag == pytest.approx(want[1], abs=1e-12)
        assert got.off_diag == pytest.approx(want[2], abs=1e-12)
        got = hsic_ssl_loss(c, lam)
        want = hsic_ssl_loss_oracle(c, lam)
        assert got.total == pytest.approx(want[0], abs=1e-12)
        assert got.off_diag == pytest.approx(want[2], abs=1e-12)


def test_non_square_correlation_rejected():
    with pytest.raises(DimensionError):
        barlow_twins_loss(np.zeros((2, 3)), 0.1)
    with pytest.raises(DimensionError):
        hsic_ssl_loss(np.zeros((2, 3)), 0.1)


# --- lambda -----------------------------------------------------------------

def test_lambda_validation():
    with pytest.raises(InvalidInputError):
        Lambda(0.0)
    with pytest.raises(InvalidInputError):
        Lambda(-1.0)
    lam = Lambda(1.0 / 4.0, LambdaOrigin.ONE_OVER_D)
    with pytest.raises(InvalidInputError):
        lam.check_dim(8)
    lam.check_dim(4)


@pytest.mark.parametrize("d,value", [(128, 1.0 / 128.0), (1, 1.0), (2048, 1.0 / 2048.0)])
def test_default_lambda(d, value):
    lam = default_lambda(d)
    assert lam.value == value
    assert lam.origin is LambdaOrigin.ONE_OVER_D


def test_default_lambda_rejects_zero():
    with pytest.raises(InvalidInputError):
        default_lambda(0)


# --- algebraic relations ----------------------------------------------------

def test_on_diagonal_terms_identical(rng):
    c = rng.uniform(-1, 1, size=(6, 6))
    assert barlow_twins_loss(c, 0.3).on_diag == hsic_ssl_loss(c, 0.3).on_diag


def test_off_diagonal_relation(rng):
    # off_hsic - off_bt == sum_{i != j} (1 + 2 C_ij)
    for _ in range(20):
        d = int(rng.integers(1, 10))
        c = rng.uniform(-1, 1, size=(d, d))
        diff = hsic_ssl_loss(c, 1.0).off_diag - barlow_twins_loss(c, 1.0).off_diag
        off = ~np.eye(d, dtype=bool)
        want = float((1.0 + 2.0 * c[off]).sum())
        assert diff == pytest.approx(want, abs=1e-10)


def test_losses_nonnegative(rng):
    for _ in range(30):
        d = int(rng.integers(1, 12))
        c = rng.uniform(-1, 1, size=(d, d))
        assert barlow_twins_loss(c, 0.01).total >= 0.0
        assert hsic_ssl_loss(c, 0.01).total >= 0.0


def test_trivial_solution_exposure():
    # all-ones C maximizes ||C||_F^2 but hsic_ssl still penalizes it
    for d in (2, 3, 8):
        lam = default_lambda(d)
        ones = np.ones((d, d))
        assert float((ones * ones).sum()) == d * d
        penalty = hsic_ssl_loss(ones, lam).total
        assert penalty == pytest.approx(4.0 * lam.value * d * (d - 1), abs=1e-12)
        assert penalty > 0.0


def test_row_permutation_leaves_losses_unchanged(rng):
    # mathematically exact; summation-order rounding allows ~1e-12 relative
    x, y = seeded_views(32, 20, 5)
    perm = rng.permutation(20)
    c = cross_correlation(x, y).c
    cp = cross_correlation(standardize(x.data[perm]), standardize(y.data[perm])).c
    for fn in (barlow_twins_loss, hsic_ssl_loss):
        a = fn(c, 0.2).total
        b = fn(cp, 0.2).total
        assert b == pytest.approx(a, rel=1e-12, abs=1e-12)


# --- gradients --------------------------------------------------------------

def test_gradient_zero_at_self_pair_d1():
    x = standardize([[1.0], [-1.0]])
    rep = loss_gradients(x, x, LossKind.BARLOW_TWINS, 1.0)
    assert np.all(rep.grad_x == 0.0)
    assert np.all(rep.grad_y == 0.0)
    assert rep.total == 0.0


@pytest.mark.parametrize("kind", [LossKind.BARLOW_TWINS, LossKind.HSIC_SSL])
@pytest.mark.parametrize("through", [True, False])
def test_gradients_match_finite_differences(kind, through):
    a, b = seeded_views(33, 8, 3, standardized=False)
    lam = default_lambda(3)
    if through:
        rep = loss_gradients(a, b, kind, lam, True)
        fd_x = finite_difference_gradient(lambda m: loss_value(m, b, kind, lam), a)
        fd_y = finite_difference_gradient(lambda m: loss_value(a, m, kind, lam), b)
    else:
        xs, ys = standardize(a).data, standardize(b).data
        rep = loss_gradients(xs, ys, kind, lam, False)
        fn = hsic_ssl_loss if kind is LossKind.HSIC_SSL else barlow_twins_loss

        def c_loss(xm, ym):
            return fn((xm.T @ ym) / xm.shape[0], lam).total

        fd_x = finite_difference_gradient(lambda m: c_loss(m, ys), xs.copy())
        fd_y = finite_difference_gradient(lambda m: c_loss(xs, m), ys.copy())
    assert gradient_rel_error(rep.grad_x, fd_x) <= 1e-5
    assert gradient_rel_error(rep.grad_y, fd_y) <= 1e-5


def test_off_diagonal_gradient_scales_exactly_with_lambda(rng):
    c = np.ascontiguousarray(rng.uniform(-1, 1, size=(6, 6)))
    for hsic_variant in (False, True):
        g1 = loss_grad_wrt_corr(c, 0.05, hsic_variant)
        g2 = loss_grad_wrt_corr(c, 0.10, hsic_variant)
        off = ~np.eye(6, dtype=bool)
        assert np.array_equal(g2[off], 2.0 * g1[off])
        assert np.array_equal(np.diagonal(g2), np.diagonal(g1))


def test_public_gradient_linear_in_lambda():
    x, y = seeded_views(34, 10, 4)
    kind = LossKind.BARLOW_TWINS
    g1 = loss_gradients(x, y, kind, 0.1).grad_x
    g2 = loss_gradients(x, y, kind, 0.2).grad_x
    g3 = loss_gradients(x, y, kind, 0.3).grad_x
    np.testing.assert_allclose(g3 - g2, g2 - g1, rtol=0, atol=1e-14)


def test_loss_report_decomposition():
    x, y = seeded_views(35, 16, 4)
    lam = Lambda(0.07)
    rep = loss_gradients(x, y, LossKind.HSIC_SSL, lam)
    assert rep.total == pytest.approx(rep.on_diag + lam.value * rep.off_diag,
                                      abs=1e-10)
    assert np.isfinite(rep.grad_x).all() and np.isfinite(rep.grad_y).all()


def test_loss_gradients_shape_mismatch():
    x, _ = seeded_views(36, 6, 2)
    y, _ = seeded_views(36, 6, 3)
    with pytest.raises(DimensionError):
        loss_gradients(x, y, LossKind.BARLOW_TWINS, 0.1)


# --- squared view distance --------------------------------------------------

def test_squared_view_distance_self_pair():
    x, _ = seeded_views(37, 16, 4)
    dist, ident = squared_view_distance(x, x)
    assert dist == 0.0
    trace_c = float(np.trace(cross_correlation(x, x).c))
    assert abs(trace_c - x.d) <= 1e-9
    assert abs(ident) <= 1e-9 * 2 * x.n  # 2 n d - 2 n tr(C) with tr ~ d


def test_squared_view_distance_anticorrelated_pair():
    x = standardize([[1.0], [-1.0]])
    y = standardize([[-1.0], [1.0]])
    dist, ident = squared_view_distance(x, y)
    assert dist == 8.0
    assert ident == 8.0


def test_squared_view_distance_matches_elementwise_oracle():
    x, y = seeded_views(38, 16, 4)
    dist, ident = squared_view_distance(x, y)
    want = sum((x.data[i, j] - y.data[i, j]) ** 2
               for i in range(16) for j in range(4))
    assert dist == pytest.approx(want, rel=1e-12)
    assert ident == pytest.approx(dist, rel=1e-8)


def test_squared_view_distance_property(rng):
    for _ in range(100):
        n = int(rng.integers(2, 65))
        d = int(rng.integers(1, 17))
        x = standardize(rng.normal(size=(n, d)))
        y = standardize(rng.normal(size=(n, d)))
        dist, ident = squared_view_distance(x, y)
        assert abs(dist - ident) <= 1e-8 * (1.0 + dist)


def test_squared_view_distance_shape_mismatch():
    x, _ = seeded_views(39, 8, 2)
    y, _ = seeded_views(39, 8, 4)
    with pytest.raises(DimensionError):
        squared_view_distance(x, y)
