"""NumPy implementation of the hot numeric kernels.

This is the fallback backend; ``hsicssl._kernels.cython_backend`` implements
the same functions with C loops. Both operate on C-contiguous float64 arrays
and agree to floating-point rounding (summation order may differ).
"""

import numpy as np

NAME = "numpy"


def standardize_columns(a, eps):
    """Per-column (x - mean) / max(std, eps) with population std.

    Returns (z, mean, std) where std is the unguarded population std, so the
    caller can detect which columns hit the eps guard.
    """
    mu = a.mean(axis=0)
    centered = a - mu
    sigma = np.sqrt((centered * centered).mean(axis=0))
    z = centered / np.maximum(sigma, eps)
    return z, mu, sigma


def standardize_backward(grad_z, z, sigma, eps):
    """Backward pass of standardize_columns w.r.t. its input.

    For a column with std >= eps the divisor is the (input-dependent) std:

        dL/da = (g - mean(g) - z * mean(g * z)) / sigma

    For a guarded column the divisor is the constant eps and only the mean
    couples the samples:

        dL/da = (g - mean(g)) / eps
    """
    g_mean = grad_z.mean(axis=0)
    gz_mean = (grad_z * z).mean(axis=0)
    guarded = sigma < eps
    denom = np.where(guarded, eps, sigma)
    grad_a = (grad_z - g_mean - z * np.where(guarded, 0.0, gz_mean)) / denom
    return grad_a


def cross_correlation(x, y):
    """C = X^T Y / n."""
    n = x.shape[0]
    return (x.T @ y) / n


def gram_linear(x):
    """Linear-kernel Gram matrix X X^T."""
    return x @ x.T


def pairwise_sq_dists(x):
    """Squared Euclidean distances between rows; diagonal is exactly zero."""
    sq = (x * x).sum(axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


def rbf_from_sq_dists(d2, sigma):
    """Gaussian kernel exp(-d2 / (2 sigma^2)); unit diagonal by construction."""
    return np.exp(d2 / (-2.0 * sigma * sigma))


def center_gram(k):
    """Double-center a square matrix: subtract row/column means, add back the
    grand mean. Equals H K H with H = I - (1/n) 1 1^T, without materializing H.
    """
    row = k.mean(axis=1, keepdims=True)
    col = k.mean(axis=0, keepdims=True)
    return k - row - col + k.mean()

def hsic_trace_dot(a, b):
    """tr(A B) / n^2 for square A, B of size n."""
    n = a.shape[0]
    return float((a * b.T).sum() / (n * n))


def bt_loss_terms(c):
    """Redundancy-reduction terms: sum_i (1 - C_ii)^2 and sum_{i != j} C_ij^2."""
    diag = np.diagonal(c)
    on = float(((1.0 - diag) ** 2).sum())
    off = float((c * c).sum() - (diag * diag).sum())
    return on, off


def hsic_ssl_loss_terms(c):
    """Same on-diagonal term, but off-diagonal entries pulled to -1:
    sum_i (1 - C_ii)^2 and sum_{i != j} (1 + C_ij)^2.
    """
    diag = np.diagonal(c)
    on = float(((1.0 - diag) ** 2).sum())
    plus = 1.0 + c
    off = float((plus * plus).sum() - ((1.0 + diag) ** 2).sum())
    return on, off


def loss_grad_wrt_corr(c, lam, hsic_variant):
    """Gradient of on_diag + lam * off_diag w.r.t. the correlation matrix."""
    d = c.shape[0]
    if hsic_variant:
        g = (2.0 * lam) * (1.0 + c)
    else:
        g = (2.0 * lam) * c
    idx = np.arange(d)
    g[idx, idx] = -2.0 * (1.0 - np.diagonal(c))
    return g
