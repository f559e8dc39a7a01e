# Compiled implementation of the hot numeric kernels.
#
# Mirrors hsicssl._kernels.numpy_backend function-for-function; see that
# module for the contracts. All loops use fixed summation order, so results
# are deterministic for a fixed input.

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, sqrt

cnp.import_array()

NAME = "cython"


def standardize_columns(const double[:, ::1] a, double eps):
    cdef Py_ssize_t n = a.shape[0], d = a.shape[1]
    cdef cnp.ndarray[double, ndim=2] z = np.empty((n, d))
    cdef cnp.ndarray[double, ndim=1] mu = np.empty(d)
    cdef cnp.ndarray[double, ndim=1] sigma = np.empty(d)
    cdef double[:, ::1] zv = z
    cdef double[::1] muv = mu, sv = sigma
    cdef Py_ssize_t i, j
    cdef double m, s, diff, denom
    for j in range(d):
        m = 0.0
        for i in range(n):
            m += a[i, j]
        m /= n
        s = 0.0
        for i in range(n):
            diff = a[i, j] - m
            s += diff * diff
        s = sqrt(s / n)
        denom = s if s > eps else eps
        for i in range(n):
            zv[i, j] = (a[i, j] - m) / denom
        muv[j] = m
        sv[j] = s
    return z, mu, sigma


def standardize_backward(const double[:, ::1] grad_z, const double[:, ::1] z,
                         const double[::1] sigma, double eps):
    cdef Py_ssize_t n = grad_z.shape[0], d = grad_z.shape[1]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((n, d))
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t i, j
    cdef double gm, gzm, denom
    for j in range(d):
        gm = 0.0
        gzm = 0.0
        for i in range(n):
            gm += grad_z[i, j]
            gzm += grad_z[i, j] * z[i, j]
        gm /= n
        gzm /= n
        if sigma[j] < eps:
            for i in range(n):
                ov[i, j] = (grad_z[i, j] - gm) / eps
        else:
            denom = sigma[j]
            for i in range(n):
                ov[i, j] = (grad_z[i, j] - gm - z[i, j] * gzm) / denom
    return out


def cross_correlation(const double[:, ::1] x, const double[:, ::1] y):
    # ikj loop order keeps the inner loop on contiguous rows of y and c;
    # each c[i, j] still accumulates over k in increasing order.
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1], dy = y.shape[1]
    cdef cnp.ndarray[double, ndim=2] c = np.zeros((d, dy))
    cdef double[:, ::1] cv = c
    cdef Py_ssize_t i, j, k
    cdef double xi
    for k in range(n):
        for i in range(d):
            xi = x[k, i]
            for j in range(dy):
                cv[i, j] += xi * y[k, j]
    for i in range(d):
        for j in range(dy):
            cv[i, j] /= n
    return c


def gram_linear(const double[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1]
    cdef cnp.ndarray[double, ndim=2] k = np.empty((n, n))
    cdef double[:, ::1] kv = k
    cdef Py_ssize_t a, b, j
    cdef double s
    for a in range(n):
        for b in range(a, n):
            s = 0.0
            for j in range(d):
                s += x[a, j] * x[b, j]
            kv[a, b] = s
            kv[b, a] = s
    return k


def pairwise_sq_dists(const double[:, ::1] x):
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1]
    cdef cnp.ndarray[double, ndim=2] d2 = np.empty((n, n))
    cdef double[:, ::1] dv = d2
    cdef Py_ssize_t a, b, j
    cdef double s, diff
    for a in range(n):
        dv[a, a] = 0.0
        for b in range(a + 1, n):
            s = 0.0
            for j in range(d):
                diff = x[a, j] - x[b, j]
                s += diff * diff
            dv[a, b] = s
            dv[b, a] = s
    return d2


def rbf_from_sq_dists(const double[:, ::1] d2, double sigma):
    cdef Py_ssize_t n = d2.shape[0]
    cdef cnp.ndarray[double, ndim=2] k = np.empty((n, n))
    cdef double[:, ::1] kv = k
    cdef double inv = -1.0 / (2.0 * sigma * sigma)
    cdef Py_ssize_t a, b
    for a in range(n):
        for b in range(n):
            kv[a, b] = exp(d2[a, b] * inv)
    return k


def center_gram(const double[:, ::1] k):
    cdef Py_ssize_t n = k.shape[0]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((n, n))
    cdef double[:, ::1] ov = out
    cdef cnp.ndarray[double, ndim=1] row = np.zeros(n)
    cdef cnp.ndarray[double, ndim=1] col = np.zeros(n)
    cdef double[::1] rv = row, cv = col
    cdef Py_ssize_t a, b
    cdef double total = 0.0
    for a in range(n):
        for b in range(n):
            rv[a] += k[a, b]
            cv[b] += k[a, b]
            total += k[a, b]
    for a in range(n):
        rv[a] /= n
        cv[a] /= n
    total /= n * n
    for a in range(n):
        for b in range(n):
            ov[a, b] = k[a, b] - rv[a] - cv[b] + total
    return out


def hsic_trace_dot(const double[:, ::1] a, const double[:, ::1] b):
    cdef Py_ssize_t n = a.shape[0]
    cdef double s = 0.0
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(n):
            s += a[i, j] * b[j, i]
    return s / (n * n)


def bt_loss_terms(const double[:, ::1] c):
    cdef Py_ssize_t d = c.shape[0]
    cdef double on = 0.0, off = 0.0, e
    cdef Py_ssize_t i, j
    for i in range(d):
        e = 1.0 - c[i, i]
        on += e * e
        for j in range(d):
            if j != i:
                off += c[i, j] * c[i, j]
    return on, off


def hsic_ssl_loss_terms(const double[:, ::1] c):
    cdef Py_ssize_t d = c.shape[0]
    cdef double on = 0.0, off = 0.0, e
    cdef Py_ssize_t i, j
    for i in range(d):
        e = 1.0 - c[i, i]
        on += e * e
        for j in range(d):
            if j != i:
                e = 1.0 + c[i, j]
                off += e * e
    return on, off


def loss_grad_wrt_corr(const double[:, ::1] c, double lam, bint hsic_variant):
    cdef Py_ssize_t d = c.shape[0]
    cdef cnp.ndarray[double, ndim=2] g = np.empty((d, d))
    cdef double[:, ::1] gv = g
    cdef Py_ssize_t i, j
    for i in range(d):
        for j in range(d):
            if i == j:
                gv[i, j] = -2.0 * (1.0 - c[i, i])
            elif hsic_variant:
                gv[i, j] = (2.0 * lam) * (1.0 + c[i, j])
            else:
                gv[i, j] = (2.0 * lam) * c[i, j]
    return g
