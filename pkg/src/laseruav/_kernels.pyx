# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled array kernels. Same signatures and semantics as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport (exp, log, log1p, sqrt, erfc, fabs,
                        isnan, isinf, INFINITY, NAN, M_E, M_SQRT2)

cnp.import_array()

SIGMA2_FLOOR = 1e-12
cdef double _SIGMA2_FLOOR = 1e-12
cdef double _BRANCH_POINT = -0.36787944117144233


cpdef double lambert_w0(double x):
    cdef double w, p, l1, l2, ew, f, w1, dw
    cdef int i
    if isnan(x) or x < _BRANCH_POINT:
        return NAN
    if x == 0.0:
        return 0.0
    if isinf(x):
        return INFINITY
    if x < -0.25:
        p = 2.0 * (M_E * x + 1.0)
        p = sqrt(p) if p > 0.0 else 0.0
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
        if p < 1e-8:
            return w
    elif x < M_E:
        w = log1p(x)
    else:
        l1 = log(x)
        l2 = log(l1)
        w = l1 - l2 + l2 / l1
    for i in range(64):
        ew = exp(w)
        f = w * ew - x
        w1 = w + 1.0
        if w1 == 0.0:
            break
        dw = f / (ew * w1 - (w + 2.0) * f / (2.0 * w1))
        w -= dw
        if fabs(dw) <= 4e-16 * (1.0 + fabs(w)):
            break
    return w if w > -1.0 else -1.0


cdef inline double _prec(double r, double altitude, double base, double beam,
                         double spread, double alpha) noexcept nogil:
    cdef double d = sqrt(r * r + altitude * altitude)
    cdef double den = beam + d * spread
    return base * exp(-alpha * d) / (den * den)


def received_power(r, double altitude, double base, double beam, double spread,
                   double alpha):
    cdef double[::1] rv = np.ascontiguousarray(r, dtype=np.float64).ravel()
    out = np.empty(rv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(rv.shape[0]):
            ov[i] = _prec(rv[i], altitude, base, beam, spread, alpha)
    return out.reshape(np.shape(r))


def exceedance(r, double altitude, double base, double beam, double spread,
               double alpha, double threshold, double sigma_coef, bint slant):
    cdef double[::1] rv = np.ascontiguousarray(r, dtype=np.float64).ravel()
    out = np.empty(rv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    cdef double d, den, log_x, log_dist, s2, s
    # log x = log(T / p_rec), expanded so each element costs two logs
    cdef double log_ratio = log(threshold) - log(base)
    cdef double log_coef = log(sigma_coef) if sigma_coef > 0.0 else -INFINITY
    cdef double k = 11.0 / 6.0
    cdef double inv = 1.0 / (2.0 * M_SQRT2)
    with nogil:
        for i in range(rv.shape[0]):
            d = sqrt(rv[i] * rv[i] + altitude * altitude)
            den = beam + d * spread
            log_x = log_ratio + alpha * d + 2.0 * log(den)
            log_dist = log(d) if slant else log(rv[i])
            s2 = exp(log_coef + k * log_dist)
            if s2 < _SIGMA2_FLOOR:
                ov[i] = 1.0 if log_x < 0.0 else 0.0
            else:
                s = sqrt(s2)
                ov[i] = 0.5 * erfc((log_x + 2.0 * s2) * inv / s)
    return out.reshape(np.shape(r))


def mc_counts(r, h, double altitude, double base, double beam, double spread,
              double alpha, double harvest_fraction, double consumption,
              double snr_gain, double beta):
    cdef double[::1] rv = np.ascontiguousarray(r, dtype=np.float64).ravel()
    cdef double[::1] hv = np.ascontiguousarray(h, dtype=np.float64).ravel()
    if rv.shape[0] != hv.shape[0]:
        raise ValueError("r and h must have the same length")
    cdef Py_ssize_t i
    cdef long long n_e = 0, n_s = 0, n_j = 0
    cdef double p
    cdef bint e, s
    with nogil:
        for i in range(rv.shape[0]):
            p = _prec(rv[i], altitude, base, beam, spread, alpha)
            e = hv[i] * harvest_fraction * p > consumption
            s = snr_gain * hv[i] * p > beta
            n_e += e
            n_s += s
            n_j += e and s
    return int(n_e), int(n_s), int(n_j)


def nearest_norms(x, y, offsets):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef long long[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef Py_ssize_t n = off.shape[0] - 1
    out = np.empty(n)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, j
    cdef double best, v
    with nogil:
        for i in range(n):
            best = INFINITY
            for j in range(off[i], off[i + 1]):
                v = xv[j] * xv[j] + yv[j] * yv[j]
                if v < best:
                    best = v
            ov[i] = sqrt(best)
    return out
