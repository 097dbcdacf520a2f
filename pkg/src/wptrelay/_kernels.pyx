# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Mirrors ``_kernels_py`` branch for branch."""
from libc.math cimport erfc, exp, log, sqrt, ldexp, INFINITY, isinf, M_PI

import numpy as np

from .errors import NoConvergence, RangeError, BracketError

cdef double SQRT2 = sqrt(2.0)
cdef double SQRT2PI = sqrt(2.0 * M_PI)
cdef double MILLS_CF_THRESHOLD = 30.0
cdef int MILLS_CF_TERMS = 40
cdef double MAX_EXP_ARG = 709.0
cdef int MAX_DOUBLINGS = 128


cdef inline double _mills(double z) nogil:
    cdef double t, half_sq
    cdef int j
    if z > MILLS_CF_THRESHOLD:
        t = z
        for j in range(MILLS_CF_TERMS, 0, -1):
            t = z + j / t
        return 1.0 / t
    half_sq = 0.5 * z * z
    if half_sq > MAX_EXP_ARG:
        return INFINITY
    return 0.5 * erfc(z / SQRT2) * SQRT2PI * exp(half_sq)


cdef inline double _vv(double p_si, double k, double sigma, double v) nogil:
    cdef double d = v - p_si
    cdef double z = log(k / d) / sigma
    return v + sigma * d * _mills(z)


cdef inline double _vv_deriv(double p_si, double k, double sigma, double v) nogil:
    cdef double z = log(k / (v - p_si)) / sigma
    cdef double m = _mills(z)
    if isinf(m):
        return INFINITY
    return 2.0 + m * (sigma - z)


cdef inline double _support_floor(double p_si) nogil:
    return p_si * (1.0 + 1e-15) + 1e-18


# status: 0 ok, 1 no bracket, 2 no convergence
cdef double _inverse(double p_si, double k, double sigma, double target,
                     double abs_tol, double rel_tol, int max_iter, int* status) nogil:
    cdef double lower = _support_floor(p_si)
    cdef double upper, f_lo, f_hi, mid, f_mid
    cdef int m = 0, it
    status[0] = 0
    if target <= _vv(p_si, k, sigma, lower):
        return lower
    upper = p_si + k
    while _vv(p_si, k, sigma, upper) < target:
        m += 1
        if m > MAX_DOUBLINGS:
            status[0] = 1
            return 0.0
        lower = upper
        upper = p_si + ldexp(k, m)
    f_lo = _vv(p_si, k, sigma, lower)
    f_hi = _vv(p_si, k, sigma, upper)
    if not (f_lo <= target and target <= f_hi):
        status[0] = 3
        return 0.0
    if f_lo == target:
        return lower
    if f_hi == target:
        return upper
    for it in range(max_iter):
        mid = 0.5 * (lower + upper)
        if upper - lower <= abs_tol + rel_tol * (mid if mid >= 0 else -mid):
            return mid
        f_mid = _vv(p_si, k, sigma, mid)
        if f_mid < target:
            lower = mid
        elif f_mid > target:
            upper = mid
        else:
            return mid
    status[0] = 2
    return 0.0


cdef _raise_status(int status, double target):
    if status == 1:
        raise NoConvergence(f"no bracket for target {target!r} after {MAX_DOUBLINGS} doublings")
    if status == 2:
        raise NoConvergence("bisection did not converge")
    if status == 3:
        raise BracketError(f"target {target!r} not bracketed")


def mills_ratio(double z):
    return _mills(z)


def virtual_valuation(double p_si, double k, double sigma, double v):
    return _vv(p_si, k, sigma, v)


def virtual_valuation_derivative(double p_si, double k, double sigma, double v):
    return _vv_deriv(p_si, k, sigma, v)


def support_floor(double p_si):
    return _support_floor(p_si)


def inverse_virtual_valuation(double p_si, double k, double sigma, double target,
                              double abs_tol, double rel_tol, int max_iter):
    cdef int status = 0
    cdef double s
    if not target > p_si:
        raise RangeError(f"target {target!r} must exceed p_si {p_si!r}")
    s = _inverse(p_si, k, sigma, target, abs_tol, rel_tol, max_iter, &status)
    if status:
        _raise_status(status, target)
    return s


def myerson_select(bids, p_si, k, sigma, double v0,
                   double abs_tol, double rel_tol, int max_iter):
    """Return ``(winner, payment)``; winner is -1 when the buyer keeps the job."""
    cdef Py_ssize_t n = len(bids), i
    cdef int best = -1, status = 0
    cdef double ci, c_best = INFINITY, c_second = INFINITY, target, payment
    if n == 0:
        return -1, 0.0
    for i in range(n):
        ci = _vv(p_si[i], k[i], sigma[i], bids[i])
        if ci < c_best:
            c_second = c_best
            c_best = ci
            best = <int>i
        elif ci < c_second:
            c_second = ci
    if v0 < c_best:
        return -1, 0.0
    target = v0 if v0 < c_second else c_second
    payment = _inverse(p_si[best], k[best], sigma[best], target,
                       abs_tol, rel_tol, max_iter, &status)
    if status:
        _raise_status(status, target)
    return best, payment


def virtual_valuation_many(p_si, k, sigma, v):
    arrays = np.broadcast_arrays(*(np.asarray(a, dtype=np.float64) for a in (p_si, k, sigma, v)))
    shape = arrays[3].shape
    cdef double[::1] pp = np.ascontiguousarray(arrays[0]).ravel()
    cdef double[::1] kk = np.ascontiguousarray(arrays[1]).ravel()
    cdef double[::1] ss = np.ascontiguousarray(arrays[2]).ravel()
    cdef double[::1] vv = np.ascontiguousarray(arrays[3]).ravel()
    out = np.empty(vv.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(vv.shape[0]):
            o[i] = _vv(pp[i], kk[i], ss[i], vv[i])
    return out.reshape(shape)


def virtual_valuation_derivative_many(p_si, k, sigma, v):
    arrays = np.broadcast_arrays(*(np.asarray(a, dtype=np.float64) for a in (p_si, k, sigma, v)))
    shape = arrays[3].shape
    cdef double[::1] pp = np.ascontiguousarray(arrays[0]).ravel()
    cdef double[::1] kk = np.ascontiguousarray(arrays[1]).ravel()
    cdef double[::1] ss = np.ascontiguousarray(arrays[2]).ravel()
    cdef double[::1] vv = np.ascontiguousarray(arrays[3]).ravel()
    out = np.empty(vv.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(vv.shape[0]):
            o[i] = _vv_deriv(pp[i], kk[i], ss[i], vv[i])
    return out.reshape(shape)
