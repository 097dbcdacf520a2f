"""Pure-Python hot kernels; the fallback when ``_kernels`` is not compiled.

Every function here has a twin of the same name and signature in
``_kernels.pyx``. Valuation models are passed unpacked as
``(p_si, k, sigma)`` floats so the compiled path never touches Python objects.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import NoConvergence, RangeError
from .numerics import BisectionSpec, bisect, mills_ratio

MAX_DOUBLINGS = 128


def virtual_valuation(p_si, k, sigma, v):
    d = v - p_si
    z = math.log(k / d) / sigma
    return v + sigma * d * mills_ratio(z)


def virtual_valuation_derivative(p_si, k, sigma, v):
    z = math.log(k / (v - p_si)) / sigma
    m = mills_ratio(z)
    if math.isinf(m):
        return math.inf
    return 2.0 + m * (sigma - z)


def support_floor(p_si):
    return p_si * (1.0 + 1e-15) + 1e-18


def inverse_virtual_valuation(p_si, k, sigma, target, abs_tol, rel_tol, max_iter):
    if not target > p_si:
        raise RangeError(f"target {target!r} must exceed p_si {p_si!r}")
    lower = support_floor(p_si)

    def c(s):
        return virtual_valuation(p_si, k, sigma, s)

    if target <= c(lower):
        return lower
    m = 0
    upper = p_si + k
    while c(upper) < target:
        m += 1
        if m > MAX_DOUBLINGS:
            raise NoConvergence(f"no bracket for target {target!r} after {MAX_DOUBLINGS} doublings")
        lower = upper
        upper = p_si + math.ldexp(k, m)
    return bisect(c, target, BisectionSpec(lower, upper, abs_tol, rel_tol, max_iter))


def myerson_select(bids, p_si, k, sigma, v0, abs_tol, rel_tol, max_iter):
    """Return ``(winner, payment)``; winner is -1 when the buyer keeps the job."""
    n = len(bids)
    if n == 0:
        return -1, 0.0
    best = -1
    c_best = math.inf
    c_second = math.inf
    for i in range(n):
        ci = virtual_valuation(p_si[i], k[i], sigma[i], bids[i])
        if ci < c_best:
            c_second = c_best
            c_best = ci
            best = i
        elif ci < c_second:
            c_second = ci
    if v0 < c_best:
        return -1, 0.0
    target = min(v0, c_second)
    payment = inverse_virtual_valuation(
        p_si[best], k[best], sigma[best], target, abs_tol, rel_tol, max_iter)
    return best, payment


def virtual_valuation_many(p_si, k, sigma, v):
    p_si, k, sigma, v = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (p_si, k, sigma, v)))
    out = np.empty(v.shape)
    flat = out.reshape(-1)
    for i, args in enumerate(zip(p_si.ravel(), k.ravel(), sigma.ravel(), v.ravel())):
        flat[i] = virtual_valuation(*args)
    return out


def virtual_valuation_derivative_many(p_si, k, sigma, v):
    p_si, k, sigma, v = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (p_si, k, sigma, v)))
    out = np.empty(v.shape)
    flat = out.reshape(-1)
    for i, args in enumerate(zip(p_si.ravel(), k.ravel(), sigma.ravel(), v.ravel())):
        flat[i] = virtual_valuation_derivative(*args)
    return out
