"""Standard-normal special functions and a bracketed bisection solver.

These are the pure-Python reference implementations. The compiled kernels in
``_kernels.pyx`` reimplement ``mills_ratio`` with the same branch points so the
two backends agree to rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import BracketError, NoConvergence

SQRT2 = math.sqrt(2.0)
SQRT2PI = math.sqrt(2.0 * math.pi)
INV_SQRT2PI = 1.0 / SQRT2PI

# Above this z the Mills ratio switches to its continued fraction.
MILLS_CF_THRESHOLD = 30.0
MILLS_CF_TERMS = 40
# exp(z*z/2) overflows a double beyond this half-square.
_MAX_EXP_ARG = 709.0


@dataclass(frozen=True)
class BisectionSpec:
    """Search interval and stopping rule for :func:`bisect`.

    The returned point satisfies ``|x - x*| <= abs_tol + rel_tol * |x*|``.
    """

    lo: float = 0.0
    hi: float = 1.0
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_iter: int = 200

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be > 0")
        if not self.rel_tol >= 0:
            raise ValueError("rel_tol must be >= 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")

    def with_bracket(self, lo: float, hi: float) -> "BisectionSpec":
        return BisectionSpec(lo, hi, self.abs_tol, self.rel_tol, self.max_iter)


DEFAULT_BISECTION = BisectionSpec()


def std_normal_pdf(z: float) -> float:
    return INV_SQRT2PI * math.exp(-0.5 * z * z)


def std_normal_cdf(z: float) -> float:
    # erfc keeps full relative precision in both tails.
    return 0.5 * math.erfc(-z / SQRT2)


def _mills_continued_fraction(z: float) -> float:
    t = z
    for j in range(MILLS_CF_TERMS, 0, -1):
        t = z + j / t
    return 1.0 / t


def mills_ratio(z: float) -> float:
    """Return ``(1 - Phi(z)) / phi(z)`` for the standard normal.

    The upper tail is taken from ``erfc`` directly, never as ``1 - Phi``.
    For ``z > 30`` a Laplace continued fraction is used, and far in the lower
    tail, where ``phi`` underflows, the ratio is reported as ``inf``.
    """
    if z > MILLS_CF_THRESHOLD:
        return _mills_continued_fraction(z)
    half_sq = 0.5 * z * z
    if half_sq > _MAX_EXP_ARG:
        return math.inf
    return 0.5 * math.erfc(z / SQRT2) * SQRT2PI * math.exp(half_sq)


def bisect(f: Callable[[float], float], target: float,
           spec: BisectionSpec = DEFAULT_BISECTION) -> float:
    """Solve ``f(x) = target`` for strictly increasing ``f`` on ``[lo, hi]``.

    Raises :class:`BracketError` when ``target`` is outside
    ``[f(lo), f(hi)]`` and :class:`NoConvergence` when the interval has not
    shrunk below tolerance after ``max_iter`` halvings.
    """
    lo, hi = spec.lo, spec.hi
    f_lo, f_hi = f(lo), f(hi)
    if not f_lo <= target <= f_hi:
        raise BracketError(
            f"target {target!r} outside [f(lo), f(hi)] = [{f_lo!r}, {f_hi!r}]")
    if f_lo == target:
        return lo
    if f_hi == target:
        return hi
    for _ in range(spec.max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= spec.abs_tol + spec.rel_tol * abs(mid):
            return mid
        f_mid = f(mid)
        if f_mid < target:
            lo = mid
        elif f_mid > target:
            hi = mid
        else:
            return mid
    raise NoConvergence(
        f"bisection did not converge in {spec.max_iter} iterations "
        f"(bracket [{lo!r}, {hi!r}])")
