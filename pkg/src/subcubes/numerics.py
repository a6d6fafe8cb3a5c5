"""Shared scalar math: binary entropy/KL, bracketed roots, 1D maximization."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

LN2 = math.log(2.0)
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Tolerances:
    root_tol: float = 1e-12
    opt_tol: float = 1e-10
    grid_points: int = 4096

    def __post_init__(self):
        if self.root_tol <= 0 or self.opt_tol <= 0:
            raise ValueError("tolerances must be strictly positive")
        if self.grid_points < 64:
            raise ValueError("grid_points must be >= 64")


DEFAULT_TOL = Tolerances()


def binary_entropy(x: float) -> float:
    """H(x) = -x log2 x - (1-x) log2 (1-x), with 0 log 0 = 0. In bits."""
    if x < 0.0 or x > 1.0:
        raise ValueError(f"binary_entropy: x={x} outside [0,1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -(x * math.log2(x) + (1.0 - x) * math.log2(1.0 - x))


def binary_kl(x: float, y: float) -> float:
    """D(x||y) in bits. Inputs that would force +inf are a domain error."""
    if x < 0.0 or x > 1.0:
        raise ValueError(f"binary_kl: x={x} outside [0,1]")
    if y < 0.0 or y > 1.0:
        raise ValueError(f"binary_kl: y={y} outside [0,1]")
    if y == 0.0 or y == 1.0:
        if x == y:
            return 0.0
        raise ValueError(f"binary_kl: D({x}||{y}) is infinite")
    d = 0.0
    if x > 0.0:
        d += x * math.log2(x / y)
    if x < 1.0:
        d += (1.0 - x) * math.log2((1.0 - x) / (1.0 - y))
    return d


def find_root(f: Callable[[float], float], lo: float, hi: float,
              tol: Tolerances = DEFAULT_TOL) -> float:
    """Bisection on [lo, hi]; requires a sign change (or a zero endpoint)."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise ValueError(f"find_root: no bracket, f({lo})={flo}, f({hi})={fhi}")
    while hi - lo > tol.root_tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:  # hit float resolution
            break
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if flo * fmid < 0.0:
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def _golden_max(f, lo, hi, xtol):
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def maximize_1d(f: Callable[[float], float], lo: float, hi: float,
                tol: Tolerances = DEFAULT_TOL) -> tuple[float, float]:
    """Dense grid scan then golden-section refinement around the best cell.

    The grid stage matters: the objective may peak at a domain boundary.
    Returns (argmax, max).
    """
    if not lo < hi:
        raise ValueError(f"maximize_1d: invalid interval [{lo}, {hi}]")
    n = DEFAULT_TOL.grid_points if tol is None else tol.grid_points
    step = (hi - lo) / n
    best_i, best_v = 0, -math.inf
    for i in range(n + 1):
        x = lo + i * step
        v = f(x)
        if v > best_v:
            best_i, best_v = i, v
    a = lo + max(best_i - 1, 0) * step
    b = lo + min(best_i + 1, n) * step
    x, v = _golden_max(f, a, b, tol.opt_tol)
    # boundary of the original interval can beat the refined interior point
    for xb in (lo, hi):
        vb = f(xb)
        if vb > v:
            x, v = xb, vb
    return x, v


def delta_inverse(x: float, y: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """Nearest-object branch of D(d||y)=x: the solution d <= y.

    Clamps to 0 when x >= D(0||y) = -log2(1-y): an object already sits at
    distance zero.
    """
    if x < 0.0:
        raise ValueError(f"delta_inverse: x={x} must be >= 0")
    if not 0.0 < y < 1.0:
        raise ValueError(f"delta_inverse: y={y} must be in (0,1)")
    if x == 0.0:
        return y
    if x >= -math.log2(1.0 - y):
        return 0.0
    return find_root(lambda d: binary_kl(d, y) - x, 0.0, y, tol)
