"""Distance spectrum of the solution space and the x-satisfiability curve."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analytic import ModelPoint, UnsatError, largest_cluster_entropy, thresholds
from .numerics import DEFAULT_TOL, Tolerances, binary_kl, find_root


class DegenerateRegimeError(ValueError):
    """Raised when 1-p >= p^2/2 and the piecewise branch order breaks down."""


def is_degenerate(p: float) -> bool:
    # boundary at p = sqrt(3)-1 where 1-p = p^2/2
    return 1.0 - p >= p * p / 2.0


@dataclass(frozen=True)
class DistanceSpectrum:
    x1: float  # max intra-cluster distance fraction (largest diameter)
    x2: float  # min inter-cluster distance fraction
    x3: float  # max inter-cluster distance fraction, = 1 - x2


def pair_count_exponent(point: ModelPoint, x: float) -> float:
    """Growth exponent of the number of cluster pairs at distance fraction x."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0,1]")
    return 2.0 * (1.0 - point.alpha) - binary_kl(x, point.p**2 / 2.0)


def distance_spectrum(point: ModelPoint,
                      tol: Tolerances = DEFAULT_TOL) -> DistanceSpectrum:
    if point.alpha > 1.0:
        raise UnsatError(f"alpha={point.alpha} > 1")
    x1 = largest_cluster_entropy(point, tol)
    y = point.p**2 / 2.0
    if point.alpha == 1.0:
        x2 = y
    else:
        x2 = find_root(lambda x: pair_count_exponent(point, x), 0.0, y, tol)
    return DistanceSpectrum(x1=x1, x2=x2, x3=1.0 - x2)


def auxiliary_thresholds(p: float,
                         tol: Tolerances = DEFAULT_TOL) -> tuple[float, float, float]:
    """(x0, alpha_sep, alpha_gap).

    x0 solves D(x||p^2/2) = 2 D(x||1-p) between the two reference distances;
    alpha_sep = 1 + (1/2) log2(1 - p^2/2) marks where cluster pairs start to
    intersect; alpha_gap = alpha_s(x0) is where the intra/inter distance gap
    closes.
    """
    if is_degenerate(p):
        raise DegenerateRegimeError(
            f"p={p}: 1-p >= p^2/2, the clustering-detectable regime needs p > sqrt(3)-1")
    y = p * p / 2.0
    x0 = find_root(lambda x: binary_kl(x, y) - 2.0 * binary_kl(x, 1.0 - p),
                   1.0 - p, y, tol)
    alpha_sep = 1.0 + 0.5 * math.log2(1.0 - y)
    alpha_gap = 1.0 - binary_kl(x0, 1.0 - p)
    alpha_d = thresholds(p)[0]
    assert alpha_d < alpha_sep < alpha_gap
    return x0, alpha_sep, alpha_gap


def xsat_threshold(x: float, p: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """Largest alpha at which solution pairs at distance fraction x exist.

    Four-branch piecewise curve; seam roots belong to the left branch. In the
    degenerate small-p regime the middle branches vanish and the curve falls
    back to min(1, 1 - D(x||1-p)).
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0,1]")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p={p} outside (0,1)")
    y = p * p / 2.0
    if is_degenerate(p):
        if x <= 1.0 - p:
            return 1.0
        return min(1.0, 1.0 - binary_kl(x, 1.0 - p))
    x0 = auxiliary_thresholds(p, tol)[0]
    if x <= 1.0 - p or (y <= x <= 1.0 - y):
        return 1.0
    if x <= x0:
        return 1.0 - binary_kl(x, 1.0 - p)
    if x <= y:
        return 1.0 - 0.5 * binary_kl(x, y)
    return 1.0 - 0.5 * binary_kl(1.0 - x, y)
