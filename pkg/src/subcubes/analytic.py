"""Closed-form thermodynamics of the subcube ensemble at fixed (alpha, p).

Everything here is in bits (log base 2). The large-k correspondence is the
one exception and carries explicit ln2 factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .numerics import DEFAULT_TOL, Tolerances, binary_kl, find_root

LN2 = math.log(2.0)

LIQUID = "liquid"
CLUSTERED = "clustered"
CONDENSED = "condensed"
UNSAT = "unsat"


class UnsatError(ValueError):
    """Raised for alpha > 1, where no cluster exists."""


@dataclass(frozen=True)
class ModelPoint:
    alpha: float
    p: float

    def __post_init__(self):
        if self.alpha < 0.0:
            raise ValueError(f"alpha={self.alpha} must be >= 0")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p={self.p} must be in [0,1]")


@dataclass(frozen=True)
class PhaseReport:
    alpha: float
    p: float
    alpha_d: float
    alpha_c: float
    alpha_s: float
    phase: str
    s_tot: float
    s_star: float
    sigma_star: float
    m: float


@dataclass(frozen=True)
class LargeKMapping:
    problem: str  # "SAT" or "COL"
    k: int
    gamma: float

    def __post_init__(self):
        if self.problem not in ("SAT", "COL"):
            raise ValueError(f"unknown problem tag {self.problem!r}")
        if self.k < 2:
            raise ValueError("k must be >= 2")

    @property
    def epsilon(self) -> float:
        if self.problem == "SAT":
            return 2.0 ** -(self.k + 1)
        return 1.0 / (2.0 * self.k)

    @property
    def constraint_density(self) -> float:
        k = self.k
        if self.problem == "SAT":
            return 2.0**k * LN2 - LN2 / 2.0 + self.gamma / 2.0
        return k * math.log(k) - math.log(k) / 2.0 + self.gamma / 2.0


def complexity(point: ModelPoint, s: float) -> float:
    """Growth exponent of the number of clusters with internal entropy s.

    Raw value 1 - alpha - D(s||1-p); callers apply the >=0 cutoff.
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s={s} outside [0,1]")
    return 1.0 - point.alpha - binary_kl(s, 1.0 - point.p)


def complexity_slope(point: ModelPoint, s: float) -> float:
    # d/ds [ -D(s||1-p) ] = -log2( s p / ((1-s)(1-p)) )
    p = point.p
    return -math.log2(s * p / ((1.0 - s) * (1.0 - p)))


def thresholds(p: float) -> tuple[float, float, float]:
    """(alpha_d, alpha_c, alpha_s) for freezing probability p."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p={p} must be in (0,1]")
    alpha_d = math.log2(2.0 - p)
    alpha_c = p / (2.0 - p) + alpha_d
    return alpha_d, alpha_c, 1.0


def s_typical(p: float) -> float:
    """Entropy of the clusters dominating the solution count below alpha_c."""
    return 2.0 * (1.0 - p) / (2.0 - p)


def largest_cluster_entropy(point: ModelPoint, tol: Tolerances = DEFAULT_TOL) -> float:
    """s_M: the largest root of the complexity. Needs alpha <= 1."""
    if point.alpha > 1.0:
        raise UnsatError(f"alpha={point.alpha} > 1")
    p = point.p
    if p == 1.0:
        return 0.0
    if point.alpha == 1.0:
        return 1.0 - p
    hi = 1.0 - 1e-15
    if complexity(point, hi) >= 0.0:
        return hi
    return find_root(lambda s: complexity(point, s), 1.0 - p, hi, tol)


def total_entropy(point: ModelPoint, tol: Tolerances = DEFAULT_TOL) -> float:
    """s_tot = (1/N) log2 |S| in the thermodynamic limit."""
    alpha, p = point.alpha, point.p
    if alpha > 1.0:
        raise UnsatError(f"alpha={alpha} > 1: no solutions")
    if p == 0.0:
        return 1.0
    if p == 1.0:
        return 1.0 - alpha  # random-code limit: all clusters are singletons
    alpha_d, alpha_c, _ = thresholds(p)
    if alpha < alpha_d:
        return 1.0
    if alpha <= alpha_c:
        return 1.0 - alpha + math.log2(2.0 - p)
    return largest_cluster_entropy(point, tol)


def phase(point: ModelPoint) -> str:
    """Phase label; boundaries belong to the higher-alpha phase."""
    alpha, p = point.alpha, point.p
    if alpha > 1.0:
        return UNSAT
    if p == 0.0:
        return LIQUID if alpha <= 1.0 else UNSAT
    alpha_d, alpha_c, _ = thresholds(p)
    if alpha < alpha_d:
        return LIQUID
    if alpha < alpha_c:
        return CLUSTERED
    return CONDENSED


def dominant_stats(point: ModelPoint,
                   tol: Tolerances = DEFAULT_TOL) -> tuple[float, float, float]:
    """(s_star, sigma_star, m) of the clusters carrying most solutions."""
    alpha, p = point.alpha, point.p
    if alpha > 1.0:
        raise UnsatError(f"alpha={alpha} > 1")
    if p == 1.0:
        return 0.0, 1.0 - alpha, 1.0
    _, alpha_c, _ = thresholds(p)
    if alpha < alpha_c:
        s_star = s_typical(p)
        sigma_star = p / (2.0 - p) + math.log2(2.0 - p) - alpha
        return s_star, sigma_star, 1.0
    s_m = largest_cluster_entropy(point, tol)
    m = -complexity_slope(point, s_m)
    return s_m, 0.0, m


def phase_report(point: ModelPoint, tol: Tolerances = DEFAULT_TOL) -> PhaseReport:
    alpha_d, alpha_c, alpha_s = thresholds(point.p) if point.p > 0 else (1.0, 1.0, 1.0)
    ph = phase(point)
    if ph == UNSAT:
        return PhaseReport(point.alpha, point.p, alpha_d, alpha_c, alpha_s,
                           ph, math.nan, math.nan, math.nan, math.nan)
    s_tot = total_entropy(point, tol)
    s_star, sigma_star, m = dominant_stats(point, tol)
    return PhaseReport(point.alpha, point.p, alpha_d, alpha_c, alpha_s,
                       ph, s_tot, s_star, sigma_star, m)


@dataclass(frozen=True)
class OverlapDistribution:
    """Atoms of the pair-overlap law P(q).

    Below condensation: a single atom at q=0. In the condensed phase a second
    atom appears at q = 1 - s_tot; its weight w is random with mean 1 - m
    (Poisson-Dirichlet with parameter m).
    """
    atom_locations: tuple[float, ...]
    condensed: bool
    m: float
    mean_weight_at_atom: float


def overlap_distribution(point: ModelPoint,
                         tol: Tolerances = DEFAULT_TOL) -> OverlapDistribution:
    if point.alpha > 1.0:
        raise UnsatError(f"alpha={point.alpha} > 1")
    if phase(point) != CONDENSED:
        return OverlapDistribution((0.0,), False, 1.0, 0.0)
    s_tot = total_entropy(point, tol)
    _, _, m = dominant_stats(point, tol)
    return OverlapDistribution((0.0, 1.0 - s_tot), True, m, 1.0 - m)


def large_k_map(mapping: LargeKMapping) -> ModelPoint:
    """Rescaled (epsilon, gamma) -> (alpha, p)."""
    eps = mapping.epsilon
    return ModelPoint(alpha=1.0 + eps * (1.0 + mapping.gamma) / LN2, p=1.0 - eps)


def large_k_inverse(point: ModelPoint, problem: str, k: int) -> LargeKMapping:
    """(alpha, p) -> rescaled mapping; exact inverse of large_k_map."""
    eps = 1.0 - point.p
    gamma = (point.alpha - 1.0) * LN2 / eps - 1.0
    out = LargeKMapping(problem, k, gamma)
    if abs(out.epsilon - eps) > 1e-12:
        raise ValueError(f"p={point.p} inconsistent with {problem} k={k}")
    return out


def large_k_complexity(s: float, epsilon: float, gamma: float) -> float:
    """Leading-order cluster-count exponent, natural-log units: Sigma*ln2."""
    if s <= 0.0:
        raise ValueError(f"s={s} must be > 0")
    if epsilon <= 0.0:
        raise ValueError(f"epsilon={epsilon} must be > 0")
    return s * (1.0 - math.log(s / epsilon)) - epsilon * (2.0 + gamma)


def k_point_correlation(instance, variables: list[int]) -> float:
    """Total variation between the joint law of the listed variables under
    the uniform measure on solutions and the product of its marginals.

    Delegates to exact enumeration; needs a desk-scale instance.
    """
    from .instance import solution_bitmap  # deferred: avoids import cycle
    import numpy as np

    k = len(variables)
    if instance.n > 24:
        raise ValueError(f"n={instance.n} too large for enumeration (max 24)")
    bitmap = solution_bitmap(instance)
    sols = np.flatnonzero(bitmap)
    if sols.size == 0:
        raise UnsatError("instance has no solutions")
    if k == 0:
        return 0.0
    cols = [(sols >> v) & 1 for v in variables]
    packed = np.zeros(sols.size, dtype=np.int64)
    for j, c in enumerate(cols):
        packed |= c.astype(np.int64) << j
    joint = np.bincount(packed, minlength=1 << k) / sols.size
    marg1 = [c.mean() for c in cols]
    total = 0.0
    for cell in range(1 << k):
        prod = 1.0
        for j in range(k):
            prod *= marg1[j] if (cell >> j) & 1 else 1.0 - marg1[j]
        total += abs(joint[cell] - prod)
    return float(total)
