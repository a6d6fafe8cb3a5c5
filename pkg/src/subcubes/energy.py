"""Energetic landscape: valleys with bottom energies, exact configuration
energy, microcanonical/dynamical entropies, the energy-temperature diagram,
Metropolis dynamics, and Poisson-Dirichlet weight samplers.

Entropies and complexities are in bits, so the Boltzmann factor is base 2:
a move of cost dE is accepted with probability 2^(-dE/T).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .instance import Configuration, Subcube
from .numerics import (DEFAULT_TOL, Tolerances, binary_entropy, binary_kl,
                       delta_inverse, find_root, maximize_1d)

LN2 = math.log(2.0)
_EMAX_CAP = 0.999999  # search cap when the complexity never turns negative


@dataclass(frozen=True)
class LandscapeParams:
    """Level structure a + b*e0 - c*e0*ln(e0) plus the freezing probability."""
    a: float
    b: float
    c: float
    p: float

    def __post_init__(self):
        if self.c <= 0.0:
            raise ValueError("c must be > 0")
        if not 0.0 < self.p < 1.0:
            raise ValueError("p must be in (0,1)")

    def level_complexity(self, e0: float) -> float:
        """Growth exponent of the number of valleys with bottom energy e0."""
        if e0 < 0.0:
            raise ValueError(f"e0={e0} must be >= 0")
        if e0 == 0.0:
            return self.a  # e0 ln e0 -> 0
        return self.a + self.b * e0 - self.c * e0 * math.log(e0)

    def level_slope(self, e0: float) -> float:
        return self.b - self.c * (math.log(e0) + 1.0)


@dataclass(frozen=True)
class Valley:
    cube: Subcube
    e0: int  # integer bottom energy

    def __post_init__(self):
        if self.e0 < 0:
            raise ValueError("bottom energy must be >= 0")


@dataclass(frozen=True)
class EnergyLandscape:
    params: LandscapeParams
    n: int
    seed: int
    valleys: tuple[Valley, ...]

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        masks = np.fromiter((v.cube.frozen_mask for v in self.valleys),
                            dtype=np.uint64, count=len(self.valleys))
        values = np.fromiter((v.cube.frozen_values for v in self.valleys),
                             dtype=np.uint64, count=len(self.valleys))
        e0 = np.fromiter((v.e0 for v in self.valleys),
                         dtype=np.int64, count=len(self.valleys))
        return masks, values, e0


def valley_complexity(params: LandscapeParams, e0: float, s0: float) -> float:
    """Joint exponent for valleys of bottom energy e0 and entropy s0."""
    if not 0.0 <= s0 <= 1.0:
        raise ValueError(f"s0={s0} outside [0,1]")
    return params.level_complexity(e0) - binary_kl(s0, 1.0 - params.p)


VALLEY_BUDGET = 1 << 20


def generate_landscape(params: LandscapeParams, n: int, seed: int,
                       freezing: Callable[[float], float] | None = None
                       ) -> EnergyLandscape:
    """floor(2^(n*level_complexity)) i.i.d. valleys per populated integer
    energy level. `freezing` optionally makes p depend on e0."""
    rng = np.random.Generator(np.random.Philox(seed))
    valleys = []
    total = 0
    for level in range(n + 1):
        sigma = params.level_complexity(level / n)
        if sigma < 0.0:
            continue
        count = math.floor(2.0 ** (n * sigma))
        total += count
        if total > VALLEY_BUDGET:
            raise ValueError(f"valley budget {VALLEY_BUDGET} exceeded")
        p = params.p if freezing is None else freezing(level / n)
        u = rng.random((count, n))
        frozen = u < p
        ones = frozen & (u >= p / 2.0)
        for row in range(count):
            mask = int.from_bytes(
                np.packbits(frozen[row], bitorder="little").tobytes(), "little")
            vals = int.from_bytes(
                np.packbits(ones[row], bitorder="little").tobytes(), "little")
            valleys.append(Valley(Subcube(n, mask, vals), level))
    return EnergyLandscape(params=params, n=n, seed=seed, valleys=tuple(valleys))


def config_energy(config: Configuration, landscape: EnergyLandscape
                  ) -> tuple[int, int]:
    """(energy, basin valley index): min over valleys of bottom energy plus
    distance; ties go to the lowest valley index."""
    if not landscape.valleys:
        raise ValueError("empty landscape")
    masks, values, e0 = landscape.arrays()
    return kernels.argmin_valley(config.bits, masks, values, e0)


# ---------------------------------------------------------------------------
# analytic thermodynamics


@functools.lru_cache(maxsize=256)
def ground_state_energy(params: LandscapeParams,
                        tol: Tolerances = DEFAULT_TOL) -> float:
    """Smallest e0 with a populated level: smallest root of the level
    complexity (0 when the zero-energy level is populated)."""
    if params.a >= 0.0:
        return 0.0
    peak = math.exp((params.b - params.c) / params.c)  # slope zero
    if params.level_complexity(peak) < 0.0:
        raise ValueError("level complexity is negative everywhere")
    return find_root(params.level_complexity, 1e-300, peak, tol)


@functools.lru_cache(maxsize=256)
def max_level_energy(params: LandscapeParams,
                     tol: Tolerances = DEFAULT_TOL) -> float:
    """Largest populated e0: largest root of the level complexity, or the
    documented cap when the complexity never turns negative."""
    peak = math.exp((params.b - params.c) / params.c)
    hi = _EMAX_CAP
    if params.level_complexity(hi) >= 0.0:
        return hi
    return find_root(params.level_complexity, peak, hi, tol)


@functools.lru_cache(maxsize=256)
def typical_energy(params: LandscapeParams, tol: Tolerances = DEFAULT_TOL
                   ) -> tuple[float, float, float]:
    """(e_star, e0_star, s0_star): energy of a random configuration as the
    best trade-off between valley bottom energy and distance to it."""
    e_gs = ground_state_energy(params, tol)
    e_max = max_level_energy(params, tol)
    y = params.p / 2.0

    def cost(e0):
        sigma = params.level_complexity(e0)
        if sigma < 0.0:
            if sigma < -1e-9:
                return math.inf  # level not populated
            sigma = 0.0  # float noise at the interval edges
        return e0 + delta_inverse(sigma, y, tol)

    e0_star, neg = maximize_1d(lambda e0: -cost(e0), e_gs, e_max, tol)
    e_star = -neg
    s0_star = saddle_bottom_entropy(params, e_star, e0_star)
    return e_star, e0_star, s0_star


def saddle_bottom_entropy(params: LandscapeParams, e: float, e0: float) -> float:
    """Entropy of the valleys dominating energy e at bottom energy e0."""
    return (1.0 - params.p) * (1.0 - e + e0) / (1.0 - params.p / 2.0)


def largest_valley_entropy(params: LandscapeParams, e0: float,
                           tol: Tolerances = DEFAULT_TOL) -> float:
    """s_M(e0): the largest root of the joint valley complexity."""
    sigma = params.level_complexity(e0)
    if sigma < 0.0:
        raise ValueError(f"level e0={e0} is not populated")
    hi = 1.0 - 1e-15
    if valley_complexity(params, e0, hi) >= 0.0:
        return hi
    return find_root(lambda s: valley_complexity(params, e0, s),
                     1.0 - params.p, hi, tol)


def _concave_tol(tol: Tolerances) -> Tolerances:
    # concave objectives need no dense bracketing scan
    return Tolerances(root_tol=tol.root_tol, opt_tol=min(tol.opt_tol, 1e-12),
                      grid_points=64)


def _entropy_noncond(params: LandscapeParams, e: float, e_gs: float,
                     e_max: float, tol: Tolerances) -> tuple[float, float]:
    """max over e0 of 1 - D(e-e0||p/2) + level_complexity(e0); (value, e0).

    The objective is concave in e0 (KL convex, level complexity concave).
    """
    y = params.p / 2.0

    def g(e0):
        d = e - e0
        if d < 0.0 or d > 1.0:
            return -math.inf
        return 1.0 - binary_kl(d, y) + params.level_complexity(e0)

    lo = max(e_gs, e - 1.0)
    hi = min(e, e_max)
    if hi - lo < 1e-13:
        return g(lo), lo
    e0m, val = maximize_1d(g, lo, hi, _concave_tol(tol))
    return val, e0m


def _single_valley_entropy(e: float, e0: float, s0: float) -> float:
    u = (e - e0) / (1.0 - s0)
    if u < 0.0 or u > 1.0:
        return -math.inf
    return s0 + (1.0 - s0) * binary_entropy(u)


def _entropy_cond(params: LandscapeParams, e: float, e_gs: float,
                  e_max: float, tol: Tolerances) -> tuple[float, float]:
    """max over e0 of the biggest-valley entropy curve; (value, e0)."""
    def g(e0):
        if params.level_complexity(e0) < 0.0:
            return -math.inf
        s0 = largest_valley_entropy(params, e0, tol)
        return _single_valley_entropy(e, e0, s0)

    lo, hi = e_gs, min(e, e_max)
    if hi - lo < 1e-13:
        return g(lo), lo
    e0m, val = maximize_1d(g, lo, hi, _concave_tol(tol))
    return val, e0m


NONCONDENSED = "noncondensed"
CONDENSED = "condensed"


def microcanonical_entropy(params: LandscapeParams, e: float,
                           tol: Tolerances = DEFAULT_TOL,
                           bounds: tuple[float, float, float] | None = None
                           ) -> tuple[float, float, float, str]:
    """s(e) with the maximizing (e0, s0) and a branch tag.

    Non-condensed branch while the unconstrained saddle keeps a nonnegative
    joint complexity; below that the maximum sits on the zero-complexity
    border (the biggest valleys of each level). `bounds` can pass precomputed
    (e_gs, e_star, e_max) to skip re-deriving them.
    """
    if bounds is None:
        bounds = (ground_state_energy(params, tol),
                  typical_energy(params, tol)[0],
                  max_level_energy(params, tol))
    e_gs, e_star, e_max = bounds
    if e < e_gs - 1e-12 or e > e_star + 1e-9:
        raise ValueError(f"e={e} outside [{e_gs}, {e_star}]")
    e = min(max(e, e_gs), e_star)
    val, e0m = _entropy_noncond(params, e, e_gs, e_max, tol)
    s0 = saddle_bottom_entropy(params, e, e0m)
    if valley_complexity(params, e0m, min(max(s0, 0.0), 1.0)) >= 0.0:
        return val, e0m, s0, NONCONDENSED
    val, e0m = _entropy_cond(params, e, e_gs, e_max, tol)
    s0 = largest_valley_entropy(params, e0m, tol)
    return val, e0m, s0, CONDENSED


def condensation_energy(params: LandscapeParams,
                        tol: Tolerances = DEFAULT_TOL) -> float:
    """Energy where the saddle's joint complexity crosses zero."""
    e_gs = ground_state_energy(params, tol)
    e_star = typical_energy(params, tol)[0]
    e_max = max_level_energy(params, tol)

    def excess(e):
        _, e0m = _entropy_noncond(params, e, e_gs, e_max, tol)
        s0 = saddle_bottom_entropy(params, e, e0m)
        return valley_complexity(params, e0m, min(max(s0, 0.0), 1.0))

    return find_root(excess, e_gs + 1e-9, e_star, tol)


@dataclass(frozen=True)
class ThermoReport:
    e_star: float
    e0_star: float
    s0_star: float
    e_c: float
    e_gs: float
    t_d: float
    t_c: float


def dynamical_entropy(params: LandscapeParams, e: float,
                      tol: Tolerances = DEFAULT_TOL) -> float:
    """Microcanonical entropy of a single typical valley; governs quenches."""
    e_star, e0_star, s0_star = typical_energy(params, tol)
    if e < e0_star - 1e-12 or e > e_star + 1e-9:
        raise ValueError(f"e={e} outside [{e0_star}, {e_star}]")
    e = min(max(e, e0_star), e_star)
    return _single_valley_entropy(e, e0_star, s0_star)


_FD_STEP = 1e-6


def temperatures(params: LandscapeParams,
                 tol: Tolerances = DEFAULT_TOL) -> ThermoReport:
    """Dynamical and condensation temperatures from centered slopes of s(e)."""
    e_gs = ground_state_energy(params, tol)
    e_max = max_level_energy(params, tol)
    e_star, e0_star, s0_star = typical_energy(params, tol)
    e_c = condensation_energy(params, tol)
    h = _FD_STEP
    # the non-condensed formula extends smoothly past e_star
    slope_d = (_entropy_noncond(params, e_star + h, e_gs, e_max, tol)[0]
               - _entropy_noncond(params, e_star - h, e_gs, e_max, tol)[0]) / (2 * h)
    slope_c = (_entropy_cond(params, e_c + h, e_gs, e_max, tol)[0]
               - _entropy_cond(params, e_c - h, e_gs, e_max, tol)[0]) / (2 * h)
    return ThermoReport(e_star=e_star, e0_star=e0_star, s0_star=s0_star,
                        e_c=e_c, e_gs=e_gs,
                        t_d=1.0 / slope_d, t_c=1.0 / slope_c)


# ---------------------------------------------------------------------------
# canonical ensemble and the energy-temperature diagram


def _free_bits(t: float) -> float:
    # per-variable free-energy contribution of an unfrozen direction
    return math.log2(1.0 + 2.0 ** (-1.0 / t))


def canonical_complexity(params: LandscapeParams, f: float, t: float,
                         tol: Tolerances = DEFAULT_TOL) -> tuple[float, float, float]:
    """Sigma_T(f): largest joint complexity among valleys whose single-valley
    free energy at temperature t equals f. Returns (value, e0, s0)."""
    g = _free_bits(t)

    def obj(s0):
        e0 = f + t * s0 + t * (1.0 - s0) * g
        if e0 <= 0.0 or e0 > 1.0:
            return -math.inf
        return valley_complexity(params, e0, s0)

    # concave in s0: e0 is affine in s0, the level complexity is concave
    # and the KL penalty convex
    s0m, val = maximize_1d(obj, 1e-12, 1.0 - 1e-12, _concave_tol(tol))
    return val, f + t * s0m + t * (1.0 - s0m) * g, s0m


def pd_parameter(params: LandscapeParams, t: float,
                 tol: Tolerances = DEFAULT_TOL,
                 bounds: tuple[float, float] | None = None) -> float:
    """m(T) = T * slope of Sigma_T(f) at its smallest root, clamped to [0,1].

    By the envelope theorem the slope equals the level-complexity derivative
    at the maximizing e0, so no outer finite difference is needed. `bounds`
    can pass precomputed (e_gs, e_star).
    """
    if bounds is None:
        bounds = (ground_state_energy(params, tol),
                  typical_energy(params, tol)[0])
    e_gs, e_star = bounds
    f_hi = e_star  # free energy is below the energy
    f_lo = e_gs - t * 1.2  # entropy per variable is at most 1 (plus slack)

    def sig_t(f):
        return canonical_complexity(params, f, t, tol)[0]

    # locate the smallest root by a scan: the curve rises from -inf, crosses
    # zero, peaks, and comes back down
    grid = np.linspace(f_lo, f_hi, 128)
    vals = [sig_t(f) for f in grid]
    lo = None
    for i in range(len(grid) - 1):
        if math.isfinite(vals[i]) and vals[i] < 0.0 <= vals[i + 1]:
            lo = i
            break
    if lo is None:
        raise ValueError(f"no root of the canonical complexity at T={t}")
    f_min = find_root(sig_t, grid[lo], grid[lo + 1], tol)
    e0 = canonical_complexity(params, f_min, t, tol)[1]
    return min(max(t * params.level_slope(e0), 0.0), 1.0)


@dataclass(frozen=True)
class DiagramPoint:
    t: float
    e_eq: float
    e_dyn: float
    m: float


_DIAGRAM_TABLE = 1200


def et_diagram(params: LandscapeParams, t_grid: np.ndarray,
               tol: Tolerances = DEFAULT_TOL) -> list[DiagramPoint]:
    """Equilibrium and quench energies plus the weight-process parameter on a
    temperature grid.

    s(e) is tabulated once; per temperature, e_eq maximizes s(e) - e/T over
    the table with a parabolic refinement. e_dyn comes from the stationarity
    condition of the single-valley entropy, which is closed-form.
    """
    report = temperatures(params, tol)
    e_gs, e_star = report.e_gs, report.e_star
    e0_star, s0_star = report.e0_star, report.s0_star
    e_max = max_level_energy(params, tol)
    e_tab = np.linspace(e_gs, e_star, _DIAGRAM_TABLE)
    s_tab = np.array([microcanonical_entropy(params, e, tol,
                                             bounds=(e_gs, e_star, e_max))[0]
                      for e in e_tab])
    out = []
    for t in np.asarray(t_grid, dtype=float):
        if t <= 0.0:
            raise ValueError("temperatures must be positive")
        if t >= report.t_d:
            e_eq_v = e_star
            e_dyn_v = e_star
        else:
            canon = s_tab - e_tab / t
            i = int(np.argmax(canon))
            e_eq_v = e_tab[i]
            if 0 < i < len(e_tab) - 1:
                # parabola through the three bracketing table points
                denom = canon[i - 1] - 2.0 * canon[i] + canon[i + 1]
                if denom < 0.0:
                    shift = 0.5 * (canon[i - 1] - canon[i + 1]) / denom
                    e_eq_v += shift * (e_tab[1] - e_tab[0])
            # quench: slope of the single-valley entropy equals 1/T
            u = 1.0 / (1.0 + 2.0 ** (1.0 / t))
            e_dyn_v = min(e0_star + (1.0 - s0_star) * u, e_star)
        if t < report.t_c:
            m = pd_parameter(params, t, tol, bounds=(e_gs, e_star))
        else:
            m = 1.0
        out.append(DiagramPoint(t=float(t), e_eq=float(e_eq_v),
                                e_dyn=float(e_dyn_v), m=m))
    return out


# ---------------------------------------------------------------------------
# dynamics


_CHUNK = 1 << 20


def metropolis(landscape: EnergyLandscape, schedule: list[tuple[float, int]],
               start: Configuration, rng: np.random.Generator,
               record_states: bool = False
               ) -> tuple[Configuration, np.ndarray, np.ndarray | None]:
    """Single-flip Metropolis on the landscape energy, base-2 Boltzmann.

    schedule is a list of (temperature, sweeps); one sweep is n proposals.
    Returns (final config, per-sweep mean energies, optional per-step states).
    """
    if not landscape.valleys:
        raise ValueError("empty landscape")
    n = landscape.n
    masks, values, e0 = landscape.arrays()
    state = start.bits
    sweep_means = []
    states_out = [] if record_states else None
    for t, sweeps in schedule:
        inv_t = 0.0 if math.isinf(t) else 1.0 / t if t > 0.0 else math.inf
        remaining = sweeps * n
        while remaining > 0:
            k = min(remaining, _CHUNK - _CHUNK % n)
            var_choices = rng.integers(0, n, size=k).astype(np.int64)
            u01 = rng.random(k)
            out_energy = np.empty(k, dtype=np.int64)
            out_state = np.empty(k if record_states else 0, dtype=np.uint64)
            state, _ = kernels.metropolis_chunk(state, masks, values, e0,
                                                inv_t, var_choices, u01,
                                                out_energy, out_state)
            sweep_means.append(out_energy.reshape(-1, n).mean(axis=1))
            if record_states:
                states_out.append(out_state)
            remaining -= k
    means = np.concatenate(sweep_means) if sweep_means else np.empty(0)
    states = np.concatenate(states_out) if record_states else None
    return Configuration(n, state), means, states


# ---------------------------------------------------------------------------
# Poisson-Dirichlet weights


def pd_sample_point_process(m: float, cutoff: int,
                            rng: np.random.Generator) -> np.ndarray:
    """Largest `cutoff` weights, renormalized to sum 1.

    Atoms are Gamma_i^(-1/m) for Poisson arrival times Gamma_i (the point
    process with intensity x^(-m-1)dx); arrivals increase, so the first
    `cutoff` atoms are exactly the largest ones.
    """
    if not 0.0 < m < 1.0:
        raise ValueError("m must be in (0,1)")
    if cutoff < 10:
        raise ValueError("cutoff must be >= 10")
    arrivals = np.cumsum(rng.exponential(size=cutoff))
    atoms = arrivals ** (-1.0 / m)
    return atoms / atoms.sum()


def pd_sample_stick_breaking(m: float, cutoff: int,
                             rng: np.random.Generator) -> np.ndarray:
    """Same law via stick breaking: fractions Beta(1-m, i*m) of the remaining
    stick, size-sorted, top `cutoff` renormalized.

    Sticks arrive in size-biased order, so a few thousand of them capture the
    largest weights with overwhelming probability.
    """
    if not 0.0 < m < 1.0:
        raise ValueError("m must be in (0,1)")
    if cutoff < 10:
        raise ValueError("cutoff must be >= 10")
    k = max(4 * cutoff, 2000)
    # beta draws can round to exactly 1.0, which would poison the log
    v = np.minimum(rng.beta(1.0 - m, m * np.arange(1, k + 1)), 1.0 - 1e-16)
    log_rest = np.concatenate([[0.0], np.cumsum(np.log1p(-v[:-1]))])
    w = v * np.exp(log_rest)
    w = np.sort(w)[::-1][:cutoff]
    return w / w.sum()


def pd_sum_sq_estimate(m: float, rng: np.random.Generator,
                       atoms: int = 4000) -> float:
    """One draw of the sum of squared weights of the full process.

    Normalizes by partial sum plus the expected tail mass beyond the last
    arrival, Gamma_K^(1-1/m) * m/(1-m); the squared tail itself is
    negligible. Expectation over draws is 1 - m.
    """
    if not 0.0 < m < 1.0:
        raise ValueError("m must be in (0,1)")
    arrivals = np.cumsum(rng.exponential(size=atoms))
    x = arrivals ** (-1.0 / m)
    total = x.sum() + arrivals[-1] ** (1.0 - 1.0 / m) * m / (1.0 - m)
    return float((x * x).sum() / total**2)
