"""Single-flip random walk on the solution set and cluster-escape statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .analytic import ModelPoint, complexity
from .instance import Configuration, Instance, clusters_containing, is_solution
from .numerics import DEFAULT_TOL, Tolerances, maximize_1d


@dataclass(frozen=True)
class WalkTrace:
    steps: int
    n_accept: int
    start: Configuration
    end: Configuration
    initial_clusters: tuple[int, ...]
    final_clusters: tuple[int, ...]
    first_exit_step: int  # first step whose cluster set is disjoint from the
                          # initial one; -1 if it never happens

    @property
    def acceptance_rate(self) -> float:
        return self.n_accept / self.steps if self.steps else 0.0

    @property
    def escaped(self) -> bool:
        return not set(self.initial_clusters) & set(self.final_clusters)


def random_walk(instance: Instance, start: Configuration, steps: int,
                rng: np.random.Generator) -> WalkTrace:
    """Lazy walk: flip a uniform variable, keep iff still a solution.

    Stationary law is uniform on the solution set.
    """
    if not is_solution(start, instance):
        raise ValueError("start configuration is not a solution")
    masks, values = instance.mask_value_arrays()
    init = tuple(clusters_containing(start, instance))
    var_choices = rng.integers(0, instance.n, size=steps).astype(np.int64)
    out_state = np.zeros(steps, dtype=np.uint64)
    end_bits, n_accept = kernels.walk_chunk(start.bits, masks, values,
                                            var_choices, out_state)
    end = Configuration(instance.n, end_bits)

    # first step at which the walker shares no cluster with the initial set
    init_masks = masks[list(init)]
    init_values = values[list(init)]
    inside = (((out_state[:, None] ^ init_values[None, :])
               & init_masks[None, :]) == 0).any(axis=1)
    outside = np.flatnonzero(~inside)
    first_exit = int(outside[0]) + 1 if outside.size else -1

    final = tuple(clusters_containing(end, instance))
    return WalkTrace(steps=steps, n_accept=n_accept, start=start, end=end,
                     initial_clusters=init, final_clusters=final,
                     first_exit_step=first_exit)


def partition_log_probability(n: int, s: float, s_prime: float, a: float) -> float:
    """log2 of the chance that a fraction a of variables is free in one cluster
    and frozen in the other, for clusters of entropies s and s'.

    Multinomial over the four freeze/free categories divided by the two
    binomials fixing the per-cluster free counts. Cell counts must be
    nonnegative integers (up to rounding).
    """
    cells = [a * n, (s - a) * n, (1.0 - s_prime - a) * n, (s_prime - s + a) * n]
    counts = [round(c) for c in cells]
    if any(abs(c - r) > 1e-9 for c, r in zip(cells, counts)) or min(counts) < 0:
        raise ValueError(f"infeasible cell counts {cells}")
    if sum(counts) != n:
        raise ValueError(f"cells {counts} do not sum to n={n}")
    lg = math.lgamma
    log_multi = lg(n + 1) - sum(lg(c + 1) for c in counts)
    ns, nsp = round(s * n), round(s_prime * n)
    log_b1 = lg(n + 1) - lg(ns + 1) - lg(n - ns + 1)
    log_b2 = lg(n + 1) - lg(nsp + 1) - lg(n - nsp + 1)
    return (log_multi - log_b1 - log_b2) / math.log(2.0)


def escape_exponent(point: ModelPoint, s_prime: float) -> float:
    """Union-bound growth rate for hopping into a cluster of entropy s'."""
    return complexity(point, s_prime) + s_prime - 1.0


def max_escape_exponent(point: ModelPoint,
                        tol: Tolerances = DEFAULT_TOL) -> tuple[float, float]:
    """(argmax s', max over s' of the escape bound)."""
    return maximize_1d(lambda s: escape_exponent(point, s), 0.0, 1.0, tol)


@dataclass(frozen=True)
class EscapeStats:
    trials: int
    escapes: int
    mean_acceptance: float
    wilson_low: float
    wilson_high: float


def _wilson(k: int, n: int, z: float = 1.96) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    phat = k / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def step_escape_fraction(instance: Instance, trials: int, steps: int,
                         rng: np.random.Generator) -> float:
    """Fraction of walk steps whose cluster set is disjoint from the previous
    step's cluster set, pooled over all trials.

    This per-step escape rate is the desk-scale observable for the ergodicity
    trend: hops between cluster sets become rarer as n grows at fixed
    distance above the clustering threshold, whereas the end-of-walk escape
    fraction saturates once the walk length exceeds the typical hop time.
    """
    from .instance import sample_solution

    masks, values = instance.mask_value_arrays()
    hops = 0
    total = 0
    for _ in range(trials):
        start = sample_solution(instance, rng)
        var_choices = rng.integers(0, instance.n, size=steps).astype(np.int64)
        out_state = np.zeros(steps, dtype=np.uint64)
        kernels.walk_chunk(start.bits, masks, values, var_choices, out_state)
        states = np.concatenate(([np.uint64(start.bits)], out_state))
        member = (((states[:, None] ^ values[None, :])
                   & masks[None, :]) == 0)
        shared = (member[1:] & member[:-1]).any(axis=1)
        hops += int(np.count_nonzero(~shared))
        total += steps
    return hops / total if total else 0.0


def escape_experiment(instance: Instance, trials: int, steps: int,
                      rng: np.random.Generator) -> EscapeStats:
    """Fraction of walks whose final cluster set is disjoint from the initial
    one, with a Wilson 95% interval."""
    from .instance import sample_solution

    escapes = 0
    acc = 0.0
    for _ in range(trials):
        start = sample_solution(instance, rng)
        trace = random_walk(instance, start, steps, rng)
        escapes += trace.escaped
        acc += trace.acceptance_rate
    low, high = _wilson(escapes, trials)
    return EscapeStats(trials=trials, escapes=escapes,
                       mean_acceptance=acc / trials if trials else 0.0,
                       wilson_low=low, wilson_high=high)
