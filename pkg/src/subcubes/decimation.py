"""Idealized decimation with exact belief and survey estimators."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .analytic import thresholds
from .instance import Configuration, Instance, SizeError, Subcube
from .numerics import binary_kl

BELIEF = "belief"
SURVEY = "survey"


class DecimationUnsatError(RuntimeError):
    """Dead end: no solution compatible with the fixed variables."""


@dataclass(frozen=True)
class DecimationState:
    instance: Instance
    fixed: dict = field(default_factory=dict)  # variable -> bit
    compatible: tuple[int, ...] = ()

    @property
    def t(self) -> float:
        return len(self.fixed) / self.instance.n

    @property
    def unfixed(self) -> list[int]:
        return [i for i in range(self.instance.n) if i not in self.fixed]


def _cluster_compatible(cube: Subcube, fixed: dict) -> bool:
    for v, b in fixed.items():
        if (cube.frozen_mask >> v) & 1 and (cube.frozen_values >> v) & 1 != b:
            return False
    return True


def initial_state(instance: Instance) -> DecimationState:
    return DecimationState(instance=instance, fixed={},
                           compatible=tuple(range(instance.m)))


def _conditioned_cubes(state: DecimationState) -> tuple[list[int], list[Subcube]]:
    """Project the compatible clusters onto the unfixed variables."""
    inst = state.instance
    unfixed = state.unfixed
    pos = {v: j for j, v in enumerate(unfixed)}
    nr = len(unfixed)
    cubes = []
    for idx in state.compatible:
        c = inst.clusters[idx]
        mask = 0
        values = 0
        for v, j in pos.items():
            if (c.frozen_mask >> v) & 1:
                mask |= 1 << j
                values |= ((c.frozen_values >> v) & 1) << j
        cubes.append(Subcube(max(nr, 1), mask, values))
    return unfixed, cubes


def _restricted_bitmap(state: DecimationState) -> tuple[list[int], np.ndarray]:
    unfixed, cubes = _conditioned_cubes(state)
    nr = len(unfixed)
    if nr > 26:
        raise SizeError(f"{nr} unfixed variables too many for enumeration")
    bitmap = np.zeros(1 << nr, dtype=bool)
    for cube in cubes:
        offsets = np.zeros(1, dtype=np.int64)
        for j in range(nr):
            if not (cube.frozen_mask >> j) & 1:
                offsets = np.concatenate([offsets, offsets + (1 << j)])
        bitmap[cube.frozen_values + offsets] = True
    return unfixed, bitmap


def belief_marginals(state: DecimationState) -> dict[int, float]:
    """Exact mu_i(1) over the solutions compatible with the fixed variables."""
    if not state.compatible:
        raise DecimationUnsatError("no compatible clusters")
    unfixed, bitmap = _restricted_bitmap(state)
    sols = np.flatnonzero(bitmap)
    if sols.size == 0:
        raise DecimationUnsatError("restricted solution set is empty")
    return {v: float(((sols >> j) & 1).mean()) for j, v in enumerate(unfixed)}


def survey_marginals(state: DecimationState) -> dict[int, tuple[float, float, float]]:
    """Per variable (nu({0}), nu({1}), nu({0,1})): freeze-status frequencies
    over the compatible clusters, each cluster weighted equally."""
    if not state.compatible:
        raise DecimationUnsatError("no compatible clusters")
    inst = state.instance
    m = len(state.compatible)
    out = {}
    for v in state.unfixed:
        n0 = n1 = 0
        for idx in state.compatible:
            c = inst.clusters[idx]
            if (c.frozen_mask >> v) & 1:
                if (c.frozen_values >> v) & 1:
                    n1 += 1
                else:
                    n0 += 1
        out[v] = (n0 / m, n1 / m, (m - n0 - n1) / m)
    return out


@dataclass(frozen=True)
class StepRecord:
    step: int
    variable: int
    value: int
    n_compatible: int
    bias: float  # estimator's probability of the chosen value


def decimate_batch(state: DecimationState, estimator: str,
                   rng: np.random.Generator, batch: int = 1
                   ) -> tuple[DecimationState, list[StepRecord]]:
    """Fix up to `batch` uniformly chosen unfixed variables from marginals
    estimated once, before the batch."""
    unfixed = state.unfixed
    if not unfixed:
        raise ValueError("no unfixed variable left")
    if batch < 1:
        raise ValueError("batch must be >= 1")
    k = min(batch, len(unfixed))
    chosen = [int(unfixed[i])
              for i in rng.choice(len(unfixed), size=k, replace=False)]
    if estimator == BELIEF:
        unf, bitmap = _restricted_bitmap(state)
        sols = np.flatnonzero(bitmap)
        if sols.size == 0:
            raise DecimationUnsatError("restricted solution set is empty")
        mu = {v: float(((sols >> unf.index(v)) & 1).mean()) for v in chosen}
    elif estimator == SURVEY:
        marg = survey_marginals(state)
        # frozen-to-1 clusters vote 1; free clusters split evenly
        mu = {v: marg[v][1] + 0.5 * marg[v][2] for v in chosen}
    else:
        raise ValueError(f"unknown estimator {estimator!r}")
    fixed = dict(state.fixed)
    compatible = state.compatible
    records = []
    for v in chosen:
        b = 1 if rng.random() < mu[v] else 0
        fixed[v] = b
        compatible = tuple(
            idx for idx in compatible
            if _cluster_compatible(state.instance.clusters[idx], {v: b}))
        records.append(StepRecord(step=len(fixed), variable=v, value=b,
                                  n_compatible=len(compatible),
                                  bias=mu[v] if b == 1 else 1.0 - mu[v]))
    return replace(state, fixed=fixed, compatible=compatible), records


def decimate_step(state: DecimationState, estimator: str,
                  rng: np.random.Generator) -> tuple[DecimationState, StepRecord]:
    """Fix one uniformly chosen unfixed variable from its estimated marginal."""
    new_state, records = decimate_batch(state, estimator, rng, batch=1)
    return new_state, records[0]


def run_decimation(instance: Instance, estimator: str, rng: np.random.Generator,
                   batch: int = 1
                   ) -> tuple[Configuration | None, list[StepRecord]]:
    """Decimate every variable; returns the final configuration if it is a
    solution, else None. No backtracking: a dead end aborts."""
    from .instance import is_solution

    state = initial_state(instance)
    records = []
    try:
        while state.unfixed:
            state, recs = decimate_batch(state, estimator, rng, batch)
            records.extend(recs)
    except DecimationUnsatError:
        return None, records
    bits = 0
    for v, b in state.fixed.items():
        bits |= b << v
    config = Configuration(instance.n, bits)
    return (config if is_solution(config, instance) else None), records


def reduced_complexity(alpha: float, p: float, t: float, s: float) -> float:
    """Cluster-count exponent per remaining variable after a fraction t of
    unbiased decimation steps."""
    if not 0.0 <= t < 1.0:
        raise ValueError(f"t={t} must be in [0,1)")
    alpha_d = thresholds(p)[0]
    alpha_bar = (alpha - t * alpha_d) / (1.0 - t)
    return 1.0 - alpha_bar - binary_kl(s, 1.0 - p)


def transition_times(alpha: float, p: float) -> tuple[float, float]:
    """(t_c, t_s): decimation fractions at which the reduced model condenses
    and at which its cluster count stops being exponential."""
    alpha_d, alpha_c, _ = thresholds(p)
    if alpha <= alpha_d or alpha >= 1.0:
        raise ValueError(f"alpha={alpha} outside the clustered regime "
                         f"({alpha_d}, 1)")
    t_c = (alpha_c - alpha) / (alpha_c - alpha_d)
    t_c = min(max(t_c, 0.0), 1.0)
    t_s = (1.0 - alpha) / (1.0 - alpha_d)
    return t_c, t_s
