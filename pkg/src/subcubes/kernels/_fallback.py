"""Pure-Python (numpy) implementations of the hot kernels.

Semantically identical to the compiled core: given the same proposal and
uniform streams, both backends produce bit-identical trajectories.
"""

from __future__ import annotations

import numpy as np


def energy_of(state: int, masks: np.ndarray, values: np.ndarray,
              e0: np.ndarray) -> int:
    """min over valleys of bottom energy + Hamming distance to the valley."""
    s = np.uint64(state)
    d = np.bitwise_count((s ^ values) & masks)
    return int((e0 + d).min())


def argmin_valley(state: int, masks: np.ndarray, values: np.ndarray,
                  e0: np.ndarray) -> tuple[int, int]:
    """(energy, index of the valley attaining it); ties -> lowest index."""
    s = np.uint64(state)
    d = e0 + np.bitwise_count((s ^ values) & masks)
    j = int(d.argmin())
    return int(d[j]), j


def in_any_cluster(state: int, masks: np.ndarray, values: np.ndarray) -> bool:
    s = np.uint64(state)
    return bool((((s ^ values) & masks) == 0).any())


def metropolis_chunk(state: int, masks: np.ndarray, values: np.ndarray,
                     e0: np.ndarray, inv_t: float,
                     var_choices: np.ndarray, u01: np.ndarray,
                     out_energy: np.ndarray,
                     out_state: np.ndarray) -> tuple[int, int]:
    """Single-flip Metropolis with base-2 Boltzmann factor 2^(-dE/T).

    Records the energy (and state, when out_state is non-empty) after each
    step. Returns (final state, number of accepted moves).
    """
    record_states = out_state.size > 0
    energy = energy_of(state, masks, values, e0)
    n_accept = 0
    for k in range(var_choices.size):
        proposal = state ^ (1 << int(var_choices[k]))
        e_new = energy_of(proposal, masks, values, e0)
        de = e_new - energy
        if de <= 0 or u01[k] < 2.0 ** (-de * inv_t):
            state, energy = proposal, e_new
            n_accept += 1
        out_energy[k] = energy
        if record_states:
            out_state[k] = state
    return state, n_accept


def walk_chunk(state: int, masks: np.ndarray, values: np.ndarray,
               var_choices: np.ndarray,
               out_state: np.ndarray) -> tuple[int, int]:
    """Lazy solution-space walk: flip a variable, keep iff still a solution.

    Records the state after each step when out_state is non-empty.
    """
    record_states = out_state.size > 0
    n_accept = 0
    for k in range(var_choices.size):
        proposal = state ^ (1 << int(var_choices[k]))
        if in_any_cluster(proposal, masks, values):
            state = proposal
            n_accept += 1
        if record_states:
            out_state[k] = state
    return state, n_accept
