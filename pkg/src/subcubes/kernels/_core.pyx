# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: Metropolis steps and solution-space walk steps.

Mirrors kernels._fallback exactly; given identical proposal and uniform
streams the two backends produce bit-identical trajectories.
"""

import numpy as np

from libc.math cimport exp2

cdef extern from *:
    """
    static inline int popcount64(unsigned long long x) {
        return __builtin_popcountll(x);
    }
    """
    int popcount64(unsigned long long x) nogil


cdef inline long long _energy(unsigned long long state,
                              const unsigned long long[::1] masks,
                              const unsigned long long[::1] values,
                              const long long[::1] e0) nogil:
    cdef Py_ssize_t j
    cdef long long best = e0[0] + popcount64((state ^ values[0]) & masks[0])
    cdef long long cand
    for j in range(1, masks.shape[0]):
        cand = e0[j] + popcount64((state ^ values[j]) & masks[j])
        if cand < best:
            best = cand
    return best


cdef inline bint _in_any(unsigned long long state,
                         const unsigned long long[::1] masks,
                         const unsigned long long[::1] values) nogil:
    cdef Py_ssize_t j
    for j in range(masks.shape[0]):
        if ((state ^ values[j]) & masks[j]) == 0:
            return True
    return False


def energy_of(state, masks, values, e0):
    cdef const unsigned long long[::1] m = masks
    cdef const unsigned long long[::1] v = values
    cdef const long long[::1] e = e0
    return int(_energy(<unsigned long long> state, m, v, e))


def argmin_valley(state, masks, values, e0):
    cdef const unsigned long long[::1] m = masks
    cdef const unsigned long long[::1] v = values
    cdef const long long[::1] e = e0
    cdef unsigned long long s = <unsigned long long> state
    cdef Py_ssize_t j, best_j = 0
    cdef long long cand
    cdef long long best = e[0] + popcount64((s ^ v[0]) & m[0])
    for j in range(1, m.shape[0]):
        cand = e[j] + popcount64((s ^ v[j]) & m[j])
        if cand < best:
            best = cand
            best_j = j
    return int(best), int(best_j)


def in_any_cluster(state, masks, values):
    cdef const unsigned long long[::1] m = masks
    cdef const unsigned long long[::1] v = values
    return bool(_in_any(<unsigned long long> state, m, v))


def metropolis_chunk(state, masks, values, e0, double inv_t,
                     var_choices, u01, out_energy, out_state):
    cdef const unsigned long long[::1] m = masks
    cdef const unsigned long long[::1] v = values
    cdef const long long[::1] e = e0
    cdef const long long[::1] var = var_choices
    cdef const double[::1] u = u01
    cdef long long[::1] oe = out_energy
    cdef unsigned long long[::1] os = out_state
    cdef bint record = out_state.size > 0
    cdef unsigned long long cur = <unsigned long long> state
    cdef unsigned long long prop
    cdef long long energy = _energy(cur, m, v, e)
    cdef long long e_new, de
    cdef Py_ssize_t k
    cdef long long n_accept = 0
    with nogil:
        for k in range(var.shape[0]):
            prop = cur ^ ((<unsigned long long> 1) << var[k])
            e_new = _energy(prop, m, v, e)
            de = e_new - energy
            if de <= 0 or u[k] < exp2(-de * inv_t):
                cur = prop
                energy = e_new
                n_accept += 1
            oe[k] = energy
            if record:
                os[k] = cur
    return int(cur), int(n_accept)


def walk_chunk(state, masks, values, var_choices, out_state):
    cdef const unsigned long long[::1] m = masks
    cdef const unsigned long long[::1] v = values
    cdef const long long[::1] var = var_choices
    cdef unsigned long long[::1] os = out_state
    cdef bint record = out_state.size > 0
    cdef unsigned long long cur = <unsigned long long> state
    cdef unsigned long long prop
    cdef Py_ssize_t k
    cdef long long n_accept = 0
    with nogil:
        for k in range(var.shape[0]):
            prop = cur ^ ((<unsigned long long> 1) << var[k])
            if _in_any(prop, m, v):
                cur = prop
                n_accept += 1
            if record:
                os[k] = cur
    return int(cur), int(n_accept)
