import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sps

from subcubes.instance import (Configuration, Instance, SizeError, Subcube,
                               cluster_budget, cluster_entropy_histogram,
                               clusters_containing, count_solutions_bruteforce,
                               count_solutions_ie, diameter, from_json,
                               generate, is_solution, membership, overlap,
                               pair_distance, sample_solution,
                               solution_bitmap, to_json)


def test_subcube_invariants():
    with pytest.raises(ValueError):
        Subcube(4, 0b10000, 0)  # mask wider than n
    with pytest.raises(ValueError):
        Subcube(4, 0b0011, 0b0100)  # value outside mask
    c = Subcube(4, 0b0101, 0b0001)
    assert c.free_count == 2
    assert diameter(c) == 2


def test_configuration_invariant():
    with pytest.raises(ValueError):
        Configuration(3, 0b1000)


def test_cluster_budget_exact_powers():
    assert cluster_budget(10, 0.5) == 32
    assert cluster_budget(20, 0.0) == 1 << 20
    assert cluster_budget(10, 1.0) == 1
    assert cluster_budget(10, 1.2) == 0
    with pytest.raises(SizeError):
        cluster_budget(100, 0.0)


@given(st.integers(min_value=1, max_value=30),
       st.floats(min_value=0.0, max_value=1.5))
def test_cluster_budget_formula(n, alpha):
    t = (1.0 - alpha) * n
    if t < 0:
        assert cluster_budget(n, alpha) == 0
    elif t <= 40:
        m = cluster_budget(n, alpha)
        assert m <= 2.0 ** t < 2 * (m + 1)


def test_generate_deterministic():
    a = generate(n=12, alpha=0.6, p=0.5, seed=7)
    b = generate(n=12, alpha=0.6, p=0.5, seed=7)
    assert a.clusters == b.clusters
    assert a.m == cluster_budget(12, 0.6)


def test_generate_freeze_statistics():
    # per-variable freeze indicator is Bernoulli(p); frozen value fair
    inst = generate(n=20, alpha=0.3, p=0.5, seed=11)
    masks, values = inst.mask_value_arrays()
    frozen = np.unpackbits(masks.view(np.uint8), bitorder="little")
    k = int(frozen.sum())
    total = inst.m * 20
    assert sps.binomtest(k, total, 0.5).pvalue > 1e-4
    ones = int(np.bitwise_count(values).sum())
    assert sps.binomtest(ones, k, 0.5).pvalue > 1e-4


def test_membership_and_solution():
    cube = Subcube(5, 0b00110, 0b00100)
    inst = Instance(n=5, alpha=0.0, p=0.5, seed=0, clusters=(cube,))
    assert membership(Configuration(5, 0b00100), cube)
    assert not membership(Configuration(5, 0b00010), cube)
    assert is_solution(Configuration(5, 0b10100), inst)
    assert clusters_containing(Configuration(5, 0b00100), inst) == [0]


def test_solution_bitmap_matches_membership():
    inst = generate(n=10, alpha=0.6, p=0.6, seed=3)
    bitmap = solution_bitmap(inst)
    for x in range(1 << 10):
        assert bitmap[x] == is_solution(Configuration(10, x), inst)


@settings(deadline=None, max_examples=30)
@given(st.integers(min_value=0, max_value=10_000))
def test_counting_oracles_agree(seed):
    inst = generate(n=12, alpha=0.7, p=0.6, seed=seed)
    if inst.m > 24:
        return
    assert count_solutions_ie(inst) == count_solutions_bruteforce(inst)


def test_counting_size_guards():
    many = Instance(n=30, alpha=0.0, p=0.5, seed=0,
                    clusters=tuple(Subcube(30, 1 << i, 0) for i in range(25)))
    with pytest.raises(SizeError):
        count_solutions_ie(many)
    big = Instance(n=30, alpha=1.0, p=0.5, seed=0,
                   clusters=(Subcube(30, 1, 1),))
    with pytest.raises(SizeError):
        count_solutions_bruteforce(big)


def test_entropy_histogram():
    inst = generate(n=14, alpha=0.5, p=0.7, seed=9)
    hist = cluster_entropy_histogram(inst)
    assert hist.sum() == inst.m
    for c in inst.clusters:
        assert hist[c.free_count] >= 1


def test_pair_distance_and_overlap():
    a = Subcube(6, 0b001111, 0b000011)
    b = Subcube(6, 0b111100, 0b110000)
    # overlap of frozen sets is bits 2,3: a freezes 00, b freezes 00 -> agree
    assert pair_distance(a, b) == 0
    c = Subcube(6, 0b111100, 0b111100)
    assert pair_distance(a, c) == 2
    x = Configuration(6, 0b000000)
    y = Configuration(6, 0b000111)
    assert overlap(x, y) == pytest.approx((6 - 2 * 3) / 6)
    assert overlap(x, x) == 1.0


def test_sample_solution_uniform():
    # overlapping clusters; exact uniformity over the 2^n-enumerated set
    inst = generate(n=8, alpha=0.5, p=0.6, seed=21)
    bitmap = solution_bitmap(inst)
    sols = np.flatnonzero(bitmap)
    rng = np.random.Generator(np.random.Philox(4))
    draws = 20_000
    counts = np.zeros(sols.size, dtype=np.int64)
    index = {int(x): i for i, x in enumerate(sols)}
    for _ in range(draws):
        cfg = sample_solution(inst, rng)
        counts[index[cfg.bits]] += 1
    chi2 = ((counts - draws / sols.size) ** 2 / (draws / sols.size)).sum()
    p_value = sps.chi2.sf(chi2, sols.size - 1)
    assert p_value > 1e-4


def test_sample_solution_unsat():
    inst = Instance(n=4, alpha=2.0, p=0.5, seed=0, clusters=())
    with pytest.raises(ValueError):
        sample_solution(inst, np.random.Generator(np.random.Philox(0)))


def test_json_roundtrip():
    inst = generate(n=17, alpha=0.7, p=0.8, seed=5)
    text = to_json(inst)
    back = from_json(text)
    assert back == inst
    assert to_json(back) == text  # byte-identical re-serialization


def test_json_empty_instance():
    inst = generate(n=10, alpha=1.2, p=0.5, seed=1)
    assert inst.m == 0
    assert from_json(to_json(inst)).m == 0
