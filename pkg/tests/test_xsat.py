import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from subcubes.analytic import ModelPoint, UnsatError, thresholds
from subcubes.numerics import binary_kl
from subcubes.xsat import (DegenerateRegimeError, auxiliary_thresholds,
                           distance_spectrum, is_degenerate,
                           pair_count_exponent, xsat_threshold)

# frozen against independent high-precision evaluation (p = 0.95)
X0_095 = 0.1664733956518865
ALPHA_SEP_095 = 0.5671104698803169
ALPHA_GAP_095 = 0.8684059670954597


def test_degenerate_boundary():
    assert is_degenerate(0.6)
    assert is_degenerate(math.sqrt(3.0) - 1.0)
    assert not is_degenerate(0.75)
    assert not is_degenerate(0.95)


def test_auxiliary_oracles():
    x0, alpha_sep, alpha_gap = auxiliary_thresholds(0.95)
    assert x0 == pytest.approx(X0_095, abs=1e-11)
    assert alpha_sep == pytest.approx(ALPHA_SEP_095, abs=1e-12)
    assert alpha_gap == pytest.approx(ALPHA_GAP_095, abs=1e-11)


def test_auxiliary_ordering():
    for p in (0.75, 0.85, 0.95, 0.99):
        x0, alpha_sep, alpha_gap = auxiliary_thresholds(p)
        alpha_d = thresholds(p)[0]
        assert alpha_d < alpha_sep < alpha_gap
        assert 1.0 - p < x0 < p * p / 2.0


def test_auxiliary_degenerate_raises():
    with pytest.raises(DegenerateRegimeError):
        auxiliary_thresholds(0.5)


def test_exact_anchor_points():
    p = 0.95
    assert xsat_threshold(1.0 - p, p) == 1.0
    assert xsat_threshold(p * p / 2.0, p) == 1.0
    assert xsat_threshold(0.5, p) == 1.0
    assert xsat_threshold(1.0, p) == pytest.approx(ALPHA_SEP_095, abs=1e-12)
    assert xsat_threshold(0.0, p) == 1.0


def test_seam_values():
    p = 0.95
    x0 = auxiliary_thresholds(p)[0]
    # intra and inter branches meet at x0; value equals alpha_gap
    left = 1.0 - binary_kl(x0, 1.0 - p)
    right = 1.0 - 0.5 * binary_kl(x0, p * p / 2.0)
    assert left == pytest.approx(right, abs=1e-9)
    assert xsat_threshold(x0, p) == pytest.approx(ALPHA_GAP_095, abs=1e-10)


def test_curve_continuity():
    p = 0.95
    xs = np.linspace(0.0, 1.0, 20_001)
    vals = np.array([xsat_threshold(float(x), p) for x in xs])
    assert np.max(np.abs(np.diff(vals))) < 1e-3  # ~ max slope / grid step
    assert np.all(vals <= 1.0 + 1e-15)


def test_degenerate_curve():
    p = 0.6
    assert xsat_threshold(0.3, p) == 1.0  # x <= 1-p
    v = xsat_threshold(0.8, p)
    assert v == pytest.approx(min(1.0, 1.0 - binary_kl(0.8, 0.4)), abs=1e-12)


@given(st.floats(min_value=0.0, max_value=1.0),
       st.floats(min_value=0.75, max_value=0.99))
def test_threshold_range(x, p):
    v = xsat_threshold(x, p)
    assert 0.0 < v <= 1.0


def test_pair_count_exponent():
    pt = ModelPoint(0.9, 0.95)
    y = 0.95 ** 2 / 2.0
    assert pair_count_exponent(pt, y) == pytest.approx(2.0 * 0.1, abs=1e-12)
    assert pair_count_exponent(pt, 0.01) < pair_count_exponent(pt, y)


def test_distance_spectrum():
    pt = ModelPoint(0.9, 0.95)
    ds = distance_spectrum(pt)
    assert ds.x3 == pytest.approx(1.0 - ds.x2, abs=1e-15)
    assert pair_count_exponent(pt, ds.x2) == pytest.approx(0.0, abs=1e-9)
    assert 0.0 < ds.x1 < ds.x2  # intra-cluster distances below inter gap
    with pytest.raises(UnsatError):
        distance_spectrum(ModelPoint(1.1, 0.95))


def test_distance_spectrum_at_alpha_one():
    ds = distance_spectrum(ModelPoint(1.0, 0.95))
    assert ds.x1 == pytest.approx(0.05, abs=1e-12)
    assert ds.x2 == pytest.approx(0.95 ** 2 / 2.0, abs=1e-12)
