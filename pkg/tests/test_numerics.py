import math

import pytest
from hypothesis import given, strategies as st

from subcubes.numerics import (DEFAULT_TOL, Tolerances, binary_entropy,
                               binary_kl, delta_inverse, find_root,
                               maximize_1d)

# frozen against an independent high-precision (mpmath) evaluation
H_011 = 0.499915958164528
D_05_025 = 0.2075187496394219
DELTA_INV = 0.16960186844230644

probs = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
inner = st.floats(min_value=1e-6, max_value=1.0 - 1e-6)


def test_entropy_oracle_values():
    assert binary_entropy(0.11) == pytest.approx(H_011, abs=1e-14)
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == 1.0


def test_kl_oracle_value():
    assert binary_kl(0.5, 0.25) == pytest.approx(D_05_025, abs=1e-14)
    assert binary_kl(0.3, 0.3) == 0.0


def test_domain_errors():
    with pytest.raises(ValueError):
        binary_entropy(1.5)
    with pytest.raises(ValueError):
        binary_kl(0.5, 0.0)
    with pytest.raises(ValueError):
        binary_kl(-0.1, 0.5)
    with pytest.raises(ValueError):
        Tolerances(root_tol=0.0)
    with pytest.raises(ValueError):
        Tolerances(grid_points=10)


@given(probs)
def test_entropy_symmetry(x):
    assert binary_entropy(x) == pytest.approx(binary_entropy(1.0 - x),
                                              abs=1e-12)


@given(probs, inner)
def test_kl_nonnegative_and_zero_iff_equal(x, y):
    d = binary_kl(x, y)
    assert d >= 0.0
    if abs(x - y) > 1e-9:
        assert d > 0.0


@given(inner, inner)
def test_kl_entropy_identity(x, y):
    # D(x||y) = -H(x) - x log2 y - (1-x) log2(1-y)
    rhs = -binary_entropy(x) - x * math.log2(y) - (1 - x) * math.log2(1 - y)
    assert binary_kl(x, y) == pytest.approx(rhs, abs=1e-10)


def test_find_root_simple():
    r = find_root(lambda x: x * x - 2.0, 0.0, 2.0)
    assert r == pytest.approx(math.sqrt(2.0), abs=1e-11)


def test_find_root_requires_bracket():
    with pytest.raises(ValueError):
        find_root(lambda x: x * x + 1.0, -1.0, 1.0)


def test_find_root_endpoint_zero():
    assert find_root(lambda x: x - 1.0, 1.0, 2.0) == 1.0


def test_maximize_interior():
    x, v = maximize_1d(lambda x: -(x - 0.3) ** 2, 0.0, 1.0)
    assert x == pytest.approx(0.3, abs=1e-7)
    assert v == pytest.approx(0.0, abs=1e-12)


def test_maximize_boundary():
    x, v = maximize_1d(lambda x: x, 0.0, 1.0)
    assert x == 1.0 and v == 1.0


def test_maximize_invalid_interval():
    with pytest.raises(ValueError):
        maximize_1d(lambda x: x, 1.0, 0.0)


def test_delta_inverse_oracle():
    assert delta_inverse(0.0651, 0.3) == pytest.approx(DELTA_INV, abs=1e-11)


def test_delta_inverse_edges():
    assert delta_inverse(0.0, 0.3) == 0.3
    # at or beyond D(0||y) the nearest object sits at distance zero
    assert delta_inverse(-math.log2(0.7), 0.3) == 0.0
    assert delta_inverse(5.0, 0.3) == 0.0


@given(st.floats(min_value=1e-4, max_value=0.3),
       st.floats(min_value=0.05, max_value=0.95))
def test_delta_inverse_roundtrip(x, y):
    d = delta_inverse(x, y)
    if d > 0.0:
        assert binary_kl(d, y) == pytest.approx(x, abs=1e-9)
        assert d <= y
