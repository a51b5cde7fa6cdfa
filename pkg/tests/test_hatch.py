"""Hatching-rate families: values, derivatives, stability, serialization."""

import math
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hatchcycle import (Arctan, Constant, Hill, InverseHill, Step,
                        hatch_from_dict, hatch_to_dict)

FAMILIES = [
    Arctan(a=0.1, b=4.0, L_ref=1.13),
    Hill(h_m=0.2, a=1.0, lam=2.0, p=3.0),
    InverseHill(h_m=0.2, a=1.0, lam=2.0, p=3.0),
    Step(h_m=0.1, a=0.5, threshold=2.0),
    Constant(k=0.3),
]


def test_arctan_midpoint_slope_supremum():
    h = Arctan(a=0.1, b=4.0, L_ref=1.13)
    assert h.value(1.13) == pytest.approx(0.1 * math.pi / 2.0, rel=1e-15)
    assert h.derivative(1.13) == pytest.approx(0.4, rel=1e-15)
    assert h.supremum == pytest.approx(0.1 * math.pi)
    assert h.second_derivative(1.13) == 0.0
    # strictly increasing and positive on either side of the midpoint
    assert 0.0 < h.value(0.0) < h.value(1.13) < h.value(10.0) < h.supremum


def test_hill_midpoint_and_limits():
    h = Hill(h_m=0.2, a=1.0, lam=2.0, p=3.0)
    assert h.value(2.0) == pytest.approx(0.7, rel=1e-15)
    assert h.value(0.0) == pytest.approx(0.2)
    assert h.value(1e9) == pytest.approx(1.2)
    assert h.supremum == 1.2
    # at the midpoint: h' = a p / (4 lam), h'' = -2 a p / (8 lam^2) * ... spelled out
    assert h.derivative(2.0) == pytest.approx(1.0 * 3.0 * 0.25 / 2.0, rel=1e-14)
    assert h.second_derivative(2.0) == pytest.approx(3.0 * (-0.25) / 4.0, rel=1e-14)


def test_inverse_hill_mirrors_hill():
    up = Hill(h_m=0.2, a=1.0, lam=2.0, p=3.0)
    down = InverseHill(h_m=0.2, a=1.0, lam=2.0, p=3.0)
    for L in (0.0, 0.5, 2.0, 7.0):
        assert up.value(L) + down.value(L) == pytest.approx(2 * 0.2 + 1.0, rel=1e-14)
    assert down.value(0.0) == pytest.approx(1.2)
    assert down.value(1e9) == pytest.approx(0.2)
    assert down.derivative(2.0) == pytest.approx(-up.derivative(2.0), rel=1e-14)


def test_hill_steep_exponents_do_not_overflow():
    h = Hill(h_m=0.001, a=1.0, lam=1.0, p=2000.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        below = h.value(0.999)
        above = h.value(1.001)
        far = h.value(50.0)
        d = h.derivative(1.001)
    assert 0.001 < below < 0.5
    assert 0.5 < above <= 1.001
    assert far == pytest.approx(1.001, rel=1e-12)
    assert math.isfinite(d) and d > 0.0
    assert h.value(1.0) == pytest.approx(0.001 + 0.5, rel=1e-14)


def test_step_values_and_derivative():
    h = Step(h_m=0.1, a=0.5, threshold=2.0)
    assert h.value(1.9) == 0.1
    assert h.value(2.1) == pytest.approx(0.6)
    assert h.value(2.0) == pytest.approx(0.35)
    assert h.derivative(1.0) == 0.0
    assert h.derivative(3.0) == 0.0
    assert h.supremum == pytest.approx(0.6)
    with pytest.raises(ValueError, match="not differentiable"):
        h.derivative(2.0)
    assert not hasattr(h, "second_derivative")


def test_constant():
    h = Constant(k=0.3)
    assert h.value(0.0) == h.value(123.0) == 0.3
    assert h.derivative(5.0) == 0.0
    assert h.second_derivative(5.0) == 0.0
    assert h.supremum == 0.3


@pytest.mark.parametrize("h", FAMILIES, ids=lambda h: type(h).__name__)
def test_positive_and_bounded(h):
    for L in (0.0, 0.01, 0.5, 1.0, 2.5, 10.0, 1e6):
        v = h.value(L)
        assert 0.0 < v <= h.supremum * (1 + 1e-12)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_rejects_nonpositive_parameters(bad):
    with pytest.raises(ValueError):
        Arctan(a=bad, b=4.0, L_ref=1.13)
    with pytest.raises(ValueError):
        Hill(h_m=0.2, a=1.0, lam=bad, p=3.0)
    with pytest.raises(ValueError):
        Constant(k=bad)


@given(
    a=st.floats(0.01, 10.0),
    b=st.floats(0.1, 20.0),
    L_ref=st.floats(0.1, 5.0),
    L=st.floats(0.01, 8.0),
)
@settings(max_examples=60)
def test_arctan_derivative_matches_finite_difference(a, b, L_ref, L):
    h = Arctan(a=a, b=b, L_ref=L_ref)
    eps = 1e-6 * max(1.0, abs(L))
    fd = (h.value(L + eps) - h.value(L - eps)) / (2 * eps)
    assert h.derivative(L) == pytest.approx(fd, rel=1e-6, abs=1e-9 * a * b)


@given(
    h_m=st.floats(0.001, 1.0),
    a=st.floats(0.01, 5.0),
    lam=st.floats(0.2, 4.0),
    p=st.floats(1.0, 12.0),
    L=st.floats(0.05, 8.0),
    decreasing=st.booleans(),
)
@settings(max_examples=80)
def test_hill_derivatives_match_finite_difference(h_m, a, lam, p, L, decreasing):
    cls = InverseHill if decreasing else Hill
    h = cls(h_m=h_m, a=a, lam=lam, p=p)
    eps = 1e-5 * max(L, 0.1)
    fd1 = (h.value(L + eps) - h.value(L - eps)) / (2 * eps)
    fd2 = (h.derivative(L + eps) - h.derivative(L - eps)) / (2 * eps)
    scale = a * p / lam
    assert h.derivative(L) == pytest.approx(fd1, rel=2e-5, abs=1e-7 * scale)
    assert h.second_derivative(L) == pytest.approx(fd2, rel=2e-4, abs=1e-5 * scale)


def test_hill_derivative_at_origin_exponent_cases():
    assert Hill(h_m=0.1, a=2.0, lam=4.0, p=1.0).derivative(0.0) == pytest.approx(0.5)
    assert Hill(h_m=0.1, a=2.0, lam=4.0, p=3.0).derivative(0.0) == 0.0
    assert InverseHill(h_m=0.1, a=2.0, lam=4.0, p=1.0).derivative(0.0) == pytest.approx(-0.5)
    assert Hill(h_m=0.1, a=2.0, lam=4.0, p=2.0).second_derivative(0.0) == pytest.approx(0.25)
    assert Hill(h_m=0.1, a=2.0, lam=4.0, p=1.0).second_derivative(0.0) == pytest.approx(-0.25)
    assert Hill(h_m=0.1, a=2.0, lam=4.0, p=1.5).second_derivative(0.0) == math.inf
    assert Hill(h_m=0.1, a=2.0, lam=4.0, p=2.5).second_derivative(0.0) == 0.0


@pytest.mark.parametrize("h", FAMILIES, ids=lambda h: type(h).__name__)
def test_dict_round_trip(h):
    doc = hatch_to_dict(h)
    assert doc["family"] in {"arctan", "hill", "inverse_hill", "step", "constant"}
    assert hatch_from_dict(doc) == h


def test_hill_serializes_lambda_field():
    doc = Hill(h_m=0.2, a=1.0, lam=2.0, p=3.0).to_dict()
    assert doc["lambda"] == 2.0
    assert "lam" not in doc
    assert hatch_from_dict(doc).lam == 2.0


def test_from_dict_rejects_malformed_documents():
    with pytest.raises(ValueError, match="family"):
        hatch_from_dict({"a": 1.0})
    with pytest.raises(ValueError, match="unknown hatch family"):
        hatch_from_dict({"family": "spline", "a": 1.0})
    with pytest.raises(ValueError, match="missing fields"):
        hatch_from_dict({"family": "arctan", "a": 1.0, "b": 2.0})
    with pytest.raises(ValueError, match="unexpected fields"):
        hatch_from_dict({"family": "constant", "k": 1.0, "slope": 2.0})
