#!/usr/bin/env python3
"""
Tests for the small-amplitude expansion at the two centers

This script tests:
1. The polar radius series: closed forms, reversion and level residuals
2. Closed-form coefficients against θ-quadrature
3. The degenerate point where the first three coefficients vanish
4. Series against direct Melnikov quadrature near both centers
5. Three small limit cycles per center
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from modules.abelian_engine import melnikov_eval
from modules.charts import SQRT2, center_annulus, center_level, family_params, perturbation
from modules.hopf_expansion import (
    A_CLOSED, B_CLOSED, D_CLOSED, HopfDelta, center_window, delta_zero, design_hopf_three,
    hopf_coefficients, hopf_quadrature_coefficients, jacobian, level_residual,
    melnikov_coefficients, radius_closed_form, radius_coefficients,
)
from utils.errors import DomainError

PI = math.pi
THETA = np.linspace(0.0, 2.0 * PI, 17)

coefficient = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)


def test_radius_closed_forms():
    """e2, e3, e4 from the reversion agree with their closed forms"""
    coeffs = radius_coefficients(THETA, 4)
    assert coeffs[0] == pytest.approx(np.zeros_like(THETA))
    assert coeffs[1] == pytest.approx(np.ones_like(THETA))
    for k in (2, 3, 4):
        assert coeffs[k] == pytest.approx(radius_closed_form(THETA, k), abs=1e-12)
    with pytest.raises(DomainError):
        radius_closed_form(THETA, 5)


def test_second_center_radius_is_mirrored():
    """Odd coefficients flip sign with cos θ at the second center"""
    first = radius_coefficients(THETA, 4, "first")
    second = radius_coefficients(THETA + PI, 4, "second")
    assert second == pytest.approx(first, abs=1e-12)


def test_level_residual_order():
    """Higher truncation orders leave a smaller level residual"""
    m = 0.01
    low = np.max(np.abs(level_residual(THETA, m, 2)))
    high = np.max(np.abs(level_residual(THETA, m, 6)))
    assert high < 1e-12
    assert high < low
    assert np.max(np.abs(level_residual(THETA, m, 6, "second"))) < 1e-12


def test_closed_form_leading_columns():
    """a1 = −π alpha0; a2 = π(−11/8, √2/2, −3/4, −1/4)"""
    assert A_CLOSED[0] == pytest.approx([-PI, 0.0, 0.0, 0.0])
    assert A_CLOSED[1] == pytest.approx(PI * np.array([-11 / 8, SQRT2 / 2, -0.75, -0.25]))
    assert B_CLOSED == pytest.approx(-A_CLOSED)


@settings(max_examples=10, deadline=None)
@given(coefficient, coefficient, coefficient, coefficient)
def test_closed_forms_match_quadrature(a0, a1, a2, a3):
    """θ-quadrature reproduces the closed-form coefficients at both centers"""
    delta = HopfDelta(a0, a1, a2, a3)
    for center in ("first", "second"):
        series = hopf_coefficients(delta, center, check=True)
        assert not series.flags
        numeric = hopf_quadrature_coefficients(delta, center, 4)
        assert numeric == pytest.approx(series.coefficients, abs=1e-8)


def test_second_center_leading_coefficient():
    """d1 = π times the alphahat constant term"""
    delta = HopfDelta(0.3, -0.2, 0.5, 0.7)
    series = hopf_coefficients(delta, "second")
    assert series.kind == "d"
    assert series.coefficients[0] == pytest.approx(PI * delta.hat[0])


def test_delta_zero_first_center():
    """(0, 3√2/5, 7/15, 1) kills b1..b3 and leaves b4 = −5π/16"""
    delta = delta_zero("first", 1.0)
    assert delta.as_array() == pytest.approx([0.0, 3 * SQRT2 / 5, 7 / 15, 1.0])
    b = B_CLOSED @ delta.as_array()
    assert b[:3] == pytest.approx(np.zeros(3), abs=1e-12)
    assert b[3] == pytest.approx(-5 * PI / 16)


def test_delta_zero_second_center():
    delta = delta_zero("second", 2.0)
    d = D_CLOSED @ delta.as_array()
    assert d[:3] == pytest.approx(np.zeros(3), abs=1e-10)
    assert delta.alpha3 == 2.0
    assert d[3] != pytest.approx(0.0)
    with pytest.raises(DomainError):
        delta_zero("first", 0.0)


def test_jacobians_are_regular():
    """The alpha0..alpha2 Jacobian of (b1, b2, b3) is 15√2π³/32"""
    assert np.linalg.det(jacobian("first")) == pytest.approx(15 * SQRT2 * PI ** 3 / 32)
    assert abs(np.linalg.det(jacobian("second"))) > 1e-6
    with pytest.raises(DomainError):
        jacobian("third")


def test_series_matches_quadrature():
    """I near each center agrees with its u-series truncated at u^8"""
    params = family_params()
    delta = HopfDelta(0.05, 0.4, -0.3, 0.9)
    pert = perturbation(delta.as_array(), "alpha")
    u = 0.01
    h = center_level(u)
    powers = u ** np.arange(1, 9)

    first = center_annulus(params, "first")
    b = melnikov_coefficients(delta, "first", 8)
    assert melnikov_eval(params, pert, first, h) == pytest.approx(-float(b @ powers), rel=1e-8, abs=1e-12)

    second = center_annulus(params, "second")
    d = melnikov_coefficients(delta, "second", 8)
    assert melnikov_eval(params, pert, second, h) == pytest.approx(-float(d @ powers), rel=1e-8, abs=1e-12)


def test_center_window():
    lo, hi = center_window(1e-3)
    assert lo == pytest.approx(center_level(4e-3))
    assert hi == pytest.approx(center_level(2.5e-4))
    assert lo < hi


@pytest.mark.slow
def test_three_small_cycles():
    """Each center carries three zeros of I near m² = ε, 2ε, 3ε"""
    for center in ("first", "second"):
        design = design_hopf_three(center)
        assert design.verified
        assert len(design.zeros) == 3
        lo, hi = design.window
        assert all(lo < z < hi for z in design.zeros)


def main():
    print("=" * 60)
    print("Abelian Integral Toolkit - Hopf Expansion Tests")
    print("=" * 60)

    test_radius_closed_forms()
    test_second_center_radius_is_mirrored()
    test_level_residual_order()
    test_closed_form_leading_columns()
    test_closed_forms_match_quadrature()
    test_second_center_leading_coefficient()
    test_delta_zero_first_center()
    test_delta_zero_second_center()
    test_jacobians_are_regular()
    test_series_matches_quadrature()
    test_center_window()
    test_three_small_cycles()

    print("\n" + "=" * 60)
    print("Tests complete")
    print("=" * 60)


if __name__ == "__main__":
    main()
