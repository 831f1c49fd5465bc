#!/usr/bin/env python3
"""
Tests for the coefficient charts of the (−1, −2, 1) family

This script tests:
1. Chart conversions and their determinants
2. Perturbations built from chart quadruples
3. Chart responses against direct Melnikov quadrature
4. Level maps and annulus lookup per center and loop
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from modules.abelian_engine import PerturbationPoly, melnikov_eval
from modules.charts import (
    CHARTS, MONOMIALS, SQRT2, alpha_transforms, center_annulus, center_level, chart_from_perturbation,
    chart_matrix, chart_responses, family_params, hopf_flip, jacobian_det, loop_annulus, loop_level,
    perturbation,
)
from utils.errors import DomainError

coefficient = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)
quadruple = st.tuples(coefficient, coefficient, coefficient, coefficient)


@given(quadruple, st.sampled_from(CHARTS), st.sampled_from(CHARTS))
def test_conversions_invert(values, source, target):
    """Going to another chart and back returns the same quadruple"""
    there = alpha_transforms(values, source, target)
    back = alpha_transforms(there, target, source)
    assert back == pytest.approx(np.array(values), abs=1e-9)


def test_shift_to_first_center():
    """q1·xy at x = X + 1/√2 contributes q1/√2 to alpha0 and √2·q3 to alpha1"""
    alpha = alpha_transforms((0.0, 1.0, 0.0, 0.0), "q", "alpha")
    assert alpha == pytest.approx([SQRT2 / 2, 1.0, 0.0, 0.0])
    alpha = alpha_transforms((0.0, 0.0, 0.0, 1.0), "q", "alpha")
    assert alpha == pytest.approx([0.5, SQRT2, 0.0, 1.0])


def test_alphabar_is_scaled_q():
    q = np.array([1.0, -2.0, 0.5, 3.0])
    assert alpha_transforms(q, "q", "alphabar") == pytest.approx(-0.5 * q)


def test_determinants():
    assert jacobian_det("q", "alpha") == pytest.approx(1.0)
    assert jacobian_det("alpha", "alphahat") == pytest.approx(1.0)
    assert jacobian_det("q", "alphabar") == pytest.approx(1 / 16)


def test_unknown_chart():
    with pytest.raises(DomainError):
        chart_matrix("q", "polar")
    with pytest.raises(DomainError):
        alpha_transforms((1.0, 2.0, 3.0), "q", "alpha")


def test_hat_is_the_mirror_shift():
    """The second center sees alpha0 − √2 alpha1 + 2 alpha3 and alpha1 − 2√2 alpha3"""
    hat = alpha_transforms((0.0, 1.0, 0.0, 0.0), "alpha", "alphahat")
    assert hat == pytest.approx([-SQRT2, 1.0, 0.0, 0.0])
    assert hopf_flip(hat) == pytest.approx([-SQRT2, -1.0, 0.0, 0.0])


def test_perturbation_tables():
    """Perturbations live in the y-equation on the four cubic monomials"""
    pert = perturbation((1.0, 2.0, 3.0, 4.0), "q")
    assert pert.n == 3
    assert pert.a == {}
    assert pert.b == {m: v for m, v in zip(MONOMIALS, (1.0, 2.0, 3.0, 4.0))}


def test_chart_from_perturbation():
    """Chart keys resolve through q; extra table entries are added on top"""
    plain = chart_from_perturbation({"a": {(1, 0): 1.0}, "b": None})
    assert plain.a == {(1, 0): 1.0}

    merged = chart_from_perturbation({"alpha": [1.0, 0.0, 0.0, 0.0], "b": {(0, 1): 0.5}})
    assert merged.b[(0, 1)] == pytest.approx(1.5)

    bar = chart_from_perturbation({"baralpha": [1.0, 0.0, 0.0, 0.0]})
    assert bar.b[(0, 1)] == pytest.approx(-2.0)

    with pytest.raises(DomainError):
        chart_from_perturbation({"alpha": [1, 0, 0, 0], "baralpha": [1, 0, 0, 0]})


@settings(max_examples=5, deadline=None)
@given(quadruple)
def test_chart_responses_match_quadrature(alpha):
    """I(h) is linear in the chart coefficients"""
    params = family_params()
    annulus = center_annulus(params, "first")
    h = center_level(0.02)
    responses = chart_responses(params, annulus, h, "alpha")
    direct = melnikov_eval(params, perturbation(alpha, "alpha"), annulus, h)
    assert float(responses @ np.array(alpha)) == pytest.approx(direct, rel=1e-9, abs=1e-10)


def test_levels():
    assert center_level(0.0) == pytest.approx(0.25)
    assert center_level(0.01) == pytest.approx(0.23)
    assert loop_level(-0.01) == pytest.approx(0.02)


def test_annuli_per_center_and_loop():
    """Loops 1 and 2 are the center annuli; loop 3 lies below the saddle level"""
    params = family_params()
    first = center_annulus(params, "first")
    second = center_annulus(params, "second")
    assert first.id != second.id
    assert loop_annulus(params, 1) == first
    assert loop_annulus(params, 2) == second
    outer = loop_annulus(params, 3)
    assert outer.contains(-0.125)
    assert not outer.contains(0.125)
    assert any(math.isclose(p.x, 1 / SQRT2) for p in first.enclosed)
    with pytest.raises(DomainError):
        loop_annulus(params, 4)
    with pytest.raises(DomainError):
        center_annulus(params, "third")


def test_zero_quadruple_is_zero_perturbation():
    assert perturbation((0.0, 0.0, 0.0, 0.0)).is_zero()
    assert isinstance(perturbation((1.0, 0.0, 0.0, 0.0)), PerturbationPoly)


def main():
    print("=" * 60)
    print("Abelian Integral Toolkit - Chart Tests")
    print("=" * 60)

    test_conversions_invert()
    test_shift_to_first_center()
    test_alphabar_is_scaled_q()
    test_determinants()
    test_unknown_chart()
    test_hat_is_the_mirror_shift()
    test_perturbation_tables()
    test_chart_from_perturbation()
    test_chart_responses_match_quadrature()
    test_levels()
    test_annuli_per_center_and_loop()
    test_zero_quadruple_is_zero_perturbation()

    print("\n" + "=" * 60)
    print("Tests complete")
    print("=" * 60)


if __name__ == "__main__":
    main()
