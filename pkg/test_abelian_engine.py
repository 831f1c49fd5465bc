#!/usr/bin/env python3
"""
Tests for Abelian integrals and the Melnikov decomposition

This script tests:
1. Monomial quadrature against the small-orbit series
2. Symmetry-forced generators
3. Derivatives: finite differences against the period form
4. Monomial reduction: degree bounds, closure against quadrature on random monomials
5. Melnikov decomposition against direct quadrature, linearity in the perturbation
6. Perturbation bookkeeping and the displacement oracle
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.polynomial import Polynomial

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from modules.abelian_engine import (
    GENERATORS, PerturbationPoly, decompose_melnikov, degree_bounds, derivative_Iij,
    displacement_oracle, evaluate_decomposition, forced_zero, generator_vector,
    melnikov_eval, melnikov_quadrature, monomial_integral, reduce_monomial,
)
from modules.charts import center_annulus, center_level, family_params
from modules.hamiltonian_family import (
    SWAPPED, X_AXIS_MIRROR, Y_AXIS_MIRROR, HamiltonianParams, annuli,
)
from modules.melnikov_analyzer import random_perturbation
from utils.errors import DomainError

D6 = HamiltonianParams(3.0, -3.0, 1.0)


def _midpoint(annulus):
    lo, hi = annulus.bounds()
    return 0.5 * (lo + hi)


def test_area_integral_matches_series():
    """∮ y dx around the first center is −π(u + 11/8 u² + 259/64 u³ + 16235/1024 u⁴) + O(u⁵)"""
    params = family_params()
    annulus = center_annulus(params, "first")
    u = 0.01
    value = monomial_integral(params, annulus, center_level(u), 0, 1).value
    series = -math.pi * (u + 11 / 8 * u ** 2 + 259 / 64 * u ** 3 + 16235 / 1024 * u ** 4)
    assert value == pytest.approx(series, abs=1e-7)


def test_forced_zero_rules():
    """Odd i vanishes under the y-axis mirror, even j under the x-axis mirror"""
    assert forced_zero("I11", {Y_AXIS_MIRROR})
    assert not forced_zero("I02", {Y_AXIS_MIRROR})
    assert forced_zero("I02", {X_AXIS_MIRROR})
    assert forced_zero("I22", {X_AXIS_MIRROR})
    assert not forced_zero("I01", {X_AXIS_MIRROR})
    assert not forced_zero("I01", frozenset())


def test_generator_vector_symmetry():
    """Around (1/√2, 0) the x-axis mirror zeroes I02 and I22 exactly"""
    params = family_params()
    annulus = center_annulus(params, "first")
    assert X_AXIS_MIRROR in annulus.symmetry
    gv = generator_vector(params, annulus, 0.2)
    assert gv["I02"] == 0.0 and gv["I22"] == 0.0
    assert gv.as_array().shape == (len(GENERATORS),)
    assert gv["I01"] < 0.0
    assert not gv.flags


def test_symmetric_quadrature_is_small():
    """Symmetry-forced integrals also vanish when integrated directly"""
    params = family_params()
    annulus = center_annulus(params, "first")
    for i, j in ((0, 2), (2, 2)):
        assert abs(monomial_integral(params, annulus, 0.2, i, j).value) < 1e-10


def test_derivative_methods_agree():
    """Richardson differences and the period form give the same I01'"""
    params = family_params()
    annulus = center_annulus(params, "first")
    result = derivative_Iij(params, annulus, 0.15, 0, 1)
    assert result.method == "richardson"
    assert not result.flags
    assert result.value == pytest.approx(result.cross_check, rel=1e-5)

    period = derivative_Iij(params, annulus, 0.15, 0, 1, method="period")
    assert period.value == pytest.approx(result.cross_check, rel=1e-12)
    # dI01/dh = −d(area)/dh and the area shrinks as h grows toward the center
    assert period.value > 0.0


def test_derivative_guards():
    """Unknown methods and levels next to the boundary are domain errors"""
    params = family_params()
    annulus = center_annulus(params, "first")
    with pytest.raises(DomainError):
        derivative_Iij(params, annulus, 0.15, 0, 1, method="spline")
    with pytest.raises(DomainError):
        derivative_Iij(params, annulus, annulus.h_hi - 1e-7, 0, 1)


def test_degree_bounds():
    """Coefficient ceilings for odd and even levels"""
    assert degree_bounds(5) == {"I01": 1, "I03": 0, "I21": 0, "I12": 0, "I23": 0}
    assert degree_bounds(6) == {"I11": 1, "I02": 1, "I13": 0, "I22": 0}


def test_reduction_of_generators_is_identity():
    """A generator reduces to itself with coefficient 1"""
    reduction = reduce_monomial(D6, 2, 3)
    assert list(reduction.coefficients) == ["I23"]
    assert reduction.coefficients["I23"] == pytest.approx([1.0])


def test_reduction_closure_level_five():
    """I05, I41, I14, I32 reduced to generators match direct quadrature"""
    for ann in annuli(D6):
        h = _midpoint(ann)
        gv = generator_vector(D6, ann, h)
        for i, j in ((0, 5), (4, 1), (1, 4), (3, 2)):
            reduction = reduce_monomial(D6, i, j)
            assert reduction.within_bounds()
            direct = monomial_integral(D6, ann, h, i, j).value
            assert reduction.evaluate(gv) == pytest.approx(direct, rel=1e-7, abs=1e-9)


def _check_reduction_closure(params, pairs, levels, seed):
    """Reduced and direct I_ij agree on random interior levels of random annuli"""
    rng = np.random.default_rng(seed)
    found = annuli(params)
    for _ in range(levels):
        ann = found[int(rng.integers(len(found)))]
        lo, hi = ann.bounds(2.0)
        h = float(lo + rng.uniform(0.05, 0.95) * (hi - lo))
        gv = generator_vector(params, ann, h)
        for _ in range(pairs):
            degree = int(rng.integers(1, 12))
            i = int(rng.integers(0, degree + 1))
            j = degree - i
            reduction = reduce_monomial(params, i, j)
            direct = monomial_integral(params, ann, h, i, j).value
            terms = sum(abs(float(Polynomial(c)(h)) * gv[name])
                        for name, c in reduction.coefficients.items())
            floor = 1e-8 * max(1.0, terms, abs(direct))
            assert reduction.evaluate(gv) == pytest.approx(direct, rel=1e-7, abs=floor), (i, j, ann.id, h)


def test_reduction_closure_random_monomials():
    """Random I_ij with i + j ≤ 11 on two parameter sets"""
    for params in (D6, HamiltonianParams(-2.0, -3.0, 1.0)):
        _check_reduction_closure(params, pairs=12, levels=3, seed=5)


@pytest.mark.slow
def test_reduction_closure_random_monomials_full():
    """50 random I_ij with i + j ≤ 11 at 10 random levels, two parameter sets"""
    for params in (D6, HamiltonianParams(-2.0, -3.0, 1.0)):
        _check_reduction_closure(params, pairs=50, levels=10, seed=29)


def test_reduction_coefficients_are_copies():
    """Mutating a returned coefficient array leaves later reductions intact"""
    first = reduce_monomial(D6, 0, 5)
    kept = {name: c.copy() for name, c in first.coefficients.items()}
    for c in first.coefficients.values():
        c[:] = 0.0
    generator = reduce_monomial(D6, 0, 1)
    generator.coefficients["I01"][:] = 7.0

    again = reduce_monomial(D6, 0, 5)
    for name, c in kept.items():
        assert np.array_equal(again.coefficients[name], c)
    assert reduce_monomial(D6, 0, 1).coefficients["I01"] == pytest.approx([1.0])


def test_reduction_guards():
    """Reductions need the standard chart and a·(b² − 4ac) ≠ 0"""
    with pytest.raises(DomainError):
        reduce_monomial(HamiltonianParams(0.0, 1.0, 1.0), 0, 5)
    with pytest.raises(DomainError):
        reduce_monomial(HamiltonianParams(3.0, -3.0, 1.0, chart=SWAPPED), 0, 5)


def test_decomposition_matches_quadrature():
    """decompose_melnikov evaluated on the generators reproduces melnikov_eval"""
    rng = np.random.default_rng(7)
    for n in (3, 5):
        pert = random_perturbation(n, rng)
        decomposition = decompose_melnikov(D6, pert)
        for ann in annuli(D6):
            h = _midpoint(ann)
            direct = melnikov_eval(D6, pert, ann, h)
            reduced = evaluate_decomposition(decomposition, generator_vector(D6, ann, h))
            assert reduced == pytest.approx(direct, rel=1e-7, abs=1e-9)


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1), st.integers(min_value=1, max_value=5),
       st.floats(min_value=-2.0, max_value=2.0), st.floats(min_value=-2.0, max_value=2.0))
def test_melnikov_is_linear(seed, n, s, t):
    """I[s·p + t·q] = s·I[p] + t·I[q] for full random perturbations"""
    rng = np.random.default_rng(seed)
    p = random_perturbation(n, rng)
    q = random_perturbation(n, rng)
    for ann in annuli(D6):
        h = _midpoint(ann)
        ip = melnikov_eval(D6, p, ann, h)
        iq = melnikov_eval(D6, q, ann, h)
        combined = melnikov_eval(D6, p.combined(q, s, t), ann, h)
        scale = max(1.0, abs(s * ip) + abs(t * iq))
        assert combined == pytest.approx(s * ip + t * iq, abs=1e-12 * scale)


def test_perturbation_poly():
    """Degree checks, combination and evaluation"""
    with pytest.raises(DomainError):
        PerturbationPoly(n=2, b={(2, 1): 1.0})
    p = PerturbationPoly.from_tables(a={(1, 0): 2.0}, b={(0, 1): 1.0})
    assert p.n == 1
    q = PerturbationPoly(n=3, b={(0, 1): -1.0, (2, 1): 0.5})
    total = p.combined(q)
    assert total.n == 3
    assert total.b == {(0, 1): 0.0, (2, 1): 0.5}
    f, g = total.evaluate(2.0, 3.0)
    assert f == pytest.approx(4.0)
    assert g == pytest.approx(0.5 * 4.0 * 3.0)
    assert PerturbationPoly(n=2).is_zero()
    assert p.to_dict() == {"n": 1, "a_1_0": 2.0, "b_0_1": 1.0}


def test_melnikov_requires_interior_level():
    """Levels outside the annulus have no closed orbit"""
    params = family_params()
    annulus = center_annulus(params, "first")
    with pytest.raises(DomainError):
        melnikov_quadrature(params, PerturbationPoly(n=1, b={(0, 1): 1.0}), annulus, 0.5)


@pytest.mark.slow
def test_displacement_oracle_sign():
    """The first return of the perturbed flow moves H by ε times the flow-oriented I"""
    params = family_params()
    annulus = center_annulus(params, "first")
    pert = PerturbationPoly(n=1, b={(0, 1): 1.0})
    h = 0.2
    eps = 1e-6
    expected = annulus.flow_sign * melnikov_eval(params, pert, annulus, h)
    assert displacement_oracle(params, pert, annulus, h, eps) == pytest.approx(expected, rel=1e-3)


def main():
    print("=" * 60)
    print("Abelian Integral Toolkit - Abelian Engine Tests")
    print("=" * 60)

    test_area_integral_matches_series()
    test_forced_zero_rules()
    test_generator_vector_symmetry()
    test_symmetric_quadrature_is_small()
    test_derivative_methods_agree()
    test_derivative_guards()
    test_degree_bounds()
    test_reduction_of_generators_is_identity()
    test_reduction_closure_level_five()
    test_reduction_closure_random_monomials()
    test_reduction_closure_random_monomials_full()
    test_reduction_coefficients_are_copies()
    test_reduction_guards()
    test_decomposition_matches_quadrature()
    test_melnikov_is_linear()
    test_perturbation_poly()
    test_melnikov_requires_interior_level()
    test_displacement_oracle_sign()

    print("\n" + "=" * 60)
    print("Tests complete")
    print("=" * 60)


if __name__ == "__main__":
    main()
