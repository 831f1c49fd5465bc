#!/usr/bin/env python3
"""
Tests for the Hamiltonian family

This script tests:
1. Region classification, sub-labels, the boundary tolerance and the partition property
2. Evaluation in the standard and swapped charts
3. Singular points and their levels
4. Period annuli, symmetry flags and annulus lookup
5. Zeros of the gating polynomial G1
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from modules.abelian_engine import PerturbationPoly
from modules.hamiltonian_family import (
    NO_ANNULUS, STANDARD, SWAPPED, X_AXIS_MIRROR, Y_AXIS_MIRROR,
    HamiltonianParams, annuli, annulus_for, classify_region, critical_levels,
    critical_points, eval_H, g1_zeros, gradient, perturbed_field, vector_field,
)
from utils.errors import ClassificationConflict, DomainError

coefficient = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)
point = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)


def test_classify_examples():
    """Reference points land in their regions"""
    cases = [
        ((3.0, -3.0, 1.0), "D6+"),
        ((-1.0, -2.0, 1.0), "l2+"),
        ((1.0, 0.0, 0.5), "D5+"),
        ((-1.0, 3.0, -4.0), "D3−"),
        ((-2.0, -3.0, 1.0), "D1+(1)"),
        ((-1.0, -3.0, 1.0), "D1+(2)"),
    ]
    for (a, b, c), expected in cases:
        region = classify_region(HamiltonianParams(a, b, c))
        print(f"  ✓ ({a}, {b}, {c}) -> {region.tag}")
        assert region.tag == expected


def test_classify_degenerate_flags():
    """a = 0 and a = b = 0 are carried as flags"""
    region = classify_region(HamiltonianParams(0.0, 1.0, 1.0))
    assert region.tag == "D5+"
    assert region.a_zero and not region.ab_zero

    region = classify_region(HamiltonianParams(0.0, 0.0, 1.0))
    assert region.a_zero and region.ab_zero
    assert region.has_annuli


def test_classify_tolerance_snaps_to_boundary():
    """A near-boundary point reclassifies onto the boundary stratum"""
    params = HamiltonianParams(-1.0, -2.0 + 1e-12, 1.0)
    assert classify_region(params).tag == "D3+"
    assert classify_region(params, tol=1e-9).tag == "l2+"


def test_no_annulus_region():
    """Parameters outside every set report NoAnnulus and have no annuli"""
    params = HamiltonianParams(1.0, 1.0, -1.0)
    region = classify_region(params)
    assert region.tag == NO_ANNULUS
    assert not region.has_annuli
    assert annuli(params) == []


def _single_label(a, b, c):
    try:
        tag = classify_region(HamiltonianParams(a, b, c)).tag
    except ClassificationConflict as exc:
        pytest.fail(f"({a}, {b}, {c}) has several labels: {exc}")
    assert tag == NO_ANNULUS or ("+" if c > 0 else "−") in tag
    return tag


def test_regions_partition_the_plane():
    """10⁴ random (a, b) at c = ±1 each get exactly one label"""
    rng = np.random.default_rng(17)
    seen = set()
    for a, b in rng.uniform(-5.0, 5.0, size=(5000, 2)):
        for c in (1.0, -1.0):
            seen.add(_single_label(float(a), float(b), c))
    print(f"  ✓ {len(seen)} distinct labels")
    assert NO_ANNULUS in seen
    assert {"D6+", "D3−"} <= seen


@settings(max_examples=500)
@given(st.floats(min_value=-5.0, max_value=5.0, allow_nan=False),
       st.floats(min_value=-5.0, max_value=5.0, allow_nan=False),
       st.sampled_from([1.0, -1.0]))
def test_regions_partition_property(a, b, c):
    _single_label(a, b, c)


def test_params_validation():
    """c = 0, unknown charts and non-finite coefficients are rejected"""
    with pytest.raises(DomainError):
        HamiltonianParams(1.0, 1.0, 0.0)
    with pytest.raises(DomainError):
        HamiltonianParams(1.0, 1.0, 1.0, chart="polar")
    with pytest.raises(DomainError):
        HamiltonianParams(float("nan"), 1.0, 1.0)


@given(coefficient, coefficient, point, point)
def test_eval_H_charts(a, b, x, y):
    """The swapped chart evaluates H(y, x)"""
    c = 1.0
    standard = HamiltonianParams(a, b, c, chart=STANDARD)
    swapped = HamiltonianParams(a, b, c, chart=SWAPPED)
    expected = x * x - y * y + a * x ** 4 + b * x * x * y * y + c * y ** 4
    assert eval_H(standard, x, y) == pytest.approx(expected, abs=1e-12)
    assert eval_H(swapped, y, x) == pytest.approx(expected, abs=1e-12)


@given(point, point)
def test_vector_field_is_hamiltonian(x, y):
    """The flow is (H_y, −H_x), so it is orthogonal to the gradient"""
    params = HamiltonianParams(-1.0, -2.0, 1.0)
    hx, hy = gradient(params, x, y)
    u, v = vector_field(params, x, y)
    assert u * hx + v * hy == pytest.approx(0.0, abs=1e-9)


def test_perturbed_field_adds_the_perturbation():
    params = HamiltonianParams(-1.0, -2.0, 1.0)
    pert = PerturbationPoly(n=3, a={(1, 0): 1.0}, b={(0, 1): 0.5, (2, 1): -1.0})
    x, y = 0.3, -0.4
    u0, v0 = vector_field(params, x, y)
    u, v = perturbed_field(params, pert, 0.1, x, y)
    assert u == pytest.approx(u0 + 0.1 * x)
    assert v == pytest.approx(v0 + 0.1 * (0.5 * y - x * x * y))


def test_critical_points_of_fixed_family():
    """(−1, −2, 1) has a saddle at the origin and centers at (±1/√2, 0) on level 1/4"""
    points = critical_points(HamiltonianParams(-1.0, -2.0, 1.0))
    centers = sorted((p for p in points if p.kind == "center"), key=lambda p: p.x)
    saddles = [p for p in points if p.kind == "saddle"]

    assert len(centers) == 2
    assert centers[0].x == pytest.approx(-1 / math.sqrt(2))
    assert centers[1].x == pytest.approx(1 / math.sqrt(2))
    for p in centers:
        assert p.y == pytest.approx(0.0, abs=1e-12)
        assert p.level == pytest.approx(0.25)
    assert any(abs(p.x) < 1e-12 and abs(p.y) < 1e-12 and p.level == 0.0 for p in saddles)


def test_critical_points_d6():
    """(3, −3, 1) has four centers on level −1/3 and saddles on −1/4 and 0"""
    params = HamiltonianParams(3.0, -3.0, 1.0)
    centers = [p for p in critical_points(params) if p.kind == "center"]
    assert len(centers) == 4
    for p in centers:
        assert abs(p.x) == pytest.approx(1 / math.sqrt(3))
        assert abs(p.y) == pytest.approx(1.0)
        assert p.level == pytest.approx(-1 / 3)
    levels = critical_levels(params)
    assert levels == pytest.approx([-1 / 3, -0.25, 0.0], abs=1e-12)


def test_annuli_d5():
    """(1, 0, 0.5): two inner annuli on (−1/2, 0) and one unbounded outer annulus"""
    params = HamiltonianParams(1.0, 0.0, 0.5)
    found = annuli(params)
    assert len(found) == 3

    inner = [ann for ann in found if not ann.unbounded]
    outer = [ann for ann in found if ann.unbounded]
    assert len(inner) == 2 and len(outer) == 1
    for ann in inner:
        assert ann.h_lo == pytest.approx(-0.5)
        assert ann.h_hi == pytest.approx(0.0, abs=1e-12)
        assert Y_AXIS_MIRROR in ann.symmetry
        assert X_AXIS_MIRROR not in ann.symmetry
    assert outer[0].h_lo == pytest.approx(0.0, abs=1e-12)
    assert math.isinf(outer[0].h_hi)
    assert outer[0].symmetry == {X_AXIS_MIRROR, Y_AXIS_MIRROR}
    assert [ann.id for ann in found] == list(range(3))


def test_annulus_lookup():
    """annulus_for picks the enclosing annulus and rejects levels without orbits"""
    params = HamiltonianParams(1.0, 0.0, 0.5)
    upper = annulus_for(params, -0.25, enclosing=(0.0, 1.0))
    assert upper.contains(-0.25)
    assert any(abs(p.y - 1.0) < 1e-9 for p in upper.enclosed)
    with pytest.raises(DomainError):
        annulus_for(params, -1.0)


def test_fixed_family_flow_orientation():
    """Orbits around the centers of (−1, −2, 1) run counterclockwise"""
    params = HamiltonianParams(-1.0, -2.0, 1.0)
    first = annulus_for(params, 0.125, enclosing=(1 / math.sqrt(2), 0.0))
    assert first.flow_ccw
    assert first.flow_sign == 1.0
    assert first.h_lo == pytest.approx(0.0, abs=1e-12)
    assert first.h_hi == pytest.approx(0.25)


def test_g1_zeros_d6():
    """(3, −3, 1): zeros 0, −1/4, −1/12, −1/3, with −1/12 inside an annulus"""
    zeros = {z.name: z for z in g1_zeros(HamiltonianParams(3.0, -3.0, 1.0))}
    assert zeros["h1"].h == 0.0
    assert zeros["h2"].h == pytest.approx(-0.25)
    assert zeros["h3"].h == pytest.approx(-1 / 12)
    assert zeros["h4"].h == pytest.approx(-1 / 3)
    assert zeros["h3"].inside_annulus


def test_g1_zeros_need_a():
    """G1 is undefined for a = 0"""
    with pytest.raises(DomainError):
        g1_zeros(HamiltonianParams(0.0, 1.0, 1.0))


def main():
    print("=" * 60)
    print("Abelian Integral Toolkit - Hamiltonian Family Tests")
    print("=" * 60)

    test_classify_examples()
    test_classify_degenerate_flags()
    test_classify_tolerance_snaps_to_boundary()
    test_no_annulus_region()
    test_regions_partition_the_plane()
    test_regions_partition_property()
    test_params_validation()
    test_eval_H_charts()
    test_vector_field_is_hamiltonian()
    test_perturbed_field_adds_the_perturbation()
    test_critical_points_of_fixed_family()
    test_critical_points_d6()
    test_annuli_d5()
    test_annulus_lookup()
    test_fixed_family_flow_orientation()
    test_g1_zeros_d6()
    test_g1_zeros_need_a()

    print("\n" + "=" * 60)
    print("Tests complete")
    print("=" * 60)


if __name__ == "__main__":
    main()
