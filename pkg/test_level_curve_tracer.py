#!/usr/bin/env python3
"""
Tests for closed level-curve tracing

This script tests:
1. Biquadratic branch solves in both charts
2. Orbit tracing: closure, level error, orientation and enclosed area
3. Area convergence under refinement and monotonicity across nested orbits
4. Mirror-closed vertex sets on x-axis symmetric annuli
5. Closure at random interior levels, domain checks outside the annulus
6. CSV export of an orbit
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

import config
from modules.abelian_engine import monomial_integral
from modules.charts import center_annulus, center_level, family_params
from modules.hamiltonian_family import (
    SWAPPED, X_AXIS_MIRROR, HamiltonianParams, annuli, annulus_for, eval_H,
)
from modules.level_curve_tracer import branch_solve, branch_solve_x, orbit_csv, trace_orbit
from utils.errors import DomainError

D6 = HamiltonianParams(3.0, -3.0, 1.0)


def test_branch_solve_roots():
    """All four y-roots of H(0, y) = −1/4 for (1, 0, 0.5)"""
    params = HamiltonianParams(1.0, 0.0, 0.5)
    ys = branch_solve(params, -0.25, 0.0)
    assert len(ys) == 4
    expected = sorted(s * math.sqrt(1.0 + t * math.sqrt(0.5)) for s in (1, -1) for t in (1, -1))
    assert ys == pytest.approx(expected, abs=1e-12)


@settings(max_examples=50)
@given(st.floats(min_value=-0.9, max_value=0.9), st.floats(min_value=-0.2, max_value=0.2))
def test_branch_solves_land_on_level(x, h):
    """Every returned root satisfies H = h, in both charts"""
    for params in (HamiltonianParams(-1.0, -2.0, 1.0), HamiltonianParams(0.0, 1.0, 1.0, chart=SWAPPED)):
        for y in branch_solve(params, h, x):
            assert eval_H(params, x, y) == pytest.approx(h, abs=1e-10)
        for u in branch_solve_x(params, h, x):
            assert eval_H(params, u, x) == pytest.approx(h, abs=1e-10)


def test_trace_small_orbit():
    """A small orbit around the first center is a near-circle of area π m²"""
    params = family_params()
    annulus = center_annulus(params, "first")
    u = 0.01
    h = center_level(u)
    orbit = trace_orbit(params, annulus, h)

    assert orbit.n >= config.N_MIN_DEFAULT
    assert orbit.closure_gap < config.GEOM_TOL
    assert orbit.level_error <= config.LEVEL_TOL
    assert orbit.flow_ccw
    assert orbit.area > 0.0
    assert orbit.area == pytest.approx(math.pi * u, rel=0.05)

    values = eval_H(params, orbit.points[:, 0], orbit.points[:, 1])
    assert np.max(np.abs(values - h)) <= config.LEVEL_TOL
    center = np.array([1 / math.sqrt(2), 0.0])
    radii = np.hypot(*(orbit.points - center).T)
    assert radii.min() > 0.8 * math.sqrt(u)
    assert radii.max() < 1.2 * math.sqrt(u)


def test_velocities_follow_the_polyline():
    """Vertices advance counterclockwise by about v·dt"""
    params = family_params()
    orbit = trace_orbit(params, center_annulus(params, "second"), center_level(0.02))
    step = np.roll(orbit.points, -1, axis=0) - orbit.points
    predicted = orbit.velocities * orbit.dt
    assert np.max(np.abs(step - predicted)) < 0.05 * np.max(np.abs(predicted))


def _interior(annulus, fraction):
    lo, hi = annulus.bounds(2.0)
    return lo + fraction * (hi - lo)


def test_area_converges_under_refinement():
    """Four times the vertices moves the area by less than 1e-9, which equals −I01"""
    params = family_params()
    annulus = annuli(params)[0]
    h = _interior(annulus, 0.5)
    coarse = trace_orbit(params, annulus, h, n_min=256)
    fine = trace_orbit(params, annulus, h, n_min=1024)
    assert fine.n >= 4 * 256
    assert abs(fine.area - coarse.area) < 1e-9 * abs(fine.area)
    assert coarse.area == pytest.approx(-monomial_integral(params, annulus, h, 0, 1).value, rel=1e-9)


def test_area_monotone_across_nested_orbits():
    """Orbits of one annulus are nested, so the area is strictly monotone in h"""
    for params in (family_params(), D6):
        for annulus in annuli(params):
            areas = np.array([trace_orbit(params, annulus, _interior(annulus, f)).area
                              for f in np.linspace(0.05, 0.95, 6)])
            steps = np.diff(areas)
            print(f"  ✓ ({params.a}, {params.b}, {params.c}) annulus {annulus.id}: "
                  f"area {areas[0]:.6g} -> {areas[-1]:.6g}")
            assert np.all(areas > 0.0)
            assert np.all(steps > 0.0) or np.all(steps < 0.0)


def test_mirror_closed_vertices():
    """On an x-axis symmetric annulus the vertex set maps onto itself under y -> −y"""
    annulus = annulus_for(D6, 1.0)
    assert X_AXIS_MIRROR in annulus.symmetry
    orbit = trace_orbit(D6, annulus, 1.0)

    vertices = orbit.points
    chord = np.roll(vertices, -1, axis=0) - vertices
    mirrored = orbit.points * np.array([1.0, -1.0])
    offset = mirrored[:, None, :] - vertices[None, :, :]
    t = np.clip((offset * chord[None]).sum(axis=2) / (chord ** 2).sum(axis=1)[None], 0.0, 1.0)
    gaps = np.hypot(*(offset - t[..., None] * chord[None]).transpose(2, 0, 1)).min(axis=1)
    assert gaps.max() <= config.GEOM_TOL


@settings(max_examples=20, deadline=None)
@given(st.floats(min_value=0.01, max_value=0.99), st.floats(min_value=2e-6, max_value=0.05))
def test_random_levels_close(fraction, outside):
    """Interior levels of every annulus close; levels beyond its ends are refused"""
    for params in (family_params(), D6):
        for annulus in annuli(params):
            h = _interior(annulus, fraction)
            orbit = trace_orbit(params, annulus, h)
            assert orbit.closure_gap <= config.GEOM_TOL * max(1.0, float(np.abs(orbit.points).max()))

            for end, away in ((annulus.h_lo, -outside), (annulus.h_hi, outside)):
                if math.isinf(end):
                    continue
                with pytest.raises(DomainError):
                    trace_orbit(params, annulus, end + away)


def test_trace_rejects_bad_levels():
    """Levels outside the annulus and tiny vertex counts are domain errors"""
    params = family_params()
    annulus = center_annulus(params, "first")
    with pytest.raises(DomainError):
        trace_orbit(params, annulus, 0.3)
    with pytest.raises(DomainError):
        trace_orbit(params, annulus, annulus.h_lo)
    with pytest.raises(DomainError):
        trace_orbit(params, annulus, 0.2, n_min=8)


def test_orbit_csv():
    """CSV export carries the level and annulus in its header"""
    params = family_params()
    annulus = center_annulus(params, "first")
    orbit = trace_orbit(params, annulus, 0.2, n_min=64)
    lines = orbit_csv(orbit).splitlines()
    assert lines[0] == f"# h=0.2 annulus={annulus.id}"
    assert lines[1] == "x,y"
    assert len(lines) == orbit.n + 2


def main():
    print("=" * 60)
    print("Abelian Integral Toolkit - Level Curve Tests")
    print("=" * 60)

    test_branch_solve_roots()
    test_branch_solves_land_on_level()
    test_trace_small_orbit()
    test_velocities_follow_the_polyline()
    test_area_converges_under_refinement()
    test_area_monotone_across_nested_orbits()
    test_mirror_closed_vertices()
    test_random_levels_close()
    test_trace_rejects_bad_levels()
    test_orbit_csv()

    print("\n" + "=" * 60)
    print("Tests complete")
    print("=" * 60)


if __name__ == "__main__":
    main()
