"""
Closed level curves of the Hamiltonian family

Orbits are traced by integrating the Hamiltonian flow once around the level
curve, so the vertices come with a uniform time step and their velocities.
For periodic integrands the trapezoid rule on such a grid converges
spectrally, which is what the quadrature in abelian_engine relies on.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

import config
from modules.hamiltonian_family import (
    X_AXIS_MIRROR, HamiltonianParams, PeriodAnnulus, critical_points, eval_H, gradient, ray_crossing,
)
from utils.errors import DomainError, NumericalFailure
from utils.io import dump_csv
from utils.numerics import refine_root


# ---------------------------------------------------------------------------
# Biquadratic branch solves
# ---------------------------------------------------------------------------

def _quadratic_roots(p2: float, p1: float, p0: float) -> List[float]:
    """Real roots of p2 Y^2 + p1 Y + p0 = 0 (p2 may vanish)"""
    if p2 == 0.0:
        return [] if p1 == 0.0 else [-p0 / p1]
    disc = p1 * p1 - 4.0 * p2 * p0
    if disc < 0.0:
        if disc > -1e-14 * max(1.0, p1 * p1):
            disc = 0.0
        else:
            return []
    root = math.sqrt(disc)
    # numerically stable pair
    q = -0.5 * (p1 + math.copysign(root, p1)) if p1 != 0.0 else -0.5 * root
    if q == 0.0:
        return [0.0]
    return sorted({q / p2, p0 / q})


def _signed_roots(squares: List[float]) -> List[float]:
    values = set()
    for s in squares:
        if s < -1e-14:
            continue
        r = math.sqrt(max(s, 0.0))
        values.update((r, -r))
    return sorted(values)


def _newton_y(params: HamiltonianParams, h: float, x: float, y: float) -> float:
    _, hy = gradient(params, x, y)
    if hy == 0.0:
        return y
    return y - (eval_H(params, x, y) - h) / hy


def _newton_x(params: HamiltonianParams, h: float, x: float, y: float) -> float:
    hx, _ = gradient(params, x, y)
    if hx == 0.0:
        return x
    return x - (eval_H(params, x, y) - h) / hx


def _standard_y_squares(a: float, b: float, c: float, h: float, u: float) -> List[float]:
    # c v^4 + (b u^2 - 1) v^2 + (u^2 + a u^4 - h) = 0
    u2 = u * u
    return _quadratic_roots(c, b * u2 - 1.0, u2 + a * u2 * u2 - h)


def _standard_x_squares(a: float, b: float, c: float, h: float, v: float) -> List[float]:
    # a u^4 + (1 + b v^2) u^2 + (c v^4 - v^2 - h) = 0
    v2 = v * v
    return _quadratic_roots(a, 1.0 + b * v2, c * v2 * v2 - v2 - h)


def branch_solve(params: HamiltonianParams, h: float, x: float) -> List[float]:
    """All real y with H(x, y) = h, polished by one Newton step"""
    if params.swapped:
        squares = _standard_x_squares(params.a, params.b, params.c, h, x)
    else:
        squares = _standard_y_squares(params.a, params.b, params.c, h, x)
    return [float(_newton_y(params, h, x, y)) for y in _signed_roots(squares)]


def branch_solve_x(params: HamiltonianParams, h: float, y: float) -> List[float]:
    """All real x with H(x, y) = h, polished by one Newton step"""
    if params.swapped:
        squares = _standard_y_squares(params.a, params.b, params.c, h, y)
    else:
        squares = _standard_x_squares(params.a, params.b, params.c, h, y)
    return [float(_newton_x(params, h, x, y)) for x in _signed_roots(squares)]


# ---------------------------------------------------------------------------
# Flow loops
# ---------------------------------------------------------------------------

def _rhs(params: HamiltonianParams):
    def rhs(_t, z):
        hx, hy = gradient(params, z[0], z[1])
        return [hy, -hx]
    return rhs


def _solve(params, z0, t_end, events=None, dense=False):
    return solve_ivp(_rhs(params), (0.0, t_end), list(z0), method=config.ODE_METHOD,
                     rtol=config.ODE_RTOL, atol=config.ODE_ATOL, events=events,
                     dense_output=dense)


@dataclass
class FlowLoop:
    """One period of the Hamiltonian flow starting at `start`"""
    start: Tuple[float, float]
    period: float
    solution: object
    closure_gap: float
    ccw: bool = True

    def sample(self, n: int) -> np.ndarray:
        """n states at uniform times k*T/n, k = 0..n-1, in flow order"""
        ts = self.period * np.arange(n) / n
        return self.solution.sol(ts).T


def _shoelace(points: np.ndarray) -> float:
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def flow_loop(params: HamiltonianParams, z0: Tuple[float, float],
              escape_radius: float, t_max: float = 1e4) -> Optional[FlowLoop]:
    """
    Follow the flow from z0 until it returns, or give up

    The return is detected on the line through z0 normal to the velocity:
    crossings alternate in direction, and the first same-direction crossing
    close to z0 closes the loop.

    Returns:
        FlowLoop, or None when the trajectory leaves escape_radius, stalls,
        or does not come back within MAX_CROSSINGS section crossings
    """
    hx, hy = gradient(params, z0[0], z0[1])
    speed = math.hypot(hx, hy)
    if speed == 0.0:
        return None
    normal = (hy / speed, -hx / speed)
    close_tol = 1e-6 * (1.0 + math.hypot(*z0))

    def section(_t, z):
        return (z[0] - z0[0]) * normal[0] + (z[1] - z0[1]) * normal[1]

    def escape(_t, z):
        return z[0] * z[0] + z[1] * z[1] - escape_radius * escape_radius

    section.terminal = True
    escape.terminal = True

    state = np.array(z0, dtype=float)
    elapsed = 0.0
    direction = -1.0
    for _ in range(2 * config.MAX_CROSSINGS):
        section.direction = direction
        sol = _solve(params, state, t_max, events=[section, escape])
        if sol.t_events[1].size:
            return None
        if not sol.t_events[0].size:
            return None
        elapsed += float(sol.t_events[0][0])
        state = sol.y_events[0][0]
        if direction > 0 and math.hypot(state[0] - z0[0], state[1] - z0[1]) < close_tol:
            dense = _solve(params, z0, elapsed, dense=True)
            end = dense.y[:, -1]
            gap = math.hypot(end[0] - z0[0], end[1] - z0[1])
            loop = FlowLoop(start=(float(z0[0]), float(z0[1])), period=elapsed,
                            solution=dense, closure_gap=gap)
            loop.ccw = _shoelace(loop.sample(256)) > 0.0
            return loop
        direction = -direction
    return None


def _start_on_axis(params: HamiltonianParams, loop: FlowLoop, h: float,
                   radius: float) -> FlowLoop:
    """
    Restart a loop from its crossing of y = 0

    Uniform time samples from an axis point are mirror images of each other
    under (x, y) -> (x, -y). The original loop is kept when it never crosses.
    """
    if loop.start[1] == 0.0:
        return loop
    ts = loop.period * np.arange(513) / 512
    ys = loop.solution.sol(ts)[1]
    crossings = np.nonzero(np.sign(ys[:-1]) * np.sign(ys[1:]) <= 0.0)[0]
    if crossings.size == 0:
        return loop
    i = int(crossings[0])

    def y_at(t: float) -> float:
        return float(loop.solution.sol(t)[1])

    t0 = refine_root(y_at, float(ts[i]), float(ts[i + 1]), float(ys[i]), float(ys[i + 1]), xtol=1e-15)
    x = float(loop.solution.sol(t0)[0])
    for _ in range(3):
        x = _newton_x(params, h, x, 0.0)
    moved = flow_loop(params, (x, 0.0), escape_radius=radius)
    return loop if moved is None else moved


# ---------------------------------------------------------------------------
# Orbits
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class Orbit:
    """
    Counterclockwise closed polyline of {H = h}

    points are n distinct vertices at uniform steps dt of a time parameter
    running counterclockwise; velocities are d(x, y)/dt at the vertices.
    closure_gap is the distance between the start and the state after one
    period.
    """
    h: float
    annulus_id: int
    points: np.ndarray
    velocities: np.ndarray
    period: float
    closure_gap: float
    flow_ccw: bool = True
    level_error: float = 0.0
    symmetry: frozenset = field(default_factory=frozenset)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def dt(self) -> float:
        return self.period / self.n

    @property
    def area(self) -> float:
        """Enclosed area ∮ x dy by the periodic trapezoid rule in time"""
        return float((self.points[:, 0] * self.velocities[:, 1]).sum() * self.dt)

    def subsample(self, step: int) -> "Orbit":
        """Every step-th vertex, for quadrature error estimates"""
        return Orbit(h=self.h, annulus_id=self.annulus_id, points=self.points[::step],
                     velocities=self.velocities[::step], period=self.period,
                     closure_gap=self.closure_gap, flow_ccw=self.flow_ccw,
                     level_error=self.level_error, symmetry=self.symmetry)

    def to_dict(self):
        return {"h": self.h, "annulus_id": self.annulus_id, "vertices": self.n,
                "period": self.period, "closure_gap": self.closure_gap,
                "level_error": self.level_error, "area": self.area, "flow_ccw": self.flow_ccw}


def _polish(params: HamiltonianParams, h: float, points: np.ndarray) -> np.ndarray:
    """Pull vertices onto the level, moving y where |H_y| >= |H_x| and x elsewhere"""
    x = points[:, 0].copy()
    y = points[:, 1].copy()
    for _ in range(2):
        hx, hy = gradient(params, x, y)
        resid = eval_H(params, x, y) - h
        use_y = np.abs(hy) >= np.abs(hx)
        with np.errstate(divide="ignore", invalid="ignore"):
            y = np.where(use_y & (hy != 0), y - resid / np.where(hy == 0, 1.0, hy), y)
            x = np.where(~use_y & (hx != 0), x - resid / np.where(hx == 0, 1.0, hx), x)
    return np.column_stack([x, y])


def _escape_radius(params: HamiltonianParams, h: float) -> float:
    scale = 1.0 + max(math.hypot(p.x, p.y) for p in critical_points(params))
    return config.ESCAPE_RADIUS_FACTOR * scale * (1.0 + abs(h)) ** 0.25


def default_level_tol(h: float) -> float:
    return config.LEVEL_TOL * max(1.0, abs(h))


def trace_orbit(params: HamiltonianParams, annulus: PeriodAnnulus, h: float,
                n_min: int = config.N_MIN_DEFAULT, level_tol: Optional[float] = None) -> Orbit:
    """
    Trace the closed orbit of the annulus at level h

    The vertex count starts at n_min and doubles while the longest chord
    exceeds four times the mean chord of an n_min polygon; near separatrices
    this densifies the fast arcs, capped at 10^6 vertices.

    Raises:
        DomainError: h is not strictly inside the annulus
        NumericalFailure: the orbit does not close or leaves the level
    """
    if n_min < config.N_MIN_FLOOR:
        raise DomainError(f"n_min must be at least {config.N_MIN_FLOOR}", {"n_min": n_min})
    if not annulus.contains(h):
        raise DomainError("no closed orbit", {"h": h, "annulus": annulus.id,
                                              "h_lo": annulus.h_lo, "h_hi": annulus.h_hi})
    tol = default_level_tol(h) if level_tol is None else level_tol
    radius = _escape_radius(params, h)
    seed = ray_crossing(params, annulus.ray_origin, annulus.ray_direction, h, radius / 10.0)
    if seed is None:
        raise NumericalFailure("seed ray missed the level", {"h": h, "annulus": annulus.id})
    loop = flow_loop(params, seed, escape_radius=radius)
    if loop is None:
        raise NumericalFailure("orbit failed to close", {"h": h, "annulus": annulus.id})
    if X_AXIS_MIRROR in annulus.symmetry:
        loop = _start_on_axis(params, loop, h, radius)
    if loop.closure_gap > config.GEOM_TOL * max(1.0, math.hypot(*seed)):
        raise NumericalFailure("orbit failed to close", {"h": h, "gap": loop.closure_gap})

    n = n_min
    raw = loop.sample(n)
    perimeter = float(np.hypot(*np.diff(np.vstack([raw, raw[:1]]), axis=0).T).sum())
    chord_cap = 4.0 * perimeter / n_min
    while n < 1_000_000:
        chords = np.hypot(*np.diff(np.vstack([raw, raw[:1]]), axis=0).T)
        if chords.max() <= chord_cap:
            break
        n *= 2
        raw = loop.sample(n)

    points = _polish(params, h, raw)
    level_error = float(np.abs(eval_H(params, points[:, 0], points[:, 1]) - h).max())
    if level_error > tol:
        raise NumericalFailure("orbit vertices left the level",
                               {"h": h, "level_error": level_error, "level_tol": tol})
    hx, hy = gradient(params, points[:, 0], points[:, 1])
    velocities = np.column_stack([hy, -hx])
    if not loop.ccw:
        # reverse traversal; the reversed time grid stays uniform
        points = np.ascontiguousarray(points[::-1])
        velocities = -np.ascontiguousarray(velocities[::-1])
    return Orbit(h=h, annulus_id=annulus.id, points=points, velocities=velocities,
                 period=loop.period, closure_gap=loop.closure_gap, flow_ccw=loop.ccw,
                 level_error=level_error, symmetry=annulus.symmetry)


def orbit_csv(orbit: Orbit) -> str:
    """CSV export: `# h=<value> annulus=<id>` header, then x,y rows"""
    rows = ((float(x), float(y)) for x, y in orbit.points)
    return dump_csv(["x", "y"], rows, meta={"h": orbit.h, "annulus": orbit.annulus_id})
