"""
Hamiltonian family H(x, y) = x^2 - y^2 + a x^4 + b x^2 y^2 + c y^4

Region classification of the (a, b, c) parameter space, singular points,
critical levels and the period annuli of the unperturbed flow
x' = H_y, y' = -H_x.

A second chart, H~(x, y) = H(y, x), is carried for the a = 0 analysis,
where the equivalent Hamiltonian reads y^2 - x^2 + b x^2 y^2 + c x^4.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np

import config
from utils.errors import ClassificationConflict, DomainError

STANDARD = "standard"
SWAPPED = "swapped"

X_AXIS_MIRROR = "x_axis"    # (x, y) -> (x, -y)
Y_AXIS_MIRROR = "y_axis"    # (x, y) -> (-x, y)

NO_ANNULUS = "NoAnnulus"


@dataclass(frozen=True)
class HamiltonianParams:
    """Coefficients of the quartic terms; derived quantities are properties"""
    a: float
    b: float
    c: float
    chart: str = STANDARD

    def __post_init__(self):
        if self.c == 0:
            raise DomainError("family requires c ≠ 0", {"a": self.a, "b": self.b, "c": self.c})
        if self.chart not in (STANDARD, SWAPPED):
            raise DomainError(f"unknown chart '{self.chart}'", {"chart": self.chart})
        for name in ("a", "b", "c"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"coefficient {name} must be finite", {name: getattr(self, name)})

    @property
    def disc(self) -> float:
        return self.b * self.b - 4.0 * self.a * self.c

    @property
    def s_a(self) -> float:
        return self.b + 2.0 * self.a

    @property
    def s_c(self) -> float:
        return self.b + 2.0 * self.c

    @property
    def swapped(self) -> bool:
        return self.chart == SWAPPED

    def to_dict(self) -> Dict[str, object]:
        return {"a": self.a, "b": self.b, "c": self.c, "chart": self.chart}


# ---------------------------------------------------------------------------
# Evaluation (vectorised over numpy arrays)
# ---------------------------------------------------------------------------

def _H(p: HamiltonianParams, u, v):
    u2 = u * u
    v2 = v * v
    return u2 - v2 + p.a * u2 * u2 + p.c * v2 * v2 + p.b * u2 * v2


def _Hu(p: HamiltonianParams, u, v):
    return 2.0 * u * (1.0 + 2.0 * p.a * u * u + p.b * v * v)


def _Hv(p: HamiltonianParams, u, v):
    return 2.0 * v * (-1.0 + p.b * u * u + 2.0 * p.c * v * v)


def eval_H(params: HamiltonianParams, x, y):
    """H(x, y) in the params' chart"""
    if params.swapped:
        return _H(params, y, x)
    return _H(params, x, y)


def gradient(params: HamiltonianParams, x, y) -> Tuple:
    """(H_x, H_y)"""
    if params.swapped:
        return _Hv(params, y, x), _Hu(params, y, x)
    return _Hu(params, x, y), _Hv(params, x, y)


def hessian(params: HamiltonianParams, x: float, y: float) -> np.ndarray:
    """2x2 Hessian of H at a point"""
    u, v = (y, x) if params.swapped else (x, y)
    huu = 2.0 + 12.0 * params.a * u * u + 2.0 * params.b * v * v
    hvv = -2.0 + 12.0 * params.c * v * v + 2.0 * params.b * u * u
    huv = 4.0 * params.b * u * v
    if params.swapped:
        return np.array([[hvv, huv], [huv, huu]])
    return np.array([[huu, huv], [huv, hvv]])


def vector_field(params: HamiltonianParams, x, y) -> Tuple:
    """Unperturbed flow (H_y, -H_x)"""
    hx, hy = gradient(params, x, y)
    return hy, -hx


def perturbed_field(params: HamiltonianParams, pert, eps: float, x, y) -> Tuple:
    """Flow (H_y + eps f, -H_x + eps g) for a PerturbationPoly"""
    hx, hy = gradient(params, x, y)
    f, g = pert.evaluate(x, y)
    return hy + eps * f, -hx + eps * g


# ---------------------------------------------------------------------------
# Region classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegionLabel:
    """Parameter-plane stratum; a_zero marks the degenerate a = 0 sub-case"""
    tag: str
    a_zero: bool = False
    ab_zero: bool = False

    @property
    def has_annuli(self) -> bool:
        return self.tag != NO_ANNULUS

    def to_dict(self) -> Dict[str, object]:
        return {"region": self.tag, "a_zero": self.a_zero, "ab_zero": self.ab_zero}


def _sign(value: float, tol: float) -> int:
    if abs(value) <= tol:
        return 0
    return 1 if value > 0 else -1


_SUB_INDEX = {-1: 1, 0: 2, 1: 3}


def _sub(tag: str, s: int) -> str:
    return f"{tag}({_SUB_INDEX[s]})"


def _regions_c_positive(s: Dict[str, int]) -> List[str]:
    hits = []
    if s["a"] < 0 and s["sa"] < 0 and s["sc"] < 0:
        hits.append(_sub("D1+", s["a+c"]))
    if s["a"] < 0 and s["sa"] > 0:
        hits.append("D2+")
    if s["a"] < 0 and s["sa"] == 0:
        hits.append("l1+")
    if s["a"] < 0 and s["sa"] < 0 and s["sc"] > 0:
        hits.append("D3+")
    if s["a"] < 0 and s["sc"] == 0:
        hits.append("l2+")
    if s["a"] >= 0 and s["b"] < 0 and s["sc"] > 0 and s["disc"] > 0:
        # with a = 0 the ordering of h4 = (b+c)/b^2 against the saddle level 0 splits the stratum
        hits.append(_sub("D4+", s["a+b+c"] if s["a"] == 0 else s["sa"]))
    if (s["a"] >= 0 and s["b"] >= 0) or (s["disc"] <= 0 and s["sc"] > 0):
        hits.append("D5+")
    if s["disc"] < 0 and s["sc"] == 0:
        hits.append("l3+")
    if s["disc"] < 0 and s["sc"] < 0:
        hits.append("D6+")
    return hits


def _regions_c_negative(s: Dict[str, int]) -> List[str]:
    hits = []
    if s["disc"] > 0 and s["sc"] > 0 and s["sa"] < 0:
        hits.append(_sub("D1−", -s["a"]))
    if (s["a"] < 0 and s["b"] < 0) or (s["disc"] <= 0 and s["sa"] < 0):
        hits.append("D2−")
    if s["disc"] < 0 and s["sa"] == 0:
        hits.append("l1−")
    if s["disc"] < 0 and s["sa"] > 0:
        hits.append("D3−")
    return hits


def classify_region(params: HamiltonianParams, tol: float = config.CLASSIFY_TOL) -> RegionLabel:
    """
    Locate (a, b, c) among the parameter-plane strata

    Args:
        params: family coefficients (the chart is irrelevant here)
        tol: values within tol of zero are treated as lying on the boundary

    Returns:
        The unique matching RegionLabel, or NoAnnulus when no set holds

    Raises:
        ClassificationConflict: two inequality sets hold simultaneously
    """
    a, b, c = params.a, params.b, params.c
    s = {
        "a": _sign(a, tol),
        "b": _sign(b, tol),
        "sa": _sign(params.s_a, tol),
        "sc": _sign(params.s_c, tol),
        "disc": _sign(params.disc, tol),
        "a+c": _sign(a + c, tol),
        "a+b+c": _sign(a + b + c, tol),
    }
    hits = _regions_c_positive(s) if c > 0 else _regions_c_negative(s)
    if len(hits) > 1:
        raise ClassificationConflict(
            f"parameters satisfy several regions: {', '.join(hits)}",
            {"regions": hits, "a": a, "b": b, "c": c})
    tag = hits[0] if hits else NO_ANNULUS
    return RegionLabel(tag=tag, a_zero=(s["a"] == 0), ab_zero=(s["a"] == 0 and s["b"] == 0))


# ---------------------------------------------------------------------------
# Singular points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CriticalPoint:
    x: float
    y: float
    kind: str
    level: float

    def to_dict(self) -> Dict[str, object]:
        return {"x": self.x, "y": self.y, "kind": self.kind, "level": self.level}


def _newton_polish(params: HamiltonianParams, x: float, y: float) -> Tuple[float, float]:
    hx, hy = gradient(params, x, y)
    hess = hessian(params, x, y)
    if abs(np.linalg.det(hess)) < 1e-14:
        return x, y
    dx, dy = np.linalg.solve(hess, [hx, hy])
    return x - dx, y - dy


def _kind(params: HamiltonianParams, x: float, y: float) -> str:
    det = float(np.linalg.det(hessian(params, x, y)))
    scale = 1.0 + float(np.abs(hessian(params, x, y)).max()) ** 2
    if abs(det) <= 1e-12 * scale:
        return "degenerate"
    return "center" if det > 0 else "saddle"


def critical_points(params: HamiltonianParams) -> List[CriticalPoint]:
    """All real solutions of grad H = 0, polished and classified"""
    a, b, c = params.a, params.b, params.c
    raw: List[Tuple[float, float]] = [(0.0, 0.0)]
    if a < 0:
        x0 = math.sqrt(-1.0 / (2.0 * a))
        raw += [(x0, 0.0), (-x0, 0.0)]
    if c > 0:
        y0 = math.sqrt(1.0 / (2.0 * c))
        raw += [(0.0, y0), (0.0, -y0)]
    disc = params.disc
    if disc != 0:
        x2 = params.s_c / disc
        y2 = -params.s_a / disc
        if x2 > 1e-15 and y2 > 1e-15:
            x0, y0 = math.sqrt(x2), math.sqrt(y2)
            raw += [(sx * x0, sy * y0) for sx in (1, -1) for sy in (1, -1)]
    points = []
    for x, y in raw:
        if params.swapped:
            x, y = y, x
        x, y = _newton_polish(params, x, y)
        points.append(CriticalPoint(x=float(x), y=float(y), kind=_kind(params, x, y),
                                    level=float(eval_H(params, x, y))))
    return points


def critical_levels(params: HamiltonianParams) -> List[float]:
    """Distinct levels of the singular points, ascending"""
    levels: List[float] = []
    for level in sorted(p.level for p in critical_points(params)):
        if not levels or abs(level - levels[-1]) > 1e-12 * max(1.0, abs(level)):
            levels.append(level)
    return levels


# ---------------------------------------------------------------------------
# Period annuli
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PeriodAnnulus:
    """
    A maximal family of closed orbits, parametrized by h in (h_lo, h_hi)

    The orbit at any interior h is found as the first crossing of the level
    along the ray ray_origin + t * ray_direction, t > 0.
    """
    id: int
    h_lo: float
    h_hi: float
    seed_point: Tuple[float, float]
    ray_origin: Tuple[float, float]
    ray_direction: Tuple[float, float]
    symmetry: FrozenSet[str] = field(default_factory=frozenset)
    enclosed: Tuple[CriticalPoint, ...] = ()
    flow_ccw: bool = True

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.h_lo) or math.isinf(self.h_hi)

    @property
    def flow_sign(self) -> float:
        """+1 when the Hamiltonian flow runs counterclockwise"""
        return 1.0 if self.flow_ccw else -1.0

    def contains(self, h: float) -> bool:
        return self.h_lo < h < self.h_hi

    def bounds(self, h_max: float = config.H_MAX_DEFAULT) -> Tuple[float, float]:
        """Finite working interval; unbounded ends are cut at +-h_max"""
        lo = -h_max if math.isinf(self.h_lo) else self.h_lo
        hi = h_max if math.isinf(self.h_hi) else self.h_hi
        return lo, hi

    def length(self, h_max: float = config.H_MAX_DEFAULT) -> float:
        lo, hi = self.bounds(h_max)
        return hi - lo

    def to_dict(self) -> Dict[str, object]:
        return {
            "id": self.id,
            "h_lo": self.h_lo,
            "h_hi": self.h_hi,
            "seed_point": list(self.seed_point),
            "symmetry": sorted(self.symmetry),
            "enclosed": [p.to_dict() for p in self.enclosed],
            "flow_ccw": self.flow_ccw,
        }


_DIRECTIONS = ((1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0))


def _scale(points: List[CriticalPoint]) -> float:
    return 1.0 + max(math.hypot(p.x, p.y) for p in points)


def _escape_radius(points: List[CriticalPoint], h: float) -> float:
    return config.ESCAPE_RADIUS_FACTOR * _scale(points) * (1.0 + abs(h)) ** 0.25


def ray_crossing(params: HamiltonianParams, origin: Tuple[float, float],
                 direction: Tuple[float, float], h: float, t_max: float) -> Optional[Tuple[float, float]]:
    """First point of {H = h} on the ray origin + t*direction, or None"""
    from utils.numerics import first_crossing

    ox, oy = origin
    dx, dy = direction

    def along(t):
        return eval_H(params, ox + t * dx, oy + t * dy) - h

    t = first_crossing(along, t_max)
    if math.isnan(t):
        return None
    return ox + t * dx, oy + t * dy


def _winding(poly: np.ndarray, point: Tuple[float, float]) -> int:
    dx = poly[:, 0] - point[0]
    dy = poly[:, 1] - point[1]
    ang = np.arctan2(dy, dx)
    dang = np.diff(np.append(ang, ang[0]))
    dang = (dang + np.pi) % (2.0 * np.pi) - np.pi
    return int(round(dang.sum() / (2.0 * np.pi)))


def _mirror_index(points: List[CriticalPoint], idx: int, sx: float, sy: float) -> int:
    p = points[idx]
    for k, q in enumerate(points):
        if abs(q.x - sx * p.x) < 1e-9 and abs(q.y - sy * p.y) < 1e-9:
            return k
    return -1


def _sample_levels(levels: List[float]) -> List[Tuple[float, float, float]]:
    """(lo, hi, sample) for every open interval cut by the critical levels"""
    edges = [-math.inf] + list(levels) + [math.inf]
    samples = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if math.isinf(lo):
            sample = hi - max(1.0, abs(hi))
        elif math.isinf(hi):
            sample = lo + max(1.0, abs(lo))
        else:
            sample = 0.5 * (lo + hi)
        samples.append((lo, hi, sample))
    return samples


@dataclass
class _Component:
    key: FrozenSet[int]
    interval: int
    origin: int
    direction: Tuple[float, float]
    point: Tuple[float, float]
    flow_ccw: bool
    poly: np.ndarray


def _components_at(params, points, interval: int, h: float) -> List[_Component]:
    from modules.level_curve_tracer import flow_loop

    radius = _escape_radius(points, h)
    found: List[_Component] = []
    for k, p in enumerate(points):
        for d in _DIRECTIONS:
            z = ray_crossing(params, (p.x, p.y), d, h, radius / 10.0)
            if z is None:
                continue
            if any(_near_polyline(comp.poly, z) for comp in found):
                continue
            loop = flow_loop(params, z, escape_radius=radius)
            if loop is None:
                continue
            poly = loop.sample(512)
            key = frozenset(i for i, q in enumerate(points) if _winding(poly, (q.x, q.y)) != 0)
            found.append(_Component(key=key, interval=interval, origin=k, direction=d,
                                    point=z, flow_ccw=loop.ccw, poly=poly))
    return found


def _near_polyline(poly: np.ndarray, z: Tuple[float, float]) -> bool:
    seg = np.hypot(*np.diff(np.vstack([poly, poly[:1]]), axis=0).T).max()
    dist = np.hypot(poly[:, 0] - z[0], poly[:, 1] - z[1]).min()
    return dist <= seg


def _ray_is_monotone(params, origin, direction, lo, hi, points) -> bool:
    """H strictly monotone along the ray until it has passed both ends of (lo, hi)"""
    ends = [v for v in (lo, hi) if math.isfinite(v)]
    start = float(eval_H(params, origin[0], origin[1]))
    far = max(ends, key=lambda v: abs(v - start)) if ends else start + 1.0
    if math.isinf(lo) or math.isinf(hi):
        far = start + (1.0 if math.isinf(hi) else -1.0) * max(1.0, abs(start) + config.H_MAX_DEFAULT)
    z = ray_crossing(params, origin, direction, far, _escape_radius(points, far) / 10.0)
    if z is None:
        return False
    t_end = math.hypot(z[0] - origin[0], z[1] - origin[1])
    ts = np.linspace(0.0, t_end, 400)
    vals = eval_H(params, origin[0] + ts * direction[0], origin[1] + ts * direction[1])
    steps = np.diff(vals)
    return bool(np.all(steps > 0) or np.all(steps < 0))


@lru_cache(maxsize=64)
def _annuli_cached(params: HamiltonianParams) -> Tuple[PeriodAnnulus, ...]:
    points = critical_points(params)
    samples = _sample_levels(critical_levels(params))
    components: List[_Component] = []
    for idx, (_, _, h) in enumerate(samples):
        components.extend(_components_at(params, points, idx, h))

    by_key: Dict[FrozenSet[int], List[_Component]] = {}
    for comp in components:
        by_key.setdefault(comp.key, []).append(comp)

    drafts = []
    for key, comps in by_key.items():
        intervals = sorted({c.interval for c in comps})
        runs: List[List[int]] = [[intervals[0]]]
        for i in intervals[1:]:
            if i == runs[-1][-1] + 1:
                runs[-1].append(i)
            else:
                runs.append([i])
        for run in runs:
            lo, hi = samples[run[0]][0], samples[run[-1]][1]
            members = [c for c in comps if c.interval in run]
            chosen = members[0]
            for cand in members:
                origin = (points[cand.origin].x, points[cand.origin].y)
                if _ray_is_monotone(params, origin, cand.direction, lo, hi, points):
                    chosen = cand
                    break
            symmetry = set()
            if all(_mirror_index(points, i, 1.0, -1.0) in key for i in key):
                symmetry.add(X_AXIS_MIRROR)
            if all(_mirror_index(points, i, -1.0, 1.0) in key for i in key):
                symmetry.add(Y_AXIS_MIRROR)
            origin = (points[chosen.origin].x, points[chosen.origin].y)
            drafts.append((lo, hi, chosen.point, origin, chosen.direction,
                           frozenset(symmetry), tuple(points[i] for i in sorted(key)),
                           chosen.flow_ccw))

    drafts.sort(key=lambda d: (d[0], d[1], round(d[2][0], 9), round(d[2][1], 9)))
    return tuple(
        PeriodAnnulus(id=i, h_lo=d[0], h_hi=d[1], seed_point=d[2], ray_origin=d[3],
                      ray_direction=d[4], symmetry=d[5], enclosed=d[6], flow_ccw=d[7])
        for i, d in enumerate(drafts))


def annuli(params: HamiltonianParams) -> List[PeriodAnnulus]:
    """
    Every period annulus of the unperturbed flow

    Annuli are discovered from the level-set topology: the critical levels
    cut the h-axis into intervals, closed components are traced at one
    sample level per interval, and components enclosing the same singular
    points in consecutive intervals belong to one annulus.
    """
    if not classify_region(params).has_annuli:
        return []
    return list(_annuli_cached(params))


def find_annulus(params: HamiltonianParams, annulus_id: int) -> PeriodAnnulus:
    for ann in annuli(params):
        if ann.id == annulus_id:
            return ann
    raise DomainError(f"no annulus with id {annulus_id}", {"annulus": annulus_id})


def annulus_for(params: HamiltonianParams, h: float,
                enclosing: Optional[Tuple[float, float]] = None) -> PeriodAnnulus:
    """The annulus containing h whose orbits enclose the given point (if any)"""
    for ann in annuli(params):
        if not ann.contains(h):
            continue
        if enclosing is None:
            return ann
        if any(abs(p.x - enclosing[0]) < 1e-9 and abs(p.y - enclosing[1]) < 1e-9 for p in ann.enclosed):
            return ann
    raise DomainError("no closed orbit", {"h": h, "enclosing": enclosing})


# ---------------------------------------------------------------------------
# Zeros of the gating polynomial G1
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GZero:
    name: str
    h: Optional[float]
    inside_annulus: bool
    annulus_ids: Tuple[int, ...] = ()
    coincides_with: Tuple[str, ...] = ()
    note: str = ""

    def to_dict(self) -> Dict[str, object]:
        return {"name": self.name, "h": self.h, "inside_annulus": self.inside_annulus,
                "annulus_ids": list(self.annulus_ids), "coincides_with": list(self.coincides_with),
                "note": self.note}


def g1_zeros(params: HamiltonianParams) -> List[GZero]:
    """h1 = 0, h2 = -1/(4c), h3 = -1/(4a), h4 = (a+b+c)/disc with annulus membership"""
    if params.a == 0:
        raise DomainError("G1 zeros need a ≠ 0", params.to_dict())
    a, b, c = params.a, params.b, params.c
    values = {"h1": 0.0, "h2": -1.0 / (4.0 * c), "h3": -1.0 / (4.0 * a)}
    values["h4"] = (a + b + c) / params.disc if params.disc != 0 else None
    rings = annuli(params)
    zeros = []
    for name, h in values.items():
        if h is None:
            zeros.append(GZero(name=name, h=None, inside_annulus=False,
                               note="disc = 0: h4 undefined"))
            continue
        same = tuple(other for other, v in values.items()
                     if other != name and v is not None and abs(v - h) <= 1e-12 * max(1.0, abs(h)))
        ids = tuple(ann.id for ann in rings if ann.contains(h))
        zeros.append(GZero(name=name, h=h, inside_annulus=bool(ids), annulus_ids=ids,
                           coincides_with=same))
    return zeros
