"""
Expansion of the Melnikov function near the double homoclinic loop

In the alphabar chart the family is H3 = −H/2 with a saddle at the origin
and two homoclinic loops L1 (x > 0) and L2 (x < 0) on H3 = 0. Near the
loops

    I_j(h) = c0_j + c1 h ln|h| + c2_j h + c3 h² ln|h| + O(h²),   h < 0
    I_3(h) = c0 + 2 c1 h ln|h| + c2 h + 2 c3 h² ln|h| + O(h²),   h > 0

with the orbit integrals taken clockwise, in the direction of the H3 flow.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

import config
from modules.charts import (
    alpha_transforms, center_annulus, center_level, chart_responses, loop_annulus,
    loop_level, monomial_responses, perturbation, family_params,
)
from modules.hamiltonian_family import eval_H
from modules.hopf_expansion import B_CLOSED, D_CLOSED, center_window, collocate
from modules.melnikov_analyzer import ZeroReport, zero_scan
from utils.errors import DomainError, NumericalFailure
from utils.numerics import window_grid


CONSTANT_NAMES = ("A0", "A1", "A2", "A3", "A4", "A5", "A6")
WINDOW_NAMES = ("M1", "M2", "I1", "I2", "I3")

# (N_M1, N_M2, N_I1, N_I2, N_I3)
DistributionTuple = Tuple[int, int, int, int, int]


def h3_value(x, y):
    return -0.5 * eval_H(family_params(), x, y)


# ---------------------------------------------------------------------------
# Loop geometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LoopGeometry:
    """The upper half of L1, as y = y+(x) on [0, 1] or x = x(y) near x = 1"""

    x1: float = config.LOOP_SPLIT_X1
    x2: float = config.LOOP_SPLIT_X2

    def __post_init__(self):
        if not 0.0 < self.x1 < self.x2 < 1.0:
            raise DomainError("split points need 0 < x1 < x2 < 1", {"x1": self.x1, "x2": self.x2})

    @staticmethod
    def _s(x):
        return 1.0 + 2.0 * x * x + np.sqrt(1.0 + 8.0 * x ** 4)

    def y_plus(self, x):
        x = np.asarray(x, dtype=float)
        return x * np.sqrt(2.0 * (1.0 - x * x) / self._s(x))

    def y_minus(self, x):
        return -self.y_plus(x)

    def x_over_y(self, x):
        """x / y+(x), finite at x = 0"""
        x = np.asarray(x, dtype=float)
        return np.sqrt(self._s(x) / (2.0 * (1.0 - x * x)))

    def y_over_root(self, x):
        """y+(x) / sqrt(1 − x), finite at x = 1"""
        x = np.asarray(x, dtype=float)
        return x * np.sqrt(2.0 * (1.0 + x) / self._s(x))

    @staticmethod
    def discriminant(y):
        y = np.asarray(y, dtype=float)
        return 8.0 * y ** 4 - 8.0 * y * y + 1.0

    def x_of_y(self, y):
        y = np.asarray(y, dtype=float)
        return np.sqrt(0.5 * (1.0 - 2.0 * y * y + np.sqrt(self.discriminant(y))))

    @property
    def y2(self) -> float:
        return float(self.y_plus(self.x2))


def loop_geometry(x1: float = config.LOOP_SPLIT_X1, x2: float = config.LOOP_SPLIT_X2) -> LoopGeometry:
    return LoopGeometry(x1, x2)


# ---------------------------------------------------------------------------
# Loop constants
# ---------------------------------------------------------------------------

@dataclass
class HomoclinicConstants:
    values: Dict[str, float]
    errors: Dict[str, float]
    pieces: Dict[str, Tuple[float, float, float]]
    geometry: LoopGeometry

    def __getitem__(self, name: str) -> float:
        return self.values[name]

    def as_array(self) -> np.ndarray:
        return np.array([self.values[n] for n in CONSTANT_NAMES])

    def published_deviation(self) -> Dict[str, float]:
        return {n: abs(self.values[n] - ref) / abs(ref)
                for n, ref in config.PUBLISHED_LOOP_CONSTANTS.items()}

    def to_dict(self):
        return {
            "values": self.values,
            "errors": self.errors,
            "pieces": {k: list(v) for k, v in self.pieces.items()},
            "split": {"x1": self.geometry.x1, "x2": self.geometry.x2, "y2": self.geometry.y2},
            "published": config.PUBLISHED_LOOP_CONSTANTS,
            "published_deviation": self.published_deviation(),
            "quadrature": {"epsabs": config.LOOP_QUAD_EPSABS, "epsrel": config.LOOP_QUAD_EPSREL,
                           "limit": config.LOOP_QUAD_LIMIT},
        }


def _quad(f, lo: float, hi: float, name: str, **kwargs) -> Tuple[float, float]:
    value, error = integrate.quad(f, lo, hi, epsabs=config.LOOP_QUAD_EPSABS,
                                  epsrel=config.LOOP_QUAD_EPSREL, limit=config.LOOP_QUAD_LIMIT, **kwargs)
    if error > 1e3 * max(config.LOOP_QUAD_EPSABS, config.LOOP_QUAD_EPSREL * abs(value)):
        raise NumericalFailure(f"loop integral {name} did not converge",
                               {"name": name, "value": value, "error": error, "interval": [lo, hi]})
    return value, error


@lru_cache(maxsize=8)
def loop_constants(x1: float = config.LOOP_SPLIT_X1, x2: float = config.LOOP_SPLIT_X2) -> HomoclinicConstants:
    """
    A0..A6 of the loop L1

    A0..A3 are 2∫ m(x, y+) dx over [0, 1] with the sqrt(1 − x) endpoint
    taken by an algebraic weight. A4..A6 are loop times of x, 3y², x², split
    into J1 on (0, x1), J2 on (x1, x2) in x and J3 on (0, y2) in y.
    """
    geo = loop_geometry(x1, x2)
    values: Dict[str, float] = {}
    errors: Dict[str, float] = {}
    pieces: Dict[str, Tuple[float, float, float]] = {}

    area_weights = {
        "A0": lambda x: 1.0,
        "A1": lambda x: x,
        "A2": lambda x: geo.y_plus(x) ** 2,
        "A3": lambda x: x * x,
    }
    for name, w in area_weights.items():
        value, error = _quad(lambda x, w=w: w(x) * geo.y_over_root(x), 0.0, 1.0, name,
                             weight="alg", wvar=(0.0, 0.5))
        values[name], errors[name] = 2.0 * value, 2.0 * error

    def root8(x):
        return np.sqrt(1.0 + 8.0 * x ** 4)

    def root_d(y):
        return np.sqrt(geo.discriminant(y))

    time_forms = {
        "A4": (lambda x: geo.x_over_y(x) / root8(x),
               lambda y: 1.0 / root_d(y)),
        "A5": (lambda x: 3.0 * geo.y_plus(x) / root8(x),
               lambda y: 3.0 * y * y / (geo.x_of_y(y) * root_d(y))),
        "A6": (lambda x: x * geo.x_over_y(x) / root8(x),
               lambda y: geo.x_of_y(y) / root_d(y)),
    }
    for name, (fx, fy) in time_forms.items():
        j1, e1 = _quad(fx, 0.0, geo.x1, f"{name}/J1")
        j2, e2 = _quad(fx, geo.x1, geo.x2, f"{name}/J2")
        j3, e3 = _quad(fy, 0.0, geo.y2, f"{name}/J3")
        pieces[name] = (2.0 * j1, 2.0 * j2, 2.0 * j3)
        values[name] = 2.0 * (j1 + j2 + j3)
        errors[name] = 2.0 * (e1 + e2 + e3)

    return HomoclinicConstants(values=values, errors=errors, pieces=pieces, geometry=geo)


# ---------------------------------------------------------------------------
# Direct quadrature near the loops
# ---------------------------------------------------------------------------

def loop_values(alphabar: Sequence[float], loop: int, h3s: Sequence[float],
                n_min: int = config.N_MIN_DEFAULT) -> np.ndarray:
    """I_loop(h3) = clockwise ∮ (ᾱ0 y + ᾱ1 xy + ᾱ2 y³ + ᾱ3 x²y) dx"""
    alphabar = np.asarray(alphabar, dtype=float)
    params = family_params()
    annulus = loop_annulus(params, loop)
    return np.array([-monomial_responses(params, annulus, loop_level(float(h)), n_min) @ alphabar
                     for h in h3s])


@dataclass
class ExpansionFit:
    coefficients: List[float]
    residual: float
    levels: List[float]

    @property
    def c0(self) -> float:
        return self.coefficients[0]

    @property
    def c1(self) -> float:
        return self.coefficients[1]

    @property
    def c2(self) -> float:
        return self.coefficients[2]

    def to_dict(self):
        return {"coefficients": self.coefficients, "residual": self.residual, "levels": self.levels}


def _fit_basis(h: np.ndarray) -> np.ndarray:
    log = np.log(np.abs(h))
    return np.column_stack([np.ones_like(h), h * log, h, h * h * log, h * h])


def fit_expansion(h3s: Sequence[float], values: Sequence[float]) -> ExpansionFit:
    """Least-squares fit of 1, h ln|h|, h, h² ln|h|, h²"""
    h = np.asarray(h3s, dtype=float)
    if h.size < 5:
        raise DomainError("an expansion fit needs at least five levels", {"levels": h.tolist()})
    basis = _fit_basis(h)
    scale = np.abs(basis).max(axis=0)
    solution, *_ = np.linalg.lstsq(basis / scale, np.asarray(values, dtype=float), rcond=None)
    coefficients = solution / scale
    residual = float(np.max(np.abs(basis @ coefficients - values)))
    return ExpansionFit(coefficients=coefficients.tolist(), residual=residual, levels=h.tolist())


def fit_levels(side: int = -1) -> np.ndarray:
    lo, hi = config.SADDLE_FIT_RANGE
    return side * np.geomspace(lo, hi, config.SADDLE_FIT_POINTS)


@lru_cache(maxsize=1)
def measured_saddle_constant() -> ExpansionFit:
    """Expansion of the area of L1's inner orbits; its h coefficient is −q"""
    hs = fit_levels(-1)
    return fit_expansion(hs, loop_values((1.0, 0.0, 0.0, 0.0), 1, hs))


def saddle_constant(q: Optional[float] = None) -> float:
    """Explicit q, then the configured one, then the measured one"""
    if q is not None:
        return float(q)
    if config.SADDLE_CONSTANT_Q is not None:
        return float(config.SADDLE_CONSTANT_Q)
    return -measured_saddle_constant().c2


# ---------------------------------------------------------------------------
# Expansion coefficients and the mu chart
# ---------------------------------------------------------------------------

@dataclass
class HomoclinicExpansion:
    alphabar: List[float]
    q: float
    c0_1: float
    c0_2: float
    c1: float
    c2_1: float
    c2_2: float
    c3: float

    @property
    def c0(self) -> float:
        return self.c0_1 + self.c0_2

    @property
    def c2(self) -> float:
        return self.c2_1 + self.c2_2

    def inner(self, loop: int, h):
        """Four-term model of I_loop at h < 0"""
        if loop not in (1, 2):
            raise DomainError("inner loops are 1 and 2", {"loop": loop})
        h = np.asarray(h, dtype=float)
        log = np.log(np.abs(h))
        c0, c2 = (self.c0_1, self.c2_1) if loop == 1 else (self.c0_2, self.c2_2)
        return c0 + self.c1 * h * log + c2 * h + self.c3 * h * h * log

    def outer(self, h):
        """Four-term model of I_3 at h > 0"""
        h = np.asarray(h, dtype=float)
        log = np.log(np.abs(h))
        return self.c0 + 2.0 * self.c1 * h * log + self.c2 * h + 2.0 * self.c3 * h * h * log

    def to_dict(self):
        return {
            "alphabar": self.alphabar, "q": self.q,
            "c0_1": self.c0_1, "c0_2": self.c0_2, "c0": self.c0,
            "c1": self.c1,
            "c2_1": self.c2_1, "c2_2": self.c2_2, "c2": self.c2,
            "c3": self.c3,
        }


def expansion_coefficients(alphabar: Sequence[float], q: Optional[float] = None,
                           constants: Optional[HomoclinicConstants] = None) -> HomoclinicExpansion:
    ab = np.asarray(alphabar, dtype=float)
    if ab.shape != (4,):
        raise DomainError("alphabar has four entries", {"alphabar": list(ab)})
    k = constants or loop_constants()
    qv = saddle_constant(q)
    c1 = -ab[0]
    common0 = ab[0] * k["A0"] + ab[2] * k["A2"] + ab[3] * k["A3"]
    common2 = ab[2] * k["A5"] + ab[3] * k["A6"] + qv * c1
    return HomoclinicExpansion(
        alphabar=ab.tolist(), q=qv,
        c0_1=float(common0 + ab[1] * k["A1"]),
        c0_2=float(common0 - ab[1] * k["A1"]),
        c1=float(c1),
        c2_1=float(common2 + ab[1] * k["A4"]),
        c2_2=float(common2 - ab[1] * k["A4"]),
        c3=float(0.5 * (ab[3] - 3.0 * ab[2])),
    )


def mu_matrix(q: Optional[float] = None, constants: Optional[HomoclinicConstants] = None) -> np.ndarray:
    """Rows (c0_1, c1, c2_1) over alphabar0..alphabar3"""
    k = constants or loop_constants()
    qv = saddle_constant(q)
    return np.array([
        [k["A0"], k["A1"], k["A2"], k["A3"]],
        [-1.0, 0.0, 0.0, 0.0],
        [-qv, k["A4"], k["A5"], k["A6"]],
    ])


def mu_coordinates(alphabar: Sequence[float], q: Optional[float] = None,
                   constants: Optional[HomoclinicConstants] = None) -> np.ndarray:
    return mu_matrix(q, constants) @ np.asarray(alphabar, dtype=float)


def alphabar_from_mu(mu: Sequence[float], alphabar3: float, q: Optional[float] = None,
                     constants: Optional[HomoclinicConstants] = None) -> np.ndarray:
    """Inverse of mu_coordinates at fixed alphabar3"""
    m = mu_matrix(q, constants)
    head = np.linalg.solve(m[:, :3], np.asarray(mu, dtype=float) - m[:, 3] * alphabar3)
    return np.append(head, alphabar3)


# ---------------------------------------------------------------------------
# Zero scans near the loops
# ---------------------------------------------------------------------------

def loop_grid(loop: int, window: Tuple[float, float], n: int = config.LOOP_GRID_POINTS) -> np.ndarray:
    """H-level grid for |h3| in the window, on the inner (1, 2) or outer (3) side"""
    lo, hi = window
    side = 1 if loop in (1, 2) else -1
    return window_grid(0.0, side, 2.0 * lo, 2.0 * hi, n)


def loop_scan(alphabar: Sequence[float], loop: int, window: Tuple[float, float],
              n: int = config.LOOP_GRID_POINTS) -> ZeroReport:
    params = family_params()
    return zero_scan(params, perturbation(alphabar, "alphabar"), loop_annulus(params, loop),
                     grid=loop_grid(loop, window, n), with_ceiling=False)


def h3_zeros(report: ZeroReport) -> List[float]:
    return sorted(-0.5 * z.h for z in report.zeros)


def _scaled_window(scale: float) -> Tuple[float, float]:
    lo, hi = config.HOMOCLINIC_WINDOW
    return lo * scale, hi * scale


@dataclass
class HomoclinicDesign:
    alphabar: np.ndarray
    q: float
    expansion: HomoclinicExpansion
    staircase: List[float]
    window: Tuple[float, float]
    report: ZeroReport
    outer_report: ZeroReport
    attempts: int
    polished: bool

    @property
    def alpha(self) -> np.ndarray:
        return alpha_transforms(self.alphabar, "alphabar", "alpha")

    @property
    def mu(self) -> np.ndarray:
        return mu_coordinates(self.alphabar, self.q)

    def to_dict(self):
        return {
            "alphabar": self.alphabar.tolist(),
            "alpha": self.alpha.tolist(),
            "mu": self.mu.tolist(),
            "q": self.q,
            "expansion": self.expansion.to_dict(),
            "staircase": self.staircase,
            "window": list(self.window),
            "zeros": h3_zeros(self.report),
            "count": self.report.count,
            "outer_zeros": h3_zeros(self.outer_report),
            "outer_count": self.outer_report.count,
            "attempts": self.attempts,
            "polished": self.polished,
        }


def _model_rows(h3s: Sequence[float], q: float, loop: int = 1) -> np.ndarray:
    return np.column_stack([expansion_coefficients(np.eye(4)[i], q).inner(loop, np.asarray(h3s))
                            for i in range(4)])


def _quadrature_rows(h3s: Sequence[float], loop: int = 1) -> np.ndarray:
    params = family_params()
    annulus = loop_annulus(params, loop)
    return np.array([chart_responses(params, annulus, loop_level(float(h)), "alphabar") for h in h3s])


def design_homoclinic_three(alphabar3: float = 1.0, q: Optional[float] = None,
                            staircase: Sequence[float] = config.HOMOCLINIC_STAIRCASE) -> HomoclinicDesign:
    """
    Three limit cycles near L1

    The four-term expansion is made to vanish at h3 = −s for the staircase
    points s; if direct quadrature does not confirm three zeros the solve is
    repeated on quadrature values, then the staircase shrinks tenfold.
    """
    if alphabar3 == 0:
        raise DomainError("alphabar3 must be nonzero", {"alphabar3": alphabar3})
    qv = saddle_constant(q)
    tried = []
    for attempt in range(config.HOMOCLINIC_RETRIES + 1):
        scale = 10.0 ** (-attempt)
        points = [s * scale for s in staircase]
        h3s = [-s for s in points]
        window = _scaled_window(scale)
        alphabar = collocate(_model_rows(h3s, qv), alphabar3)
        report = loop_scan(alphabar, 1, window)
        polished = False
        if report.count != 3:
            alphabar = collocate(_quadrature_rows(h3s), alphabar3)
            report = loop_scan(alphabar, 1, window)
            polished = True
        if report.count == 3:
            return HomoclinicDesign(alphabar=alphabar, q=qv, expansion=expansion_coefficients(alphabar, qv),
                                    staircase=points, window=window, report=report,
                                    outer_report=loop_scan(alphabar, 3, window),
                                    attempts=attempt + 1, polished=polished)
        tried.append({"staircase": points, "count": report.count})
    raise NumericalFailure("no three-zero design found near the loop", {"attempts": tried})


# ---------------------------------------------------------------------------
# Coexistence patterns
# ---------------------------------------------------------------------------

@dataclass
class DistributionResult:
    target: Tuple[int, ...]
    realized: Tuple[int, ...]
    alpha: np.ndarray
    mode: str
    q: float
    windows: Dict[str, List[float]]
    zeros: Dict[str, List[float]]
    attempts: int
    notes: List[str] = field(default_factory=list)

    @property
    def matched(self) -> bool:
        return self.realized == self.target

    @property
    def alphabar(self) -> np.ndarray:
        return alpha_transforms(self.alpha, "alpha", "alphabar")

    def leading(self) -> Dict[str, object]:
        return {
            "b1": float(B_CLOSED[0] @ self.alpha),
            "d1": float(D_CLOSED[0] @ self.alpha),
            "mu": mu_coordinates(self.alphabar, self.q).tolist(),
        }

    def to_dict(self):
        return {
            "target": list(self.target),
            "realized": list(self.realized),
            "matched": self.matched,
            "mode": self.mode,
            "alpha": self.alpha.tolist(),
            "alphabar": self.alphabar.tolist(),
            "leading": self.leading(),
            "windows": self.windows,
            "zeros": self.zeros,
            "attempts": self.attempts,
            "notes": self.notes,
        }


def _require_distribution(target: Sequence[int]) -> Tuple[int, ...]:
    tup = tuple(int(t) for t in target)
    if tup not in config.DISTRIBUTIONS:
        raise DomainError("not one of the coexistence patterns",
                          {"target": list(tup), "patterns": [list(d) for d in config.DISTRIBUTIONS]})
    return tup


def _window_rows(name: str, count: int, epsilon: float, scale: float, chart: str) -> List[np.ndarray]:
    params = family_params()
    rows = []
    if name in ("M1", "M2"):
        annulus = center_annulus(params, "first" if name == "M1" else "second")
        levels = [center_level(epsilon * k) for k in (1, 2, 3)[:count]]
    else:
        loop = int(name[1])
        annulus = loop_annulus(params, loop)
        side = 1.0 if loop == 3 else -1.0
        levels = [loop_level(side * s * scale) for s in config.HOMOCLINIC_STAIRCASE[:count]]
    for level in levels:
        rows.append(chart_responses(params, annulus, level, chart))
    return rows


def _scan_all(alpha: np.ndarray, epsilon: float, scale: float):
    params = family_params()
    pert = perturbation(alpha, "alpha")
    counts, windows, zeros = [], {}, {}
    for name in WINDOW_NAMES:
        if name in ("M1", "M2"):
            window = center_window(epsilon)
            report = zero_scan(params, pert, center_annulus(params, "first" if name == "M1" else "second"),
                               window=window, with_ceiling=False)
            windows[name] = list(window)
            zeros[name] = [z.h for z in report.zeros]
        else:
            loop = int(name[1])
            window = _scaled_window(scale)
            report = loop_scan(alpha_transforms(alpha, "alpha", "alphabar"), loop, window)
            windows[name] = list(window)
            zeros[name] = h3_zeros(report)
        counts.append(report.count)
    return tuple(counts), windows, zeros


def distribution_search(target: Sequence[int], alpha3_anchor: float = 1.0, q: Optional[float] = None,
                        strict: bool = True) -> DistributionResult:
    """
    Coefficients realizing one coexistence pattern (N_M1, N_M2, N_I1, N_I2, N_I3)

    Patterns with three cycles in total are collocated directly: each
    window receives its share of conditions on the direct-quadrature
    responses, with alpha3 fixed. The two patterns with more cycles keep
    the x-mirror symmetry (alphabar1 = 0) and collocate on whichever loop
    carries two zeros.
    """
    tup = _require_distribution(target)
    if alpha3_anchor == 0:
        raise DomainError("alpha3_anchor must be nonzero", {"alpha3_anchor": alpha3_anchor})
    qv = saddle_constant(q)
    symmetric = sum(tup) > 3
    tried = []
    result = None
    for attempt in range(config.DISTRIBUTION_RETRIES + 1):
        epsilon = config.HOPF_EPSILON * 0.5 ** attempt
        scale = 10.0 ** (-attempt)
        if symmetric:
            name = "I1" if tup[2] == 2 else "I3"
            rows = np.array(_window_rows(name, 2, epsilon, scale, "alphabar"))
            anchor = -0.5 * alpha3_anchor
            head = np.linalg.solve(rows[:, [0, 2]], -rows[:, 3] * anchor)
            alphabar = np.array([head[0], 0.0, head[1], anchor])
            alpha = alpha_transforms(alphabar, "alphabar", "alpha")
        else:
            rows = []
            for name, count in zip(WINDOW_NAMES, tup):
                rows.extend(_window_rows(name, count, epsilon, scale, "alpha"))
            alpha = collocate(np.array(rows), alpha3_anchor)
        realized, windows, zeros = _scan_all(alpha, epsilon, scale)
        result = DistributionResult(target=tup, realized=realized, alpha=alpha,
                                    mode="symmetric" if symmetric else "general", q=qv,
                                    windows=windows, zeros=zeros, attempts=attempt + 1)
        if result.matched:
            return result
        tried.append({"epsilon": epsilon, "scale": scale, "realized": list(realized)})
    if strict:
        raise NumericalFailure(f"pattern {tup} not realized", {"target": list(tup), "attempts": tried})
    result.notes.append(f"not realized after {len(tried)} attempts")
    return result


def distribution_table(alpha3_anchor: float = 1.0, q: Optional[float] = None) -> List[DistributionResult]:
    """Every coexistence pattern, unmatched ones included with their realized counts"""
    return [distribution_search(t, alpha3_anchor, q, strict=False) for t in config.DISTRIBUTIONS]
