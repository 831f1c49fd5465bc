"""
Small-amplitude expansion of the Melnikov function at the two centers

Around either center of the (−1, −2, 1) family the orbit with
m² = u = (1/4 − h)/2 has polar radius r = m + e2(θ) m² + e3(θ) m³ + ...,
and the Melnikov function is a power series in u:

    first center   I = Σ a_j u^j,   M1 = −I = Σ b_j u^j
    second center  I = −Σ d_l u^l,  M2 = Σ d_l u^l

Coefficients are linear in the alpha chart. Closed forms cover j ≤ 4; the
θ-quadrature path gives any order.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

import config
from modules.charts import (
    CENTERS, SQRT2, alpha_transforms, center_annulus, center_level, chart_matrix,
    hopf_flip, perturbation, family_params,
)
from modules.hamiltonian_family import eval_H
from modules.melnikov_analyzer import ZeroReport, zero_scan
from utils.errors import DomainError, NumericalFailure

CENTER_NAMES = tuple(CENTERS)

PI = math.pi

# a_j of the first center, rows j = 1..4, columns alpha0..alpha3
A_CLOSED = PI * np.array([
    [-1.0, 0.0, 0.0, 0.0],
    [-11 / 8, SQRT2 / 2, -3 / 4, -1 / 4],
    [-259 / 64, 7 * SQRT2 / 4, -27 / 16, -21 / 16],
    [-16235 / 1024, 1885 * SQRT2 / 256, -2505 / 512, -3195 / 512],
])
B_CLOSED = -A_CLOSED

_FLIP = np.diag([1.0, -1.0, 1.0, 1.0])
_HAT = chart_matrix("alpha", "alphahat")
# d_l as rows over the alpha chart
D_CLOSED = B_CLOSED @ _FLIP @ _HAT

# the four y-equation monomials as (power of φ, θ-weight exponents (cos, sin), Green factor)
_GREEN_TERMS = ((2, 0, 0, 1 / 2), (3, 1, 0, 1 / 3), (4, 0, 2, 3 / 4), (4, 2, 0, 1 / 4))


def _require_center(center: str):
    if center not in CENTER_NAMES:
        raise DomainError(f"unknown center '{center}'", {"center": center, "centers": list(CENTER_NAMES)})


@dataclass(frozen=True)
class HopfDelta:
    alpha0: float
    alpha1: float
    alpha2: float
    alpha3: float

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "HopfDelta":
        return cls(*(float(v) for v in values))

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha0, self.alpha1, self.alpha2, self.alpha3])

    @property
    def hat(self) -> np.ndarray:
        return alpha_transforms(self.as_array(), "alpha", "alphahat")

    def to_dict(self):
        return {"alpha": self.as_array().tolist(), "alphahat": self.hat.tolist()}


@dataclass
class HopfSeries:
    center: str
    coefficients: List[float]
    kind: str
    flags: List[str] = field(default_factory=list)
    m_domain: str = "m = sqrt((1/4 - h)/2), 0 < m small"

    def to_dict(self):
        out = {"center": self.center, "kind": self.kind, "coefficients": self.coefficients,
               "m_domain": self.m_domain}
        if self.flags:
            out["flags"] = self.flags
        return out


# ---------------------------------------------------------------------------
# Polar radius series
# ---------------------------------------------------------------------------

def _mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Truncated product of two power series stored along axis 0"""
    out = np.zeros_like(a)
    for k in range(a.shape[0]):
        out[k] = np.sum(a[:k + 1] * b[k::-1], axis=0)
    return out


def _power(series: np.ndarray, p: int) -> np.ndarray:
    out = series
    for _ in range(p - 1):
        out = _mul(out, series)
    return out


def radius_coefficients(theta, order: int, center: str = "first") -> np.ndarray:
    """
    e_0(θ) .. e_order(θ) of the radius series, by reversion of
    m = r·sqrt(1 + p r + q r²), p = ±√2 cosθ, q = −1/2 + 2cos²θ − cos⁴θ

    Returns:
        Array of shape (order + 1, len(theta)); e_0 = 0 and e_1 = 1
    """
    _require_center(center)
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    order = max(int(order), 1)
    cos = np.cos(theta)
    sign = 1.0 if center == "first" else -1.0
    v = np.zeros((order + 1, theta.size))
    v[1] = sign * SQRT2 * cos
    if order >= 2:
        v[2] = -0.5 + 2.0 * cos ** 2 - cos ** 4
    root = np.zeros_like(v)
    root[0] = 1.0
    for k in range(1, order + 1):
        root[k] = 0.5 * (v[k] - np.sum(root[1:k] * root[k - 1:0:-1], axis=0))
    # m = F(r) = Σ f_k r^k with f_k = root_{k-1}
    f = np.zeros_like(v)
    f[1:] = root[:-1]
    r = np.zeros_like(v)
    r[1] = 1.0
    for _ in range(order):
        acc = np.zeros_like(v)
        power = r
        for k in range(2, order + 1):
            power = _mul(power, r)
            acc += f[k] * power
        r = -acc
        r[1] += 1.0
    return r


def radius_closed_form(theta, k: int) -> np.ndarray:
    """e_2, e_3, e_4 of the first center in closed form"""
    cos = np.cos(np.asarray(theta, dtype=float))
    if k == 2:
        return -SQRT2 / 2 * cos
    if k == 3:
        return 0.5 * cos ** 4 + 0.25 * cos ** 2 + 0.25
    if k == 4:
        return -SQRT2 / 4 * (6 * cos ** 4 - 4 * cos ** 2 + 3) * cos
    raise DomainError("closed forms exist for k = 2, 3, 4", {"k": k})


def radius_series(theta, m, order: int = 6, center: str = "first"):
    """φ(θ, m) truncated after m^order"""
    theta_arr = np.atleast_1d(np.asarray(theta, dtype=float))
    coeffs = radius_coefficients(theta_arr, order, center)
    m = np.asarray(m, dtype=float)
    value = sum(coeffs[k] * m ** k for k in range(1, coeffs.shape[0]))
    return float(value[0]) if np.ndim(theta) == 0 and np.ndim(m) == 0 else value


def level_residual(theta, m: float, order: int, center: str = "first") -> np.ndarray:
    """H_k(φ cosθ, φ sinθ) + 2m², which is O(m^(order+2))"""
    _require_center(center)
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    r = radius_series(theta, m, order, center)
    cx, cy = CENTERS[center]
    return eval_H(family_params(), cx + r * np.cos(theta), cy + r * np.sin(theta)) \
        - config.FAMILY_CENTER_LEVEL + 2.0 * m * m


# ---------------------------------------------------------------------------
# Coefficients
# ---------------------------------------------------------------------------

def _theta_grid() -> np.ndarray:
    return 2.0 * PI * np.arange(config.THETA_POINTS) / config.THETA_POINTS


def _local_coefficients(values: np.ndarray, center: str, order: int) -> np.ndarray:
    """
    Coefficients of u^1..u^order of the counterclockwise I around the center,
    for the perturbation written in coordinates centred there
    """
    theta = _theta_grid()
    cos, sin = np.cos(theta), np.sin(theta)
    series = radius_coefficients(theta, 2 * order, center)
    out = np.zeros(order)
    for value, (power, pc, ps, factor) in zip(values, _GREEN_TERMS):
        if value == 0.0:
            continue
        phi_p = _power(series, power)
        weight = cos ** pc * sin ** ps
        for j in range(1, order + 1):
            out[j - 1] -= value * factor * 2.0 * PI * np.mean(weight * phi_p[2 * j])
    return out


def hopf_quadrature_coefficients(delta: HopfDelta, center: str = "first",
                                 order: int = 4) -> List[float]:
    """
    a_j (first center) or d_l (second center) by θ-quadrature

    The second center is computed in its own chart: the alphahat
    coefficients with the mirrored level equation.
    """
    _require_center(center)
    if center == "first":
        return _local_coefficients(delta.as_array(), "first", order).tolist()
    return (-_local_coefficients(delta.hat, "second", order)).tolist()


def hopf_coefficients(delta: HopfDelta, center: str = "first", check: bool = False) -> HopfSeries:
    """a_1..a_4 (first center) or d_1..d_4 (second center) from the closed forms"""
    _require_center(center)
    if center == "first":
        coefficients, kind = A_CLOSED @ delta.as_array(), "a"
    else:
        coefficients, kind = D_CLOSED @ delta.as_array(), "d"
    series = HopfSeries(center=center, coefficients=coefficients.tolist(), kind=kind)
    if check:
        numeric = np.array(hopf_quadrature_coefficients(delta, center, 4))
        gap = float(np.max(np.abs(numeric - coefficients)))
        if gap > config.HOPF_CROSS_CHECK_TOL:
            series.flags.append(f"closed form and quadrature differ by {gap:.3g}")
    return series


def melnikov_coefficients(delta: HopfDelta, center: str = "first",
                          order: int = config.HOPF_DESIGN_ORDER) -> np.ndarray:
    """b_j (first center) or d_l (second center) for j = 1..order, from θ-quadrature"""
    if center == "first":
        return -np.array(hopf_quadrature_coefficients(delta, center, order))
    return np.array(hopf_quadrature_coefficients(delta, center, order))


def jacobian(center: str = "first") -> np.ndarray:
    """∂(M-coefficients 1..3) / ∂(alpha0, alpha1, alpha2)"""
    _require_center(center)
    rows = B_CLOSED if center == "first" else D_CLOSED
    return rows[:3, :3].copy()


def delta_zero(center: str = "first", alpha3: float = 1.0) -> HopfDelta:
    """The point where the first three M-coefficients vanish for the given alpha3"""
    _require_center(center)
    if alpha3 == 0:
        raise DomainError("alpha3 must be nonzero", {"alpha3": alpha3})
    if center == "first":
        return HopfDelta(0.0, 3 * SQRT2 / 5 * alpha3, 7 / 15 * alpha3, alpha3)
    rows = D_CLOSED
    head = np.linalg.solve(rows[:3, :3], -rows[:3, 3] * alpha3)
    return HopfDelta(*head, alpha3)


# ---------------------------------------------------------------------------
# Three small limit cycles
# ---------------------------------------------------------------------------

@dataclass
class HopfDesign:
    center: str
    epsilon: float
    delta: HopfDelta
    delta_zero: HopfDelta
    coefficients: List[float]
    targets: List[float]
    window: Tuple[float, float]
    report: ZeroReport
    attempts: int

    @property
    def zeros(self) -> List[float]:
        return [z.h for z in self.report.zeros]

    @property
    def verified(self) -> bool:
        return self.report.count == 3

    def to_dict(self):
        return {
            "center": self.center,
            "delta": self.delta.as_array().tolist(),
            "delta_hat": self.delta.hat.tolist(),
            "delta_zero": self.delta_zero.as_array().tolist(),
            "epsilon": self.epsilon,
            "coefficients": self.coefficients,
            "targets_u": self.targets,
            "window": list(self.window),
            "zeros": self.zeros,
            "count": self.report.count,
            "attempts": self.attempts,
        }


def center_window(epsilon: float) -> Tuple[float, float]:
    """H-level window for m² in (ε/4, 4ε)"""
    return center_level(4.0 * epsilon), center_level(0.25 * epsilon)


def collocate(basis_rows: np.ndarray, alpha3: float) -> np.ndarray:
    """Solve rows · (alpha0, alpha1, alpha2, alpha3) = 0 for the first three entries"""
    head = np.linalg.solve(basis_rows[:, :3], -basis_rows[:, 3] * alpha3)
    return np.append(head, alpha3)


def series_design(center: str, alpha3: float, epsilon: float,
                  order: int = config.HOPF_DESIGN_ORDER) -> HopfDelta:
    """alpha with M(u) vanishing at u = ε, 2ε, 3ε on the series truncated at u^order"""
    basis = np.column_stack([
        melnikov_coefficients(HopfDelta.from_array(np.eye(4)[i]), center, order) for i in range(4)])
    targets = epsilon * np.array([1.0, 2.0, 3.0])
    powers = np.array([[u ** j for j in range(1, order + 1)] for u in targets])
    return HopfDelta.from_array(collocate(powers @ basis, alpha3))


def design_hopf_three(center: str = "first", alpha3_star: float = 1.0,
                      epsilon: float = config.HOPF_EPSILON,
                      grid_size: int = config.ZERO_GRID_DEFAULT) -> HopfDesign:
    """
    Three small limit cycles at one center

    Starting from the point where b_1 = b_2 = b_3 = 0, the alpha0..alpha2
    coordinates are moved so that M has zeros at m² = ε, 2ε, 3ε. Direct
    quadrature then counts the zeros in the window; ε is halved until three
    are found.
    """
    _require_center(center)
    if alpha3_star == 0:
        raise DomainError("alpha3_star must be nonzero", {"alpha3_star": alpha3_star})
    params = family_params()
    annulus = center_annulus(params, center)
    start = delta_zero(center, alpha3_star)
    closed = B_CLOSED if center == "first" else D_CLOSED
    tried = []
    eps = epsilon
    for attempt in range(config.HOPF_MAX_HALVINGS + 1):
        delta = series_design(center, alpha3_star, eps)
        window = center_window(eps)
        report = zero_scan(params, perturbation(delta.as_array(), "alpha"), annulus,
                           grid_size=grid_size, window=window, with_ceiling=False)
        if report.count == 3:
            return HopfDesign(center=center, epsilon=eps, delta=delta, delta_zero=start,
                              coefficients=(closed @ delta.as_array()).tolist(),
                              targets=(eps * np.array([1.0, 2.0, 3.0])).tolist(),
                              window=window, report=report, attempts=attempt + 1)
        tried.append({"epsilon": eps, "window": list(window), "count": report.count})
        eps *= 0.5
    raise NumericalFailure(f"no three-zero design found at the {center} center",
                           {"center": center, "attempts": tried})
