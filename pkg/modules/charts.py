"""
Coefficient charts of the cubic perturbation on the family (a, b, c) = (−1, −2, 1)

The perturbation ε(q0 y + q1 xy + q2 y³ + q3 x²y) of the y-equation is
written in four charts:

    q          original coordinates
    alpha      centred at the first center (1/√2, 0)
    alphahat   centred at the second center (−1/√2, 0)
    alphabar   the double-loop chart H3 = −H/2, time rescaled by −2

Every chart map is linear; conversions go through q.
"""

import math
from typing import Dict, Sequence, Tuple

import numpy as np

import config
from modules.abelian_engine import PerturbationPoly, monomial_integral
from modules.hamiltonian_family import HamiltonianParams, PeriodAnnulus, annulus_for
from utils.errors import DomainError

CHARTS = ("q", "alpha", "alphahat", "alphabar")

SQRT2 = math.sqrt(2.0)
SHIFT = 1.0 / SQRT2

# monomials of the y-equation, in coefficient order
MONOMIALS: Tuple[Tuple[int, int], ...] = ((0, 1), (1, 1), (0, 3), (2, 1))

CENTERS: Dict[str, Tuple[float, float]] = {
    "first": (SHIFT, 0.0),
    "second": (-SHIFT, 0.0),
}

CENTER_LEVEL = 0.25

# chart -> q-chart coefficients as rows acting on q
_FROM_Q = {
    "q": np.eye(4),
    "alpha": np.array([
        [1.0, SQRT2 / 2, 0.0, 0.5],
        [0.0, 1.0, 0.0, SQRT2],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]),
    "alphabar": -0.5 * np.eye(4),
}
_ALPHA_TO_HAT = np.array([
    [1.0, -SQRT2, 0.0, 2.0],
    [0.0, 1.0, 0.0, -2.0 * SQRT2],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
])
_FROM_Q["alphahat"] = _ALPHA_TO_HAT @ _FROM_Q["alpha"]


def chart_matrix(source: str, target: str) -> np.ndarray:
    """Matrix M with target = M @ source"""
    for name in (source, target):
        if name not in CHARTS:
            raise DomainError(f"unknown chart '{name}'", {"chart": name, "charts": list(CHARTS)})
    return _FROM_Q[target] @ np.linalg.inv(_FROM_Q[source])


def alpha_transforms(values: Sequence[float], source: str, target: str) -> np.ndarray:
    """Coefficient quadruple of one chart expressed in another"""
    values = np.asarray(values, dtype=float)
    if values.shape != (4,):
        raise DomainError("a chart quadruple has four entries", {"values": list(values)})
    return chart_matrix(source, target) @ values


def jacobian_det(source: str, target: str) -> float:
    return float(np.linalg.det(chart_matrix(source, target)))


def hopf_flip(hat: Sequence[float]) -> np.ndarray:
    """The second center is the x-mirror of the first: (α̂0, −α̂1, α̂2, α̂3)"""
    hat = np.asarray(hat, dtype=float)
    return np.array([hat[0], -hat[1], hat[2], hat[3]])


def family_params() -> HamiltonianParams:
    a, b, c = config.FAMILY_PARAMS
    return HamiltonianParams(a=a, b=b, c=c)


def perturbation(values: Sequence[float], chart: str = "alpha") -> PerturbationPoly:
    """The y-equation perturbation in original coordinates"""
    q = alpha_transforms(values, chart, "q")
    return PerturbationPoly(n=3, b={m: float(v) for m, v in zip(MONOMIALS, q)})


def chart_from_perturbation(values: Dict[str, object]) -> PerturbationPoly:
    """Resolve the chart keys of a parsed perturbation file; plain tables pass through"""
    if values.get("alpha") is not None and values.get("baralpha") is not None:
        raise DomainError("give either alpha or baralpha keys, not both", {})
    if values.get("alpha") is not None:
        base = perturbation(values["alpha"], "alpha")
    elif values.get("baralpha") is not None:
        base = perturbation(values["baralpha"], "alphabar")
    else:
        return PerturbationPoly.from_tables(values.get("a"), values.get("b"))
    extra = PerturbationPoly.from_tables(values.get("a"), values.get("b"))
    return base.combined(extra)


# ---------------------------------------------------------------------------
# Levels and orbit integrals
# ---------------------------------------------------------------------------

def center_level(u: float) -> float:
    """H-level of the orbit with m² = u around either center"""
    return CENTER_LEVEL - 2.0 * u


def loop_level(h3: float) -> float:
    """H-level of the H3 level h3"""
    return -2.0 * h3


def center_annulus(params: HamiltonianParams, center: str) -> PeriodAnnulus:
    if center not in CENTERS:
        raise DomainError(f"unknown center '{center}'", {"center": center})
    return annulus_for(params, 0.5 * CENTER_LEVEL, enclosing=CENTERS[center])


def loop_annulus(params: HamiltonianParams, loop: int) -> PeriodAnnulus:
    """1 and 2: inner loops around the first and second center; 3: the outer family"""
    if loop == 1:
        return center_annulus(params, "first")
    if loop == 2:
        return center_annulus(params, "second")
    if loop == 3:
        return annulus_for(params, -0.5 * CENTER_LEVEL)
    raise DomainError(f"unknown loop {loop}", {"loop": loop})


def monomial_responses(params: HamiltonianParams, annulus: PeriodAnnulus, h: float,
                       n_min: int = config.N_MIN_DEFAULT) -> np.ndarray:
    """Counterclockwise ∮ m dx for the four monomials, at H-level h"""
    return np.array([monomial_integral(params, annulus, h, i, j, n_min).value for i, j in MONOMIALS])


def chart_responses(params: HamiltonianParams, annulus: PeriodAnnulus, h: float, chart: str,
                    n_min: int = config.N_MIN_DEFAULT) -> np.ndarray:
    """Counterclockwise I(h) for each unit coefficient of the chart"""
    return monomial_responses(params, annulus, h, n_min) @ chart_matrix(chart, "q")
