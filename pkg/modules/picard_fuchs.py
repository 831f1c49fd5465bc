"""
Picard–Fuchs systems of the generators and their Riccati reductions

Selectors:
    V1 = (I01, I03, I21, I23)            V2 = (I11, I13)      V3 = (I02, I22)
    V4 = (I01, I03, I21, I23, I12)       all satisfy V = (A h + B) V'
    V5 = (I01, I03, I21), V6 = (I11, I13) for a = 0 in the swapped chart
    V7 = (I01, I21) for a = b = 0 in the swapped chart, h(4ch+1) V' = (A h + B) V

All entries are closed forms in (a, b, c); verification compares them with
quadrature values and period-form derivatives from abelian_engine.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial

import config
from modules.abelian_engine import generator_derivatives, generator_vector
from modules.hamiltonian_family import (
    HamiltonianParams, PeriodAnnulus, annuli, g1_zeros,
)
from utils.errors import DomainError
from utils.numerics import finite_difference

SELECTORS = ("V1", "V2", "V3", "V4", "V5", "V6", "V7")

COMPONENTS = {
    "V1": ("I01", "I03", "I21", "I23"),
    "V2": ("I11", "I13"),
    "V3": ("I02", "I22"),
    "V4": ("I01", "I03", "I21", "I23", "I12"),
    "V5": ("I01", "I03", "I21"),
    "V6": ("I11", "I13"),
    "V7": ("I01", "I21"),
}

SWAPPED_SELECTORS = ("V5", "V6", "V7")

_P = Polynomial


@dataclass
class PFSystem:
    """
    V = (A h + B) V', or G(h) V' = (A h + B) V when `gate` is set (V7)
    """
    which: str
    A: np.ndarray
    B: np.ndarray
    components: Tuple[str, ...]
    gate: Optional[Polynomial] = None

    def matrix(self, h: float) -> np.ndarray:
        return self.A * h + self.B

    def residual(self, V: np.ndarray, dV: np.ndarray, h: float) -> float:
        """‖V − (A h + B) V'‖ / max(1, ‖V‖), or the gated analogue"""
        if self.gate is None:
            diff = V - self.matrix(h) @ dV
        else:
            diff = self.gate(h) * dV - self.matrix(h) @ V
        return float(np.linalg.norm(diff) / max(1.0, np.linalg.norm(V)))

    def to_dict(self):
        return {"which": self.which, "components": list(self.components),
                "A": self.A.tolist(), "B": self.B.tolist(),
                "gate": None if self.gate is None else list(self.gate.coef)}


def _require_generic(params: HamiltonianParams, which: str):
    if params.a == 0 or params.disc == 0:
        raise DomainError(f"{which} needs a·c·(b²−4ac) ≠ 0", {"which": which, **params.to_dict()})


def _v1(a: float, b: float, c: float) -> Tuple[np.ndarray, np.ndarray]:
    D = b * b - 4 * a * c
    a11 = (4 * a * c + a * b + b * c) / (8 * a * c * D)
    a12 = (b + 2 * c) / (6 * D)
    a13 = -(b + 2 * a) / (2 * D)
    b12 = (8 * a * c + 3 * a * b + b * c) / (48 * a * c * D)
    b13 = -(8 * a * c + a * b + 3 * b * c) / (16 * a * c * D)
    b14 = -(24 * a * b * c + 20 * a * a * c + a * b * b + 20 * a * c * c + b * b * c) / (24 * a * c * D)
    A = np.array([
        [2.0, 0.0, 0.0, 0.0],
        [3 / (4 * c), 1.0, 0.0, 0.0],
        [-1 / (4 * a), 0.0, 1.0, 0.0],
        [a11, a12, a13, 2 / 3],
    ])
    B = np.array([
        [0.0, 1 / 3, -1.0, 0.0],
        [0.0, 3 / (8 * c), -3 / (8 * c), -b / (4 * c) - 0.5],
        [0.0, -1 / (24 * a), 3 / (8 * a), b / (12 * a) + 1 / 6],
        [0.0, b12, b13, b14],
    ])
    return A, B


def pf_matrices(params: HamiltonianParams, which: str) -> PFSystem:
    """Closed-form matrices of the selected Picard–Fuchs system"""
    if which not in SELECTORS:
        raise DomainError(f"unknown selector '{which}'", {"which": which})
    a, b, c = params.a, params.b, params.c
    D = params.disc
    gate = None
    if which in ("V1", "V2", "V3", "V4"):
        _require_generic(params, which)
    if which == "V1":
        A, B = _v1(a, b, c)
    elif which == "V2":
        A = np.array([[4 / 3, 0.0], [-4 * (b + 2 * a) / (5 * D), 4 / 5]])
        B = np.array([[1 / (3 * a), b / (9 * a) + 2 / 9],
                      [-(b + 2 * a) / (5 * a * D),
                       -(12 * a * c + b * b + 16 * a * b + 16 * a * a) / (15 * a * D)]])
    elif which == "V3":
        A = np.array([[4 / 3, 0.0], [4 * (b + 2 * c) / (15 * D), 4 / 5]])
        B = np.array([[1 / (3 * c), -b / (3 * c) - 2 / 3],
                      [(b + 2 * c) / (15 * c * D),
                       -(b * b + 16 * b * c + 16 * c * c + 12 * a * c) / (15 * c * D)]])
    elif which == "V4":
        A1, B1 = _v1(a, b, c)
        A = np.zeros((5, 5))
        B = np.zeros((5, 5))
        A[:4, :4], B[:4, :4] = A1, B1
        A[4, 4] = 1.0
        B[4, 4] = -(a + b + c) / D
    elif which in ("V5", "V6"):
        if a != 0 or b == 0:
            raise DomainError(f"{which} needs a = 0 and b ≠ 0", {"which": which, **params.to_dict()})
        if which == "V5":
            A = np.array([[2.0, 0.0, 0.0],
                          [(5 * c + 4 * b) / (2 * b * b), 2 / 3, -c / b],
                          [-1 / (2 * b), 0.0, 1.0]])
            B = np.array([[0.0, -1 / 3, 1.0],
                          [0.0, -(13 * b + 15 * c) / (12 * b * b), (3 * b + 5 * c) / (4 * b * b)],
                          [0.0, (3 * c + b) / (12 * b * c), (b - c) / (4 * b * c)]])
        else:
            A = np.array([[4 / 3, 0.0], [(4 * b * c + 8 * c * c) / (5 * b * b * c), 4 / 5]])
            B = np.array([[1 / (3 * c), -(b + 2 * c) / (9 * c)],
                          [(b + 2 * c) / (5 * b * b * c), -(b * b + 16 * b * c + 16 * c * c) / (15 * b * b * c)]])
    else:
        if a != 0 or b != 0:
            raise DomainError("V7 needs a = b = 0", {"which": which, **params.to_dict()})
        A = np.array([[3 * c, 0.0], [-0.5, 5 * c]])
        B = np.array([[1.0, -2.5 * c], [0.0, 0.0]])
        gate = _P([0.0, 1.0, 4 * c])
    return PFSystem(which=which, A=A, B=B, components=COMPONENTS[which], gate=gate)


def _require_chart(params: HamiltonianParams, which: str):
    if (which in SWAPPED_SELECTORS) != params.swapped:
        chart = "swapped" if which in SWAPPED_SELECTORS else "standard"
        raise DomainError(f"{which} is evaluated in the {chart} chart", {"which": which, **params.to_dict()})


def pf_residual(params: HamiltonianParams, which: str, annulus: PeriodAnnulus, h: float,
                n_min: int = config.N_MIN_DEFAULT) -> float:
    """Relative residual of the system at h, from quadrature values and period-form derivatives"""
    _require_chart(params, which)
    system = pf_matrices(params, which)
    gv = generator_vector(params, annulus, h, n_min)
    derivs = generator_derivatives(params, annulus, h, system.components, n_min)
    V = np.array([gv[name] for name in system.components])
    dV = np.array([derivs[name] for name in system.components])
    return system.residual(V, dV, h)


# ---------------------------------------------------------------------------
# Second-order system
# ---------------------------------------------------------------------------

@dataclass
class SecondOrderSystem:
    """
    G(h) (v1'', ..., vk'') = d(h) (I01', W') with W the auxiliary combination

    For a ≠ 0 the rows are (I01, I03, I21, Z, I12) with W = Z; the a = 0
    analogue has rows (I01, I03, Zbar) with W = Zbar.
    """
    G: Polynomial
    d: Dict[str, Polynomial]
    zdef: Dict[str, float]
    rows: Tuple[str, ...]

    def entry(self, name: str, h: float) -> float:
        return float(self.d[name](h))

    def to_dict(self):
        return {"G": list(self.G.coef), "rows": list(self.rows), "zdef": self.zdef,
                "d": {k: list(p.coef) for k, p in self.d.items()}}


def second_order_system(params: HamiltonianParams) -> SecondOrderSystem:
    a, b, c = params.a, params.b, params.c
    if a == 0:
        if b == 0:
            raise DomainError("no second-order system for a = b = 0", params.to_dict())
        G4 = b * b * _P([0.0, 1.0]) * _P([1.0, 4 * c]) * _P([-(b + c) / (b * b), 1.0])
        h = _P([0.0, 1.0])
        d = {
            "d11": -0.5 * h * _P([b * b - b * c - 2 * c * c, 4 * b * b * c]),
            "d12": (5 * b / 12) * _P([b + c, 2 * b * c]),
            "d21": -1.5 * (b + c) * h * _P([1.0, 4 * c]),
            "d22": (5 * b * b / 4) * h * _P([1.0, 4 * c]),
            "d31": -(3 / (5 * b)) * h * _P([b * b - c * c, 4 * b * b * c + 2 * b * c * c]),
            "d32": 0.5 * h * _P([b * b - b * c - 2 * c * c, 4 * b * b * c]),
        }
        zdef = {"I03": 2 / 5, "I21": 6 * c / (5 * b)}
        return SecondOrderSystem(G=G4, d=d, zdef=zdef, rows=("I01", "I03", "Zbar"))

    _require_generic(params, "second-order system")
    D = params.disc
    h4 = (a + b + c) / D
    h = _P([0.0, 1.0])
    shifted = _P([-h4, 1.0])
    k = 1 / (12 * a * c)
    G1 = k * h * _P([1.0, 4 * a]) * _P([1.0, 4 * c]) * shifted
    mixed = _P([a + b + c, 2 * a * b + 8 * a * c + 2 * b * c])
    d = {
        "d11": -k * h * _P([a + c, 8 * a * c]) * shifted,
        "d12": -mixed / (24 * a * c),
        "d21": -h * _P([1.0, 4 * a]) * shifted / (8 * a * c),
        "d22": h * _P([1.0, 4 * a]) * (b + 2 * c) / (8 * a * c),
        "d31": h * _P([1.0, 4 * c]) * shifted / (24 * a * c),
        "d32": -h * _P([1.0, 4 * c]) * (b + 2 * a) / (24 * a * c),
        "d41": -h * mixed * shifted / (24 * a * c * D),
        "d42": k * h * _P([a + c, 8 * a * c]) * shifted,
    }
    zdef = {"I03": -(b + 2 * c) / (6 * D), "I21": (b + 2 * a) / (2 * D), "I23": 1 / 3}
    return SecondOrderSystem(G=G1, d=d, zdef=zdef, rows=("I01", "I03", "I21", "Z", "I12"))


def second_order_from_matrices(params: HamiltonianParams, h: float) -> Dict[str, float]:
    """
    The d-entries at one level, derived from V1 (or V5): differentiating
    V = M V' gives M V'' = (I − A) V', which involves only I01' and W'
    """
    if params.a == 0:
        system = pf_matrices(params, "V5")
        M = system.matrix(h)
        b, c = params.b, params.c
        # (I − A5) V5' = u I01' + w Zbar'
        u = np.array([-1.0, -(5 * c + 4 * b) / (2 * b * b), 1 / (2 * b)])
        w = np.array([0.0, 5 / 6, 0.0])
        T = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 2 / 5, 6 * c / (5 * b)]])
        G = second_order_system(params).G(h)
        names = ("d11", "d12", "d21", "d22", "d31", "d32")
    else:
        system = pf_matrices(params, "V1")
        M = system.matrix(h)
        A = system.A
        # (I − A1) V1' = u I01' + w Z'
        u = np.array([-1.0, -A[1, 0], -A[2, 0], -A[3, 0]])
        w = np.array([0.0, 0.0, 0.0, 1.0])
        z = second_order_system(params).zdef
        T = np.array([[1.0, 0, 0, 0], [0, 1.0, 0, 0], [0, 0, 1.0, 0],
                      [0, z["I03"], z["I21"], z["I23"]]])
        G = second_order_system(params).G(h)
        names = ("d11", "d12", "d21", "d22", "d31", "d32", "d41", "d42")
    rows = G * T @ np.linalg.solve(M, np.column_stack([u, w]))
    return dict(zip(names, rows.flatten()))


# ---------------------------------------------------------------------------
# Riccati equations
# ---------------------------------------------------------------------------

RICCATI_SELECTORS = ("omega1", "omega2", "omega3", "omegabar1", "omegabar2")


@dataclass
class RiccatiSystem:
    """G(h) ω' = −q2(h) ω² + q1(h) ω + q0(h)"""
    which: str
    G: Polynomial
    q2: Polynomial
    q1: Polynomial
    q0: Polynomial
    numerator: str
    denominator: str
    derivative_ratio: bool = False

    def rhs(self, omega: float, h: float) -> float:
        return float(-self.q2(h) * omega ** 2 + self.q1(h) * omega + self.q0(h))

    def to_dict(self):
        return {"which": self.which, "G": list(self.G.coef), "q2": list(self.q2.coef),
                "q1": list(self.q1.coef), "q0": list(self.q0.coef),
                "ratio": f"{self.numerator}{chr(39) if self.derivative_ratio else ''}/"
                         f"{self.denominator}{chr(39) if self.derivative_ratio else ''}"}


def riccati_system(params: HamiltonianParams, which: str) -> RiccatiSystem:
    """
    Riccati equations of the generator ratios

    omega1 = Z'/I01', omega2 = I13/I11, omega3 = I22/I02 for a ≠ 0;
    omegabar1 = Zbar'/I01', omegabar2 = I13/I11 for a = 0.
    """
    if which not in RICCATI_SELECTORS:
        raise DomainError(f"unknown Riccati selector '{which}'", {"which": which})
    a, b, c = params.a, params.b, params.c
    if which == "omega1":
        so = second_order_system(params)
        if a == 0:
            raise DomainError("omega1 needs a ≠ 0", params.to_dict())
        d = so.d
        return RiccatiSystem(which, so.G, d["d12"], d["d42"] - d["d11"], d["d41"],
                             "Z", "I01", derivative_ratio=True)
    if which == "omegabar1":
        if a != 0:
            raise DomainError("omegabar1 needs a = 0", params.to_dict())
        so = second_order_system(params)
        d = so.d
        return RiccatiSystem(which, so.G, d["d12"], d["d32"] - d["d11"], d["d31"],
                             "Zbar", "I01", derivative_ratio=True)
    if which == "omegabar2":
        if a != 0 or b == 0:
            raise DomainError("omegabar2 needs a = 0 and b ≠ 0", params.to_dict())
        G5 = b * b * _P([1.0, 4 * c]) * _P([-(b + c) / (b * b), 1.0])
        abar1 = 0.25 * _P([-b * b - 16 * b * c - 16 * c * c, 12 * b * b * c])
        abar2 = _P([(5 / 12) * (b + 2 * c) * b * b])
        abar3 = -0.75 * (b + 2 * c) * _P([1.0, 4 * c])
        abar4 = 1.25 * b * b * _P([1.0, 4 * c])
        return RiccatiSystem(which, G5, abar2, abar4 - abar1, abar3, "I13", "I11")

    _require_generic(params, which)
    D = params.disc
    h4 = (a + b + c) / D
    if which == "omega2":
        G2 = (4 / (15 * a)) * _P([1.0, 4 * a]) * _P([-h4, 1.0])
        a1 = _P([-(12 * a * c + b * b + 16 * a * b + 16 * a * a) / (15 * a * D), 4 / 5])
        a2 = _P([-b / (9 * a) - 2 / 9])
        a3 = _P([(b + 2 * a) / (5 * a * D), 4 * (b + 2 * a) / (5 * D)])
        a4 = _P([1 / (3 * a), 4 / 3])
        return RiccatiSystem(which, G2, a2, a4 - a1, a3, "I13", "I11")
    G3 = (4 / (15 * c)) * _P([1.0, 4 * c]) * _P([-h4, 1.0])
    b1 = _P([-(12 * a * c + b * b + 16 * b * c + 16 * c * c) / (15 * c * D), 4 / 5])
    b2 = _P([b / (3 * c) + 2 / 3])
    b3 = _P([-(b + 2 * c) / (15 * c * D), -4 * (b + 2 * c) / (15 * D)])
    b4 = _P([1 / (3 * c), 4 / 3])
    return RiccatiSystem(which, G3, b2, b4 - b1, b3, "I22", "I02")


def _ratio(params, annulus, system: RiccatiSystem, n_min: int) -> Callable[[float], Tuple[float, float]]:
    """h -> (omega, denominator)"""
    zdef = None
    if system.numerator in ("Z", "Zbar"):
        zdef = second_order_system(params).zdef

    def at(h: float) -> Tuple[float, float]:
        if system.derivative_ratio:
            names = ("I01",) + tuple(zdef)
            dv = generator_derivatives(params, annulus, h, names, n_min)
            num = sum(w * dv[k] for k, w in zdef.items())
            den = dv["I01"]
        else:
            gv = generator_vector(params, annulus, h, n_min)
            num, den = gv[system.numerator], gv[system.denominator]
        return (num / den if den != 0.0 else float("nan")), den

    return at


def riccati_residual(params: HamiltonianParams, which: str, annulus: PeriodAnnulus, h: float,
                     n_min: int = config.N_MIN_DEFAULT) -> Optional[float]:
    """
    |G ω' − RHS| / max(1, |G ω'|, |RHS|) at h, with ω' by Richardson differences;
    None when the denominator generator is below RICCATI_DENOMINATOR_FLOOR
    """
    swapped = which in ("omegabar1", "omegabar2")
    if swapped != params.swapped:
        raise DomainError(f"{which} is evaluated in the {'swapped' if swapped else 'standard'} chart",
                          {"which": which, **params.to_dict()})
    system = riccati_system(params, which)
    at = _ratio(params, annulus, system, n_min)
    omega, den = at(h)
    if abs(den) < config.RICCATI_DENOMINATOR_FLOOR:
        return None
    step = config.FD_STEP_FRACTION * min(annulus.length(), 1.0)
    d_omega, _ = finite_difference(lambda level: at(level)[0], h, step)
    lhs = float(system.G(h)) * d_omega
    rhs = system.rhs(omega, h)
    return abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))


# ---------------------------------------------------------------------------
# a = b = 0 closed form and gating splits
# ---------------------------------------------------------------------------

def closed_form_I11_abzero(params: HamiltonianParams, annulus: PeriodAnnulus, h: float,
                           n_min: int = config.N_MIN_DEFAULT) -> float:
    """
    I11 = C1 (h + 1/(4c)) on an annulus around a center of y² − x² + c x⁴

    C1 is fixed by one quadrature at the middle of the annulus.
    """
    if params.a != 0 or params.b != 0 or params.c <= 0 or not params.swapped:
        raise DomainError("closed form needs a = b = 0, c > 0 in the swapped chart", params.to_dict())
    lo, hi = annulus.bounds()
    reference = 0.5 * (lo + hi)
    shift = 1.0 / (4.0 * params.c)
    c1 = generator_vector(params, annulus, reference, n_min)["I11"] / (reference + shift)
    return c1 * (h + shift)


@dataclass
class GatingSplit:
    annulus_id: int
    points: List[float]
    intervals: List[Tuple[float, float]]

    def to_dict(self):
        return {"annulus": self.annulus_id, "split_points": self.points,
                "intervals": [list(iv) for iv in self.intervals]}


def gating_roots(params: HamiltonianParams) -> List[float]:
    """Real zeros of the gating polynomial (G1, or G4 when a = 0)"""
    if params.a == 0:
        if params.b == 0:
            return [-1.0 / (4.0 * params.c)]
        return sorted(float(r.real) for r in second_order_system(params).G.roots() if abs(r.imag) < 1e-12)
    return sorted(z.h for z in g1_zeros(params) if z.h is not None)


def g_zero_split(params: HamiltonianParams, annulus: PeriodAnnulus,
                 h_max: float = config.H_MAX_DEFAULT) -> GatingSplit:
    """Sub-intervals of the annulus cut at interior gating zeros"""
    lo, hi = annulus.bounds(h_max)
    points = sorted({r for r in gating_roots(params) if annulus.contains(r) and lo < r < hi})
    edges = [lo] + points + [hi]
    return GatingSplit(annulus_id=annulus.id, points=points,
                       intervals=list(zip(edges[:-1], edges[1:])))


def verification_grid(params: HamiltonianParams, annulus: PeriodAnnulus,
                      points: int = config.PF_GRID_POINTS,
                      h_max: float = config.H_MAX_DEFAULT) -> np.ndarray:
    """Evenly spaced interior levels, dropping those within GATING_MARGIN of a gating zero"""
    lo, hi = annulus.bounds(h_max)
    span = hi - lo
    hs = lo + span * (np.arange(points) + 0.5) / points
    roots = g_zero_split(params, annulus, h_max).points
    keep = [h for h in hs if all(abs(h - r) > config.GATING_MARGIN * span for r in roots)]
    return np.array(keep)


@dataclass
class VerificationRow:
    which: str
    annulus_id: int
    h: float
    residual: Optional[float]

    def to_dict(self):
        return {"which": self.which, "annulus": self.annulus_id, "h": self.h, "residual": self.residual}


def applicable_selectors(params: HamiltonianParams) -> List[str]:
    if params.a == 0:
        return ["V7"] if params.b == 0 else ["V5", "V6"]
    return ["V1", "V2", "V3", "V4"]


def verify_pf(params: HamiltonianParams, which: Optional[str] = None,
              points: int = config.PF_GRID_POINTS) -> List[VerificationRow]:
    selectors = [which] if which else applicable_selectors(params)
    rows = []
    for sel in selectors:
        for ann in annuli(params):
            for h in verification_grid(params, ann, points):
                rows.append(VerificationRow(sel, ann.id, float(h), pf_residual(params, sel, ann, float(h))))
    return rows


def verify_riccati(params: HamiltonianParams, which: str,
                   points: int = config.PF_GRID_POINTS) -> List[VerificationRow]:
    rows = []
    for ann in annuli(params):
        step = config.FD_STEP_FRACTION * min(ann.length(), 1.0)
        for h in verification_grid(params, ann, points):
            if not (ann.h_lo < h - 2 * step and h + 2 * step < ann.h_hi):
                continue
            rows.append(VerificationRow(which, ann.id, float(h),
                                        riccati_residual(params, which, ann, float(h))))
    return rows
