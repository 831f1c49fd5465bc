"""
Abelian integrals I_ij(h) = ∮ x^i y^j dx over the closed level curves

Quadrature runs on traced orbits (counterclockwise, uniform time grid) with
the vertex count doubled until the half-grid estimate meets QUAD_TOL.
Monomials of higher degree reduce to the nine generators through the
level-curve recurrences; a perturbation (f, g) decomposes into polynomial
coefficients of those generators.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import solve_ivp

import config
from modules.hamiltonian_family import (
    X_AXIS_MIRROR, Y_AXIS_MIRROR, HamiltonianParams, PeriodAnnulus, eval_H, gradient,
)
from modules.level_curve_tracer import Orbit, trace_orbit
from utils.errors import DomainError, NumericalFailure
from utils.numerics import finite_difference

GENERATORS = ("I01", "I03", "I21", "I23", "I12", "I11", "I13", "I02", "I22")
GENERATOR_INDEX = {(int(name[1]), int(name[2])): name for name in GENERATORS}

# Short names of the decomposition coefficients, keyed by generator
DECOMPOSITION_NAMES = {
    "I01": "f1", "I03": "f2", "I21": "f3", "I23": "f4", "I12": "f5",
    "I11": "g1", "I13": "g2", "I02": "l1", "I22": "l2",
}


def forced_zero(name: str, symmetry) -> bool:
    """Generators that vanish identically on annuli with the given mirrors"""
    i, j = int(name[1]), int(name[2])
    if Y_AXIS_MIRROR in symmetry and i % 2 == 1:
        return True
    if X_AXIS_MIRROR in symmetry and j % 2 == 0:
        return True
    return False


# ---------------------------------------------------------------------------
# Perturbations
# ---------------------------------------------------------------------------

@dataclass
class PerturbationPoly:
    """f(x, y) = Σ a_ij x^i y^j, g(x, y) = Σ b_ij x^i y^j with i + j ≤ n"""
    n: int
    a: Dict[Tuple[int, int], float] = field(default_factory=dict)
    b: Dict[Tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        for table in (self.a, self.b):
            for (i, j) in table:
                if i < 0 or j < 0 or i + j > self.n:
                    raise DomainError(f"monomial ({i}, {j}) exceeds degree {self.n}",
                                      {"i": i, "j": j, "n": self.n})

    @classmethod
    def from_tables(cls, a: Optional[Dict] = None, b: Optional[Dict] = None,
                    n: Optional[int] = None) -> "PerturbationPoly":
        a = {tuple(k): float(v) for k, v in (a or {}).items()}
        b = {tuple(k): float(v) for k, v in (b or {}).items()}
        if n is None:
            n = max([i + j for i, j in list(a) + list(b)], default=0)
        return cls(n=n, a=a, b=b)

    def terms(self) -> Iterator[Tuple[str, int, int, float]]:
        for (i, j), v in sorted(self.a.items()):
            yield "a", i, j, v
        for (i, j), v in sorted(self.b.items()):
            yield "b", i, j, v

    def evaluate(self, x, y) -> Tuple:
        f = sum(v * x ** i * y ** j for (i, j), v in self.a.items()) if self.a else 0.0 * x
        g = sum(v * x ** i * y ** j for (i, j), v in self.b.items()) if self.b else 0.0 * x
        return f, g

    def combined(self, other: "PerturbationPoly", scale: float = 1.0, other_scale: float = 1.0) -> "PerturbationPoly":
        """scale * self + other_scale * other"""
        a: Dict[Tuple[int, int], float] = {}
        b: Dict[Tuple[int, int], float] = {}
        for table, source, k in ((a, self.a, scale), (b, self.b, scale),
                                 (a, other.a, other_scale), (b, other.b, other_scale)):
            for key, v in source.items():
                table[key] = table.get(key, 0.0) + k * v
        return PerturbationPoly(n=max(self.n, other.n), a=a, b=b)

    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.a.values()) and all(v == 0.0 for v in self.b.values())

    def to_dict(self) -> Dict[str, object]:
        out: Dict[str, object] = {"n": self.n}
        for kind, i, j, v in self.terms():
            out[f"{kind}_{i}_{j}"] = v
        return out


# ---------------------------------------------------------------------------
# Quadrature on orbits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    flagged: bool = False

    def to_dict(self):
        return {"value": self.value, "error": self.error, "flagged": self.flagged}


def _trapezoid(orbit: Orbit, values: np.ndarray) -> Tuple[float, float]:
    full = float(values.sum()) * orbit.dt
    half = float(values[::2].sum()) * 2.0 * orbit.dt
    return full, abs(full - half)


def _tolerance(orbit: Orbit, values: np.ndarray) -> float:
    scale = float(np.abs(values).sum()) * orbit.dt
    return config.QUAD_TOL * max(1.0, scale)


def integrate_monomial(orbit: Orbit, i: int, j: int) -> QuadratureResult:
    """∮ x^i y^j dx along the counterclockwise orbit"""
    if i < 0 or j < 0 or i + j > config.MAX_MONOMIAL_DEGREE:
        raise DomainError(f"monomial degree must be at most {config.MAX_MONOMIAL_DEGREE}",
                          {"i": i, "j": j})
    x, y = orbit.points[:, 0], orbit.points[:, 1]
    values = x ** i * y ** j * orbit.velocities[:, 0]
    value, error = _trapezoid(orbit, values)
    return QuadratureResult(value=value, error=error, flagged=error > _tolerance(orbit, values))


@lru_cache(maxsize=512)
def _orbit(params: HamiltonianParams, annulus: PeriodAnnulus, h: float, n: int) -> Orbit:
    return trace_orbit(params, annulus, h, n_min=n)


def converged_orbit(params: HamiltonianParams, annulus: PeriodAnnulus, h: float,
                    integrand: Callable[[Orbit], np.ndarray],
                    n_min: int = config.N_MIN_DEFAULT) -> Tuple[Orbit, QuadratureResult]:
    """
    Trace at doubling resolution until the trapezoid estimate of
    Σ integrand(orbit) * dt meets QUAD_TOL (or N_MAX is reached, flagged)
    """
    n = n_min
    while True:
        orbit = _orbit(params, annulus, h, n)
        values = integrand(orbit)
        value, error = _trapezoid(orbit, values)
        ok = error <= _tolerance(orbit, values)
        if ok or 2 * orbit.n > config.N_MAX:
            return orbit, QuadratureResult(value=value, error=error, flagged=not ok)
        n = 2 * orbit.n


def monomial_integral(params: HamiltonianParams, annulus: PeriodAnnulus, h: float,
                      i: int, j: int, n_min: int = config.N_MIN_DEFAULT) -> QuadratureResult:
    """I_ij(h) on the annulus for any i + j ≤ MAX_MONOMIAL_DEGREE"""
    if i < 0 or j < 0 or i + j > config.MAX_MONOMIAL_DEGREE:
        raise DomainError(f"monomial degree must be at most {config.MAX_MONOMIAL_DEGREE}",
                          {"i": i, "j": j})

    def integrand(orbit: Orbit) -> np.ndarray:
        return orbit.points[:, 0] ** i * orbit.points[:, 1] ** j * orbit.velocities[:, 0]

    _, result = converged_orbit(params, annulus, h, integrand, n_min)
    return result


@dataclass
class GeneratorVector:
    """The nine generators at one level, with per-entry error estimates"""
    h: float
    values: Dict[str, float]
    est_error: Dict[str, float]
    flags: List[str] = field(default_factory=list)

    def __getitem__(self, name: str) -> float:
        return self.values[name]

    def as_array(self, names: Sequence[str] = GENERATORS) -> np.ndarray:
        return np.array([self.values[k] for k in names])

    def to_dict(self):
        return {"h": self.h, **self.values,
                "errors": dict(self.est_error), "flags": list(self.flags)}


def generator_vector(params: HamiltonianParams, annulus: PeriodAnnulus, h: float,
                     n_min: int = config.N_MIN_DEFAULT) -> GeneratorVector:
    """All nine generators on one shared discretization; symmetry-forced entries are exact zeros"""
    powers = [(int(k[1]), int(k[2])) for k in GENERATORS]

    def integrand(orbit: Orbit) -> np.ndarray:
        x, y, vx = orbit.points[:, 0], orbit.points[:, 1], orbit.velocities[:, 0]
        # the largest monomial drives the refinement
        stack = np.array([x ** i * y ** j * vx for i, j in powers])
        return stack[np.argmax(np.abs(stack).sum(axis=1))]

    orbit, _ = converged_orbit(params, annulus, h, integrand, n_min)
    values: Dict[str, float] = {}
    errors: Dict[str, float] = {}
    flags: List[str] = []
    for name, (i, j) in zip(GENERATORS, powers):
        if forced_zero(name, annulus.symmetry):
            values[name], errors[name] = 0.0, 0.0
            continue
        result = integrate_monomial(orbit, i, j)
        values[name], errors[name] = result.value, result.error
        if result.flagged:
            flags.append(f"{name}: quadrature estimate {result.error:.3g}")
    return GeneratorVector(h=h, values=values, est_error=errors, flags=flags)


# ---------------------------------------------------------------------------
# Derivatives in h
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DerivativeResult:
    value: float
    error: float
    method: str
    cross_check: Optional[float] = None
    flags: Tuple[str, ...] = ()

    def to_dict(self):
        return {"value": self.value, "error": self.error, "method": self.method,
                "cross_check": self.cross_check, "flags": list(self.flags)}


def fd_step(annulus: PeriodAnnulus, h_max: float = config.H_MAX_DEFAULT) -> float:
    return config.FD_STEP_FRACTION * min(annulus.length(h_max), 1.0)


def _period_form(params, annulus, h, i, j, n_min) -> QuadratureResult:
    """dI_ij/dh = ±j ∫ x^i y^(j-1) dt over one period (sign of the flow orientation)"""
    if j == 0:
        return QuadratureResult(0.0, 0.0)
    sign = annulus.flow_sign

    def integrand(orbit: Orbit) -> np.ndarray:
        return sign * j * orbit.points[:, 0] ** i * orbit.points[:, 1] ** (j - 1)

    _, result = converged_orbit(params, annulus, h, integrand, n_min)
    return result


def derivative_Iij(params: HamiltonianParams, annulus: PeriodAnnulus, h: float, i: int, j: int,
                   method: str = "richardson", n_min: int = config.N_MIN_DEFAULT) -> DerivativeResult:
    """
    dI_ij/dh at an interior level

    method="richardson" differentiates the quadrature numerically and
    cross-checks it against the period form; method="period" integrates the
    period form only.
    """
    if method not in ("richardson", "period"):
        raise DomainError(f"unknown derivative method '{method}'", {"method": method})
    if method == "period":
        if not annulus.contains(h):
            raise DomainError("no closed orbit", {"h": h, "annulus": annulus.id})
        res = _period_form(params, annulus, h, i, j, n_min)
        flags = (f"I{i}{j}': quadrature estimate {res.error:.3g}",) if res.flagged else ()
        return DerivativeResult(value=res.value, error=res.error, method="period", flags=flags)

    step = fd_step(annulus)
    if not (annulus.h_lo < h - 2 * step and h + 2 * step < annulus.h_hi):
        raise DomainError("level too close to the annulus boundary for finite differences",
                          {"h": h, "step": step, "h_lo": annulus.h_lo, "h_hi": annulus.h_hi})
    if j == 0:
        return DerivativeResult(value=0.0, error=0.0, method="richardson", cross_check=0.0)

    def value_at(level: float) -> float:
        return monomial_integral(params, annulus, level, i, j, n_min).value

    rich, err = finite_difference(value_at, h, step)
    check = _period_form(params, annulus, h, i, j, n_min).value
    flags = []
    if abs(rich - check) > config.DERIVATIVE_AGREEMENT * max(1.0, abs(check)):
        flags.append(f"I{i}{j}': finite difference {rich:.12g} vs period form {check:.12g}")
    return DerivativeResult(value=rich, error=err, method="richardson",
                            cross_check=check, flags=tuple(flags))


def generator_derivatives(params: HamiltonianParams, annulus: PeriodAnnulus, h: float,
                          names: Sequence[str] = GENERATORS,
                          n_min: int = config.N_MIN_DEFAULT) -> Dict[str, float]:
    """Period-form derivatives of the named generators; symmetry zeros stay exact"""
    out = {}
    for name in names:
        if forced_zero(name, annulus.symmetry):
            out[name] = 0.0
            continue
        out[name] = derivative_Iij(params, annulus, h, int(name[1]), int(name[2]),
                                   method="period", n_min=n_min).value
    return out


# ---------------------------------------------------------------------------
# Monomial reduction
# ---------------------------------------------------------------------------

Combination = Dict[str, Polynomial]

_ONE = Polynomial([1.0])
_H = Polynomial([0.0, 1.0])


def _accumulate(target: Combination, combo: Combination, factor=1.0):
    for k, p in combo.items():
        target[k] = target.get(k, Polynomial([0.0])) + p * factor


def _trim(p: Polynomial) -> Polynomial:
    coef = np.asarray(p.coef, dtype=float)
    scale = np.abs(coef).max() if coef.size else 0.0
    if scale == 0.0:
        return Polynomial([0.0])
    return Polynomial(coef).trim(1e-13 * scale)


def _require_reducible(params: HamiltonianParams):
    if params.swapped:
        raise DomainError("monomial reduction is defined in the standard chart", params.to_dict())
    if params.a == 0 or params.disc == 0:
        raise DomainError("reduction unsupported: needs a·c·(b²−4ac) ≠ 0", params.to_dict())


@lru_cache(maxsize=None)
def _level(a: float, b: float, c: float, n: int) -> Dict[Tuple[int, int], Combination]:
    """Every I_(i, n-i) with j ≥ 1 as a generator combination"""
    members = [(i, n - i) for i in range(n)]
    result: Dict[Tuple[int, int], Combination] = {}
    unknown = []
    for key in members:
        if key in GENERATOR_INDEX:
            result[key] = {GENERATOR_INDEX[key]: _ONE}
        else:
            unknown.append(key)
    if not unknown:
        return result
    if n < 4:
        raise DomainError(f"no reduction rule for level {n}", {"level": n})

    slot = {key: r for r, key in enumerate(unknown)}
    matrix = np.eye(len(unknown))
    rhs: List[Combination] = []
    for key in unknown:
        i, j = key
        row: Combination = {}
        if i <= 2:
            # from H = h times x^i y^(j-4) dx, with the x^(i+4) term eliminated
            scale = j / (2.0 * c * (n + 1))
            _accumulate(row, _reduce(a, b, c, i, j - 4), scale * 2.0 * _H)
            _accumulate(row, _reduce(a, b, c, i + 2, j - 4), -scale)
            _accumulate(row, _reduce(a, b, c, i, j - 2), scale * (i + 2 * j - 3) / (j - 2))
            partner, coupling = (i + 2, j - 2), j * b / (2.0 * c * (j - 2))
        else:
            # from dH = 0 times x^(i-3) y^j dx
            scale = 1.0 / (2.0 * a * (n + 1))
            if i > 3:
                _accumulate(row, _reduce(a, b, c, i - 4, j), scale * 2.0 * (i - 3) * _H)
                _accumulate(row, _reduce(a, b, c, i - 4, j + 2), scale * j * (i - 3) / (j + 2))
            _accumulate(row, _reduce(a, b, c, i - 2, j), -scale * (2 * i + j - 2))
            partner, coupling = (i - 2, j + 2), j * b / (2.0 * a * (j + 2))
        if partner in slot:
            matrix[slot[key], slot[partner]] += coupling
        elif partner in GENERATOR_INDEX:
            _accumulate(row, {GENERATOR_INDEX[partner]: _ONE}, -coupling)
        rhs.append(row)

    if abs(np.linalg.det(matrix)) < 1e-14:
        raise DomainError("reduction system is singular", {"level": n, "a": a, "b": b, "c": c})
    inverse = np.linalg.inv(matrix)
    for key in unknown:
        r = slot[key]
        combo: Combination = {}
        for k, row in enumerate(rhs):
            if inverse[r, k] != 0.0:
                _accumulate(combo, row, inverse[r, k])
        result[key] = {name: _trim(p) for name, p in combo.items()}
    return result


def _reduce(a: float, b: float, c: float, i: int, j: int) -> Combination:
    if i < 0 or j < 0:
        raise DomainError("negative monomial index", {"i": i, "j": j})
    if j == 0:
        return {}
    if (i, j) in GENERATOR_INDEX:
        return {GENERATOR_INDEX[(i, j)]: _ONE}
    return _level(a, b, c, i + j)[(i, j)]


def _degree(p: Polynomial) -> int:
    coef = np.asarray(p.coef)
    nz = np.nonzero(coef)[0]
    return int(nz[-1]) if nz.size else -1


def degree_bounds(n: int) -> Dict[str, int]:
    """Coefficient degree ceilings for a level-n monomial"""
    if n % 2 == 1:
        return {"I01": (n - 1) // 4, "I03": (n - 3) // 4, "I21": (n - 3) // 4,
                "I12": (n - 3) // 4, "I23": (n - 1) // 4 - 1}
    return {"I11": (n - 2) // 4, "I02": (n - 2) // 4, "I13": n // 4 - 1, "I22": n // 4 - 1}


@dataclass
class ReductionResult:
    """I_target = Σ coefficients[g](h) · g over the generators g"""
    target: Tuple[int, int]
    coefficients: Dict[str, np.ndarray]
    degrees: Dict[str, int]
    bounds: Dict[str, int]

    def evaluate(self, gv: GeneratorVector) -> float:
        return sum(float(Polynomial(c)(gv.h)) * gv[name] for name, c in self.coefficients.items())

    def within_bounds(self) -> bool:
        return all(self.degrees[k] <= self.bounds.get(k, self.degrees[k]) for k in self.degrees)

    def to_dict(self):
        return {"target": list(self.target),
                "coefficients": {k: list(v) for k, v in self.coefficients.items()},
                "degrees": self.degrees, "bounds": self.bounds}


def reduce_monomial(params: HamiltonianParams, i: int, j: int) -> ReductionResult:
    """
    Express I_ij through the generators with polynomial-in-h coefficients

    Each level n = i + j is solved as one linear system: the three lowest
    x-powers come from the level-curve relation, the rest from the
    differentiated one, each coupling to a same-level neighbour.
    """
    _require_reducible(params)
    combo = _reduce(params.a, params.b, params.c, i, j)
    coefficients = {name: p.coef.astype(float) for name, p in combo.items()
                    if _degree(p) >= 0}
    degrees = {name: _degree(Polynomial(c)) for name, c in coefficients.items()}
    return ReductionResult(target=(i, j), coefficients=coefficients, degrees=degrees,
                           bounds=degree_bounds(i + j))


# ---------------------------------------------------------------------------
# Melnikov function
# ---------------------------------------------------------------------------

def _melnikov_integrand(pert: PerturbationPoly) -> Callable[[Orbit], np.ndarray]:
    def integrand(orbit: Orbit) -> np.ndarray:
        f, g = pert.evaluate(orbit.points[:, 0], orbit.points[:, 1])
        return g * orbit.velocities[:, 0] - f * orbit.velocities[:, 1]
    return integrand


def melnikov_quadrature(params: HamiltonianParams, pert: PerturbationPoly, annulus: PeriodAnnulus,
                        h: float, n_min: int = config.N_MIN_DEFAULT) -> QuadratureResult:
    """I(h) = ∮ g dx − f dy (counterclockwise) with its quadrature estimate"""
    if not annulus.contains(h):
        raise DomainError("no closed orbit", {"h": h, "annulus": annulus.id})
    _, result = converged_orbit(params, annulus, h, _melnikov_integrand(pert), n_min)
    return result


def melnikov_eval(params: HamiltonianParams, pert: PerturbationPoly, annulus: PeriodAnnulus,
                  h: float, n_min: int = config.N_MIN_DEFAULT) -> float:
    return melnikov_quadrature(params, pert, annulus, h, n_min).value


@dataclass
class MelnikovDecomposition:
    """I(h) = Σ coefficient_g(h) · g over the nine generators"""
    degree: int
    polynomials: Dict[str, np.ndarray]

    def named(self) -> Dict[str, np.ndarray]:
        return {DECOMPOSITION_NAMES[g]: c for g, c in self.polynomials.items()}

    def degrees(self) -> Dict[str, int]:
        return {DECOMPOSITION_NAMES[g]: _degree(Polynomial(c)) for g, c in self.polynomials.items()}

    def bounds(self) -> Dict[str, int]:
        n = self.degree
        odd = degree_bounds(n if n % 2 == 1 else n - 1) if n >= 1 else {}
        even = degree_bounds(n if n % 2 == 0 else n - 1) if n >= 2 else {}
        merged = {**odd, **even}
        return {DECOMPOSITION_NAMES[g]: v for g, v in merged.items()}

    def is_zero(self) -> bool:
        return all(not np.any(c) for c in self.polynomials.values())

    def to_dict(self):
        return {"degree": self.degree,
                "coefficients": {k: list(v) for k, v in self.named().items()},
                "degrees": self.degrees()}


def decompose_melnikov(params: HamiltonianParams, pert: PerturbationPoly) -> MelnikovDecomposition:
    """
    Coefficient polynomials of I(h) over the generators

    dy-terms are moved to dx-terms by parts: ∮ x^i y^j dy = −i/(j+1) ∮ x^(i-1) y^(j+1) dx.
    """
    _require_reducible(params)
    total: Combination = {}
    for (i, j), v in pert.b.items():
        if v:
            _accumulate(total, _reduce(params.a, params.b, params.c, i, j), v)
    for (i, j), v in pert.a.items():
        if v and i > 0:
            _accumulate(total, _reduce(params.a, params.b, params.c, i - 1, j + 1), v * i / (j + 1))
    polynomials = {name: np.asarray(_trim(total[name]).coef, dtype=float)
                   if name in total else np.zeros(1) for name in GENERATORS}
    return MelnikovDecomposition(degree=pert.n, polynomials=polynomials)


def evaluate_decomposition(decomposition: MelnikovDecomposition, gv: GeneratorVector) -> float:
    return sum(float(Polynomial(c)(gv.h)) * gv[name] for name, c in decomposition.polynomials.items())


# ---------------------------------------------------------------------------
# Displacement oracle
# ---------------------------------------------------------------------------

def displacement_oracle(params: HamiltonianParams, pert: PerturbationPoly, annulus: PeriodAnnulus,
                        h: float, eps: float) -> float:
    """
    ΔH/ε after one return of the perturbed flow started on the level h

    To first order this equals the Melnikov function taken along the flow
    direction: flow_sign * melnikov_eval.
    """
    orbit = _orbit(params, annulus, h, config.N_MIN_DEFAULT)
    # start at the first vertex in flow order
    z0 = orbit.points[0]
    hx, hy = gradient(params, z0[0], z0[1])
    speed = math.hypot(hx, hy)
    normal = (hy / speed, -hx / speed)

    def rhs(_t, z):
        gx, gy = gradient(params, z[0], z[1])
        f, g = pert.evaluate(z[0], z[1])
        return [gy + eps * f, -gx + eps * g]

    def section(_t, z):
        return (z[0] - z0[0]) * normal[0] + (z[1] - z0[1]) * normal[1]

    section.terminal = True
    section.direction = 1.0
    half = solve_ivp(rhs, (0.0, 0.5 * orbit.period), list(z0), method=config.ODE_METHOD,
                     rtol=config.ODE_RTOL, atol=config.ODE_ATOL)
    rest = solve_ivp(rhs, (0.0, 2.0 * orbit.period), list(half.y[:, -1]), method=config.ODE_METHOD,
                     rtol=config.ODE_RTOL, atol=config.ODE_ATOL, events=[section])
    if not rest.t_events[0].size:
        raise NumericalFailure("perturbed trajectory did not return", {"h": h, "eps": eps})
    z1 = rest.y_events[0][0]
    return float(eval_H(params, z1[0], z1[1]) - h) / eps
