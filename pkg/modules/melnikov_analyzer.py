"""
Zero scanning of the Melnikov function and the per-region zero ceilings
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

import config
from modules.abelian_engine import (
    PerturbationPoly, decompose_melnikov, evaluate_decomposition, generator_vector,
    melnikov_eval, melnikov_quadrature,
)
from modules.hamiltonian_family import (
    HamiltonianParams, PeriodAnnulus, RegionLabel, annuli, classify_region,
)
from utils.errors import DomainError
from utils.numerics import refine_root, sign_change_brackets, tangential_dips, tanh_grid


class CeilingTable:
    """Upper bounds slope * n + intercept on the number of zeros, per region"""

    # (tag, a = 0) -> (slope, intercept)
    ROWS: Dict[Tuple[str, bool], Tuple[int, int]] = {
        ("D1+(1)", False): (58, 121),
        ("D1+(2)", False): (54, 109),
        ("D1+(3)", False): (58, 121),
        ("l1+", False): (31, 66),
        ("D2+", False): (31, 67),
        ("l2+", False): (31, 66),
        ("D3+", False): (31, 67),
        ("D4+(1)", False): (31, 66),
        ("D4+(2)", False): (27, 55),
        ("D4+(3)", False): (27, 55),
        ("D4+(1)", True): (49, -60),
        ("D4+(2)", True): (45, -58),
        ("D4+(3)", True): (45, -58),
        ("D5+", False): (31, 69),
        ("D5+", True): (49, -60),
        ("l3+", False): (31, 68),
        ("D6+", False): (208, 1089),
        ("D1−(1)", False): (27, 55),
        ("D1−(2)", False): (27, 55),
        ("D1−(3)", False): (31, 66),
        ("D2−", False): (31, 69),
        ("l1−", False): (31, 68),
        ("D3−", False): (208, 1089),
    }

    # a = b = 0
    AB_ZERO = (9, -1)

    @classmethod
    def get_row(cls, region: RegionLabel) -> Optional[Tuple[int, int]]:
        if region.ab_zero and region.has_annuli:
            return cls.AB_ZERO
        return cls.ROWS.get((region.tag, region.a_zero)) or cls.ROWS.get((region.tag, False))

    @classmethod
    def get_regions(cls) -> List[str]:
        return sorted({tag for tag, _ in cls.ROWS})


def region_ceiling(region: RegionLabel, n: int) -> int:
    """Zero-count ceiling of the region's row for perturbation degree n"""
    row = CeilingTable.get_row(region)
    if row is None:
        raise DomainError(f"no ceiling for region {region.tag}", region.to_dict())
    slope, intercept = row
    return slope * n + intercept


@dataclass(frozen=True)
class ZeroEntry:
    h: float
    width: float
    slope: int

    def to_dict(self):
        return {"h": self.h, "width": self.width, "slope": self.slope}


@dataclass
class ZeroReport:
    annulus_id: int
    zeros: List[ZeroEntry]
    grid_size: int
    window: Tuple[float, float]
    ceiling: Optional[int] = None
    ceiling_respected: Optional[bool] = None
    identically_zero: bool = False
    suspected_tangential: List[float] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    region: Optional[str] = None
    n: Optional[int] = None

    @property
    def count(self) -> int:
        return len(self.zeros)

    def to_dict(self):
        out = {
            "region": self.region,
            "n": self.n,
            "annulus": self.annulus_id,
            "window": list(self.window),
            "grid_size": self.grid_size,
            "zeros": [z.to_dict() for z in self.zeros],
            "count": self.count,
            "ceiling": self.ceiling,
            "respected": self.ceiling_respected,
        }
        if self.identically_zero:
            out["note"] = f"identically zero (below {config.IDENTICALLY_ZERO:g} everywhere)"
        if self.suspected_tangential:
            out["suspected_even_multiplicity"] = self.suspected_tangential
        if self.warnings:
            out["warnings"] = self.warnings
        return out


def scan_grid(annulus: PeriodAnnulus, grid_size: int, h_max: float = config.H_MAX_DEFAULT,
              window: Optional[Tuple[float, float]] = None) -> np.ndarray:
    """Endpoint-clustered grid strictly inside the annulus (or a sub-window of it)"""
    lo, hi = window if window is not None else annulus.bounds(h_max)
    lo, hi = max(lo, annulus.bounds(h_max)[0]), min(hi, annulus.bounds(h_max)[1])
    if not hi > lo:
        raise DomainError("empty scan window", {"lo": lo, "hi": hi, "annulus": annulus.id})
    margin = config.BOUNDARY_MARGIN * (hi - lo)
    return tanh_grid(lo + margin, hi - margin, grid_size)


def zero_scan(params: HamiltonianParams, pert: PerturbationPoly, annulus: PeriodAnnulus,
              grid_size: int = config.ZERO_GRID_DEFAULT, h_max_override: Optional[float] = None,
              window: Optional[Tuple[float, float]] = None, grid: Optional[np.ndarray] = None,
              n_min: int = config.N_MIN_DEFAULT, with_ceiling: bool = True) -> ZeroReport:
    """
    Transversal zeros of I(h) on one annulus

    I(h) is sampled on a grid clustered toward both ends, every sign change
    is refined with brentq to ZERO_XTOL, and |I| dips without a sign change
    are reported as suspected even-multiplicity zeros.
    """
    if grid_size < config.ZERO_GRID_MIN:
        raise DomainError(f"grid_size must be at least {config.ZERO_GRID_MIN}", {"grid_size": grid_size})
    h_max = h_max_override if h_max_override is not None else config.H_MAX_DEFAULT
    hs = np.asarray(grid) if grid is not None else scan_grid(annulus, grid_size, h_max, window)
    values = np.empty(len(hs))
    warnings: List[str] = []
    for k, h in enumerate(hs):
        res = melnikov_quadrature(params, pert, annulus, float(h), n_min)
        if res.flagged:
            values[k] = np.nan
            warnings.append(f"h={h:.12g}: quadrature estimate {res.error:.3g}, sample excluded")
        else:
            values[k] = res.value

    report = ZeroReport(annulus_id=annulus.id, zeros=[], grid_size=len(hs),
                        window=(float(hs[0]), float(hs[-1])), warnings=warnings, n=pert.n)
    finite = values[np.isfinite(values)]
    scale = float(np.abs(finite).max()) if finite.size else 0.0
    if scale < config.IDENTICALLY_ZERO:
        report.identically_zero = True
    else:
        def evaluate(level: float) -> float:
            return melnikov_eval(params, pert, annulus, level, n_min)

        for lo, hi in sign_change_brackets(hs, values):
            root = refine_root(evaluate, float(hs[lo]), float(hs[hi]),
                               float(values[lo]), float(values[hi]), config.ZERO_XTOL)
            slope = 1 if values[hi] > values[lo] else -1
            report.zeros.append(ZeroEntry(h=root, width=float(hs[hi] - hs[lo]), slope=slope))
        report.suspected_tangential = [float(hs[i]) for i in tangential_dips(values, scale)]

    if with_ceiling:
        region = classify_region(params)
        report.region = region.tag
        try:
            report.ceiling = region_ceiling(region, pert.n)
            report.ceiling_respected = report.count <= report.ceiling
        except DomainError:
            pass
    return report


def melnikov_curve(params: HamiltonianParams, pert: PerturbationPoly, annulus: PeriodAnnulus,
                   grid_size: int = config.ZERO_GRID_DEFAULT,
                   h_max: float = config.H_MAX_DEFAULT) -> List[Tuple[float, float, float]]:
    """(h, I(h), quadrature estimate) rows for plotting"""
    rows = []
    for h in scan_grid(annulus, grid_size, h_max):
        res = melnikov_quadrature(params, pert, annulus, float(h))
        rows.append((float(h), res.value, res.error))
    return rows


def random_perturbation(n: int, rng: np.random.Generator) -> PerturbationPoly:
    """Coefficients uniform in [-1, 1] on every monomial of degree ≤ n"""
    keys = [(i, d - i) for d in range(n + 1) for i in range(d + 1)]
    a = {k: float(v) for k, v in zip(keys, rng.uniform(-1.0, 1.0, len(keys)))}
    b = {k: float(v) for k, v in zip(keys, rng.uniform(-1.0, 1.0, len(keys)))}
    return PerturbationPoly(n=n, a=a, b=b)


@dataclass
class SweepReport:
    region: str
    n: int
    count: int
    ceiling: int
    max_zeros: int
    violations: List[Dict[str, object]] = field(default_factory=list)

    @property
    def respected(self) -> bool:
        return not self.violations

    def to_dict(self):
        return {"region": self.region, "n": self.n, "count": self.count, "ceiling": self.ceiling,
                "max_zeros": self.max_zeros, "respected": self.respected,
                "violations": self.violations}


def ceiling_sweep(params: HamiltonianParams, n: int, count: int = config.CEILING_SWEEP_COUNT,
                  seed: int = config.CEILING_SWEEP_SEED,
                  grid_size: int = config.ZERO_GRID_MIN) -> SweepReport:
    """
    Random perturbations checked against the region ceiling

    Generators are evaluated once per annulus grid; each perturbation is then
    evaluated through its decomposition, and sign changes are counted.
    """
    region = classify_region(params)
    ceiling = region_ceiling(region, n)
    rng = np.random.default_rng(seed)
    tables = []
    for ann in annuli(params):
        hs = scan_grid(ann, grid_size)
        tables.append((ann, [generator_vector(params, ann, float(h)) for h in hs]))

    report = SweepReport(region=region.tag, n=n, count=count, ceiling=ceiling, max_zeros=0)
    for trial in range(count):
        pert = random_perturbation(n, rng)
        decomposition = decompose_melnikov(params, pert)
        for ann, vectors in tables:
            values = [evaluate_decomposition(decomposition, gv) for gv in vectors]
            zeros = len(sign_change_brackets([gv.h for gv in vectors], values))
            report.max_zeros = max(report.max_zeros, zeros)
            if zeros > ceiling:
                report.violations.append({"trial": trial, "annulus": ann.id, "zeros": zeros})
    return report
