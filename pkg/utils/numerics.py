"""Grids, sign-change scans and bracket refinement"""

import math
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy import optimize

import config


def _tanh_strength(edge_share: float, edge_width: float) -> float:
    """Stretch factor putting edge_share of the points in the outer edge_width band"""
    half = 1.0 - edge_width

    def excess(beta: float) -> float:
        return 1.0 - math.atanh(half * math.tanh(beta)) / beta - edge_share

    return optimize.brentq(excess, 1e-3, 200.0)


def tanh_grid(lo: float, hi: float, n: int,
              edge_share: float = config.TANH_EDGE_SHARE,
              edge_width: float = config.TANH_EDGE_WIDTH) -> np.ndarray:
    """
    Interior grid on (lo, hi) clustered symmetrically toward both endpoints

    Args:
        lo, hi: finite interval endpoints
        n: number of points
        edge_share: fraction of points that land in the outer edge band
        edge_width: total width of the edge band as a fraction of hi - lo

    Returns:
        Strictly increasing array of n points, endpoints excluded
    """
    if not (hi > lo) or n < 2:
        raise ValueError("tanh_grid needs hi > lo and n >= 2")
    beta = _tanh_strength(edge_share, edge_width)
    u = (np.arange(n) + 0.5) / n
    s = 0.5 * (1.0 + np.tanh(beta * (2.0 * u - 1.0)) / math.tanh(beta))
    return lo + (hi - lo) * s


def window_grid(boundary: float, side: int, lo: float, hi: float, n: int) -> np.ndarray:
    """
    Geometric grid of levels boundary + side * t for t in [lo, hi]

    side = -1 approaches the boundary from below, +1 from above. Points are
    returned in increasing h.
    """
    t = np.geomspace(lo, hi, n)
    h = boundary + side * t
    return np.sort(h)


def sign_change_brackets(xs: Sequence[float], ys: Sequence[float]) -> List[Tuple[int, int]]:
    """Index pairs (i, i+1) where ys changes sign strictly; NaNs break brackets"""
    brackets = []
    ys = np.asarray(ys, dtype=float)
    for i in range(len(ys) - 1):
        a, b = ys[i], ys[i + 1]
        if not (np.isfinite(a) and np.isfinite(b)):
            continue
        if a * b < 0.0:
            brackets.append((i, i + 1))
    return brackets


def tangential_dips(ys: Sequence[float], scale: float, threshold: float = config.TANGENT_DIP) -> List[int]:
    """Indices of local |y| minima below threshold*scale that carry no sign change"""
    ys = np.asarray(ys, dtype=float)
    dips = []
    for i in range(1, len(ys) - 1):
        if not np.isfinite(ys[i - 1:i + 2]).all():
            continue
        if abs(ys[i]) > threshold * scale:
            continue
        if abs(ys[i]) <= abs(ys[i - 1]) and abs(ys[i]) <= abs(ys[i + 1]) \
                and ys[i - 1] * ys[i + 1] > 0.0:
            dips.append(i)
    return dips


def refine_root(f: Callable[[float], float], lo: float, hi: float,
                f_lo: float, f_hi: float, xtol: float = config.ZERO_XTOL) -> float:
    """Bracketed root refinement; falls back to plain bisection if brentq stalls"""
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    try:
        return optimize.brentq(f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
    except (ValueError, RuntimeError):
        a, b, fa = lo, hi, f_lo
        while b - a > xtol:
            mid = 0.5 * (a + b)
            fm = f(mid)
            if fm == 0.0:
                return mid
            if (fm < 0.0) == (fa < 0.0):
                a, fa = mid, fm
            else:
                b = mid
        return 0.5 * (a + b)


def first_crossing(f: Callable[[np.ndarray], np.ndarray], t_max: float,
                   samples: int = config.RAY_SAMPLES, t_min: float = 1e-9) -> float:
    """
    Smallest t in (0, t_max] with f(t) = 0, found on a geometric sample grid

    f must accept arrays. Returns NaN when no sign change is sampled.
    """
    ts = np.geomspace(t_min, t_max, samples)
    vals = f(ts)
    signs = np.sign(vals)
    idx = np.nonzero(signs[:-1] * signs[1:] <= 0.0)[0]
    if idx.size == 0:
        return float("nan")
    i = int(idx[0])
    if vals[i] == 0.0:
        return float(ts[i])

    def scalar(t: float) -> float:
        return float(f(np.array([t]))[0])

    return optimize.brentq(scalar, ts[i], ts[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)


def finite_difference(f: Callable[[float], float], x: float, step: float) -> Tuple[float, float]:
    """
    Fourth-order centred derivative by Richardson extrapolation

    Returns:
        (derivative, error estimate) where the estimate is the gap between
        the step and half-step extrapolants
    """
    def central(s: float) -> float:
        return (f(x + s) - f(x - s)) / (2.0 * s)

    d1 = central(step)
    d2 = central(step / 2.0)
    rich = (4.0 * d2 - d1) / 3.0
    return rich, abs(rich - d2)
