"""Parameter scans, empirical thresholds and lambda(t) curve tables.

Every point mode reports a derivative diagnostic at its central fixed point:

* ``ti-q2``, ``bip-q2``, ``bip-q4-I3``, ``bip-q4-I4``: slope ``m'(x0)`` of the
  scalar map; the 2-cycle exists iff ``m'(x0) < -1``.
* ``ti-q4``: eigenvalue of the q=4 TI map along the antisymmetric direction
  at the diagonal solution; off-diagonal solutions exist iff it exceeds 1.

The empirical threshold is found by bisection in lambda on that smooth
indicator rather than on the (discontinuous) solution count.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import bipartite, ti
from .model import SolutionSet
from .solvers import map_fixed_point

MODES = ("ti-q2", "ti-q4", "bip-q2", "bip-q4-I3", "bip-q4-I4")
PARAM_MODES = {"ti-q4": "lambda2", "bip-q4-I3": "gamma", "bip-q4-I4": "gamma"}
LAMBDA_RTOL = 1e-14


def _need_param(mode: str, param: float | None):
    if mode in PARAM_MODES and param is None:
        raise ValueError(f"mode {mode} needs --{PARAM_MODES[mode]}")


def solve_point(mode: str, k: int, lam: float, param: float | None = None) -> SolutionSet:
    """Solution set of ``mode`` at one parameter point."""
    _need_param(mode, param)
    if mode == "ti-q2":
        return ti.enumerate_ti_q2(k, lam)
    if mode == "ti-q4":
        return ti.enumerate_ti_q4(k, lam, param)
    if mode == "bip-q2":
        return bipartite.solve_bip_q2(k, lam)
    if mode == "bip-q4-I4":
        return bipartite.solve_bip_q4_I4(k, lam, param)
    if mode == "bip-q4-I3":
        sol = bipartite.solve_bip_q4_I3(k, lam, param)
        a = sol.values[0]
        return SolutionSet(
            mode=mode,
            k=k,
            lam=lam,
            param=param,
            solutions=((a, a),),
            residuals=(sol.residual,),
            lambda_cr=None,
            central_derivative=bipartite.g_map(k, lam, param).derivative_at_fixed_point(a),
        )
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


def closed_form_critical(mode: str, k: int, param: float | None = None) -> float | None:
    _need_param(mode, param)
    if mode == "ti-q4":
        return ti.lambda_cr1(k, param)
    if mode == "bip-q2":
        return bipartite.lambda_cr2(k)
    if mode == "bip-q4-I4":
        return bipartite.lambda_cr3(k, param)
    return None


def indicator(mode: str, k: int, lam: float, param: float | None = None) -> float:
    """Smooth function of lambda that vanishes at the bifurcation."""
    _need_param(mode, param)
    if mode == "ti-q4":
        x0 = ti.solve_ti_q4_diagonal(k, lam, param)
        return ti.transverse_eigenvalue(k, param, x0) - 1.0
    if mode in ("ti-q2", "bip-q2"):
        m = bipartite.f_map(k, lam)
    elif mode in ("bip-q4-I3", "bip-q4-I4"):
        m = bipartite.g_map(k, lam, param)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return map_fixed_point(m).derivative_at_x0 + 1.0


@dataclass(frozen=True)
class ScanRow:
    lam: float
    count: int
    a_star: float
    a1: float | None
    a2: float | None
    deriv_at_x0: float

    def as_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return {key: d[key] for key in CSV_FIELDS}


CSV_FIELDS = ("lambda", "count", "a_star", "a1", "a2", "deriv_at_x0")


def row_from_solutions(sols: SolutionSet) -> ScanRow:
    a_star = sols.solutions[0][0]
    a1 = a2 = None
    if sols.count == 3:
        a1, a2 = sols.solutions[1]
    return ScanRow(sols.lam, sols.count, a_star, a1, a2, sols.central_derivative)


@dataclass(frozen=True)
class Critical:
    closed_form: float | None
    empirical: float | None
    rel_err: float | None

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ScanResult:
    mode: str
    k: int
    param: float | None
    rows: tuple[ScanRow, ...]
    critical: Critical


def worker_count() -> int:
    raw = os.environ.get("HCWAND_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def refine_critical(mode: str, k: int, param: float | None, lo: float, hi: float) -> float:
    """Zero of :func:`indicator` between two lambdas where it changes sign."""
    fn: Callable[[float], float] = lambda lam: indicator(mode, k, lam, param)  # noqa: E731
    flo, fhi = fn(lo), fn(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(f"indicator keeps its sign on [{lo}, {hi}]")
    while hi - lo > LAMBDA_RTOL * hi:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = fn(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def scan(
    mode: str,
    k: int,
    lam_min: float,
    lam_max: float,
    steps: int,
    param: float | None = None,
    threads: int | None = None,
) -> ScanResult:
    """Rows on ``linspace(lam_min, lam_max, steps)`` plus the refined threshold."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if steps < 2:
        raise ValueError("a scan needs at least 2 steps")
    if not 0 < lam_min < lam_max:
        raise ValueError(f"empty or degenerate lambda range [{lam_min}, {lam_max}]")
    _need_param(mode, param)
    grid = np.linspace(lam_min, lam_max, steps)
    threads = worker_count() if threads is None else max(1, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        sols = list(pool.map(lambda lam: solve_point(mode, k, float(lam), param), grid))
    rows = tuple(row_from_solutions(s) for s in sols)

    closed = closed_form_critical(mode, k, param)
    empirical = None
    if closed is not None:
        ind = [indicator(mode, k, float(lam), param) for lam in grid]
        for j in range(steps - 1):
            if ind[j] == 0:
                empirical = float(grid[j])
                break
            if (ind[j] > 0) != (ind[j + 1] > 0):
                empirical = refine_critical(mode, k, param, float(grid[j]), float(grid[j + 1]))
                break
    rel = None if empirical is None else abs(empirical - closed) / closed
    return ScanResult(mode, k, param, rows, Critical(closed, empirical, rel))


# -- lambda(t) curve -------------------------------------------------------


@dataclass(frozen=True)
class CurveResult:
    k: int
    lam2: float
    points: tuple[ti.LambdaCurvePoint, ...]
    t_min: float
    lam_min: float
    lam_min_closed: float


def t_grid(t_max: float, steps: int) -> np.ndarray:
    """Log grid on ``[1/t_max, t_max]`` symmetric under ``t -> 1/t``, containing 1."""
    if not t_max > 1:
        raise ValueError("t_max must exceed 1")
    if steps < 3:
        raise ValueError("curve needs at least 3 points")
    half = steps // 2
    u = np.linspace(0.0, math.log(t_max), half + 1)[1:]
    upper = np.exp(u)
    return np.concatenate((1.0 / upper[::-1], [1.0], upper))


def lambda_curve(k: int, lam2: float, t_max: float = 10.0, steps: int = 401) -> CurveResult:
    """Rows ``(t, lambda(t), a(t), c(t))`` and the located minimum."""
    pts = tuple(ti.curve_point(float(t), k, lam2) for t in t_grid(t_max, steps))
    j = min(range(len(pts)), key=lambda i: pts[i].lam)
    return CurveResult(k, lam2, pts, pts[j].t, pts[j].lam, ti.lambda_cr1(k, lam2))
