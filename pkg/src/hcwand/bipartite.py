"""Two-level (bipartite) periodic boundary laws.

For q=2 the two levels carry ``(1, a)`` and ``(1, c)`` and the system is
``a = f(c), c = f(a)``.  For q=4 the levels are ``(1, a, gamma, b)`` and
``(1, c, gamma, d)``; the four-dimensional map ``W`` has the invariant
subspaces

    I1: a = b = c = d     I2: a = c, b = d
    I3: a = d, b = c      I4: a = b, c = d

Solutions are enumerated on I3 (always the diagonal) and I4 (diagonal plus a
2-cycle of ``g`` below the threshold).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .model import (
    BIPARTITE,
    ActivityProfile,
    BipartitePair,
    PeriodicBoundaryLaw,
    SolutionSet,
    build_reduced_system,
)
from .solvers import (
    Bracket,
    DecreasingMap,
    TwoCycle,
    find_two_cycle,
    map_fixed_point,
    solve_bracketed_root,
)
from .ti import enumerate_ti_q4

INVARIANT_SETS = ("I1", "I2", "I3", "I4")
COUPLING_TOL = 1e-9


def _check(k: int, lam: float, gamma: float | None = None):
    if k < 2:
        raise ValueError("tree order k must be >= 2")
    if not lam > 0:
        raise ValueError("activity lambda must be positive")
    if gamma is not None and not gamma > 0:
        raise ValueError("gamma must be positive")


def lambda_cr2_exact(k: int) -> Fraction:
    return Fraction(2 ** (k + 1) * (k - 1) ** (k + 1), k**k)


def lambda_cr3_exact(k: int, gamma) -> Fraction:
    return Fraction(2**k * (k - 1) ** (k + 1), k**k) * (Fraction(gamma) + 1)


def lambda_cr2(k: int) -> float:
    if k < 2:
        raise ValueError("tree order k must be >= 2")
    return float(lambda_cr2_exact(k))


def lambda_cr3(k: int, gamma: float) -> float:
    _check(k, 1.0, gamma)
    return float(lambda_cr3_exact(k, gamma))


def f_map(k: int, lam: float) -> DecreasingMap:
    return DecreasingMap(k, lam, 2.0)


def g_map(k: int, lam: float, gamma: float) -> DecreasingMap:
    return DecreasingMap(k, lam, 1.0 + gamma)


def _pair_solutions(m: DecreasingMap) -> tuple[float, TwoCycle | None, float]:
    fp = map_fixed_point(m)
    cycle = find_two_cycle(m, fp.x0, m.invariant_bracket())
    return fp.x0, cycle, fp.derivative_at_x0


def _pairs(x0: float, cycle: TwoCycle | None) -> tuple[tuple[float, float], ...]:
    out = [(x0, x0)]
    if cycle is not None:
        out += [(cycle.x1, cycle.x2), (cycle.x2, cycle.x1)]
    return tuple(out)


def bip_q2_residual(k: int, lam: float, a: float, c: float) -> float:
    system = build_reduced_system(k, 2, ActivityProfile.q2(lam), BIPARTITE)
    return float(np.max(np.abs(system.residual([a, c]))))


def bip_q4_residual(k: int, lam: float, gamma: float, a: float, b: float, c: float, d: float) -> float:
    system = build_reduced_system(k, 4, ActivityProfile.q4(lam, gamma), BIPARTITE)
    return float(np.max(np.abs(system.residual([a, gamma, b, c, gamma, d]))))


def solve_bip_q2(k: int, lam: float) -> SolutionSet:
    """Solutions of ``a = f(c), c = f(a)`` with ``f(x) = lam ((2+x)/(2x))^k``."""
    _check(k, lam)
    x0, cycle, slope = _pair_solutions(f_map(k, lam))
    pairs = _pairs(x0, cycle)
    return SolutionSet(
        mode="bip-q2",
        k=k,
        lam=lam,
        param=None,
        solutions=pairs,
        residuals=tuple(bip_q2_residual(k, lam, a, c) for a, c in pairs),
        lambda_cr=lambda_cr2(k),
        central_derivative=slope,
    )


def solve_bip_q4_I4(k: int, lam: float, gamma: float) -> SolutionSet:
    """Solutions on ``a = b, c = d``: ``a = g(c), c = g(a)``."""
    _check(k, lam, gamma)
    x0, cycle, slope = _pair_solutions(g_map(k, lam, gamma))
    pairs = _pairs(x0, cycle)
    return SolutionSet(
        mode="bip-q4-I4",
        k=k,
        lam=lam,
        param=gamma,
        solutions=pairs,
        residuals=tuple(bip_q4_residual(k, lam, gamma, a, a, c, c) for a, c in pairs),
        lambda_cr=lambda_cr3(k, gamma),
        central_derivative=slope,
    )


# -- q = 4 on the invariant sets ------------------------------------------


def w_map(x: Sequence[float], k: int, lam: float, gamma: float) -> np.ndarray:
    """One application of ``W``; its fixed points solve the q=4 two-level system."""
    a, b, c, d = x
    s = 1.0 + gamma
    return np.array(
        [
            lam * ((s + c) / (c + d)) ** k,
            lam * ((s + d) / (c + d)) ** k,
            lam * ((s + a) / (a + b)) ** k,
            lam * ((s + b) / (a + b)) ** k,
        ]
    )


def w_residual(x: Sequence[float], k: int, lam: float, gamma: float) -> np.ndarray:
    return np.asarray(x, dtype=float) - w_map(x, k, lam, gamma)


def memberships(x: Sequence[float], rtol: float = 1e-12) -> frozenset[str]:
    a, b, c, d = x

    def eq(u, v):
        return math.isclose(u, v, rel_tol=rtol, abs_tol=0.0)

    out = set()
    if eq(a, b) and eq(b, c) and eq(c, d):
        out.add("I1")
    if eq(a, c) and eq(b, d):
        out.add("I2")
    if eq(a, d) and eq(b, c):
        out.add("I3")
    if eq(a, b) and eq(c, d):
        out.add("I4")
    return frozenset(out)


def project(x: Sequence[float], which: str) -> np.ndarray:
    """Closest point of an invariant set (coordinate averages)."""
    a, b, c, d = (float(v) for v in x)
    if which == "I1":
        m = (a + b + c + d) / 4
        return np.array([m, m, m, m])
    if which == "I2":
        return np.array([(a + c) / 2, (b + d) / 2, (a + c) / 2, (b + d) / 2])
    if which == "I3":
        return np.array([(a + d) / 2, (b + c) / 2, (b + c) / 2, (a + d) / 2])
    if which == "I4":
        return np.array([(a + b) / 2, (a + b) / 2, (c + d) / 2, (c + d) / 2])
    raise ValueError(f"unknown invariant set {which!r}")


def coupling_consistent(x: Sequence[float], rtol: float = COUPLING_TOL) -> bool:
    """``a=b <=> c=d``, ``a=c => b=d`` and ``b=d => a=c`` (to ``rtol``)."""
    a, b, c, d = x

    def eq(u, v):
        return math.isclose(u, v, rel_tol=rtol)

    return (eq(a, b) == eq(c, d)) and (not eq(a, c) or eq(b, d)) and (not eq(b, d) or eq(a, c))


@dataclass(frozen=True)
class BipartiteSolution:
    values: tuple[float, float, float, float]
    sets: frozenset[str]
    regime: str  # "unique" | "triple-member"
    residual: float

    def pair(self, gamma: float) -> BipartitePair:
        a, b, c, d = self.values
        return BipartitePair(
            PeriodicBoundaryLaw((1.0, a, gamma, b)),
            PeriodicBoundaryLaw((1.0, c, gamma, d)),
        )


def _bip_solution(x, k, lam, gamma, regime) -> BipartiteSolution:
    x = tuple(float(v) for v in x)
    if not coupling_consistent(x):
        raise AssertionError(f"solution {x} breaks the a=b <=> c=d structure")
    return BipartiteSolution(
        values=x,
        sets=memberships(x),
        regime=regime,
        residual=bip_q4_residual(k, lam, gamma, *x),
    )


def solve_bip_q4_I3(k: int, lam: float, gamma: float) -> BipartiteSolution:
    """The only solution on ``a = d, b = c``: all four coordinates equal.

    On I3 the difference of the two equations factors as ``(a - b)`` times a
    positive quantity, so ``a = b`` and the common value is the fixed point
    of ``g``.
    """
    _check(k, lam, gamma)
    a = map_fixed_point(g_map(k, lam, gamma)).x0
    return _bip_solution((a, a, a, a), k, lam, gamma, "unique")


def solve_bip_q4_I2(k: int, lam: float, gamma: float) -> list[BipartiteSolution]:
    """Solutions on ``a = c, b = d``: both levels equal, i.e. the TI q=4 laws."""
    ti = enumerate_ti_q4(k, lam, gamma)
    regime = "unique" if ti.count == 1 else "triple-member"
    return [_bip_solution((a, c, a, c), k, lam, gamma, regime) for a, c in ti.solutions]


def enumerate_bip_q4(k: int, lam: float, gamma: float) -> list[BipartiteSolution]:
    """Union of the I3 solution and the I4 solutions (deduplicated)."""
    out = [solve_bip_q4_I3(k, lam, gamma)]
    i4 = solve_bip_q4_I4(k, lam, gamma)
    regime = "unique" if i4.count == 1 else "triple-member"
    if regime == "triple-member":
        out[0] = BipartiteSolution(out[0].values, out[0].sets, regime, out[0].residual)
    for a, c in i4.solutions[1:]:
        out.append(_bip_solution((a, a, c, c), k, lam, gamma, regime))
    return out


def multistart_search(
    k: int,
    lam: float,
    gamma: float,
    starts: int = 64,
    seed: int = 0,
    tol: float = 1e-10,
) -> list[tuple[float, float, float, float]]:
    """Exploratory local search for the full q=4 two-level system.

    Non-exhaustive: random log-uniform starts polished by a least-squares
    solver in log coordinates.  Distinct converged points are returned.
    """
    from scipy.optimize import least_squares

    rng = np.random.default_rng(seed)
    m = DecreasingMap(k, lam, 1.0 + gamma)
    lo, hi = m.invariant_bracket().lo, m.invariant_bracket().hi
    found: list[np.ndarray] = []
    for _ in range(starts):
        u0 = rng.uniform(math.log(lo), math.log(hi), size=4)
        sol = least_squares(
            lambda u: u - np.log(w_map(np.exp(u), k, lam, gamma)),
            u0,
            xtol=1e-15,
            ftol=1e-15,
            gtol=1e-15,
        )
        x = np.exp(sol.x)
        if np.max(np.abs(w_residual(x, k, lam, gamma)) / x) > tol:
            continue
        if not any(np.allclose(x, y, rtol=1e-7) for y in found):
            found.append(x)
    return [tuple(float(v) for v in x) for x in found]


# -- S-shape certificate -----------------------------------------------------


@dataclass(frozen=True)
class SShapeCertificate:
    family: str
    k: int
    lam: float
    gamma: float | None
    increasing: bool
    h_at_zero: float
    h_at_zero_closed: float
    h_limit: float
    h_limit_closed: float
    aux_decreasing: bool
    aux_sign_changes: int
    left_endpoint: tuple[float, float]
    right_endpoint: tuple[float, float]
    inflection: float | None
    note: str = ""

    @property
    def valid(self) -> bool:
        return (
            self.increasing
            and self.h_at_zero > 0
            and math.isfinite(self.h_limit)
            and self.aux_decreasing
            and self.aux_sign_changes == 1
            and self.left_endpoint[1] > 0
            and self.right_endpoint[1] < 0
            and self.inflection is not None
        )


def aux_delta(x: float, k: int, lam: float) -> float:
    """Sign of ``(f o f)''`` for the q=2 map: decreasing, one zero."""
    return 0.5 * lam * ((2.0 + x) / (2.0 * x)) ** k * (k - x - 1.0) + k * k - x - 1.0


def aux_r(x: float, k: int, lam: float, gamma: float) -> float:
    """Sign of ``(g o g)''`` for the q=4 map: decreasing, one zero."""
    s = 1.0 + gamma
    g = lam * ((s + x) / (2.0 * x)) ** k
    return g * ((k - 1) * s - 2.0 * x) + ((k * k - 1) * s - 2.0 * x) * s


def composite_derivative(m: DecreasingMap, x: float) -> float:
    return m.derivative(m(x)) * m.derivative(x)


def s_shape_certificate(
    family: str,
    k: int,
    lam: float,
    gamma: float | None = None,
    grid: np.ndarray | None = None,
) -> SShapeCertificate:
    """Numerical S-shape check of ``h = m o m`` for ``family`` in ``{"f", "g"}``.

    Checks on a log grid that ``h`` increases, its limits at 0 and infinity,
    and that the auxiliary function carrying the sign of ``h''`` decreases
    with exactly one sign change (which is then bisected).  A grid without a
    sign change is reported through ``inflection=None``.
    """
    if family == "f":
        m = f_map(k, lam)
        aux = lambda x: aux_delta(x, k, lam)  # noqa: E731
        left_x, right_x = 1.0, float(k * k)
        limit_closed = lam * ((2.0 ** (k + 1) + lam) / (2.0 * lam)) ** k
    elif family == "g":
        if gamma is None:
            raise ValueError("family 'g' needs gamma")
        m = g_map(k, lam, gamma)
        aux = lambda x: aux_r(x, k, lam, gamma)  # noqa: E731
        left_x, right_x = 0.5, (k * k - 1) * (gamma + 1.0) / 2.0
        limit_closed = lam * ((2.0**k * (1.0 + gamma) + lam) / (2.0 * lam)) ** k
    else:
        raise ValueError(f"S-shape certificate covers 'f' and 'g', not {family!r}")
    _check(k, lam, gamma)
    if grid is None:
        grid = np.logspace(-6, 6, 2401)
    grid = np.asarray(grid, dtype=float)

    h = np.array([m(m(x)) for x in grid])
    dh = np.array([composite_derivative(m, x) for x in grid])
    # sampled values may tie at rounding level on the flat ends
    increasing = bool(np.all(dh > 0) and np.all(np.diff(h) >= -4 * np.finfo(float).eps * h[1:]))
    av = np.array([aux(x) for x in grid])
    finite = np.isfinite(av)
    aux_dec = bool(np.all(np.diff(av[finite]) < 0))
    signs = np.sign(av[finite])
    changes = int(np.count_nonzero(signs[1:] != signs[:-1]))

    inflection = None
    note = ""
    if changes >= 1:
        xs = grid[finite]
        j = int(np.nonzero(signs[1:] != signs[:-1])[0][0])
        inflection = solve_bracketed_root(aux, Bracket(xs[j], xs[j + 1]), tol=0.0)
    else:
        note = "no sign change of the auxiliary function on the grid; refine or widen it"

    return SShapeCertificate(
        family=family,
        k=k,
        lam=lam,
        gamma=gamma,
        increasing=increasing,
        h_at_zero=float(h[0]),
        h_at_zero_closed=m.infimum,
        h_limit=float(h[-1]),
        h_limit_closed=limit_closed,
        aux_decreasing=aux_dec,
        aux_sign_changes=changes,
        left_endpoint=(left_x, aux(left_x)),
        right_endpoint=(right_x, aux(right_x)),
        inflection=inflection,
        note=note,
    )
