"""Translation-invariant periodic boundary laws (q = 2 and q = 4)."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .model import (
    TI,
    ActivityProfile,
    PeriodicBoundaryLaw,
    SolutionSet,
    build_reduced_system,
)
from .solvers import Bracket, DecreasingMap, map_fixed_point, solve_bracketed_root

T_START = 1.0 + 1e-8


@dataclass(frozen=True)
class LambdaCurvePoint:
    t: float
    lam: float
    a: float
    c: float


@dataclass(frozen=True)
class TiQ4Solution:
    a: float
    c: float
    kind: str  # "diagonal" | "offdiagonal"
    t: float = 1.0

    def swapped(self) -> "TiQ4Solution":
        return TiQ4Solution(self.c, self.a, self.kind, 1.0 / self.t)


def _check(k: int, lam: float, lam2: float | None = None):
    if k < 2:
        raise ValueError("tree order k must be >= 2")
    if not lam > 0:
        raise ValueError("activity lambda must be positive")
    if lam2 is not None and not lam2 > 0:
        raise ValueError("even activity must be positive")


def ti_q2_map(k: int, lam: float) -> DecreasingMap:
    return DecreasingMap(k, lam, 2.0)


def ti_q4_map(k: int, lam: float, lam2: float) -> DecreasingMap:
    return DecreasingMap(k, lam, 1.0 + lam2)


def solve_ti_q2(k: int, lam: float) -> float:
    """Unique positive root of ``2^k a^{k+1} - lam (a+2)^k``."""
    _check(k, lam)
    return map_fixed_point(ti_q2_map(k, lam)).x0


def lambda_cr1(k: int, lam2: float) -> float:
    """``2^k (lam2 + 1) / ((k-1) k^k)``, the bottom of the lambda(t) curve."""
    _check(k, 1.0, lam2)
    return float(Fraction(2**k, (k - 1) * k**k) * (Fraction(lam2) + 1))


def solve_ti_q4_diagonal(k: int, lam: float, lam2: float) -> float:
    """Unique positive fixed point of ``x -> lam ((1 + lam2 + x) / (2x))^k``."""
    _check(k, lam, lam2)
    return map_fixed_point(ti_q4_map(k, lam, lam2)).x0


def _sums(t: float, k: int) -> tuple[float, float]:
    # plain summation keeps t -> 1 regular
    powers = [t**i for i in range(k)]
    tail = sum(powers[1:])  # t + .. + t^{k-1}
    full = 1.0 + tail  # 1 + t + .. + t^{k-1}
    return tail, full


def lambda_of_t(t: float, k: int, lam2: float) -> float:
    if not t > 0:
        raise ValueError("t must be positive")
    tail, full = _sums(t, k)
    return (lam2 + 1.0) * (t**k + 1.0) ** k / (tail * full**k)


def curve_point(t: float, k: int, lam2: float) -> LambdaCurvePoint:
    tail, _ = _sums(t, k)
    c = (lam2 + 1.0) / tail
    return LambdaCurvePoint(t=t, lam=lambda_of_t(t, k, lam2), a=t**k * c, c=c)


def invert_lambda_curve(lam: float, k: int, lam2: float) -> float | None:
    """The ``t > 1`` with ``lambda(t) = lam``; ``None`` when ``lam <= lambda_cr1``."""
    _check(k, lam, lam2)
    if lam <= lambda_cr1(k, lam2):
        return None

    def gap(t):
        return lambda_of_t(t, k, lam2) - lam

    lo, hi = T_START, 2.0
    if gap(lo) >= 0:
        # numerically indistinguishable from the bottom of the curve
        return None
    while gap(hi) <= 0:
        lo, hi = hi, 2.0 * hi
    return solve_bracketed_root(gap, Bracket(lo, hi), tol=0.0)


def ti_q4_residual(k: int, lam: float, lam2: float, a: float, c: float) -> float:
    system = build_reduced_system(k, 4, ActivityProfile.q4(lam, lam2), TI)
    return float(np.max(np.abs(system.residual([a, lam2, c]))))


def transverse_eigenvalue(k: int, lam2: float, x0: float) -> float:
    """Eigenvalue of the q=4 TI map along ``(1, -1)`` at the diagonal ``(x0, x0)``.

    Off-diagonal solutions branch off where it crosses 1.
    """
    return k * x0 / (1.0 + lam2 + x0)


def ti_q4_solutions(k: int, lam: float, lam2: float) -> list[TiQ4Solution]:
    a_star = solve_ti_q4_diagonal(k, lam, lam2)
    out = [TiQ4Solution(a_star, a_star, "diagonal")]
    t = invert_lambda_curve(lam, k, lam2)
    if t is not None:
        p = curve_point(t, k, lam2)
        off = TiQ4Solution(p.a, p.c, "offdiagonal", t)
        out += [off, off.swapped()]
    return out


def enumerate_ti_q2(k: int, lam: float) -> SolutionSet:
    a = solve_ti_q2(k, lam)
    system = build_reduced_system(k, 2, ActivityProfile.q2(lam), TI)
    res = float(np.max(np.abs(system.residual([a]))))
    return SolutionSet(
        mode="ti-q2",
        k=k,
        lam=lam,
        param=None,
        solutions=((a,),),
        residuals=(res,),
        lambda_cr=None,
        central_derivative=ti_q2_map(k, lam).derivative_at_fixed_point(a),
    )


def enumerate_ti_q4(k: int, lam: float, lam2: float) -> SolutionSet:
    sols = ti_q4_solutions(k, lam, lam2)
    return SolutionSet(
        mode="ti-q4",
        k=k,
        lam=lam,
        param=lam2,
        solutions=tuple((s.a, s.c) for s in sols),
        residuals=tuple(ti_q4_residual(k, lam, lam2, s.a, s.c) for s in sols),
        lambda_cr=lambda_cr1(k, lam2),
        central_derivative=transverse_eigenvalue(k, lam2, sols[0].a),
    )


def assemble_ti_vector(solution, q: int, lam2: float | None = None) -> PeriodicBoundaryLaw:
    """Period descriptor ``(1, a)`` (q=2) or ``(1, a, lam2, c)`` (q=4)."""
    if isinstance(solution, TiQ4Solution):
        solution = (solution.a, solution.c)
    if np.ndim(solution) == 0:
        solution = (float(solution),)
    solution = tuple(float(v) for v in solution)
    if q == 2:
        if len(solution) != 1:
            raise ValueError("q=2 takes a single value a")
        return PeriodicBoundaryLaw((1.0, solution[0]))
    if q == 4:
        if lam2 is None:
            raise ValueError("q=4 needs the even activity lam2")
        a, c = solution if len(solution) == 2 else (solution[0], solution[0])
        return PeriodicBoundaryLaw((1.0, a, lam2, c))
    raise ValueError(f"only q in (2, 4) are assembled, got {q}")
