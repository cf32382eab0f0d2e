"""Scalar root finding, fixed points of decreasing maps and their 2-cycles.

Bisection is the backbone; Newton steps are only taken when they land
strictly inside the current bracket.  All maps of interest share the form

    m(x) = lam * ((s + x) / (2 x))**k

with ``s = 2`` for the q=2 maps and ``s = 1 + lam2`` (or ``1 + gamma``) for
the q=4 ones, so they are represented by one class.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

ROOT_TOL = 1e-12
XTOL_REL = 1e-14
MAX_BISECT = 200
MAX_NEWTON = 50
TANGENT_TOL = 1e-9
CYCLE_OFFSET = 1e-6


class BracketError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BracketError(f"bracket needs lo < hi, got ({self.lo}, {self.hi})")

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class FixedPointResult:
    x0: float
    derivative_at_x0: float
    residual: float


@dataclass(frozen=True)
class TwoCycle:
    x1: float
    x2: float

    def __post_init__(self):
        if not 0 < self.x1 < self.x2:
            raise ValueError(f"2-cycle needs 0 < x1 < x2, got ({self.x1}, {self.x2})")

    @property
    def amplitude(self) -> float:
        return self.x2 - self.x1


@dataclass(frozen=True)
class DecreasingMap:
    """``x -> lam * ((shift + x) / (2 x))**k`` on ``x > 0``."""

    k: int
    lam: float
    shift: float = 2.0

    def __call__(self, x: float) -> float:
        return self.lam * ((self.shift + x) / (2.0 * x)) ** self.k

    def derivative(self, x: float) -> float:
        # m'(x) = -k * s * m(x) / (x (s + x))
        return -self.k * self.shift * self(x) / (x * (self.shift + x))

    def derivative_at_fixed_point(self, x0: float) -> float:
        return -self.k * self.shift / (self.shift + x0)

    @property
    def infimum(self) -> float:
        """Limit at infinity, ``lam / 2**k``."""
        return self.lam / 2.0**self.k

    def invariant_bracket(self) -> Bracket:
        """``[alpha, beta]`` with ``alpha = m(inf)`` and ``beta = m(alpha)``; mapped into itself."""
        alpha = self.infimum
        return Bracket(alpha, self(alpha))


FAMILIES = ("f", "g", "ti_q2", "ti_q4")


def make_map(family: str, k: int, lam: float, param: float | None = None) -> DecreasingMap:
    """Map for a family id.

    ``f`` and ``ti_q2`` are ``lam((2+x)/(2x))^k``; ``g`` (param = gamma) and
    ``ti_q4`` (param = lam2) are ``lam((1+param+x)/(2x))^k``.
    """
    if family in ("f", "ti_q2"):
        return DecreasingMap(k, lam, 2.0)
    if family in ("g", "ti_q4"):
        if param is None:
            raise ValueError(f"family {family!r} needs its even activity")
        return DecreasingMap(k, lam, 1.0 + param)
    raise ValueError(f"unknown map family {family!r}; expected one of {FAMILIES}")


def derivative_at(family: str, params: dict, x: float) -> float:
    """Closed-form derivative of a family map at ``x > 0``."""
    if not x > 0:
        raise ValueError("x must be positive")
    param = params.get("gamma", params.get("lam2"))
    return make_map(family, params["k"], params["lam"], param).derivative(x)


def _mid(lo: float, hi: float) -> float:
    if lo > 0 and hi > 4.0 * lo:
        return math.sqrt(lo * hi)
    return 0.5 * (lo + hi)


def solve_bracketed_root(
    fn: Callable[[float], float],
    bracket: Bracket,
    tol: float = ROOT_TOL,
    dfn: Callable[[float], float] | None = None,
) -> float:
    """Root of ``fn`` inside a sign-change bracket.

    Stops once ``|fn(x)| <= tol`` or the bracket has shrunk to
    ``XTOL_REL * |x|`` (whichever comes first).  Wide positive brackets are
    split geometrically.  ``dfn`` enables safeguarded Newton steps.
    """
    lo, hi = bracket.lo, bracket.hi
    flo, fhi = fn(lo), fn(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if math.copysign(1, flo) == math.copysign(1, fhi):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f = ({flo}, {fhi})")
    rising = fhi > 0

    x = _mid(lo, hi)
    newton_left = MAX_NEWTON if dfn is not None else 0
    for _ in range(MAX_BISECT + MAX_NEWTON):
        fx = fn(x)
        if fx == 0 or abs(fx) <= tol:
            return x
        if (fx > 0) == rising:
            hi = x
        else:
            lo = x
        if hi - lo <= XTOL_REL * max(abs(lo), abs(hi)) or hi - lo <= 5e-324:
            return x
        nxt = None
        if newton_left:
            newton_left -= 1
            d = dfn(x)
            if d != 0 and math.isfinite(d):
                cand = x - fx / d
                if lo < cand < hi:
                    nxt = cand
        if nxt is None:
            nxt = _mid(lo, hi)
            if nxt in (lo, hi):
                return x
        x = nxt
    raise ConvergenceError(f"root not converged on [{bracket.lo}, {bracket.hi}]")


def solve_decreasing_fixed_point(
    fn: Callable[[float], float],
    bracket: Bracket,
    tol: float = ROOT_TOL,
    derivative: Callable[[float], float] | None = None,
) -> FixedPointResult:
    """Unique fixed point of a strictly decreasing map on ``bracket``.

    ``derivative`` defaults to ``fn.derivative`` when present; without one
    the reported slope is NaN (no differencing).
    """
    if derivative is None:
        derivative = getattr(fn, "derivative", None)
    if not fn(bracket.lo) > bracket.lo:
        raise BracketError(f"need map(lo) > lo at lo={bracket.lo}")
    if not fn(bracket.hi) < bracket.hi:
        raise BracketError(f"need map(hi) < hi at hi={bracket.hi}")
    dfn = None if derivative is None else (lambda x: 1.0 - derivative(x))
    x0 = solve_bracketed_root(lambda x: x - fn(x), bracket, tol, dfn)
    slope = derivative(x0) if derivative is not None else math.nan
    return FixedPointResult(x0=x0, derivative_at_x0=slope, residual=abs(fn(x0) - x0))


def map_fixed_point(m: DecreasingMap, tol: float = ROOT_TOL) -> FixedPointResult:
    """Fixed point of a :class:`DecreasingMap` on its invariant bracket."""
    br = m.invariant_bracket()
    res = solve_decreasing_fixed_point(m, br, tol)
    # the closed form at the fixed point avoids re-evaluating the power
    return FixedPointResult(res.x0, m.derivative_at_fixed_point(res.x0), res.residual)


def is_tangent(slope: float) -> bool:
    return abs(slope + 1.0) < TANGENT_TOL


def _polish_cycle(fn, dfn, x1: float, x2: float) -> tuple[float, float]:
    def worst(a, b):
        return max(abs(a - fn(b)), abs(b - fn(a)))

    best = (x1, x2)
    err = worst(x1, x2)
    a, b = x1, x2
    for _ in range(8):
        r1, r2 = a - fn(b), b - fn(a)
        da, db = dfn(a), dfn(b)
        det = 1.0 - da * db
        if det == 0:
            break
        # J = [[1, -m'(b)], [-m'(a), 1]]
        step_a = (r1 + db * r2) / det
        step_b = (r2 + da * r1) / det
        a, b = a - step_a, b - step_b
        if not (a > 0 and b > 0):
            break
        e = worst(a, b)
        if e < err:
            best, err = (a, b), e
        else:
            break
    return best


def find_two_cycle(
    fn: Callable[[float], float],
    x0: float,
    bracket: Bracket,
    tol: float = ROOT_TOL,
    derivative: Callable[[float], float] | None = None,
) -> TwoCycle | None:
    """2-cycle around the repelling fixed point ``x0`` of a decreasing map.

    Returns ``None`` when ``fn'(x0) >= -1`` or within ``TANGENT_TOL`` of -1.
    Otherwise the outermost fixed points of ``fn o fn`` are located on
    ``(lo, x0 - delta)`` and ``(x0 + delta, hi)``.
    """
    if derivative is None:
        derivative = getattr(fn, "derivative", None)
    if derivative is None:
        raise ValueError("an analytic derivative is required")
    if not bracket.lo < x0 < bracket.hi:
        raise BracketError(f"fixed point {x0} outside [{bracket.lo}, {bracket.hi}]")
    slope = derivative(x0)
    if slope >= -1.0 or is_tangent(slope):
        return None

    def h(x):
        return fn(fn(x)) - x

    delta = CYCLE_OFFSET * x0
    while True:
        left, right = x0 - delta, x0 + delta
        if left <= bracket.lo or right >= bracket.hi:
            raise ConvergenceError("no 2-cycle sign change before the bracket edge")
        if h(bracket.lo) > 0 > h(left) and h(right) > 0 > h(bracket.hi):
            break
        delta *= 10.0
    x1 = solve_bracketed_root(h, Bracket(bracket.lo, left), tol)
    x2 = solve_bracketed_root(h, Bracket(right, bracket.hi), tol)
    x1, x2 = _polish_cycle(fn, derivative, x1, x2)
    return TwoCycle(x1, x2)
