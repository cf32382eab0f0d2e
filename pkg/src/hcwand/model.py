"""Wand compatibility graph, activity profiles and q-periodic reduced systems.

Spins live on the integers.  An odd spin is compatible with itself and its
two even neighbours; an even spin only with its two odd neighbours.  The
boundary-law recursion for translation-invariant laws reads

    z_s = lam_s * ( sum_{t ~ s} z_t / (z_{-1} + z_1) )**k

and the alternating (bipartite) version couples a law ``z`` on one level of
the tree to a law ``zt`` on the other.  Periodic laws are stored by one
period ``z_0 .. z_{q-1}`` with ``z_0 = 1``; reduced systems keep only the
unknowns ``z_1 .. z_{q-1}`` (per level).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

TI = "ti"
BIPARTITE = "bipartite"


def neighbors(spin: int) -> frozenset[int]:
    """Spins adjacent to ``spin`` in the wand graph (odd spins carry a loop)."""
    spin = int(spin)
    if spin % 2:
        return frozenset((spin - 1, spin, spin + 1))
    return frozenset((spin - 1, spin + 1))


def _check_positive(values: Sequence[float], what: str) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if not out:
        raise ValueError(f"{what} must have at least one entry")
    if not all(np.isfinite(v) and v > 0 for v in out):
        raise ValueError(f"{what} entries must be finite and strictly positive: {out}")
    if out[0] != 1.0:
        raise ValueError(f"{what} is normalised at spin 0, got {out[0]}")
    return out


@dataclass(frozen=True)
class ActivityProfile:
    """q-periodic activities ``lam_0 .. lam_{q-1}`` with ``lam_0 = 1``."""

    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", _check_positive(self.values, "activity profile"))

    @property
    def period(self) -> int:
        return len(self.values)

    def __getitem__(self, spin: int) -> float:
        return self.values[spin % self.period]

    @classmethod
    def q2(cls, lam: float) -> "ActivityProfile":
        return cls((1.0, lam))

    @classmethod
    def q4(cls, lam: float, lam2: float, lam3: float | None = None) -> "ActivityProfile":
        return cls((1.0, lam, lam2, lam if lam3 is None else lam3))


@dataclass(frozen=True)
class PeriodicBoundaryLaw:
    """One period ``z_0 .. z_{q-1}`` of a periodic boundary law (``z_0 = 1``)."""

    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", _check_positive(self.values, "boundary law"))

    @property
    def period(self) -> int:
        return len(self.values)

    def __getitem__(self, spin: int) -> float:
        return self.values[spin % self.period]

    @property
    def normalisable(self) -> bool:
        # a positive periodic sequence never has a finite sum over Z
        return False

    def extend(self, lo: int, hi: int) -> np.ndarray:
        """Values at spins ``lo..hi`` inclusive."""
        return np.array([self[s] for s in range(lo, hi + 1)])


@dataclass(frozen=True)
class BipartitePair:
    """Laws on the two alternating levels of the tree (same period)."""

    even: PeriodicBoundaryLaw
    odd: PeriodicBoundaryLaw

    def __post_init__(self):
        if self.even.period != self.odd.period:
            raise ValueError("both levels must share the period")

    @property
    def period(self) -> int:
        return self.even.period

    @property
    def normalisable(self) -> bool:
        return False

    def swapped(self) -> "BipartitePair":
        return BipartitePair(self.odd, self.even)


@dataclass(frozen=True)
class OddPeriodCertificate:
    """Why a q-periodic solution with odd q cannot exist.

    For every ``i`` the odd-spin equation at ``2i+1`` and the even-spin
    equation at ``2i+1+q`` share the activity and the left-hand side, which
    forces ``z_{2i} + z_{2i+1} + z_{2i+2} = z_{2i+q} + z_{2i+q+2}``.  Folding
    indices mod q cancels everything except ``z_{2i+1}``.
    """

    k: int
    q: int
    identities: tuple[tuple[tuple[int, ...], tuple[int, ...], int], ...]
    forced_zero: frozenset[int]

    def describe(self) -> str:
        lines = [f"q={self.q} is odd: no positive q-periodic boundary law (k={self.k})"]
        for lhs, rhs, spin in self.identities:
            lhs_s = " + ".join(f"z[{s}]" for s in lhs)
            rhs_s = " + ".join(f"z[{s}]" for s in rhs)
            lines.append(f"  {lhs_s} = {rhs_s}  =>  z[{spin}] = 0 (class {spin % self.q})")
        return "\n".join(lines)


class NoOddPeriodError(ValueError):
    """Raised for odd periods; carries the infeasibility certificate."""

    code = "no-odd-period"

    def __init__(self, certificate: OddPeriodCertificate):
        self.certificate = certificate
        super().__init__(f"{self.code}: {certificate.describe()}")


def odd_period_witness(k: int, q: int, activities: ActivityProfile | None = None) -> OddPeriodCertificate:
    """Build the linear identities that force a zero odd coordinate for odd ``q``."""
    if q < 1:
        raise ValueError("period must be positive")
    if q % 2 == 0:
        raise ValueError(f"q={q} is even; the odd-period obstruction does not apply")
    if activities is not None and activities.period != q:
        raise ValueError(f"activity period {activities.period} != q={q}")
    identities = []
    forced = set()
    for i in range(q):
        lhs = (2 * i, 2 * i + 1, 2 * i + 2)
        rhs = (2 * i + q, 2 * i + q + 2)
        # after folding, lhs minus rhs leaves exactly the odd spin 2i+1
        left = sorted(s % q for s in lhs)
        for s in rhs:
            left.remove(s % q)
        assert left == [(2 * i + 1) % q]
        identities.append((lhs, rhs, 2 * i + 1))
        forced.add((2 * i + 1) % q)
    return OddPeriodCertificate(k=k, q=q, identities=tuple(identities), forced_zero=frozenset(forced))


def ti_recursion_rhs(z: Callable[[int], float], spin: int, k: int, lam: Callable[[int], float]) -> float:
    """Right-hand side of the translation-invariant recursion at ``spin``.

    ``z`` and ``lam`` are arbitrary functions on the integers, so this is the
    unreduced equation, independent of any periodic folding.
    """
    num = sum(z(t) for t in neighbors(spin))
    den = z(-1) + z(1)
    return lam(spin) * (num / den) ** k


def alternating_recursion_rhs(other: Callable[[int], float], spin: int, k: int, lam: Callable[[int], float]) -> float:
    """Alternating recursion: the law at ``spin`` on one level from the other level."""
    return ti_recursion_rhs(other, spin, k, lam)


@dataclass(frozen=True)
class ReducedSystem:
    """Residual-evaluable q-periodic system with ``z_0 = 1`` eliminated.

    Unknown layout: ``(z_1, .., z_{q-1})`` for TI systems and
    ``(z_1, .., z_{q-1}, zt_1, .., zt_{q-1})`` for bipartite ones.
    """

    kind: str
    k: int
    activities: ActivityProfile
    _folds: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in (TI, BIPARTITE):
            raise ValueError(f"unknown system kind {self.kind!r}")
        if self.k < 2:
            raise ValueError("tree order k must be >= 2")
        q = self.q
        # per spin s: folded neighbour indices (with multiplicity)
        folds = tuple(tuple(t % q for t in sorted(neighbors(s))) for s in range(q))
        object.__setattr__(self, "_folds", folds)

    @property
    def q(self) -> int:
        return self.activities.period

    @property
    def n_unknowns(self) -> int:
        return (self.q - 1) * (2 if self.kind == BIPARTITE else 1)

    def laws(self, z: Sequence[float]) -> tuple[np.ndarray, ...]:
        """Full periods (with the leading 1) for the unknown vector ``z``."""
        z = np.asarray(z, dtype=float)
        if z.shape != (self.n_unknowns,):
            raise ValueError(f"expected {self.n_unknowns} unknowns, got shape {z.shape}")
        if not np.all(z > 0):
            raise ValueError("boundary-law entries must be strictly positive")
        m = self.q - 1
        out = [np.concatenate(([1.0], z[:m]))]
        if self.kind == BIPARTITE:
            out.append(np.concatenate(([1.0], z[m:])))
        return tuple(out)

    def _rhs(self, src: np.ndarray) -> np.ndarray:
        q = self.q
        den = src[(-1) % q] + src[1 % q]
        lam = np.asarray(self.activities.values)
        ratios = np.array([sum(src[t] for t in self._folds[s]) for s in range(q)]) / den
        return lam * ratios**self.k

    def residual(self, z: Sequence[float]) -> np.ndarray:
        """``z_s - RHS_s`` for every unknown coordinate."""
        periods = self.laws(z)
        if self.kind == TI:
            (p,) = periods
            return (p - self._rhs(p))[1:]
        p, pt = periods
        return np.concatenate(((p - self._rhs(pt))[1:], (pt - self._rhs(p))[1:]))


def build_reduced_system(k: int, q: int, activities: ActivityProfile, kind: str = TI) -> ReducedSystem:
    """Reduced system for q-periodic laws; odd ``q`` raises :class:`NoOddPeriodError`."""
    if k < 2:
        raise ValueError("tree order k must be >= 2")
    if q < 1:
        raise ValueError("period must be positive")
    if q % 2:
        raise NoOddPeriodError(odd_period_witness(k, q))
    if activities.period != q:
        raise ValueError(f"activity period {activities.period} != q={q}")
    return ReducedSystem(kind=kind, k=k, activities=activities)


def residual(system: ReducedSystem, z: Sequence[float]) -> np.ndarray:
    return system.residual(z)


def implied_activities(k: int, law: PeriodicBoundaryLaw) -> ActivityProfile:
    """The unique activity profile for which ``law`` solves the TI recursion.

    Each equation is linear in its own activity, so a law determines the
    activities that make it a solution.
    """
    q = law.period
    vals = [law[s] / (ti_recursion_rhs(law.__getitem__, s, k, lambda _s: 1.0)) for s in range(q)]
    return ActivityProfile(tuple(vals))


@dataclass(frozen=True)
class SolutionSet:
    """Solutions of one reduced problem at a parameter point.

    ``solutions`` holds tuples in the mode's own coordinates: ``(a,)`` for
    q=2 TI, ``(a, c)`` for q=4 TI and the two-level problems.  ``indicator``
    is the derivative diagnostic at the central fixed point (see
    :mod:`hcwand.scan`).
    """

    mode: str
    k: int
    lam: float
    param: float | None
    solutions: tuple[tuple[float, ...], ...]
    residuals: tuple[float, ...]
    lambda_cr: float | None
    central_derivative: float

    @property
    def count(self) -> int:
        return len(self.solutions)

    @property
    def regime(self) -> str:
        return "unique" if self.count == 1 else "triple"

    @property
    def max_residual(self) -> float:
        return max(self.residuals)
