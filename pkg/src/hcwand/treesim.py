"""Finite-depth boundary-law recursion on a Cayley tree with truncated spins.

Spins are restricted to ``-M..M``; neighbours outside that window contribute
zero.  The truncation error enters at the edge spins and moves inward by one
spin per level, so after ``n`` levels only ``|i| <= M - 1 - n`` is exact.
Convergence metrics are computed on that shrinking window.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .model import ActivityProfile, PeriodicBoundaryLaw

DEFAULT_TRUNCATE = 50
DEFAULT_CLIP = 1e200
CONVERGED = 1e-8
BOUNDARIES = ("constant", "exact", "perturbed", "spike")


class DivergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class TruncatedLaw:
    """Values at spins ``-M..M`` (index ``i + M``), spin-0 entry equal to 1."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or len(v) % 2 == 0:
            raise ValueError("truncated law needs 2M+1 entries")
        if not np.all(v > 0):
            raise ValueError("truncated law must be strictly positive")
        object.__setattr__(self, "values", v)

    @property
    def M(self) -> int:
        return (len(self.values) - 1) // 2

    def at(self, spin: int) -> float:
        return float(self.values[spin + self.M])

    def window(self, radius: int) -> np.ndarray:
        M = self.M
        return self.values[M - radius : M + radius + 1]

    @classmethod
    def from_periodic(cls, law: PeriodicBoundaryLaw, M: int) -> "TruncatedLaw":
        return cls(law.extend(-M, M))


def _activity_array(activities: ActivityProfile, M: int) -> np.ndarray:
    return np.array([activities[s] for s in range(-M, M + 1)])


def _update(children: Sequence[np.ndarray], act: np.ndarray, odd: np.ndarray, M: int) -> np.ndarray:
    out = act.copy()
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        for v in children:
            z = np.concatenate(([0.0], v, [0.0]))
            num = z[:-2] + z[2:] + np.where(odd, z[1:-1], 0.0)
            den = v[M - 1] + v[M + 1]
            assert den > 0
            out *= num / den
        return out / out[M]


def step(children: Sequence[TruncatedLaw], k: int, activities: ActivityProfile, M: int) -> TruncatedLaw:
    """Parent law from its ``k`` children, renormalised at spin 0."""
    if len(children) != k:
        raise ValueError(f"expected {k} child laws, got {len(children)}")
    if M < 3:
        raise ValueError("truncation M must be >= 3")
    if any(child.M != M for child in children):
        raise ValueError("child truncation differs from M")
    odd = np.arange(-M, M + 1) % 2 == 1
    return TruncatedLaw(_update([c.values for c in children], _activity_array(activities, M), odd, M))


@dataclass
class RecursionRun:
    k: int
    depth: int
    M: int
    activities: ActivityProfile
    boundary: str
    laws: list[TruncatedLaw] = field(default_factory=list)
    metrics: list[float] = field(default_factory=list)
    target: PeriodicBoundaryLaw | None = None
    clipped: bool = False
    edge_clips: int = 0

    @property
    def root(self) -> TruncatedLaw:
        return self.laws[-1]

    @property
    def converged(self) -> bool:
        return bool(self.metrics) and self.metrics[-1] < CONVERGED

    def radius(self, level: int) -> int:
        """Exact window half-width after ``level`` steps."""
        return max(0, self.M - 1 - level) if level else self.M - 2

    def level_pair(self) -> tuple[np.ndarray, np.ndarray]:
        """Last two levels on the last common exact window (root first)."""
        r = self.radius(len(self.laws) - 1)
        return self.laws[-1].window(r), self.laws[-2].window(r)


def boundary_law(
    kind: str,
    M: int,
    target: PeriodicBoundaryLaw | None = None,
    seed: int = 0,
    noise: float = 0.05,
    spike_spin: int = 1,
    spike: float = 10.0,
) -> TruncatedLaw:
    """Leaf laws: ``constant`` (all ones), ``exact`` (the target), ``perturbed``
    (target with seeded multiplicative noise per residue class, so it stays
    periodic) and ``spike`` (all ones, one spin scaled)."""
    spins = np.arange(-M, M + 1)
    if kind == "constant":
        return TruncatedLaw(np.ones(2 * M + 1))
    if kind == "spike":
        v = np.ones(2 * M + 1)
        v[spike_spin + M] *= spike
        return TruncatedLaw(v / v[M])
    if target is None:
        raise ValueError(f"boundary {kind!r} needs a target periodic law")
    base = target.extend(-M, M)
    if kind == "exact":
        return TruncatedLaw(base)
    if kind == "perturbed":
        rng = np.random.default_rng(seed)
        factors = np.exp(noise * rng.standard_normal(target.period))
        factors[0] = 1.0
        return TruncatedLaw(base * factors[spins % target.period])
    raise ValueError(f"unknown boundary {kind!r}; expected one of {BOUNDARIES}")


def deviation(law: TruncatedLaw, target: PeriodicBoundaryLaw, radius: int) -> float:
    spins = np.arange(-radius, radius + 1)
    ref = np.array([target[s] for s in spins])
    return float(np.max(np.abs(law.window(radius) - ref) / ref))


def run(
    k: int,
    depth: int,
    M: int,
    activities: ActivityProfile,
    boundary: str = "constant",
    target: PeriodicBoundaryLaw | None = None,
    seed: int = 0,
    clip: float = DEFAULT_CLIP,
    strict: bool = False,
) -> RecursionRun:
    """Iterate the recursion from the leaves (level 0) up ``depth`` levels.

    Every vertex on a level sees identical children, so one law per level
    suffices.  Metrics are deviations from ``target`` on the exact window.
    Entries outside ``[1/clip, clip]`` are clipped.  Clipping inside the exact
    window sets ``clipped`` (``strict`` raises); clipping outside it only
    counts ``edge_clips``, since those spins never reach the window again.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if M <= depth + 2:
        raise ValueError(f"truncation M={M} leaves no exact window after {depth} levels")
    leaves = boundary_law(boundary, M, target, seed)
    rec = RecursionRun(k, depth, M, activities, boundary, [leaves], target=target)
    if target is not None:
        rec.metrics.append(deviation(leaves, target, rec.radius(0)))
    act = _activity_array(activities, M)
    odd = np.arange(-M, M + 1) % 2 == 1
    law = leaves
    for level in range(1, depth + 1):
        v = _update([law.values] * k, act, odd, M)
        bad = ~np.isfinite(v) | (v > clip) | (v < 1.0 / clip)
        if bad.any():
            r = rec.radius(level)
            if bad[M - r : M + r + 1].any():
                rec.clipped = True
                if strict:
                    raise DivergenceError(f"recursion left [1/{clip:g}, {clip:g}] at level {level}")
            else:
                # truncation artefact outside the exact window
                rec.edge_clips += 1
            v = np.clip(np.nan_to_num(v, nan=clip, posinf=clip), 1.0 / clip, clip)
        law = TruncatedLaw(v)
        rec.laws.append(law)
        if target is not None:
            rec.metrics.append(deviation(law, target, rec.radius(level)))
    return rec
