"""Periodic boundary laws of the hard-core model with a wand-shaped admissibility graph on Cayley trees."""
from __future__ import annotations

from .model import (
    ActivityProfile,
    BipartitePair,
    NoOddPeriodError,
    OddPeriodCertificate,
    PeriodicBoundaryLaw,
    SolutionSet,
    build_reduced_system,
    neighbors,
)

__all__ = [
    "ActivityProfile",
    "BipartitePair",
    "NoOddPeriodError",
    "OddPeriodCertificate",
    "PeriodicBoundaryLaw",
    "SolutionSet",
    "build_reduced_system",
    "neighbors",
]
__version__ = "0.1.0"
