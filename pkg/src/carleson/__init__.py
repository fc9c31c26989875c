"""Numerical diagnostics for Carleson measures on circular and multiply connected domains."""
from __future__ import annotations

from .boxes import BoxReport, box_ratio_circular, box_ratio_disk, box_ratio_disk_oracle, box_ratio_hull, trend_analysis
from .conformal import (
    Composition,
    PresentedDomain,
    QuadPoly,
    compose,
    hull_riemann_maps,
    invert,
    push_to_presented,
    pushforward_measure,
    univalence_audit,
)
from .errors import (
    AtomInNoComponent,
    AtomOutsideDomain,
    CarlesonError,
    EvaluationPointOnBoundary,
    EvaluationPointOutsideDomain,
    InvalidDomain,
    InvalidWeights,
    NoConvergence,
    PoleHit,
    PoleTooCloseToBoundary,
    SpecError,
    TooManyAtoms,
)
from .geometry import (
    CarlesonSquare,
    Circle,
    CircularDomain,
    MobiusMap,
    admissible_depth,
    boundary_maps,
    mobius_compose,
    mobius_from_points,
    mobius_inverse,
    square_arclength,
)
from .harmonic import Arc, HarmonicEstimate, harmonic_measure_disk, harmonic_measure_mc, mutually_singular_check
from .measures import AtomicMeasure, atomize_area, pushforward, restrict, scale, total_mass
from .norms import ConstantEstimate, estimate_constant, lq_norm_boundary, lq_norm_measure, test_family
from .opensets import OpenSetDomain, component_constants, with_weights, weighted_criterion
from .trends import Trend, fit_trend

__version__ = "0.1.0"

__all__ = [
    "Arc",
    "AtomInNoComponent",
    "AtomOutsideDomain",
    "AtomicMeasure",
    "BoxReport",
    "CarlesonError",
    "CarlesonSquare",
    "Circle",
    "CircularDomain",
    "Composition",
    "ConstantEstimate",
    "EvaluationPointOnBoundary",
    "EvaluationPointOutsideDomain",
    "HarmonicEstimate",
    "InvalidDomain",
    "InvalidWeights",
    "MobiusMap",
    "NoConvergence",
    "OpenSetDomain",
    "PoleHit",
    "PoleTooCloseToBoundary",
    "PresentedDomain",
    "QuadPoly",
    "SpecError",
    "TooManyAtoms",
    "Trend",
    "admissible_depth",
    "atomize_area",
    "boundary_maps",
    "box_ratio_circular",
    "box_ratio_disk",
    "box_ratio_disk_oracle",
    "box_ratio_hull",
    "component_constants",
    "compose",
    "estimate_constant",
    "fit_trend",
    "harmonic_measure_disk",
    "harmonic_measure_mc",
    "hull_riemann_maps",
    "invert",
    "lq_norm_boundary",
    "lq_norm_measure",
    "mobius_compose",
    "mobius_from_points",
    "mobius_inverse",
    "mutually_singular_check",
    "push_to_presented",
    "pushforward",
    "pushforward_measure",
    "with_weights",
    "restrict",
    "scale",
    "square_arclength",
    "test_family",
    "total_mass",
    "trend_analysis",
    "univalence_audit",
    "weighted_criterion",
]
