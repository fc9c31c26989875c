"""Carleson box ratios.

For a measure mu on a circular domain G the box ratio is

    kappa(mu) = sup_S mu(S) / s(closure(S) & boundary(G))

over admissible Carleson squares S. Pushing mu forward by the boundary map
f_i turns the squares on component i into disk squares, and the arclength
of the trace is r_i times the disk depth, so kappa is the maximum over i of
kappa_disk(mu o f_i^{-1}, depth cap h_i*) / r_i.

Exactness on the disk. Fix the leftmost atom of a square (rotating the
anchor clockwise until it meets an atom never loses mass). Relative to that
anchor, atom j sits at angular offset d_j and needs depth 1 - r_j, so it lies
in every square of depth h > key_j = max(d_j, 1 - r_j) (or h >= key_j when
the radial constraint binds). The captured mass is a step function of h
with jumps at the keys, so mass(h)/h is maximised at a key. Scanning all
anchors and all keys is therefore exhaustive; with sorting it costs
O(n^2 log n). When the angular constraint binds, the half-open square
excludes its far edge and the supremum is approached as h decreases to the
key rather than attained; the witness records that limiting square.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .conformal import arclength_factor, hull_riemann_maps
from .errors import TooManyAtoms
from .geometry import (
    TWO_PI,
    CarlesonSquare,
    CircularDomain,
    admissible_depth,
    boundary_maps,
)
from .measures import AtomicMeasure, pushforward
from .trends import DEFAULT_SLOPE_THRESHOLD, Trend, fit_trend

ORACLE_MAX_ATOMS = 14


@dataclass(frozen=True)
class BoxReport:
    kappa: float
    witness: CarlesonSquare | None
    per_component: list[tuple[int, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        w = self.witness
        return {
            "kappa": self.kappa,
            "witness": None if w is None else {
                "boundary_index": w.boundary_index, "depth": w.depth, "anchor": w.anchor,
            },
            "per_component": [{"index": i, "kappa": k} for i, k in self.per_component],
        }


def _angles(points: np.ndarray) -> np.ndarray:
    return np.mod(np.angle(points), TWO_PI)


def disk_search(points: np.ndarray, weights: np.ndarray, max_depth: float = 1.0):
    """Return (sup ratio, depth, anchor) over disk squares of depth <= max_depth."""
    n = points.size
    if n == 0:
        return 0.0, None, None
    r = np.abs(points)
    theta = _angles(points)
    origin = r == 0
    # rows: anchors; columns: atoms
    d = np.mod(theta[None, :] - theta[:, None], TWO_PI)
    d[:, origin] = 0.0
    key = np.maximum(d, (1.0 - r)[None, :])
    order = np.argsort(key, axis=1, kind="stable")
    k_sorted = np.take_along_axis(key, order, axis=1)
    mass = np.cumsum(weights[order], axis=1)
    ratio = np.where(k_sorted <= max_depth, mass / k_sorted, -np.inf)
    flat = int(np.argmax(ratio))
    s, j = divmod(flat, n)
    best = ratio[s, j]
    if not np.isfinite(best):
        return 0.0, None, None
    return float(best), float(k_sorted[s, j]), float(theta[s])


def _circular_span(angles: Sequence[float]):
    """Shortest arc covering the given angles: (span, start angle)."""
    if len(angles) == 0:
        return 0.0, 0.0
    a = sorted(angles)
    gaps = [a[k + 1] - a[k] for k in range(len(a) - 1)] + [a[0] + TWO_PI - a[-1]]
    g = max(range(len(gaps)), key=gaps.__getitem__)
    start, end = a[(g + 1) % len(a)], a[g]
    # measured as a direct difference so rounding matches the anchored search
    return (end - start) % TWO_PI, start


def disk_oracle(points: np.ndarray, weights: np.ndarray, max_depth: float = 1.0):
    """Exhaustive search over atom subsets; each subset's tightest square decides its ratio."""
    n = points.size
    if n > ORACLE_MAX_ATOMS:
        raise TooManyAtoms(f"oracle limited to {ORACLE_MAX_ATOMS} atoms, got {n}")
    radii = np.abs(points).tolist()
    theta = _angles(points).tolist()
    best = (0.0, None, None)
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            rmin = min(radii[j] for j in subset)
            angles = [theta[j] for j in subset if radii[j] != 0]
            span, start = _circular_span(angles)
            h = max(1.0 - rmin, span)
            if h > max_depth:
                continue
            ratio = sum(float(weights[j]) for j in subset) / h
            if ratio > best[0]:
                best = (ratio, h, start)
    return best


def _disk_report(mu: AtomicMeasure, search) -> BoxReport:
    mu.check_in(CircularDomain.disk())
    kappa, h, t0 = search(mu.points, mu.weights, 1.0)
    witness = None if h is None else CarlesonSquare(0, h, t0)
    return BoxReport(kappa, witness, [(0, kappa)])


def box_ratio_disk(mu: AtomicMeasure) -> BoxReport:
    return _disk_report(mu, disk_search)


def box_ratio_disk_oracle(mu: AtomicMeasure) -> BoxReport:
    return _disk_report(mu, disk_oracle)


def box_ratio_circular(domain: CircularDomain, mu: AtomicMeasure) -> BoxReport:
    mu.check_in(domain)
    per = []
    best = (0.0, None)
    for i, (f, circle) in enumerate(zip(boundary_maps(domain), domain.circles)):
        nu = pushforward(mu, f)
        k, h, t0 = disk_search(nu.points, nu.weights, admissible_depth(domain, i))
        k_i = k / circle.radius
        per.append((i, k_i))
        if h is not None and k_i > best[0]:
            best = (k_i, CarlesonSquare(i, h, t0))
    return BoxReport(best[0], best[1], per)


def box_ratio_hull(domain: CircularDomain, mu: AtomicMeasure) -> BoxReport:
    """Box ratio through the hull Riemann maps instead of the boundary maps.

    Each hull map sends its hull onto the unit disk; trace arclength is
    recovered from the map's boundary derivative rather than read off the
    circle radius.
    """
    mu.check_in(domain)
    per = []
    best = (0.0, None)
    for i, (g, circle) in enumerate(zip(hull_riemann_maps(domain), domain.circles)):
        nu = pushforward(mu, g)
        k, h, t0 = disk_search(nu.points, nu.weights, admissible_depth(domain, i))
        k_i = k / arclength_factor(g, circle)
        per.append((i, k_i))
        if h is not None and k_i > best[0]:
            best = (k_i, CarlesonSquare(i, h, t0))
    return BoxReport(best[0], best[1], per)


def min_reaching_arclength(domain: CircularDomain, center: complex, radius: float) -> float:
    """Smallest boundary arclength of an admissible square that meets the disk |z - center| <= radius.

    A square on the outer circle reaching distance d from it has trace length
    at least d; on inner circle i the bound is r_i d / (r_i + d).
    """
    out = math.inf
    for i, c in enumerate(domain.circles):
        if i == 0:
            d = c.radius - abs(center - c.center) - radius
            length = d
        else:
            d = abs(center - c.center) - radius - c.radius
            length = c.radius * d / (c.radius + d)
        if d <= 0:
            raise ValueError("the disk must lie at positive distance from the boundary")
        out = min(out, length)
    return out


def trend_analysis(family: Sequence[AtomicMeasure], domain: CircularDomain | None = None,
                   index: Sequence[float] | None = None,
                   threshold: float = DEFAULT_SLOPE_THRESHOLD) -> Trend:
    """Box ratio of every family member plus a log2-slope summary."""
    if domain is None:
        kappas = [box_ratio_disk(mu).kappa for mu in family]
    else:
        kappas = [box_ratio_circular(domain, mu).kappa for mu in family]
    return fit_trend(kappas, index, threshold)
