"""Harmonic measure: Poisson integrals on the disk, walk-on-spheres on circular domains.

The walk-on-spheres estimator simulates Brownian exit positions: from the
current point it jumps to a uniform point on the largest circle centered
there that fits in G, and stops once it is within ``eps`` of the boundary.
The stopped walk is credited to the nearest boundary point (ties go to the
lower component index).

Walks are simulated in fixed-size chunks, each with its own child seed of
the master seed, so results do not depend on how chunks are scheduled
across threads (``CARLESON_THREADS``).
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate

from .conformal import PresentedDomain, as_presented
from .errors import EvaluationPointOnBoundary, EvaluationPointOutsideDomain
from .geometry import TWO_PI, CircularDomain

CHUNK = 8192
MAX_STEPS = 100_000


@dataclass(frozen=True)
class Arc:
    """Angle interval [start, end) on boundary circle ``component``."""

    component: int
    start: float
    end: float

    def __post_init__(self):
        if not self.end > self.start:
            raise ValueError("arc end must exceed its start")
        if self.end - self.start > TWO_PI + 1e-12:
            raise ValueError("arc longer than a full circle")

    @property
    def length(self) -> float:
        return min(self.end - self.start, TWO_PI)

    def contains_angle(self, t):
        return np.mod(np.asarray(t) - self.start, TWO_PI) < self.length if self.length < TWO_PI else np.ones(np.shape(t), bool)


def full_boundary(domain: CircularDomain) -> list[Arc]:
    return [Arc(i, 0.0, TWO_PI) for i in range(domain.connectivity)]


def uniform_partition(domain: CircularDomain, arcs_per_circle: int) -> list[Arc]:
    step = TWO_PI / arcs_per_circle
    return [Arc(i, k * step, (k + 1) * step) for i in range(domain.connectivity) for k in range(arcs_per_circle)]


def check_partition(arcs: Sequence[Arc], domain: CircularDomain) -> None:
    by_comp: dict[int, list[Arc]] = {}
    for a in arcs:
        if not 0 <= a.component < domain.connectivity:
            raise ValueError(f"arc refers to missing boundary component {a.component}")
        by_comp.setdefault(a.component, []).append(a)
    for comp_arcs in by_comp.values():
        spans = []
        for a in comp_arcs:
            s = a.start % TWO_PI
            spans.append((s, s + a.length))
            if s + a.length > TWO_PI:
                spans.append((s - TWO_PI, s + a.length - TWO_PI))
        spans.sort()
        for (s0, e0), (s1, _) in zip(spans, spans[1:]):
            if s1 < e0 - 1e-12:
                raise ValueError("partition arcs overlap")


@dataclass(frozen=True)
class HarmonicEstimate:
    probabilities: list[float]
    stderr: list[float]
    walks: int
    point: complex
    capped: int = 0
    eps: float = 0.0
    seed: int | None = None
    arcs: list[Arc] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "point": [self.point.real, self.point.imag],
            "walks": self.walks,
            "seed": self.seed,
            "eps": self.eps,
            "capped_walks": self.capped,
            "arcs": [{"component": a.component, "start": a.start, "end": a.end} for a in self.arcs],
            "probabilities": self.probabilities,
            "stderr": self.stderr,
        }


def poisson_kernel(z0: complex, t):
    """Density of harmonic measure for the unit disk at z0, against dt/(2 pi)."""
    t = np.asarray(t, dtype=float)
    return (1 - abs(z0) ** 2) / np.abs(np.exp(1j * t) - z0) ** 2


def harmonic_measure_disk(z0: complex, start: float, end: float) -> float:
    """Harmonic measure at z0 of the arc [start, end) of the unit circle."""
    z0 = complex(z0)
    if abs(z0) >= 1:
        raise EvaluationPointOnBoundary(f"|z0| = {abs(z0)} is not inside the unit disk")
    if end - start >= TWO_PI:
        return 1.0
    peak = start + (math.atan2(z0.imag, z0.real) - start) % TWO_PI
    points = [peak] if peak < end else None
    val, _ = integrate.quad(lambda t: float(poisson_kernel(z0, t)), start, end,
                            points=points, epsabs=1e-12, epsrel=1e-12, limit=500)
    return val / TWO_PI


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("CARLESON_THREADS", "1")))
    except ValueError:
        return 1


def _walk_chunk(domain: CircularDomain, z0: complex, n: int, seed_seq, eps: float, max_steps: int):
    rng = np.random.default_rng(seed_seq)
    pos = np.full(n, z0, dtype=complex)
    live = np.arange(n)
    for _ in range(max_steps):
        if live.size == 0:
            break
        d = domain.boundary_distance(pos[live])
        live = live[d >= eps]
        if live.size == 0:
            break
        d = d[d >= eps]
        pos[live] += d * np.exp(1j * TWO_PI * rng.random(live.size))
    stopped = np.ones(n, dtype=bool)
    stopped[live] = False
    # nearest boundary circle; argmin resolves ties toward the lower index
    gaps = np.stack([
        domain.outer.radius - np.abs(pos - domain.outer.center),
        *[np.abs(pos - c.center) - c.radius for c in domain.inner],
    ])
    comp = np.argmin(gaps, axis=0)
    centers = np.array([c.center for c in domain.circles])
    angle = np.mod(np.angle(pos - centers[comp]), TWO_PI)
    comp = np.where(stopped, comp, -1)
    return comp, angle


def walk_exits(domain: CircularDomain, z0: complex, n: int, seed: int, eps: float | None = None,
               max_steps: int = MAX_STEPS):
    """Exit component (-1 when capped) and exit angle for ``n`` seeded walks."""
    z0 = complex(z0)
    if not domain.contains(z0):
        raise EvaluationPointOutsideDomain(f"{z0} is not inside the domain")
    if eps is None:
        eps = 1e-3 * domain.outer.radius
    sizes = [CHUNK] * (n // CHUNK) + ([n % CHUNK] if n % CHUNK else [])
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(domain, z0, m, s, eps, max_steps) for m, s in zip(sizes, seqs)]
    workers = min(_threads(), len(jobs)) or 1
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda a: _walk_chunk(*a), jobs))
    else:
        parts = [_walk_chunk(*a) for a in jobs]
    if not parts:
        return np.zeros(0, int), np.zeros(0)
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def harmonic_measure_mc(domain: CircularDomain, z0: complex, arcs: Sequence[Arc], walks: int,
                        seed: int = 0, eps: float | None = None, max_steps: int = MAX_STEPS) -> HarmonicEstimate:
    if walks < 1:
        raise ValueError("need at least one walk")
    arcs = list(arcs)
    check_partition(arcs, domain)
    if eps is None:
        eps = 1e-3 * domain.outer.radius
    comp, angle = walk_exits(domain, z0, walks, seed, eps, max_steps)
    probs, errs = [], []
    for a in arcs:
        hits = int(np.sum((comp == a.component) & a.contains_angle(angle)))
        p = hits / walks
        probs.append(p)
        errs.append(math.sqrt(p * (1 - p) / walks))
    return HarmonicEstimate(probs, errs, walks, complex(z0), int(np.sum(comp < 0)), eps, seed, arcs)


def density_histogram(domain: CircularDomain, z0: complex, arcs_per_circle: int = 64,
                      walks: int = 100_000, seed: int = 0):
    """Piecewise-constant harmonic density per circle: (density, stderr) arrays.

    ``density[i, k]`` is the harmonic measure of arc k on circle i divided by
    the arc's arclength.
    """
    comp, angle = walk_exits(domain, z0, walks, seed)
    k = np.minimum((angle * arcs_per_circle / TWO_PI).astype(int), arcs_per_circle - 1)
    counts = np.zeros((domain.connectivity, arcs_per_circle))
    ok = comp >= 0
    np.add.at(counts, (comp[ok], k[ok]), 1)
    p = counts / walks
    se = np.sqrt(p * (1 - p) / walks)
    arc_len = np.array([c.radius * TWO_PI / arcs_per_circle for c in domain.circles])[:, None]
    return p / arc_len, se / arc_len


def component_harmonic(component, arcs: Sequence[Arc], walks: int = 100_000, seed: int = 0,
                       point: complex | None = None) -> list[float]:
    """Harmonic measure of base-circle arcs for one presented component.

    Arcs are given on the circles of the component's base domain; harmonic
    measure is conformally invariant, so the chart does not enter. Disk
    components are evaluated exactly, others by walk-on-spheres.
    """
    comp = as_presented(component)
    base = comp.base
    z = base.default_evaluation_point() if point is None else complex(point)
    if not base.inner:
        c = base.outer
        u = (z - c.center) / c.radius
        return [harmonic_measure_disk(u, a.start, a.end) for a in arcs]
    return harmonic_measure_mc(base, z, arcs, walks, seed).probabilities


def open_set_harmonic(openset, requests: Sequence[tuple[int, Sequence[Arc]]], walks: int = 100_000,
                      seed: int = 0) -> list[list[float]]:
    """Composite measure weight_n * omega_n(arc) for arcs on component n (0-based)."""
    out = []
    for n, arcs in requests:
        w = openset.weights[n]
        out.append([w * v for v in component_harmonic(openset.components[n], arcs, walks, seed)])
    return out


@dataclass(frozen=True)
class SingularityCertificate:
    verdict: str  # "singular" or "indeterminate"
    min_gap: float
    touching_pairs: list[tuple[int, int]]

    @property
    def singular(self) -> bool:
        return self.verdict == "singular"

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "min_gap": self.min_gap,
                "touching_pairs": [list(p) for p in self.touching_pairs]}


def _boundary_gap(a: PresentedDomain, b: PresentedDomain, mesh: int = 2048) -> float:
    if a.is_identity and b.is_identity:
        gap = math.inf
        for c1 in a.base.circles:
            for c2 in b.base.circles:
                d = abs(c1.center - c2.center)
                # two circles are disjoint when apart or strictly nested
                gap = min(gap, max(d - c1.radius - c2.radius, abs(c1.radius - c2.radius) - d))
        return gap
    pa = np.concatenate(a.boundary_points(mesh))
    pb = np.concatenate(b.boundary_points(mesh))
    return float(np.min(np.abs(pa[:, None] - pb[None, :])))


def mutually_singular_check(components) -> SingularityCertificate:
    """Sufficient test: pairwise disjoint component boundaries give disjoint carriers."""
    comps = [as_presented(c) for c in getattr(components, "components", components)]
    gap = math.inf
    touching = []
    for i in range(len(comps)):
        for j in range(i + 1, len(comps)):
            g = _boundary_gap(comps[i], comps[j])
            gap = min(gap, g)
            if g <= 1e-9:
                touching.append((i, j))
    return SingularityCertificate("indeterminate" if touching else "singular", gap, touching)
