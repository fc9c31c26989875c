"""End-to-end batteries: oracle equivalence, cross-pipeline consistency and MC calibration.

Every battery returns a :class:`BatteryResult` holding the measured value,
the tolerance it was judged against, and the wall-clock time, which must
also stay under the battery's budget. Tolerances can be overridden by name
(mainly to self-test the harness).
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .boxes import box_ratio_circular, box_ratio_disk, box_ratio_disk_oracle, box_ratio_hull, trend_analysis
from .conformal import PresentedDomain, QuadPoly, hull_riemann_maps, pushforward_measure, push_to_presented
from .corpus import approach_family, non_carleson, random_disk_measure, random_domain_measure, ring_family
from .geometry import (
    TWO_PI,
    CarlesonSquare,
    Circle,
    CircularDomain,
    MobiusMap,
    admissible_depth,
    boundary_maps,
    disk_square_mask,
    square_arclength,
    square_region_mask,
)
from .harmonic import Arc, full_boundary, harmonic_measure_mc
from .measures import AtomicMeasure, pushforward, restrict, scale
from .norms import estimate_constant
from .opensets import OpenSetDomain, with_weights, weighted_criterion
from .trends import fit_trend


@dataclass
class BatteryResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    comparison: str
    runtime: float
    budget: float
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status}  {self.name:<24} measured={self.measured:.6g} {self.comparison} "
                f"{self.tolerance:.3g}  ({self.runtime:.2f}s / {self.budget:.0f}s)")


# name -> (default tolerance, runtime budget in seconds)
DEFAULTS = {
    "oracle_equivalence": (1e-9, 10.0),
    "square_correspondence": (1e-12, 5.0),
    "hull_equivalence": (1e-12, 10.0),
    "harmonic_calibration": (3.0, 30.0),
    "point_mass_sharpness": (1e-9, 5.0),
    "embedding_audit": (40.0, 60.0),
    "trend_invariance": (0.0, 60.0),
    "open_set_criterion": (3.0, 30.0),
    "homogeneity": (1e-12, 10.0),
}


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


def oracle_equivalence(tol: float, seed: int = 0) -> tuple[float, dict]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(100):
        mu = random_disk_measure(rng, 10)
        worst = max(worst, abs(box_ratio_disk(mu).kappa - box_ratio_disk_oracle(mu).kappa))
    return worst, {"measures": 100}


def square_correspondence(tol: float, seed: int = 1) -> tuple[float, dict]:
    D = CircularDomain.annulus(0.25, 1.0)
    rng = np.random.default_rng(seed)
    mu = random_domain_measure(rng, D, 400, near=0.3)
    maps = boundary_maps(D)
    pushed = [pushforward(mu, f) for f in maps]
    worst, hits = 0.0, 0
    for _ in range(500):
        i = int(rng.integers(D.connectivity))
        h = float(rng.uniform(0, admissible_depth(D, i))) or 1e-3
        S = CarlesonSquare(i, h, rng.uniform(0, TWO_PI))
        direct = float(mu.weights[square_region_mask(D, S, mu.points)].sum()) / square_arclength(D, S)
        nu = pushed[i]
        disk = float(nu.weights[disk_square_mask(nu.points, h, S.anchor)].sum()) / h
        via_map = disk / D.circles[i].radius
        worst = max(worst, _rel(direct, via_map))
        hits += direct > 0
    return worst, {"squares": 500, "nonempty": hits}


def _hull_domains() -> list[CircularDomain]:
    return [
        CircularDomain.annulus(0.25, 1.0),
        CircularDomain(Circle(0.2 + 0.1j, 2.0), (Circle(-0.7, 0.3), Circle(0.9 + 0.5j, 0.4))),
        CircularDomain(Circle(1j, 1.5), (Circle(1.4j, 0.2), Circle(0.5 + 0.6j, 0.25), Circle(-0.6 + 1.2j, 0.3))),
    ]


def hull_equivalence(tol: float, seed: int = 2) -> tuple[float, dict]:
    worst_coeff = 0.0
    for D in _hull_domains():
        for g, f in zip(hull_riemann_maps(D), boundary_maps(D)):
            # coefficient gap after aligning the projective scalar
            k = int(np.argmax(np.abs(f.matrix)))
            lam = f.matrix.flat[k] / g.matrix.flat[k]
            worst_coeff = max(worst_coeff, float(np.max(np.abs(lam * g.matrix - f.matrix))))
    D = CircularDomain.annulus(0.25, 1.0)
    rng = np.random.default_rng(seed)
    agree, worst_kappa = 0, 0.0
    for n in range(20):
        i = n % 2
        exponent = (0.5, 0.75, 1.0, 1.25, 1.5)[n % 5] if n < 10 else float(rng.choice([0.4, 0.6, 1.2, 2.0]))
        fam = approach_family(D, i, float(rng.uniform(0, TWO_PI)), exponent)
        a = [box_ratio_circular(D, mu).kappa for mu in fam]
        b = [box_ratio_hull(D, mu).kappa for mu in fam]
        worst_kappa = max(worst_kappa, max(_rel(x, y) for x, y in zip(a, b)))
        agree += fit_trend(a).classification == fit_trend(b).classification
    measured = max(worst_coeff, worst_kappa) if agree == 20 else math.inf
    return measured, {"coefficient_gap": worst_coeff, "kappa_gap": worst_kappa, "families_agreeing": agree}


def harmonic_calibration(tol: float, seed: int = 3) -> tuple[float, dict]:
    """Largest deviation from the exact value, in standard errors."""
    disk = CircularDomain.disk()
    est = harmonic_measure_mc(disk, 0j, [Arc(0, 0.0, math.pi), Arc(0, math.pi, TWO_PI)], 10_000, seed)
    z_disk = abs(est.probabilities[0] - 0.5) / est.stderr[0]
    ann = CircularDomain.annulus(0.25, 1.0)
    est2 = harmonic_measure_mc(ann, 0.5 + 0j, full_boundary(ann), 100_000, seed)
    exact = math.log(0.5) / math.log(0.25)
    z_ann = abs(est2.probabilities[1] - exact) / est2.stderr[1]
    return max(z_disk, z_ann), {
        "disk_half_arc": est.probabilities[0], "disk_sigmas": z_disk,
        "annulus_inner": est2.probabilities[1], "annulus_sigmas": z_ann, "capped": est.capped + est2.capped,
    }


def point_mass_sharpness(tol: float) -> tuple[float, dict]:
    delta = AtomicMeasure([0j], [1.0])
    vals = {q: estimate_constant(CircularDomain.disk(), delta, q).c_hat for q in (1, 2, 4)}
    return max(abs(v - 1) for v in vals.values()), {f"q={q}": v for q, v in vals.items()}


def embedding_audit(tol: float, seed: int = 4) -> tuple[float, dict]:
    """Largest c_hat over kappa <= 1 measures; the non-Carleson checks gate the result."""
    rng = np.random.default_rng(seed)
    D = CircularDomain.disk()
    worst = 0.0
    for _ in range(20):
        mu = random_disk_measure(rng, 10)
        mu = scale(mu, 1.0 / box_ratio_disk(mu).kappa)
        worst = max(worst, estimate_constant(D, mu, 2, 3).c_hat)
    ks = range(6, 13)
    kappa_gap = max(_rel(box_ratio_disk(non_carleson(k)).kappa, 2.0 ** (k / 2)) for k in ks)
    c = [estimate_constant(D, non_carleson(k), 2, 3).c_hat for k in ks]
    factor = min(b / a for a, b in zip(c, c[1:]))
    ok = kappa_gap <= 1e-12 and factor >= 1.15
    return (worst if ok else math.inf), {"max_c_hat": worst, "kappa_gap": kappa_gap,
                                         "c_hat": c, "min_growth_factor": factor}


def _trend_families() -> list[list[AtomicMeasure]]:
    D = CircularDomain.disk()
    fams = [approach_family(D, 0, t, e, range(3, 10)) for t, e in
            [(0.0, 0.5), (1.0, 0.25), (2.5, 0.6), (4.0, 1.0), (5.0, 1.5), (3.3, 2.0)]]
    fams += [ring_family(range(3, 8)), ring_family(range(3, 8), 0.5, 0.3)]
    # sums of a bounded and a divergent family stay divergent
    base = approach_family(D, 0, 0.4, 1.0, range(3, 8))
    spike = approach_family(D, 0, 2.0, 0.4, range(3, 8))
    fams.append([AtomicMeasure(np.r_[a.points, b.points], np.r_[a.weights, b.weights]) for a, b in zip(base, spike)])
    fams.append([scale(m, 5.0) for m in ring_family(range(3, 8))])
    return fams


def disk_automorphism(a: complex, rotation: float = 0.0) -> MobiusMap:
    """z -> e^{i rotation} (z - a) / (1 - conj(a) z)."""
    u = complex(math.cos(rotation), math.sin(rotation))
    return MobiusMap(u, -u * a, -complex(a).conjugate(), 1)


def trend_invariance(tol: float) -> tuple[float, dict]:
    """Count of classifications that change under presentation; must equal 0.

    Box-ratio trends are compared through the QuadPoly chart and three disk
    automorphisms, and c_hat trends through the chart.
    """
    D = CircularDomain.disk()
    P = PresentedDomain(D, QuadPoly(0.3))
    autos = [disk_automorphism(0.3), disk_automorphism(0.4j, 1.0), disk_automorphism(-0.5 + 0.2j, 2.5)]
    flips = 0
    classes = []
    for fam in _trend_families():
        ref = trend_analysis(fam).classification
        presented = [push_to_presented(P, mu) for mu in fam]
        # analyse the presented measures through the chart
        pulled = [pushforward_measure(P, nu) for nu in presented]
        via_chart = trend_analysis(pulled).classification
        via_auto = [trend_analysis([pushforward(mu, m) for mu in fam]).classification for m in autos]
        c_ref = fit_trend([estimate_constant(D, mu, 2, 2).c_hat for mu in fam], power=2).classification
        c_chart = fit_trend([estimate_constant(P, nu, 2, 2).c_hat for nu in presented], power=2).classification
        flips += sum(c != ref for c in [via_chart, *via_auto]) + (c_chart != c_ref)
        classes.append(ref)
    return float(flips), {"families": len(classes), "classifications": classes}


def open_set_criterion(tol: float, seed: int = 5) -> tuple[float, dict]:
    """Worst composite excess over C*, in standard errors; exact checks gate the result."""
    disks = [CircularDomain(Circle(3.0 * n, 1.0)) for n in range(3)]
    G = OpenSetDomain(disks)
    mu = AtomicMeasure([3.0 * n for n in range(3)], [4.0 ** -(n + 1) for n in range(3)])
    c_star = weighted_criterion(G, mu, q=1).c_star
    two = OpenSetDomain([CircularDomain.annulus(0.3), CircularDomain(Circle(3.0, 1.0))])
    b = with_weights(two, [0.9, 0.1])
    rng = np.random.default_rng(seed)
    worst = -math.inf
    reweight_gap = 0.0
    for _ in range(10):
        parts = [random_domain_measure(rng, c.base, int(rng.integers(1, 5)), near=0.3) for c in two.components]
        m = AtomicMeasure(np.r_[parts[0].points, parts[1].points], np.r_[parts[0].weights, parts[1].weights])
        rep = weighted_criterion(two, m, q=2)
        sigma = rep.composite_stderr or 1e-300
        worst = max(worst, (rep.composite - rep.c_star) / sigma)
        rb = weighted_criterion(b, m, q=2)
        formula = max(rb.c_hat[0] / 0.9, rb.c_hat[1] / 0.1)
        reweight_gap = max(reweight_gap, _rel(rb.c_star, formula))
    ok = c_star == 0.5 and reweight_gap <= 1e-12
    return (worst if ok else math.inf), {"c_star_point_masses": c_star, "reweight_gap": reweight_gap,
                                         "worst_excess_sigmas": worst}


def homogeneity(tol: float, seed: int = 6) -> tuple[float, dict]:
    rng = np.random.default_rng(seed)
    D = CircularDomain.disk()
    A = CircularDomain.annulus(0.25)
    worst = 0.0
    for n in range(10):
        mu = random_disk_measure(rng, 8)
        c = float(rng.uniform(0.1, 10))
        worst = max(worst, _rel(box_ratio_disk(scale(mu, c)).kappa, c * box_ratio_disk(mu).kappa))
        nu = random_domain_measure(rng, A, 12)
        worst = max(worst, _rel(box_ratio_circular(A, scale(nu, c)).kappa, c * box_ratio_circular(A, nu).kappa))
        keep = rng.random(len(nu)) < 0.5
        sub = restrict(nu, lambda z: np.isin(z, nu.points[keep]))
        worst = max(worst, max(0.0, box_ratio_circular(A, sub).kappa - box_ratio_circular(A, nu).kappa))
        if n < 4:
            q = (1.0, 2.0)[n % 2]
            e1 = estimate_constant(D, mu, q, 3).c_hat
            e2 = estimate_constant(D, scale(mu, c), q, 3).c_hat
            worst = max(worst, _rel(e2, c ** (1 / q) * e1))
            levels = [estimate_constant(D, mu, q, lv).c_hat for lv in (1, 2, 3)]
            worst = max(worst, max(0.0, levels[0] - levels[1]), max(0.0, levels[1] - levels[2]))
    return worst, {}


BATTERIES: dict[str, tuple[Callable, str]] = {
    "oracle_equivalence": (oracle_equivalence, "<"),
    "square_correspondence": (square_correspondence, "<="),
    "hull_equivalence": (hull_equivalence, "<="),
    "harmonic_calibration": (harmonic_calibration, "<="),
    "point_mass_sharpness": (point_mass_sharpness, "<="),
    "embedding_audit": (embedding_audit, "<="),
    "trend_invariance": (trend_invariance, "<="),
    "open_set_criterion": (open_set_criterion, "<="),
    "homogeneity": (homogeneity, "<="),
}


def run_battery(name: str, tolerance: float | None = None) -> BatteryResult:
    fn, cmp = BATTERIES[name]
    default, budget = DEFAULTS[name]
    tol = default if tolerance is None else float(tolerance)
    t0 = time.perf_counter()
    measured, detail = fn(tol)
    runtime = time.perf_counter() - t0
    ok = measured < tol if cmp == "<" else measured <= tol
    return BatteryResult(name, bool(ok and runtime < budget), float(measured), tol, cmp, runtime, budget, detail)


def run_suite(tolerances: dict[str, float] | None = None, names=None) -> list[BatteryResult]:
    tolerances = tolerances or {}
    unknown = set(tolerances) - set(BATTERIES)
    if unknown:
        raise KeyError(f"unknown battery name(s): {sorted(unknown)}")
    return [run_battery(n, tolerances.get(n)) for n in (names or BATTERIES)]
