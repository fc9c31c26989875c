"""Carleson inequality constants over rational test families.

For a measure mu on G and an exponent q the estimator reports

    c_hat = max_f ||f||_{L^q(mu)} / ||f||_{L^q(omega)}

over a deterministic family of rational functions with poles off the
closure of G, where omega is harmonic measure for G at a fixed evaluation
point. Every ratio is a lower bound for the best constant C; the box-ratio
audit supplies the matching upper-bound check.

Boundary integrals are taken on the circles of the base domain (harmonic
measure is conformally invariant, so a chart only changes the integrand).
On a disk base the density is the exact Poisson kernel and the periodic
trapezoid rule is refined by doubling until it converges. On a multiply
connected base the density is a walk-on-spheres histogram (64 arcs per
circle) and each arc is integrated by Gauss-Legendre.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
import numpy as np

from .conformal import PresentedDomain, as_presented
from .errors import PoleTooCloseToBoundary
from .geometry import TWO_PI, boundary_maps
from .harmonic import density_histogram, poisson_kernel
from .measures import AtomicMeasure

POLE_MARGIN = 1e-6
QUAD_RTOL = 1e-12
QUAD_FAIL = 1e-6
MAX_NODES = 2**22
HIST_ARCS = 64
HIST_WALKS = 100_000

# level -> (max monomial degree, peak radii, peak angle count, peak powers, max pole power)
LEVELS = {
    1: (2, (0.5,), 8, (1,), 2),
    2: (5, (0.5, 0.9), 16, (1, 2), 5),
    3: (8, (0.5, 0.9, 0.99, 0.999), 32, (1, 2), 8),
}


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """gain * prod(z - zeros) / prod(z - poles)."""

    gain: complex
    zeros: tuple = ()
    poles: tuple = ()
    label: str = ""

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, complex(self.gain))
        for a in self.zeros:
            out = out * (z - a)
        for p in self.poles:
            out = out / (z - p)
        return out

    @property
    def numerator(self) -> np.ndarray:
        return self.gain * np.poly(np.array(self.zeros, dtype=complex)) if self.zeros else np.array([self.gain])

    @property
    def denominator(self) -> np.ndarray:
        return np.poly(np.array(self.poles, dtype=complex)) if self.poles else np.array([1.0 + 0j])


@dataclass(frozen=True)
class ConstantEstimate:
    q: float
    c_hat: float
    witness: int
    witness_label: str
    family_size: int
    stderr: float = 0.0

    def to_dict(self) -> dict:
        return {"q": self.q, "c_hat": self.c_hat, "witness": self.witness,
                "witness_label": self.witness_label, "family_size": self.family_size,
                "stderr": self.stderr}


def _pole_ok(P: PresentedDomain, p: complex) -> bool:
    if not np.isfinite(p):
        return False
    if P.is_identity:
        return bool(P.base.boundary_distance(p) < -POLE_MARGIN)
    if P.contains(p):
        return False
    return P.boundary_distance(p) >= POLE_MARGIN


def _reflected_peak(P: PresentedDomain, i: int, w: complex, m: int, label: str) -> RationalFunction | None:
    """Peak along boundary circle i: pole at the chart image of f_i^{-1}(1/conj(w))."""
    c = P.base.circles[i]
    u = 1 / np.conj(w)
    base_pole = c.center + c.radius * u if i == 0 else c.center + c.radius / u
    try:
        p = complex(P.chart(base_pole))
        zero = None if i == 0 else complex(P.chart(c.center))
    except ArithmeticError:
        return None
    if not _pole_ok(P, p):
        return None
    zeros = () if zero is None else (zero,) * m
    return RationalFunction(1.0, zeros, (p,) * m, label)


def test_family(domain, level: int = 3, measure: AtomicMeasure | None = None) -> list[RationalFunction]:
    """Deterministic rational test family, nested in ``level``.

    Members: powers of the outer boundary map, kernel peaks
    1/(1 - conj(w) f_i)^m on a polar grid for each boundary circle, powers of
    the inner boundary maps, and (when ``measure`` is given) one peak aimed
    at each atom from each boundary circle.
    """
    if level not in LEVELS:
        raise ValueError(f"family level must be one of {sorted(LEVELS)}")
    P = as_presented(domain)
    deg, radii, n_ang, powers, pole_pow = LEVELS[level]
    base = P.base
    o = base.outer
    c0 = complex(P.chart(o.center)) if not P.is_identity else o.center
    fam = [RationalFunction(o.radius ** -k, (c0,) * k, (), f"monomial k={k}") for k in range(deg + 1)]
    angles = np.arange(n_ang) * TWO_PI / n_ang
    for i in range(base.connectivity):
        for rho in radii:
            for t in angles:
                for m in powers:
                    f = _reflected_peak(P, i, rho * np.exp(1j * t), m, f"peak i={i} |w|={rho} t={t:.4f} m={m}")
                    if f is not None:
                        fam.append(f)
    for i, c in enumerate(base.inner, start=1):
        try:
            a = complex(P.chart(c.center))
        except ArithmeticError:
            continue
        if not _pole_ok(P, a):
            continue
        for k in range(1, pole_pow + 1):
            fam.append(RationalFunction(c.radius**k, (), (a,) * k, f"pole power i={i} k={k}"))
    if measure is not None and len(measure):
        fam += adapted_peaks(P, measure)
    return fam


def adapted_peaks(domain, measure: AtomicMeasure) -> list[RationalFunction]:
    """One first-order peak per (atom, boundary circle), reflected through that circle."""
    P = as_presented(domain)
    maps = boundary_maps(P.base)
    out = []
    seen = set()
    for j, z in enumerate(measure.points.tolist()):
        zeta = z if P.is_identity else P.preimage(z)
        for i, f in enumerate(maps):
            w = complex(f(zeta))
            if abs(w) == 0 or abs(w) >= 1:
                continue
            key = (i, round(w.real, 15), round(w.imag, 15))
            if key in seen:
                continue
            seen.add(key)
            g = _reflected_peak(P, i, w, 1, f"atom peak j={j} i={i}")
            if g is not None:
                out.append(g)
    return out


def lq_norm_measure(f, mu: AtomicMeasure, q: float) -> float:
    if q < 1:
        raise ValueError("q must be >= 1")
    if len(mu) == 0:
        return 0.0
    return float(np.sum(mu.weights * np.abs(f(mu.points)) ** q) ** (1.0 / q))


@dataclass(frozen=True)
class _Boundary:
    """Quadrature data for omega on a presented domain at a fixed base point."""

    domain: PresentedDomain
    point: complex
    density: np.ndarray | None = field(default=None, compare=False)
    density_se: np.ndarray | None = field(default=None, compare=False)


@functools.lru_cache(maxsize=32)
def _histogram(base, point: complex, walks: int, seed: int):
    return density_histogram(base, point, HIST_ARCS, walks, seed)


def _boundary(domain, point=None, walks: int = HIST_WALKS, seed: int = 0) -> _Boundary:
    P = as_presented(domain)
    z = P.base.default_evaluation_point() if point is None else complex(point)
    if not P.base.contains(z):
        raise ValueError(f"evaluation point {z} is not inside the base domain")
    if not P.base.inner:
        return _Boundary(P, z)
    dens, se = _histogram(P.base, z, walks, seed)
    return _Boundary(P, z, dens, se)


def _disk_integral(f, B: _Boundary, q: float, nodes: int) -> tuple[float, float]:
    c = B.domain.base.outer
    u0 = (B.point - c.center) / c.radius
    chart = B.domain.chart

    def values(t):
        return np.abs(f(chart(c.point(t)))) ** q * poisson_kernel(u0, t)

    n = max(8, int(nodes))
    total = float(np.sum(values(np.arange(n) * TWO_PI / n)))
    est = total / n
    err = math.inf
    while n < MAX_NODES:
        # midpoints of the current grid double the resolution
        total += float(np.sum(values((np.arange(n) + 0.5) * TWO_PI / n)))
        n *= 2
        new = total / n
        err = abs(new - est)
        est = new
        if err <= QUAD_RTOL * abs(est):
            return est, 0.0
    if err > QUAD_FAIL * abs(est):
        raise PoleTooCloseToBoundary(f"boundary quadrature error {err:.3g} after {n} nodes")
    return est, 0.0


def _arc_integral(f, B: _Boundary, q: float, nodes: int) -> tuple[float, float]:
    base = B.domain.base
    chart = B.domain.chart
    edges = np.arange(HIST_ARCS + 1) * TWO_PI / HIST_ARCS
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1] - edges[0])

    def arc_sums(m):
        x, wq = np.polynomial.legendre.leggauss(m)
        t = mid[:, None] + half * x[None, :]
        out = []
        for c in base.circles:
            vals = np.abs(f(chart(c.point(t)))) ** q
            out.append(c.radius * half * vals @ wq)
        return np.array(out)

    m = max(4, int(nodes) // HIST_ARCS)
    J = arc_sums(m)
    est = float(np.sum(B.density * J))
    err = math.inf
    while m < 4096:
        m *= 2
        J = arc_sums(m)
        new = float(np.sum(B.density * J))
        err = abs(new - est)
        est = new
        if err <= QUAD_RTOL * abs(est):
            break
    else:
        if err > QUAD_FAIL * abs(est):
            raise PoleTooCloseToBoundary(f"boundary quadrature error {err:.3g} with {m} nodes per arc")
    se = float(np.sqrt(np.sum((B.density_se * J) ** 2)))
    return est, se


def _boundary_power(f, B: _Boundary, q: float, nodes: int) -> tuple[float, float]:
    """(integral of |f|^q d omega, its standard error from the density)."""
    if B.density is None:
        return _disk_integral(f, B, q, nodes)
    return _arc_integral(f, B, q, nodes)


def lq_norm_boundary(f, domain, q: float = 2.0, nodes: int = 256, point=None,
                     walks: int = HIST_WALKS, seed: int = 0) -> float:
    """||f||_{L^q(omega)} for harmonic measure omega at ``point`` (base coordinates)."""
    if q < 1:
        raise ValueError("q must be >= 1")
    B = _boundary(domain, point, walks, seed)
    return _boundary_power(f, B, q, nodes)[0] ** (1.0 / q)


@functools.lru_cache(maxsize=16)
def _family_norms(P: PresentedDomain, level: int, q: float, nodes: int, point: complex, walks: int, seed: int):
    B = _boundary(P, point, walks, seed)
    fam = test_family(P, level)
    vals = [_boundary_power(f, B, q, nodes) for f in fam]
    return fam, vals


def family_ratios(domain, mu: AtomicMeasure, q: float = 2.0, level: int = 3, nodes: int = 256,
                  point=None, walks: int = HIST_WALKS, seed: int = 0, adapt: bool = True):
    """Family members with their ratios and ratio standard errors, in family order."""
    if q < 1:
        raise ValueError("q must be >= 1")
    P = as_presented(domain)
    B = _boundary(P, point, walks, seed)
    fam, vals = _family_norms(P, level, float(q), int(nodes), B.point, walks, seed)
    fam, vals = list(fam), list(vals)
    if adapt and len(mu):
        extra = adapted_peaks(P, mu)
        fam += extra
        vals += [_boundary_power(f, B, q, nodes) for f in extra]
    ratios, errs = [], []
    for f, (I, se) in zip(fam, vals):
        r = lq_norm_measure(f, mu, q) / I ** (1.0 / q)
        ratios.append(r)
        # relative error of I^{1/q} is dI / (q I)
        errs.append(r * se / (q * I) if I > 0 else 0.0)
    return fam, ratios, errs


def estimate_constant(domain, mu: AtomicMeasure, q: float = 2.0, level: int = 3, nodes: int = 256,
                      point=None, walks: int = HIST_WALKS, seed: int = 0,
                      adapt: bool = True) -> ConstantEstimate:
    """Largest L^q(mu)/L^q(omega) ratio over the level's family (plus atom peaks when ``adapt``)."""
    fam, ratios, errs = family_ratios(domain, mu, q, level, nodes, point, walks, seed, adapt)
    k = int(np.argmax(ratios))
    return ConstantEstimate(float(q), float(ratios[k]), k, fam[k].label, len(fam), float(errs[k]))
