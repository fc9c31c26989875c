"""A small closed algebra of conformal maps and domains presented through them.

Maps are Mobius transformations, univalent quadratic polynomials
``z + beta z^2`` with ``|beta| < 1/2``, and finite compositions of these.
All of them have exact values and derivatives; inverses are exact for
Mobius-only maps and Newton-based otherwise.

A :class:`PresentedDomain` is the image ``G = chart(W)`` of a circular domain
``W``. Measures on G are pulled back to W by numerically inverting the chart.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import AtomOutsideDomain, InvalidDomain, NoConvergence
from .geometry import (
    TWO_PI,
    CircularDomain,
    MobiusMap,
    mobius_compose,
    mobius_equal,
    mobius_from_points,
    mobius_inverse,
)
from .measures import AtomicMeasure, pushforward

NEWTON_MAX_ITER = 100
NEWTON_TOL = 1e-12
SEED_GRID = 32


@dataclass(frozen=True)
class QuadPoly:
    """z -> z + beta z^2, univalent on the closed unit disk for |beta| < 1/2."""

    beta: complex

    def __post_init__(self):
        b = complex(self.beta)
        if not abs(b) < 0.5:
            raise InvalidDomain(f"QuadPoly needs |beta| < 1/2, got {abs(b)}")
        object.__setattr__(self, "beta", b)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = z + self.beta * z * z
        return complex(out) if out.ndim == 0 else out

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        out = 1 + 2 * self.beta * z
        return complex(out) if out.ndim == 0 else np.broadcast_to(out, z.shape).copy()


@dataclass(frozen=True)
class Composition:
    """Pipeline composition: ``maps[0]`` is applied first."""

    maps: tuple

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise InvalidDomain("a composition needs at least one map")
        object.__setattr__(self, "maps", maps)

    def __call__(self, z):
        for m in self.maps:
            z = m(z)
        return z

    def derivative(self, z):
        d = 1.0
        for m in self.maps:
            d = d * np.asarray(m.derivative(z))
            z = m(z)
        return complex(d) if np.ndim(d) == 0 else d


ConformalMap = Union[MobiusMap, QuadPoly, Composition]


def compose(*maps) -> ConformalMap:
    """Pipeline composition that collapses consecutive Mobius factors exactly."""
    flat = []
    for m in maps:
        flat.extend(m.maps if isinstance(m, Composition) else [m])
    out = []
    for m in flat:
        if out and isinstance(m, MobiusMap) and isinstance(out[-1], MobiusMap):
            out[-1] = mobius_compose(m, out[-1])
        else:
            out.append(m)
    return out[0] if len(out) == 1 else Composition(tuple(out))


def as_mobius(m) -> MobiusMap | None:
    """The equivalent Mobius map if ``m`` is built from Mobius factors only."""
    if isinstance(m, MobiusMap):
        return m
    if isinstance(m, Composition) and all(isinstance(f, MobiusMap) for f in m.maps):
        out = MobiusMap.identity()
        for f in m.maps:
            out = mobius_compose(f, out)
        return out
    return None


def apply(m, z):
    return m(z)


def derivative(m, z):
    return m.derivative(z)


@functools.lru_cache(maxsize=64)
def _seed_table(m, base: CircularDomain):
    """Polar grid over the base's outer disk and its image under ``m``."""
    a0, r0 = base.outer.center, base.outer.radius
    rho = (np.arange(SEED_GRID) + 0.5) / SEED_GRID
    theta = np.arange(SEED_GRID) * TWO_PI / SEED_GRID
    grid = (a0 + r0 * rho[:, None] * np.exp(1j * theta[None, :])).ravel()
    grid = grid[base.contains(grid)]
    with np.errstate(all="ignore"):
        images = np.array([_safe_apply(m, z) for z in grid])
    ok = np.isfinite(images)
    return grid[ok], images[ok]


def _safe_apply(m, z):
    try:
        return complex(m(z))
    except ArithmeticError:
        return complex(np.nan, np.nan)


def _newton(m, w: complex, z: complex, tol: float):
    fz = _safe_apply(m, z)
    if not np.isfinite(fz):
        return None
    res = abs(fz - w)
    for _ in range(NEWTON_MAX_ITER):
        if res <= tol:
            return z
        try:
            step = (fz - w) / complex(m.derivative(z))
        except (ArithmeticError, ZeroDivisionError):
            return None
        lam = 1.0
        for _ in range(40):
            z_new = z - lam * step
            f_new = _safe_apply(m, z_new)
            if np.isfinite(f_new) and abs(f_new - w) < res:
                break
            lam *= 0.5
        else:
            return None
        z, fz, res = z_new, f_new, abs(f_new - w)
    return z if res <= tol else None


def invert(m, w: complex, guess: complex | None = None, base: CircularDomain | None = None) -> complex:
    """Preimage of ``w`` under ``m``; exact for Mobius maps, Newton otherwise.

    Newton starts from ``guess`` when given, then from the nearest images in a
    cached polar seed grid over ``base`` (the unit disk by default).
    """
    w = complex(w)
    mob = as_mobius(m)
    if mob is not None:
        return complex(mobius_inverse(mob)(w))
    tol = NEWTON_TOL * max(1.0, abs(w))
    seeds = [] if guess is None else [complex(guess)]
    grid, images = _seed_table(m, base or CircularDomain.disk())
    if grid.size:
        order = np.argsort(np.abs(images - w))[:8]
        seeds += [complex(z) for z in grid[order]]
    for s in seeds:
        z = _newton(m, w, s, tol)
        if z is not None:
            return z
    raise NoConvergence(f"Newton inversion failed at w={w} after {NEWTON_MAX_ITER} iterations per seed")


@dataclass(frozen=True)
class UnivalenceReport:
    passed: bool
    min_ratio: float
    tolerance: float
    mesh: int

    @property
    def margin(self) -> float:
        return self.min_ratio - self.tolerance

    def to_dict(self) -> dict:
        return {"passed": self.passed, "min_ratio": self.min_ratio,
                "tolerance": self.tolerance, "margin": self.margin, "mesh": self.mesh}


def _boundary_mesh(base: CircularDomain, mesh: int) -> np.ndarray:
    t = np.arange(mesh) * TWO_PI / mesh
    return np.concatenate([c.point(t) for c in base.circles])


def univalence_audit_map(base: CircularDomain, chart, mesh: int = 512, tol: float = 1e-3) -> UnivalenceReport:
    """Mesh proxy for injectivity of ``chart`` on the boundary of ``base``.

    Checks ``|chart(x) - chart(y)| >= tol * |x - y|`` over all pairs of mesh
    points. This is a numerical proxy, not a proof of almost-injectivity.
    """
    if mesh < 64:
        raise ValueError("univalence audit needs mesh >= 64")
    x = _boundary_mesh(base, mesh)
    with np.errstate(all="ignore"):
        fx = np.asarray(chart(x), dtype=complex)
    if not np.all(np.isfinite(fx)):
        return UnivalenceReport(False, 0.0, tol, mesh)
    dx = np.abs(x[:, None] - x[None, :])
    df = np.abs(fx[:, None] - fx[None, :])
    np.fill_diagonal(dx, 1.0)
    np.fill_diagonal(df, np.inf)
    ratio = float(np.min(df / dx))
    return UnivalenceReport(ratio >= tol, ratio, tol, mesh)


@dataclass(frozen=True)
class PresentedDomain:
    """G = chart(base) for a circular ``base`` and a univalent ``chart``."""

    base: CircularDomain
    chart: object = field(default_factory=MobiusMap.identity)
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if not self.validate:
            return
        mob = as_mobius(self.chart)
        if mob is not None:
            p = mob.pole
            if p is not None and self.base.boundary_distance(p) > -1e-12:
                raise InvalidDomain("Mobius chart has its pole in the closure of the base domain")
            return
        report = univalence_audit_map(self.base, self.chart, 256)
        if not report.passed:
            raise InvalidDomain(f"chart failed the univalence audit (min ratio {report.min_ratio:.3g})")

    @classmethod
    def circular(cls, domain: CircularDomain) -> "PresentedDomain":
        return cls(domain, MobiusMap.identity())

    @property
    def is_identity(self) -> bool:
        mob = as_mobius(self.chart)
        return mob is not None and mobius_equal(mob, MobiusMap.identity(), 1e-15)

    @property
    def is_disk(self) -> bool:
        return self.is_identity and not self.base.inner

    def preimage(self, z: complex) -> complex:
        return invert(self.chart, z, base=self.base)

    def contains(self, z):
        z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
        if self.is_identity:
            out = self.base.contains(z_arr)
        else:
            out = np.zeros(z_arr.shape, dtype=bool)
            for k, zk in enumerate(z_arr.tolist()):
                try:
                    out[k] = bool(self.base.contains(self.preimage(zk)))
                except NoConvergence:
                    out[k] = False
        return bool(out[0]) if np.ndim(z) == 0 else out

    def boundary_points(self, mesh: int = 1024) -> list[np.ndarray]:
        t = np.arange(mesh) * TWO_PI / mesh
        return [np.asarray(self.chart(c.point(t)), dtype=complex) for c in self.base.circles]

    def boundary_distance(self, z, mesh: int = 4096) -> float:
        """Approximate distance from ``z`` to the presented boundary (exact for identity charts)."""
        if self.is_identity:
            return float(np.abs(self.base.boundary_distance(z)))
        pts = np.concatenate(self.boundary_points(mesh))
        return float(np.min(np.abs(pts - z)))

    def evaluation_point(self) -> complex:
        return complex(self.chart(self.base.default_evaluation_point()))


def as_presented(domain) -> PresentedDomain:
    if isinstance(domain, PresentedDomain):
        return domain
    if isinstance(domain, CircularDomain):
        return PresentedDomain.circular(domain)
    raise TypeError(f"expected a CircularDomain or PresentedDomain, got {type(domain).__name__}")


def pushforward_measure(presented: PresentedDomain, mu: AtomicMeasure) -> AtomicMeasure:
    """Pull ``mu`` on G back to the base: every atom moves to chart^{-1}(location)."""
    if len(mu) == 0:
        return mu
    pts = np.array([presented.preimage(z) for z in mu.points.tolist()], dtype=complex)
    inside = presented.base.contains(pts)
    if not np.all(inside):
        raise AtomOutsideDomain(f"{int(np.sum(~inside))} atom(s) do not lie in the presented domain")
    return AtomicMeasure(pts, mu.weights)


def push_to_presented(presented: PresentedDomain, nu: AtomicMeasure) -> AtomicMeasure:
    """Push a base measure forward through the chart."""
    nu.check_in(presented.base)
    return pushforward(nu, presented.chart)


def hull_riemann_maps(domain: CircularDomain) -> list[MobiusMap]:
    """Riemann maps of the simply connected hulls onto the unit disk.

    The hull of the outer circle is the outer disk, normalised to send its
    center to 0 with positive derivative there; the hull of inner circle i is
    the exterior of disk i with infinity, normalised to send infinity to 0
    and the rightmost point of the circle to 1. Each map is constructed from
    three boundary/interior correspondences.
    """
    o = domain.outer
    maps = [mobius_from_points((o.center, o.center + o.radius, None), (0, 1, None))]
    for c in domain.inner:
        maps.append(mobius_from_points((None, c.center + c.radius, c.center), (0, 1, None)))
    return maps


def univalence_audit(presented: PresentedDomain, mesh: int = 512, tol: float = 1e-3) -> UnivalenceReport:
    return univalence_audit_map(presented.base, presented.chart, mesh, tol)


def arclength_factor(m, circle) -> float:
    """Boundary arclength per unit disk angle for a hull map, i.e. 1/|m'| on the circle."""
    return 1.0 / abs(complex(m.derivative(circle.center + circle.radius)))
