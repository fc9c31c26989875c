"""Plane primitives: circles, circular domains, Mobius maps and Carleson squares.

Points are plain Python ``complex`` values (or complex numpy arrays for the
vectorised paths). A circular domain is the open outer disk with a finite
number of closed disks removed.

A Carleson square on the unit disk is the half-open polar box::

    {w = r e^{it} : 1 - h <= r < 1,  t0 <= t < t0 + h  (angles mod 2 pi)}

with depth ``h`` in (0, 1]. The origin has no angle; it is assigned angle
``t0`` and so belongs to a square exactly when ``h == 1``. On a circular
domain, the square attached to boundary circle ``i`` is the preimage of a
disk square under the boundary map ``f_i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidDomain, PoleHit

TWO_PI = 2.0 * math.pi
POLE_TOL = 1e-14


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def __post_init__(self):
        c = complex(self.center)
        r = float(self.radius)
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise InvalidDomain(f"circle center must be finite, got {c}")
        if not (r > 0 and math.isfinite(r)):
            raise InvalidDomain(f"circle radius must be positive, got {r}")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)

    def point(self, t):
        """Point(s) at angle ``t`` on the circle."""
        return self.center + self.radius * np.exp(1j * np.asarray(t, dtype=float))


@dataclass(frozen=True)
class CircularDomain:
    outer: Circle
    inner: tuple[Circle, ...] = field(default_factory=tuple)

    def __post_init__(self):
        inner = tuple(self.inner)
        object.__setattr__(self, "inner", inner)
        a0, r0 = self.outer.center, self.outer.radius
        for k, c in enumerate(inner):
            if abs(c.center - a0) + c.radius >= r0:
                raise InvalidDomain(f"inner circle {k + 1} is not strictly inside the outer disk")
        for k in range(len(inner)):
            for m in range(k + 1, len(inner)):
                ck, cm = inner[k], inner[m]
                if abs(ck.center - cm.center) <= ck.radius + cm.radius:
                    raise InvalidDomain(f"inner disks {k + 1} and {m + 1} are not disjoint")

    @classmethod
    def disk(cls, center: complex = 0j, radius: float = 1.0) -> "CircularDomain":
        return cls(Circle(center, radius))

    @classmethod
    def annulus(cls, inner_radius: float, outer_radius: float = 1.0, center: complex = 0j) -> "CircularDomain":
        return cls(Circle(center, outer_radius), (Circle(center, inner_radius),))

    @property
    def circles(self) -> tuple[Circle, ...]:
        return (self.outer,) + self.inner

    @property
    def connectivity(self) -> int:
        return len(self.inner) + 1

    def boundary_distance(self, z):
        """Signed-free distance from point(s) in G to the boundary of G."""
        z = np.asarray(z, dtype=complex)
        d = self.outer.radius - np.abs(z - self.outer.center)
        for c in self.inner:
            d = np.minimum(d, np.abs(z - c.center) - c.radius)
        return d

    def contains(self, z):
        """True for points strictly inside G (works elementwise on arrays)."""
        return self.boundary_distance(z) > 0

    def area(self) -> float:
        return math.pi * (self.outer.radius**2 - sum(c.radius**2 for c in self.inner))

    def centroid(self) -> complex:
        m0 = self.outer.radius**2
        s = m0 * self.outer.center - sum(c.radius**2 * c.center for c in self.inner)
        return s / (m0 - sum(c.radius**2 for c in self.inner))

    def default_evaluation_point(self) -> complex:
        """Outer center if it lies in G, else the centroid, else the deepest grid point."""
        for z in (self.outer.center, self.centroid()):
            if self.contains(z):
                return complex(z)
        a0, r0 = self.outer.center, self.outer.radius
        rho = np.linspace(0.0, 1.0, 201)[1:-1]
        theta = np.linspace(0.0, TWO_PI, 256, endpoint=False)
        grid = (a0 + r0 * rho[:, None] * np.exp(1j * theta[None, :])).ravel()
        depth = self.boundary_distance(grid)
        return complex(grid[int(np.argmax(depth))])


@dataclass(frozen=True)
class MobiusMap:
    """z -> (a z + b) / (c z + d), stored with max |coefficient| scaled to 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        coeffs = [complex(x) for x in (self.a, self.b, self.c, self.d)]
        scale = max(abs(x) for x in coeffs)
        if not math.isfinite(scale) or scale == 0:
            raise InvalidDomain("Mobius coefficients must be finite and not all zero")
        coeffs = [x / scale for x in coeffs]
        a, b, c, d = coeffs
        if abs(a * d - b * c) <= POLE_TOL:
            raise InvalidDomain("degenerate Mobius map (ad - bc = 0)")
        for name, x in zip("abcd", coeffs):
            object.__setattr__(self, name, x)

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1, 0, 0, 1)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @property
    def pole(self) -> complex | None:
        """Finite pole of the map, or None when it fixes infinity."""
        if abs(self.c) <= POLE_TOL:
            return None
        return -self.d / self.c

    def __call__(self, z):
        return mobius_apply(self, z)

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        den = self.c * z + self.d
        _check_pole(den)
        out = (self.a * self.d - self.b * self.c) / den**2
        return complex(out) if out.ndim == 0 else out


def _check_pole(den):
    if np.any(np.abs(den) < POLE_TOL):
        raise PoleHit("evaluation at a pole of a Mobius map")


def mobius_apply(m: MobiusMap, z):
    z_arr = np.asarray(z, dtype=complex)
    den = m.c * z_arr + m.d
    _check_pole(den)
    out = (m.a * z_arr + m.b) / den
    return complex(out) if out.ndim == 0 else out


def mobius_compose(m1: MobiusMap, m2: MobiusMap) -> MobiusMap:
    """The map z -> m1(m2(z))."""
    p = m1.matrix @ m2.matrix
    return MobiusMap(p[0, 0], p[0, 1], p[1, 0], p[1, 1])


def mobius_inverse(m: MobiusMap) -> MobiusMap:
    return MobiusMap(m.d, -m.b, -m.c, m.a)


def mobius_from_points(src: Sequence[complex | None], dst: Sequence[complex | None]) -> MobiusMap:
    """The unique Mobius map sending three source points to three targets.

    ``None`` stands for the point at infinity on either side.
    """

    def to_standard(p1, p2, p3) -> np.ndarray:
        # cross-ratio map sending (p1, p2, p3) to (0, 1, inf)
        if p1 is None:
            return np.array([[0, p2 - p3], [1, -p3]], dtype=complex)
        if p2 is None:
            return np.array([[1, -p1], [1, -p3]], dtype=complex)
        if p3 is None:
            return np.array([[1, -p1], [0, p2 - p1]], dtype=complex)
        return np.array([[p2 - p3, -p1 * (p2 - p3)], [p2 - p1, -p3 * (p2 - p1)]], dtype=complex)

    s = to_standard(*src)
    t = to_standard(*dst)
    t_inv = np.array([[t[1, 1], -t[0, 1]], [-t[1, 0], t[0, 0]]])
    p = t_inv @ s
    return MobiusMap(p[0, 0], p[0, 1], p[1, 0], p[1, 1])


def mobius_equal(m1: MobiusMap, m2: MobiusMap, tol: float = 1e-12) -> bool:
    """Projective equality of coefficient matrices (equal up to a complex scalar)."""
    x = m1.matrix.ravel()
    y = m2.matrix.ravel()
    lam = np.vdot(x, y) / np.vdot(x, x)
    return bool(np.linalg.norm(y - lam * x) <= tol * np.linalg.norm(y))


def boundary_maps(domain: CircularDomain) -> list[MobiusMap]:
    """[f_0, f_1, ..., f_n]: f_0 = (z - a_0)/r_0 and f_i = r_i/(z - a_i).

    Each f_i sends circle C_i onto the unit circle and G into the unit disk.
    """
    o = domain.outer
    maps = [MobiusMap(1, -o.center, 0, o.radius)]
    maps += [MobiusMap(0, c.radius, 1, -c.center) for c in domain.inner]
    return maps


@dataclass(frozen=True)
class CarlesonSquare:
    boundary_index: int
    depth: float
    anchor: float

    def __post_init__(self):
        if not (0 < self.depth <= 1):
            raise ValueError(f"square depth must lie in (0, 1], got {self.depth}")
        if self.boundary_index < 0:
            raise ValueError("boundary index must be non-negative")
        object.__setattr__(self, "anchor", float(self.anchor) % TWO_PI)


def disk_square_mask(w, depth: float, anchor: float):
    """Elementwise membership of disk point(s) ``w`` in the square (depth, anchor)."""
    w = np.asarray(w, dtype=complex)
    r = np.abs(w)
    radial = (r >= 1.0 - depth) & (r < 1.0)
    offset = np.mod(np.angle(w) - anchor, TWO_PI)
    # the origin carries angle t0 by convention
    offset = np.where(r == 0, 0.0, offset)
    return radial & (offset < depth)


def square_contains(domain: CircularDomain, square: CarlesonSquare, z) -> bool:
    f = boundary_maps(domain)[square.boundary_index]
    return bool(disk_square_mask(f(z), square.depth, square.anchor))


def square_region_mask(domain: CircularDomain, square: CarlesonSquare, z):
    """Membership in the square computed in G's own coordinates, without the boundary map.

    On the outer circle the square is a polar sector of the ring
    r0 (1-h) <= |z - a0| < r0. On inner circle i it is a sector of the ring
    r_i < |z - a_i| <= r_i / (1-h), with angles running clockwise because
    r_i / (z - a_i) reverses orientation.
    """
    z = np.asarray(z, dtype=complex)
    c = domain.circles[square.boundary_index]
    h, t0 = square.depth, square.anchor
    rho = np.abs(z - c.center)
    arg = np.angle(z - c.center)
    if square.boundary_index == 0:
        radial = (rho >= c.radius * (1 - h)) & (rho < c.radius)
    else:
        far = c.radius / (1 - h) if h < 1 else np.inf
        radial = (rho > c.radius) & (rho <= far)
        arg = -arg
    offset = np.where(rho == 0, 0.0, np.mod(arg - t0, TWO_PI))
    return radial & (offset < h)


def admissible_depth(domain: CircularDomain, i: int) -> float:
    """Largest depth h* <= 1 for which every square on component i stays in G.

    Uses the annulus bound: the union of all squares of depth h on component
    i is an annulus around circle i, which must avoid every other boundary
    circle. The bound does not depend on the anchor angle.
    """
    circles = domain.circles
    if not 0 <= i < len(circles):
        raise IndexError(f"boundary index {i} out of range")
    a0, r0 = domain.outer.center, domain.outer.radius
    h = 1.0
    if i == 0:
        # {r0 (1-h) <= |z - a0| < r0} must clear every inner disk
        for c in domain.inner:
            h = min(h, 1.0 - (abs(c.center - a0) + c.radius) / r0)
        return h
    ci = circles[i]
    # {r_i < |z - a_i| <= r_i/(1-h)} must stay inside the outer disk ...
    h = min(h, 1.0 - ci.radius / (r0 - abs(ci.center - a0)))
    # ... and clear every other inner disk
    for j, c in enumerate(domain.inner, start=1):
        if j != i:
            h = min(h, 1.0 - ci.radius / (abs(ci.center - c.center) - c.radius))
    return h


def check_admissible(domain: CircularDomain, square: CarlesonSquare) -> None:
    cap = admissible_depth(domain, square.boundary_index)
    if square.depth > cap * (1 + 1e-12):
        raise ValueError(
            f"square depth {square.depth} exceeds admissible depth {cap} on component {square.boundary_index}"
        )


def square_arclength(domain: CircularDomain, square: CarlesonSquare) -> float:
    """Arclength of the square's trace on boundary circle i, i.e. r_i * h."""
    check_admissible(domain, square)
    return domain.circles[square.boundary_index].radius * square.depth
