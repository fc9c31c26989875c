"""Finite positive atomic measures.

Every measure is a finite list of (location, weight) atoms, so every integral
against it is a finite sum. Continuous measures enter only through
:func:`atomize_area`, which samples a weighted area measure with a scrambled
Sobol sequence.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy.stats import qmc

from .errors import AtomOutsideDomain, PoleHit, SpecError


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=complex).reshape(-1)
        w = np.array(self.weights, dtype=float).reshape(-1)
        if pts.shape != w.shape:
            raise SpecError("points and weights must have the same length")
        if not np.all(np.isfinite(pts.real) & np.isfinite(pts.imag)):
            raise SpecError("atom locations must be finite")
        if not np.all((w > 0) & np.isfinite(w)):
            raise SpecError("atom weights must be positive and finite")
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @classmethod
    def empty(cls) -> "AtomicMeasure":
        return cls(np.zeros(0, dtype=complex), np.zeros(0))

    @classmethod
    def from_atoms(cls, atoms: Iterable[tuple[complex, float]]) -> "AtomicMeasure":
        atoms = list(atoms)
        if not atoms:
            return cls.empty()
        pts, w = zip(*atoms)
        return cls(np.array(pts, dtype=complex), np.array(w, dtype=float))

    def __len__(self) -> int:
        return self.points.size

    def __iter__(self):
        return iter(zip(self.points.tolist(), self.weights.tolist()))

    def __repr__(self) -> str:
        return f"AtomicMeasure(n={len(self)}, mass={total_mass(self):.6g})"

    def integrate(self, f: Callable) -> float:
        if len(self) == 0:
            return 0.0
        return float(np.sum(self.weights * np.asarray(f(self.points))))

    def check_in(self, domain) -> "AtomicMeasure":
        """Raise AtomOutsideDomain unless every atom lies strictly inside ``domain``."""
        if len(self) and not np.all(domain.contains(self.points)):
            bad = self.points[~np.asarray(domain.contains(self.points))]
            raise AtomOutsideDomain(f"{bad.size} atom(s) outside the domain, first at {complex(bad[0])}")
        return self


def total_mass(mu: AtomicMeasure) -> float:
    return float(np.sum(mu.weights)) if len(mu) else 0.0


def pushforward(mu: AtomicMeasure, f: Callable) -> AtomicMeasure:
    """mu o f^{-1}: every atom moves to f(location) with its weight unchanged."""
    if len(mu) == 0:
        return mu
    moved = np.asarray(f(mu.points), dtype=complex)
    if not np.all(np.isfinite(moved)):
        raise PoleHit("an atom sits on a pole of the map")
    return AtomicMeasure(moved, mu.weights)


def restrict(mu: AtomicMeasure, predicate: Callable) -> AtomicMeasure:
    """Keep the atoms whose location satisfies ``predicate`` (vectorised)."""
    if len(mu) == 0:
        return mu
    keep = np.asarray(predicate(mu.points), dtype=bool)
    return AtomicMeasure(mu.points[keep], mu.weights[keep])


def measure_sum(measures: Iterable[AtomicMeasure]) -> AtomicMeasure:
    measures = [m for m in measures if len(m)]
    if not measures:
        return AtomicMeasure.empty()
    return AtomicMeasure(
        np.concatenate([m.points for m in measures]),
        np.concatenate([m.weights for m in measures]),
    )


def scale(mu: AtomicMeasure, c: float) -> AtomicMeasure:
    if not c > 0:
        raise ValueError(f"scale factor must be positive, got {c}")
    return AtomicMeasure(mu.points, mu.weights * c)


def atomize_area(domain, n: int, density: Callable | None = None, seed: int = 0) -> AtomicMeasure:
    """Quasi-Monte Carlo atomization of ``density(z) dA`` restricted to a circular domain.

    Uses a scrambled 2-D Sobol sequence on the bounding square of the outer
    disk; points outside G are dropped and each kept atom carries
    ``density * area(square) / n``.
    """
    m = int(np.ceil(np.log2(max(n, 2))))
    sampler = qmc.Sobol(d=2, scramble=True, seed=seed)
    u = sampler.random_base2(m)[:n]
    a0, r0 = domain.outer.center, domain.outer.radius
    z = (a0.real + r0 * (2 * u[:, 0] - 1)) + 1j * (a0.imag + r0 * (2 * u[:, 1] - 1))
    z = z[domain.contains(z)]
    cell = (2 * r0) ** 2 / n
    w = np.full(z.size, cell) if density is None else cell * np.asarray(density(z), dtype=float)
    keep = w > 0
    return AtomicMeasure(z[keep], w[keep])
