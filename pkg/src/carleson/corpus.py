"""Seeded measure corpora and measure families used by the batteries and tests."""
from __future__ import annotations

import numpy as np

from .geometry import TWO_PI, CircularDomain
from .measures import AtomicMeasure


def random_disk_measure(rng: np.random.Generator, max_atoms: int = 10) -> AtomicMeasure:
    """Up to ``max_atoms`` atoms in the unit disk, half of them crowding the boundary."""
    n = int(rng.integers(1, max_atoms + 1))
    gap = np.where(rng.random(n) < 0.5, rng.random(n), 10.0 ** rng.uniform(-4, -1, n))
    r = 1.0 - gap * (1 - 1e-9)
    t = rng.uniform(0, TWO_PI, n)
    # occasional clusters make angular constraints bind
    if n > 2 and rng.random() < 0.5:
        t[: n // 2] = t[0] + rng.uniform(0, 0.05, n // 2)
    return AtomicMeasure(r * np.exp(1j * t), rng.uniform(0.01, 1.0, n))


def random_domain_measure(rng: np.random.Generator, domain: CircularDomain, n: int = 20,
                          near: float = 0.2) -> AtomicMeasure:
    """Atoms in G, each placed within ``near`` (relative) of a random boundary circle."""
    pts = []
    while len(pts) < n:
        i = int(rng.integers(domain.connectivity))
        c = domain.circles[i]
        d = c.radius * near * rng.random()
        rho = c.radius - d if i == 0 else c.radius + d
        z = c.center + rho * np.exp(1j * rng.uniform(0, TWO_PI))
        if domain.contains(z):
            pts.append(z)
    return AtomicMeasure(np.array(pts), rng.uniform(0.01, 1.0, n))


def non_carleson(k: int) -> AtomicMeasure:
    """Mass 2^{-k/2} at 1 - 2^{-k}: box ratio exactly 2^{k/2}."""
    return AtomicMeasure([1.0 - 2.0**-k], [2.0 ** (-k / 2)])


def approach_family(domain: CircularDomain, i: int, angle: float, exponent: float,
                    ks=range(4, 11)) -> list[AtomicMeasure]:
    """Single atoms at relative distance 2^{-k} from circle i with mass 2^{-exponent k}.

    The box ratio grows like 2^{(1 - exponent) k}: divergent for exponent < 1,
    bounded for exponent >= 1.
    """
    c = domain.circles[i]
    fam = []
    for k in ks:
        d = 2.0**-k
        rho = c.radius * (1 - d) if i == 0 else c.radius * (1 + d)
        fam.append(AtomicMeasure([c.center + rho * np.exp(1j * angle)], [2.0 ** (-exponent * k)]))
    return fam


def ring_family(k_values=range(3, 9), radius_gap: float = 1.0, mass: float = 1.0) -> list[AtomicMeasure]:
    """2^k equally spaced atoms at radius 1 - radius_gap 2^{-k}, mass ``mass`` times arclength.

    A discretised multiple of arclength on rings approaching the circle, so
    the box ratio stays bounded.
    """
    fam = []
    for k in k_values:
        n = 2**k
        t = TWO_PI * np.arange(n) / n
        fam.append(AtomicMeasure((1 - radius_gap * 2.0**-k) * np.exp(1j * t), np.full(n, mass * TWO_PI / n)))
    return fam
