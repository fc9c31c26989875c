from __future__ import annotations

import numpy as np
import pytest

from carleson.boxes import box_ratio_disk, trend_analysis
from carleson.conformal import (
    Composition,
    PresentedDomain,
    QuadPoly,
    as_mobius,
    compose,
    hull_riemann_maps,
    invert,
    push_to_presented,
    pushforward_measure,
    univalence_audit,
    univalence_audit_map,
)
from carleson.corpus import approach_family, ring_family
from carleson.errors import AtomOutsideDomain, InvalidDomain
from carleson.geometry import TWO_PI, Circle, CircularDomain, MobiusMap, boundary_maps, mobius_equal
from carleson.measures import AtomicMeasure

DISK = CircularDomain.disk()
AUTO = MobiusMap(1, -0.3, -0.3, 1)  # (z - 0.3) / (1 - 0.3 z)


class Square:
    """z -> z^2, a non-univalent chart for the audit."""

    def __call__(self, z):
        return np.asarray(z) ** 2

    def derivative(self, z):
        return 2 * np.asarray(z)


def random_disk_points(n, seed, rmax=0.98):
    rng = np.random.default_rng(seed)
    return rmax * np.sqrt(rng.random(n)) * np.exp(1j * rng.uniform(0, TWO_PI, n))


class TestMaps:
    def test_quadpoly_values(self):
        q = QuadPoly(0.3)
        assert q(1) == pytest.approx(1.3)
        assert q.derivative(0) == 1

    def test_quadpoly_needs_small_beta(self):
        with pytest.raises(InvalidDomain):
            QuadPoly(0.5)

    def test_chain_rule_against_finite_differences(self):
        m = Composition((QuadPoly(0.2 - 0.1j), AUTO, QuadPoly(0.4j)))
        h = 1e-6
        for z in random_disk_points(20, 1, 0.9):
            fd = (m(z + h) - m(z - h)) / (2 * h)
            assert abs(fd - m.derivative(z)) <= 1e-6 * abs(m.derivative(z))

    def test_compose_collapses_mobius_factors(self):
        m = compose(AUTO, MobiusMap(2, 0, 0, 1))
        assert isinstance(m, MobiusMap)
        assert m(0.5) == pytest.approx(2 * AUTO(0.5))
        assert as_mobius(Composition((AUTO, AUTO))) is not None
        assert as_mobius(Composition((AUTO, QuadPoly(0.1)))) is None


class TestInvert:
    def test_mobius_exact(self):
        (f0,) = boundary_maps(CircularDomain.disk(0.5j, 2))
        z = 0.3 + 0.7j
        assert abs(invert(f0, f0(z)) - z) < 1e-15

    def test_quadpoly_known_preimage(self):
        assert abs(invert(QuadPoly(0.3), 1.3) - 1) < 1e-12

    def test_roundtrip_on_random_points(self):
        m = Composition((QuadPoly(0.3), AUTO, QuadPoly(-0.2j)))
        for z in random_disk_points(100, 2):
            w = m(z)
            back = invert(m, w)
            assert abs(m(back) - w) < 1e-10
            assert abs(back - z) < 1e-9


class TestPresented:
    def test_identity_chart_keeps_measure(self):
        P = PresentedDomain.circular(DISK)
        mu = AtomicMeasure([0.2, 0.5j], [1, 2])
        assert np.array_equal(pushforward_measure(P, mu).points, mu.points)

    def test_mobius_chart_pullback(self):
        P = PresentedDomain(DISK, AUTO)
        nu = pushforward_measure(P, AtomicMeasure([0j], [1.0]))
        assert nu.points[0] == pytest.approx(0.3)
        assert nu.weights[0] == 1.0

    def test_roundtrip(self):
        P = PresentedDomain(DISK, Composition((QuadPoly(0.3), AUTO)))
        mu = AtomicMeasure(random_disk_points(50, 3), np.linspace(0.1, 1, 50))
        back = pushforward_measure(P, push_to_presented(P, mu))
        assert np.max(np.abs(back.points - mu.points)) < 1e-10

    def test_atom_outside_image_rejected(self):
        P = PresentedDomain(DISK, QuadPoly(0.3))
        with pytest.raises(AtomOutsideDomain):
            pushforward_measure(P, AtomicMeasure([2.0], [1.0]))

    def test_pole_in_closure_rejected(self):
        with pytest.raises(InvalidDomain):
            PresentedDomain(DISK, MobiusMap(0, 1, 1, -0.5))

    def test_contains(self):
        P = PresentedDomain(DISK, QuadPoly(0.3))
        # the image meets the real axis in (-0.7, 1.3)
        assert P.contains(1.2) and P.contains(-0.65)
        assert not P.contains(1.31)
        assert not P.contains(-0.75)


class TestAudit:
    def test_quadpoly_passes(self):
        rep = univalence_audit(PresentedDomain(DISK, QuadPoly(0.3)), 512)
        assert rep.passed and rep.margin > 0.1

    def test_near_critical_quadpoly_small_margin(self):
        rep = univalence_audit_map(DISK, QuadPoly(0.49), 512)
        assert rep.passed and 0 < rep.margin < 0.05

    def test_square_map_fails(self):
        assert not univalence_audit_map(DISK, Square(), 512).passed
        with pytest.raises(InvalidDomain):
            PresentedDomain(DISK, Square())

    def test_mesh_minimum(self):
        with pytest.raises(ValueError):
            univalence_audit_map(DISK, QuadPoly(0.3), 32)


class TestHullMaps:
    def test_annulus(self):
        g = hull_riemann_maps(CircularDomain.annulus(0.25))
        assert mobius_equal(g[0], MobiusMap.identity())
        assert mobius_equal(g[1], MobiusMap(0, 0.25, 1, 0))

    def test_disk(self):
        (g,) = hull_riemann_maps(DISK)
        assert mobius_equal(g, MobiusMap.identity())

    def test_equal_to_boundary_maps(self):
        dom = CircularDomain(Circle(1j, 1.5), (Circle(1.4j, 0.2), Circle(0.5 + 0.6j, 0.25)))
        for g, f in zip(hull_riemann_maps(dom), boundary_maps(dom)):
            assert mobius_equal(g, f, 1e-12)

    def test_outer_normalisation(self):
        (g,) = hull_riemann_maps(CircularDomain.disk(2 - 1j, 3))
        assert abs(g(2 - 1j)) < 1e-15
        d = g.derivative(2 - 1j)
        assert d.real > 0 and abs(d.imag) < 1e-15


class TestChartedTrends:
    def _families(self):
        return [approach_family(DISK, 0, 1.0, 0.5, range(3, 9)), ring_family(range(3, 7))]

    def test_two_step_presentation_preserves_classification(self):
        # W = disk, V = QuadPoly image, G = automorphism image of V
        P1 = PresentedDomain(DISK, QuadPoly(0.3))
        P2 = PresentedDomain(DISK, Composition((QuadPoly(0.3), AUTO)))
        for fam in self._families():
            ref = trend_analysis(fam).classification
            on_g = [push_to_presented(P2, mu) for mu in fam]
            back_to_v = [push_to_presented(P1, pushforward_measure(P2, nu)) for nu in on_g]
            back_to_w = [pushforward_measure(P1, nu) for nu in back_to_v]
            assert trend_analysis(back_to_w).classification == ref
            assert all(abs(box_ratio_disk(a).kappa - box_ratio_disk(b).kappa) < 1e-6 * box_ratio_disk(a).kappa
                       for a, b in zip(fam, back_to_w))
