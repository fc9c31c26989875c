from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.stats import spearmanr

from carleson.boxes import box_ratio_disk
from carleson.conformal import PresentedDomain, QuadPoly, push_to_presented
from carleson.corpus import non_carleson, random_disk_measure, random_domain_measure
from carleson.errors import PoleTooCloseToBoundary
from carleson.geometry import CircularDomain
from carleson.measures import AtomicMeasure, scale
from carleson.norms import (
    POLE_MARGIN,
    RationalFunction,
    estimate_constant,
    family_ratios,
    lq_norm_boundary,
    lq_norm_measure,
    test_family as build_family,
)
from carleson.trends import fit_trend

DISK = CircularDomain.disk()
ANNULUS = CircularDomain.annulus(0.25)


def one(z):
    return np.ones_like(np.asarray(z, dtype=complex))


class TestMeasureNorms:
    def test_constant_function(self):
        mu = AtomicMeasure([0.1, 0.2j], [1.5, 2.5])
        assert lq_norm_measure(one, mu, 3) == pytest.approx(4.0 ** (1 / 3), rel=1e-15)

    def test_examples(self):
        assert lq_norm_measure(lambda z: z, AtomicMeasure([0.5], [1.0]), 2) == 0.5
        assert lq_norm_measure(lambda z: z**2, AtomicMeasure([0.5, -0.5], [1.0, 1.0]), 1) == 0.5

    def test_q_below_one_rejected(self):
        with pytest.raises(ValueError):
            lq_norm_measure(one, AtomicMeasure([0.5], [1.0]), 0.5)


class TestBoundaryNorms:
    @pytest.mark.parametrize("k", [0, 1, 5, 8])
    def test_monomials(self, k):
        assert lq_norm_boundary(lambda z: z**k, DISK, 2) == pytest.approx(1.0, abs=1e-12)

    def test_parseval(self):
        f = RationalFunction(-2.0, (), (2.0,))  # 1 / (1 - z/2)
        assert f(0) == 1
        assert lq_norm_boundary(f, DISK, 2) == pytest.approx(math.sqrt(4 / 3), rel=1e-12)

    def test_constant(self):
        assert lq_norm_boundary(lambda z: 3.0 * one(z), DISK, 1.5) == pytest.approx(3.0, rel=1e-12)
        assert lq_norm_boundary(lambda z: 3.0 * one(z), ANNULUS, 2, walks=20_000) == pytest.approx(3.0, rel=1e-12)

    def test_pole_too_close(self):
        f = RationalFunction(1.0, (), (1 + 1e-9,))
        with pytest.raises(PoleTooCloseToBoundary):
            lq_norm_boundary(f, DISK, 2)

    def test_chart_changes_integrand_only(self):
        P = PresentedDomain(DISK, QuadPoly(0.3))
        # f(w) = w on G pulls back to z + 0.3 z^2, whose squared H2 norm is 1 + 0.09
        assert lq_norm_boundary(lambda w: w, P, 2) == pytest.approx(math.sqrt(1.09), rel=1e-12)


class TestFamily:
    def test_level_one_disk(self):
        fam = build_family(DISK, 1)
        labels = [f.label for f in fam]
        assert "monomial k=0" in labels and "monomial k=1" in labels
        assert sum(lab.startswith("peak") for lab in labels) == 8

    def test_levels_are_nested(self):
        for dom in (DISK, ANNULUS):
            sizes = [len(build_family(dom, lv)) for lv in (1, 2, 3)]
            assert sizes[0] < sizes[1] < sizes[2]
            small = {f.label for f in build_family(dom, 2)}
            assert small <= {f.label for f in build_family(dom, 3)}

    def test_annulus_has_inner_pole_powers(self):
        fam = build_family(ANNULUS, 3)
        powers = [f for f in fam if f.label.startswith("pole power")]
        assert len(powers) == 8
        assert powers[1](0.5) == pytest.approx((0.25 / 0.5) ** 2)

    @pytest.mark.parametrize("dom", [DISK, ANNULUS])
    def test_poles_off_closure(self, dom):
        for f in build_family(dom, 3):
            for p in f.poles:
                assert dom.boundary_distance(p) <= -POLE_MARGIN

    def test_coefficient_view(self):
        f = RationalFunction(2.0, (1.0,), (3.0, 4.0))
        z = 0.3 + 0.1j
        assert np.polyval(f.numerator, z) / np.polyval(f.denominator, z) == pytest.approx(f(z))


class TestEstimate:
    @pytest.mark.parametrize("q", [1, 2, 4])
    def test_point_mass_at_center(self, q):
        est = estimate_constant(DISK, AtomicMeasure([0j], [1.0]), q)
        assert abs(est.c_hat - 1) < 1e-9

    def test_point_mass_near_boundary(self):
        # point evaluation at w in H2 has norm (1 - |w|^2)^{-1/2}; the kernel peak at w attains it
        est = estimate_constant(DISK, AtomicMeasure([0.9], [1.0]), 2)
        assert est.c_hat == pytest.approx(1 / math.sqrt(0.19), rel=1e-10)
        assert est.c_hat >= 1.9

    def test_scaling(self):
        mu = random_disk_measure(np.random.default_rng(1))
        a = estimate_constant(DISK, mu, 2).c_hat
        assert estimate_constant(DISK, scale(mu, 4), 2).c_hat == pytest.approx(2 * a, rel=1e-12)

    def test_level_monotone(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            mu = random_disk_measure(rng)
            vals = [estimate_constant(DISK, mu, 2, lv).c_hat for lv in (1, 2, 3)]
            assert vals[0] <= vals[1] <= vals[2]

    def test_at_least_constant_ratio(self):
        mu = random_disk_measure(np.random.default_rng(3))
        assert estimate_constant(DISK, mu, 2).c_hat >= math.sqrt(mu.weights.sum()) * (1 - 1e-12)

    def test_ratios_listed_in_family_order(self):
        mu = AtomicMeasure([0.5j], [1.0])
        fam, ratios, errs = family_ratios(DISK, mu, 2, 1)
        assert len(fam) == len(ratios) == len(errs)
        assert ratios[0] == pytest.approx(1.0)

    def test_empty_measure(self):
        assert estimate_constant(DISK, AtomicMeasure.empty(), 2).c_hat == 0.0

    def test_annulus_reports_density_error(self):
        mu = random_domain_measure(np.random.default_rng(4), ANNULUS, 5)
        est = estimate_constant(ANNULUS, mu, 2, 2, walks=20_000)
        assert est.c_hat > 0 and est.stderr > 0

    def test_presented_domain(self):
        P = PresentedDomain(DISK, QuadPoly(0.3))
        mu = AtomicMeasure([0.0], [1.0])
        # the chart fixes 0, and harmonic measure at 0 is the pushed arclength measure
        est = estimate_constant(P, push_to_presented(P, mu), 2, 2)
        assert est.c_hat == pytest.approx(1.0, abs=1e-9)


class TestEmbedding:
    def test_carleson_corpus_bounded(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            mu = random_disk_measure(rng)
            mu = scale(mu, 1 / box_ratio_disk(mu).kappa)
            assert estimate_constant(DISK, mu, 2, 3).c_hat <= 40

    def test_non_carleson_growth(self):
        c = [estimate_constant(DISK, non_carleson(k), 2, 3).c_hat for k in range(6, 13)]
        assert all(b / a >= 1.15 for a, b in zip(c, c[1:]))

    def test_exponent_robustness(self):
        rng = np.random.default_rng(6)
        corpus = [random_disk_measure(rng) for _ in range(20)]
        by_q = {q: [estimate_constant(DISK, mu, q, 2).c_hat for mu in corpus] for q in (1, 2, 4)}
        assert spearmanr(by_q[1], by_q[2]).statistic >= 0.9
        assert spearmanr(by_q[2], by_q[4]).statistic >= 0.9
        fams = {"divergent": [non_carleson(k) for k in range(4, 11)],
                "bounded": [AtomicMeasure([1 - 2.0**-k], [2.0**-k]) for k in range(4, 11)]}
        for expected, fam in fams.items():
            for q in (1, 2, 4):
                trend = fit_trend([estimate_constant(DISK, mu, q, 2).c_hat for mu in fam], power=q)
                assert trend.classification == expected
