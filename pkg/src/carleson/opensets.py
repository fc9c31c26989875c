"""Open sets with finitely many components.

Harmonic measure for the open set is the weighted sum of component harmonic
measures, weight 2^{-n} for the n-th component in the user-supplied order
(or any other positive weights summing to at most 1). Components must have
pairwise disjoint closures, which makes their harmonic measures mutually
singular.

For per-component constants c_n, the weighted criterion reports
C* = max_n c_n / weight_n, the least C with c_n <= C * weight_n for all n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .boxes import box_ratio_circular
from .conformal import as_presented, pushforward_measure
from .errors import AtomInNoComponent, InvalidDomain, InvalidWeights
from .harmonic import mutually_singular_check
from .measures import AtomicMeasure, restrict, total_mass
from .norms import HIST_WALKS, estimate_constant, family_ratios
from .trends import DIVERGENT, BOUNDED, Trend, fit_trend


@dataclass(frozen=True)
class OpenSetDomain:
    components: tuple
    weights: tuple = ()

    def __post_init__(self):
        comps = tuple(as_presented(c) for c in self.components)
        if not comps:
            raise InvalidDomain("an open set needs at least one component")
        object.__setattr__(self, "components", comps)
        w = tuple(float(x) for x in self.weights) or tuple(2.0 ** -(n + 1) for n in range(len(comps)))
        _check_weights(w, len(comps))
        object.__setattr__(self, "weights", w)
        cert = mutually_singular_check(comps)
        if not cert.singular:
            raise InvalidDomain(f"component closures intersect: pairs {cert.touching_pairs}")
        for i, a in enumerate(comps):
            for j, b in enumerate(comps):
                if i != j and a.contains(b.evaluation_point()):
                    raise InvalidDomain(f"component {j} lies inside component {i}")

    def __len__(self) -> int:
        return len(self.components)

    def locate(self, z) -> np.ndarray:
        """Component index of every point, -1 when in none."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.full(z.shape, -1)
        for n, c in enumerate(self.components):
            out[(out < 0) & np.asarray(c.contains(z), dtype=bool)] = n
        return out


def _check_weights(w: Sequence[float], n: int) -> None:
    if len(w) != n:
        raise InvalidWeights(f"expected {n} weights, got {len(w)}")
    if not all(x > 0 and math.isfinite(x) for x in w):
        raise InvalidWeights("weights must be positive")
    if sum(w) > 1 + 1e-12:
        raise InvalidWeights(f"weights sum to {sum(w)} > 1")


def with_weights(openset: OpenSetDomain, b: Sequence[float]) -> OpenSetDomain:
    """The same open set with component weights replaced by ``b``."""
    b = tuple(float(x) for x in b)
    _check_weights(b, len(openset))
    return replace(openset, weights=b)


def split_measure(openset: OpenSetDomain, mu: AtomicMeasure) -> list[AtomicMeasure]:
    where = openset.locate(mu.points) if len(mu) else np.zeros(0, int)
    if np.any(where < 0):
        raise AtomInNoComponent(f"{int(np.sum(where < 0))} atom(s) lie in no component")
    return [restrict(mu, lambda z, n=n: openset.locate(z) == n) for n in range(len(openset))]


@dataclass(frozen=True)
class ComponentReport:
    q: float
    kappa: list[float]
    c_hat: list[float]
    stderr: list[float]
    weights: list[float]
    c_star: float
    composite: float | None = None
    composite_stderr: float = 0.0
    verdict: str = ""

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "components": [
                {"index": n, "kappa": k, "c_hat": c, "stderr": s, "weight": w}
                for n, (k, c, s, w) in enumerate(zip(self.kappa, self.c_hat, self.stderr, self.weights))
            ],
            "c_star": self.c_star,
            "composite_c_hat": self.composite,
            "composite_stderr": self.composite_stderr,
            "verdict": self.verdict,
        }


def component_constants(openset: OpenSetDomain, mu: AtomicMeasure, q: float = 2.0, level: int = 3,
                        nodes: int = 256, walks: int = HIST_WALKS, seed: int = 0) -> ComponentReport:
    """Per-component box ratio and inequality constant against the component's own omega_n."""
    parts = split_measure(openset, mu)
    kappas, chats, errs = [], [], []
    for comp, part in zip(openset.components, parts):
        est = estimate_constant(comp, part, q, level, nodes, walks=walks, seed=seed)
        chats.append(est.c_hat)
        errs.append(est.stderr)
        base_mu = part if comp.is_identity else pushforward_measure(comp, part)
        kappas.append(box_ratio_circular(comp.base, base_mu).kappa)
    c_star = max(c / w for c, w in zip(chats, openset.weights))
    return ComponentReport(float(q), kappas, chats, errs, list(openset.weights), c_star)


def composite_constant(openset: OpenSetDomain, mu: AtomicMeasure, q: float = 2.0, level: int = 3,
                       nodes: int = 256, walks: int = HIST_WALKS, seed: int = 0) -> tuple[float, float]:
    """Constant of mu against the weighted omega over the composite family: (c_hat, stderr).

    The family holds every component's test functions extended by zero to the
    other components (analytic on the union because the closures are
    disjoint) plus the global constant. Restricted to component n the
    weighted omega is weight_n * omega_n, so a member supported on n has
    ratio c / weight_n^{1/q}.
    """
    parts = split_measure(openset, mu)
    best, best_se = 0.0, 0.0
    for comp, part, w in zip(openset.components, parts, openset.weights):
        if len(part) == 0:
            continue
        _, ratios, errs = family_ratios(comp, part, q, level, nodes, walks=walks, seed=seed)
        k = int(np.argmax(ratios))
        scale = w ** (-1.0 / q)
        if ratios[k] * scale > best:
            best, best_se = ratios[k] * scale, errs[k] * scale
    const = (total_mass(mu) / sum(openset.weights)) ** (1.0 / q)
    if const > best:
        best, best_se = const, 0.0
    return float(best), float(best_se)


def weighted_criterion(openset: OpenSetDomain, mu: AtomicMeasure, q: float = 2.0, level: int = 3,
                       nodes: int = 256, walks: int = HIST_WALKS, seed: int = 0,
                       sigmas: float = 3.0) -> ComponentReport:
    """C* from the per-component constants, checked against the composite constant."""
    rep = component_constants(openset, mu, q, level, nodes, walks, seed)
    comp, comp_se = composite_constant(openset, mu, q, level, nodes, walks, seed)
    slack = sigmas * (comp_se + max((e / w for e, w in zip(rep.stderr, openset.weights)), default=0.0))
    ok = comp <= rep.c_star * (1 + 1e-9) + slack
    return replace(rep, composite=comp, composite_stderr=comp_se, verdict="PASS" if ok else "FAIL")


def openset_trend(openset: OpenSetDomain, family, q: float = 2.0, level: int = 2,
                  nodes: int = 256, walks: int = HIST_WALKS, seed: int = 0) -> tuple[str, list[Trend]]:
    """Per-component c_hat trends over a measure family; bounded only if every component is."""
    per = [[] for _ in openset.components]
    for mu in family:
        rep = component_constants(openset, mu, q, level, nodes, walks, seed)
        for n, c in enumerate(rep.c_hat):
            per[n].append(c)
    trends = [fit_trend(v, power=q) for v in per]
    verdict = BOUNDED if all(t.classification == BOUNDED for t in trends) else DIVERGENT
    return verdict, trends
