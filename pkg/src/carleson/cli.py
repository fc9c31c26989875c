"""Command-line front end.

Exit codes: 0 success, 1 suite failure, 2 invalid input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import sys
from pathlib import Path

from . import io
from .boxes import box_ratio_circular, box_ratio_disk
from .conformal import as_presented, pushforward_measure
from .errors import CarlesonError, EvaluationPointOnBoundary, EvaluationPointOutsideDomain, SpecError
from .geometry import CircularDomain
from .harmonic import HarmonicEstimate, harmonic_measure_disk, harmonic_measure_mc, uniform_partition
from .measures import AtomicMeasure, pushforward
from .norms import HIST_WALKS, estimate_constant
from .opensets import weighted_criterion
from .suite import BATTERIES, run_suite
from .trends import fit_trend


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _weights(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"weights must be comma-separated numbers: {text!r}") from None


def _q(text: str) -> float:
    q = float(text)
    if not q >= 1:
        raise argparse.ArgumentTypeError("q must be >= 1")
    return q


def _emit(args, payload: dict, rows: list[tuple[float, float]] | None = None) -> None:
    text = io.dumps(payload)
    if args.out is None:
        sys.stdout.write(text)
        return
    io.write_atomic(args.out, text)
    if rows is not None:
        buf = _io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "value"])
        writer.writerows(rows)
        io.write_atomic(Path(args.out).with_suffix(".csv"), buf.getvalue())


def _measures(args) -> list[AtomicMeasure]:
    return [io.load(p, io.measure_from_spec) for p in args.measure]


def _family_payload(reports: list[dict], values: list[float], power: float = 1.0) -> tuple[dict, list]:
    trend = fit_trend(values, power=power)
    rows = list(zip(trend.index, values))
    return {"reports": reports, "trend": trend.to_dict()}, rows


def cmd_box(args) -> int:
    domain = io.load(args.domain, io.domain_from_spec) if args.domain else None
    reports = []
    for mu in _measures(args):
        rep = box_ratio_disk(mu) if domain is None else box_ratio_circular(domain, mu)
        reports.append(rep)
    if len(reports) == 1:
        _emit(args, reports[0].to_dict())
    else:
        payload, rows = _family_payload([r.to_dict() for r in reports], [r.kappa for r in reports])
        _emit(args, payload, rows)
    return 0


def cmd_constant(args) -> int:
    domain = io.load(args.domain, io.presented_from_spec) if args.domain else as_presented(CircularDomain.disk())
    point = None if args.point is None else domain.preimage(args.point)
    ests = [estimate_constant(domain, mu, args.q, args.level, args.nodes, point, args.walks, args.seed)
            for mu in _measures(args)]
    if len(ests) == 1:
        _emit(args, ests[0].to_dict())
    else:
        payload, rows = _family_payload([e.to_dict() for e in ests], [e.c_hat for e in ests], args.q)
        _emit(args, payload, rows)
    return 0


def cmd_harmonic(args) -> int:
    domain = io.load(args.domain, io.presented_from_spec)
    base = domain.base
    z = base.default_evaluation_point() if args.point is None else domain.preimage(args.point)
    arcs = uniform_partition(base, args.arcs)
    if args.exact:
        if base.inner:
            raise SpecError("--exact needs a disk domain")
        c = base.outer
        u = (z - c.center) / c.radius
        probs = [harmonic_measure_disk(u, a.start, a.end) for a in arcs]
        est = HarmonicEstimate(probs, [0.0] * len(arcs), 0, z, arcs=arcs)
    else:
        est = harmonic_measure_mc(base, z, arcs, args.walks, args.seed, args.eps)
    _emit(args, est.to_dict())
    return 0


def cmd_pushforward(args) -> int:
    (mu,) = _measures(args)
    if args.map:
        f = io.load(args.map, io.map_from_spec)
        out = pushforward(mu, f)
    else:
        domain = io.load(args.domain, io.presented_from_spec)
        out = pushforward_measure(domain, mu)
    _emit(args, io.measure_to_spec(out))
    return 0


def cmd_openset(args) -> int:
    openset = io.load(args.openset, lambda obj: io.openset_from_spec(obj, args.weights))
    (mu,) = _measures(args)
    rep = weighted_criterion(openset, mu, args.q, args.level, args.nodes, args.walks, args.seed)
    _emit(args, rep.to_dict())
    return 0


def cmd_suite(args) -> int:
    tolerances = {}
    for item in args.tolerance:
        name, _, value = item.partition("=")
        if name not in BATTERIES or not value:
            raise SpecError(f"--tolerance expects NAME=VALUE with NAME in {sorted(BATTERIES)}")
        tolerances[name] = float(value)
    results = run_suite(tolerances, args.battery or None)
    for r in results:
        print(r.line(), file=sys.stderr if args.out is None else sys.stdout)
    _emit(args, {"passed": all(r.passed for r in results), "batteries": [r.to_dict() for r in results]})
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="carleson", description="Carleson measure diagnostics for circular domains.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, measures=True, many=False):
        sp.add_argument("--out", type=Path, help="write JSON here (CSV trend alongside for families)")
        if measures:
            sp.add_argument("--measure", action="append", required=True,
                            help="measure spec; repeat to analyse a family" if many else "measure spec")

    def numeric(sp):
        sp.add_argument("--q", type=_q, default=2.0)
        sp.add_argument("--level", type=int, choices=(1, 2, 3), default=3)
        sp.add_argument("--nodes", type=int, default=256)
        sp.add_argument("--walks", type=int, default=HIST_WALKS)
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("box", help="Carleson box ratio")
    sp.add_argument("--domain", help="circular domain spec (default: unit disk)")
    common(sp, many=True)
    sp.set_defaults(func=cmd_box)

    sp = sub.add_parser("constant", help="inequality constant over the test family")
    sp.add_argument("--domain", help="domain spec, optionally with a chart (default: unit disk)")
    sp.add_argument("--point", type=_complex, help="evaluation point of harmonic measure")
    common(sp, many=True)
    numeric(sp)
    sp.set_defaults(func=cmd_constant)

    sp = sub.add_parser("harmonic", help="harmonic measure of a uniform arc partition")
    sp.add_argument("--domain", required=True)
    sp.add_argument("--point", type=_complex)
    sp.add_argument("--arcs", type=int, default=8, help="arcs per boundary circle")
    sp.add_argument("--walks", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--eps", type=float, help="absolute stopping distance (default 1e-3 outer radius)")
    sp.add_argument("--exact", action="store_true", help="Poisson integral instead of walks (disk only)")
    common(sp, measures=False)
    sp.set_defaults(func=cmd_harmonic)

    sp = sub.add_parser("pushforward", help="move a measure through a map, or pull it back to a chart's base")
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--map", help="map spec")
    group.add_argument("--domain", help="presented domain spec whose chart is inverted")
    common(sp)
    sp.set_defaults(func=cmd_pushforward)

    sp = sub.add_parser("openset", help="per-component constants and the weighted criterion")
    sp.add_argument("--openset", required=True)
    sp.add_argument("--weights", type=_weights, help="comma-separated component weights")
    common(sp)
    numeric(sp)
    sp.set_defaults(func=cmd_openset)

    sp = sub.add_parser("suite", help="run the acceptance batteries")
    sp.add_argument("--battery", action="append", choices=sorted(BATTERIES))
    sp.add_argument("--tolerance", action="append", default=[], metavar="NAME=VALUE")
    common(sp, measures=False)
    sp.set_defaults(func=cmd_suite)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "measure", None) and args.command in ("pushforward", "openset") and len(args.measure) != 1:
        print(f"error: {args.command} takes exactly one --measure", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (SpecError, EvaluationPointOnBoundary, EvaluationPointOutsideDomain, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CarlesonError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
