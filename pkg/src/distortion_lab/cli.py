"""Command-line front end.

Subcommands: ``gen`` (instance families), ``eval`` (cost tables), ``run``
(mechanism distortion reports), ``tournament`` (bias tournaments),
``verify`` (upper-bound suites), and ``search`` (randomized worst-case
search).  Every run is deterministic given its full flag set; rationals are
printed exactly as ``p/q`` unless ``--float`` asks for a decimal column.

Exit codes: 0 pass, 1 bound violation, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import audit, generators
from .errors import DistortionLabError
from .mechanisms import MechanismSpec, Scope, distortion
from .model import Ballot
from .objectives import ALL_OBJECTIVES, Objective, cost
from .rules import RULES
from .serialize import canonical_json, dump_instance, load_instance
from .tournament import build_bias_tournament

FAMILIES = (
    "randdet-xmax",
    "randdet-maxavg",
    "randdet-avgavg",
    "randrand-maxx",
    "cyclic-avgmax",
    "randrand-avgavg",
    "detdet-maxavg",
    "euclid-randrand",
    "euclid-randdet",
    "random",
)


def _cname(c: int) -> str:
    return f"c{c + 1}"


def _fmt(value) -> str:
    if isinstance(value, Fraction):
        return str(value)
    return repr(float(value))


def _default_workers() -> int:
    return max(1, int(os.environ.get("DISTORTION_LAB_WORKERS", "1")))


def _parse_sigma(text: str | None, m: int) -> Ballot | None:
    if text is None or text == "natural":
        return None
    if text.startswith("random:"):
        rng = random.Random(f"sigma:{text.removeprefix('random:')}")
        sigma = list(range(m))
        rng.shuffle(sigma)
        return tuple(sigma)
    try:
        sigma = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise DistortionLabError(f"cannot parse sigma {text!r}") from None
    if tuple(sorted(sigma)) != tuple(range(m)):
        raise DistortionLabError(f"sigma {text!r} is not a permutation of 0..{m - 1}")
    return sigma


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _claims_dict(gi: generators.GeneratedInstance, files: list[str], extra: dict | None = None) -> dict:
    claims = {
        "family": gi.family,
        "params": dict(sorted(gi.params.items())),
        "objectives": [obj.value for obj in gi.objectives],
        "claimed_optimal": _cname(gi.claimed_optimal),
        "claimed_optimal_cost": _fmt(gi.claimed_optimal_cost),
        "claimed_ratio": _fmt(gi.claimed_ratio),
        "forced_representatives": (
            [_cname(r) for r in gi.forced_representatives]
            if gi.forced_representatives is not None
            else None
        ),
        "in_rule": gi.in_rule,
        "case": gi.case,
        "files": files,
    }
    if extra:
        claims.update(extra)
    return claims


def cmd_gen(args) -> int:
    out = Path(args.out)
    sigma_m = {
        "randdet-xmax": 0, "randdet-maxavg": 4, "randdet-avgavg": 2 * (args.k or 0),
        "randrand-maxx": 0, "cyclic-avgmax": 0, "randrand-avgavg": (args.k or 0) + 1,
        "detdet-maxavg": 4, "euclid-randrand": 0, "euclid-randdet": 2 * (args.m or 0),
        "random": 0,
    }[args.family]
    sigma = _parse_sigma(args.sigma, sigma_m) if sigma_m else None
    extra: dict = {}
    files: list[str] = []

    def need(name: str, value):
        if value is None:
            raise DistortionLabError(f"--{name} is required for family {args.family}")
        return value

    if args.family == "randdet-xmax":
        gi = generators.gen_randdet_xmax()
    elif args.family == "randdet-maxavg":
        gi = generators.gen_randdet_maxavg(args.in_rule, sigma)
    elif args.family == "randdet-avgavg":
        gi = generators.gen_randdet_avgavg(need("k", args.k), args.in_rule, sigma)
    elif args.family == "randrand-maxx":
        gi = generators.gen_randrand_maxx()
    elif args.family == "randrand-avgavg":
        gi = generators.gen_randrand_avgavg(need("k", args.k))
    elif args.family == "euclid-randrand":
        gi = generators.gen_euclidean_randrand(need("t", args.t))
    elif args.family == "euclid-randdet":
        gi = generators.gen_euclidean_randdet(need("m", args.m), args.in_rule, sigma)
    elif args.family == "detdet-maxavg":
        gi, stage_two = generators.gen_detdet_maxavg(args.in_rule, sigma)
        extra["stage_two_profiles"] = [[list(ballot) for ballot in variant] for variant in stage_two]
    elif args.family == "cyclic-avgmax":
        family = generators.gen_cyclic_avgmax(need("m", args.m))
        for i, member in enumerate(family):
            member_path = out.with_name(f"{out.stem}-{i + 1:02d}{out.suffix or '.json'}")
            dump_instance(member.instance, member_path)
            files.append(member_path.name)
        claims = _claims_dict(family[0], files, {"members": len(family)})
        claims_path = out.with_name(out.stem + ".claims.json")
        claims_path.write_text(canonical_json(claims))
        print(f"wrote {len(files)} instances and {claims_path}")
        return 0
    else:  # random
        instance = generators.gen_random(
            need("n", args.n), need("m", args.m), need("k", args.k),
            kind=args.kind, dimension=args.dim, seed=args.seed,
        )
        dump_instance(instance, out)
        claims_path = out.with_name(out.stem + ".claims.json")
        claims_path.write_text(canonical_json({
            "family": "random",
            "params": {"n": args.n, "m": args.m, "k": args.k, "kind": args.kind,
                       "dimension": args.dim, "seed": args.seed},
            "files": [out.name],
        }))
        print(f"wrote {out} and {claims_path}")
        return 0

    dump_instance(gi.instance, out)
    files.append(out.name)
    for i, variant in enumerate(gi.variants[1:], start=1):
        variant_path = out.with_name(f"{out.stem}-variant{i}{out.suffix or '.json'}")
        dump_instance(variant, variant_path)
        files.append(variant_path.name)
    claims_path = out.with_name(out.stem + ".claims.json")
    claims_path.write_text(canonical_json(_claims_dict(gi, files, extra)))
    print(f"wrote {', '.join(files)} and {claims_path.name} in {out.parent}")
    return 0


def cmd_eval(args) -> int:
    instance = load_instance(args.instance)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["candidate"] + [obj.value for obj in ALL_OBJECTIVES]
    if args.float:
        header += [f"{obj.value}_float" for obj in ALL_OBJECTIVES]
    writer.writerow(header)
    for c in range(instance.m):
        values = [cost(obj, instance, c) for obj in ALL_OBJECTIVES]
        row = [_cname(c)] + [_fmt(v) for v in values]
        if args.float:
            row += [repr(float(v)) for v in values]
        writer.writerow(row)
    _write_text(args.out, buf.getvalue())
    return 0


def cmd_run(args) -> int:
    instance = load_instance(args.instance)
    spec = MechanismSpec(args.in_rule, args.over_rule, Scope.parse(args.scope))
    report = distortion(instance, spec, Objective.parse(args.objective))
    _write_text(args.out, canonical_json(report.to_dict()))
    return 0


def cmd_tournament(args) -> int:
    sigma = _parse_sigma(args.sigma, args.m) or tuple(range(args.m))
    tour = build_bias_tournament(args.rule, range(args.m), sigma)
    winner, degree = tour.max_indegree_candidate()
    payload = {
        "rule": args.rule,
        "m": args.m,
        "sigma": list(sigma),
        "edges": sorted([_cname(u), _cname(w)] for u, w in tour.edges),
        "max_in_degree": {"candidate": _cname(winner), "degree": degree},
    }
    _write_text(args.out, canonical_json(payload))
    if args.dot:
        lines = ["digraph bias_tournament {"]
        lines += [f"  {_cname(u)} -> {_cname(w)};" for u, w in sorted(tour.edges)]
        lines.append("}")
        Path(args.dot).write_text("\n".join(lines) + "\n")
    return 0


def _suite_from_args(args) -> audit.SuiteParams:
    kinds = tuple(args.kinds.split(",")) if args.kinds else generators.RANDOM_KINDS
    return audit.SuiteParams(
        count=args.count, seed=args.seed,
        max_n=args.max_n, max_m=args.max_m, max_k=args.max_k, kinds=kinds,
    )


def cmd_verify(args) -> int:
    if args.bound == "all":
        bounds = list(audit.BUILTIN_BOUNDS.values())
    else:
        if args.bound not in audit.BUILTIN_BOUNDS:
            raise DistortionLabError(
                f"unknown bound {args.bound!r}; known: {', '.join(audit.BUILTIN_BOUNDS)} or 'all'"
            )
        bounds = [audit.BUILTIN_BOUNDS[args.bound]]
    reports = audit.verify_suite(bounds, _suite_from_args(args), workers=args.workers)

    if args.csv:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["bound", "index", "instance", "objective", "ratio", "bound_value", "margin", "violated"])
        for name, report in reports.items():
            for row in report.rows:
                writer.writerow([
                    name, row.index, row.digest, row.objective.value,
                    _fmt(row.ratio), _fmt(row.bound), _fmt(row.margin), int(row.violated),
                ])
        Path(args.csv).write_text(buf.getvalue())
    if args.json:
        summary = {"ok": all(r.ok for r in reports.values()),
                   "bounds": [reports[name].summary() for name in reports]}
        Path(args.json).write_text(canonical_json(summary))
    if args.plot:
        from .plots import render_verify_figure

        base = Path(args.plot)
        if len(reports) == 1:
            render_verify_figure(next(iter(reports.values())), base)
        else:
            for name, report in reports.items():
                render_verify_figure(report, base.with_name(f"{base.stem}-{name}{base.suffix or '.png'}"))

    ok = True
    for name, report in reports.items():
        status = "ok" if report.ok else f"{len(report.violations)} VIOLATIONS"
        print(f"{name}: {report.checked} instances, max ratio {_fmt(report.max_ratio)}, {status}")
        ok = ok and report.ok
    return 0 if ok else 1


def cmd_search(args) -> int:
    spec = MechanismSpec(args.in_rule, args.over_rule, Scope.parse(args.scope))
    report = audit.search_worst_case(
        spec, Objective.parse(args.objective), args.iterations, args.seed,
        sampler=args.sampler, max_n=args.max_n, max_m=args.max_m, max_k=args.max_k,
        workers=args.workers,
    )
    if args.csv:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "instance", "ratio"])
        for index, digest, ratio in report.rows:
            writer.writerow([index, digest, _fmt(ratio)])
        Path(args.csv).write_text(buf.getvalue())
    if args.out:
        payload = report.summary()
        payload["witness"] = report.witness
        Path(args.out).write_text(canonical_json(payload))
    if args.plot:
        from .plots import render_search_figure

        render_search_figure(report, args.plot)
    print(f"best ratio {_fmt(report.best_ratio)} at iteration {report.best_index}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distortion-lab",
        description="Distributed voting mechanisms under metric costs: generate, evaluate, audit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an instance family to JSON")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--out", required=True, help="output instance path (.json)")
    p.add_argument("--k", type=int, help="number of groups (family-specific)")
    p.add_argument("--m", type=int, help="family size parameter")
    p.add_argument("--t", type=int, help="simplex parameter for euclid-randrand")
    p.add_argument("--n", type=int, help="voters (random family)")
    p.add_argument("--kind", default="line", choices=generators.RANDOM_KINDS,
                   help="metric kind for the random family")
    p.add_argument("--dim", type=int, default=2, help="Euclidean dimension (random family)")
    p.add_argument("--seed", default="0", help="seed (random family)")
    p.add_argument("--in", dest="in_rule", default="fpm", choices=sorted(RULES),
                   help="in-group rule for tournament-driven families")
    p.add_argument("--sigma", default="natural",
                   help="base ordering: natural, random:SEED, or comma list")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("eval", help="candidate-by-objective cost table as CSV")
    p.add_argument("--instance", required=True)
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.add_argument("--float", action="store_true", help="append decimal columns")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("run", help="run a mechanism and report its distortion")
    p.add_argument("--instance", required=True)
    p.add_argument("--in", dest="in_rule", required=True, choices=sorted(RULES))
    p.add_argument("--over", dest="over_rule", required=True, choices=sorted(RULES))
    p.add_argument("--scope", default="reps", choices=[s.value for s in Scope])
    p.add_argument("--objective", required=True, choices=[o.value for o in ALL_OBJECTIVES])
    p.add_argument("--out", default=None, help="JSON path (default stdout)")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("tournament", help="bias tournament of a deterministic rule")
    p.add_argument("--rule", required=True, choices=[r for r in sorted(RULES) if not RULES[r].randomized])
    p.add_argument("--m", type=int, required=True, help="number of candidates")
    p.add_argument("--sigma", default="natural")
    p.add_argument("--out", default=None, help="JSON path (default stdout)")
    p.add_argument("--dot", default=None, help="also write a DOT file")
    p.set_defaults(fn=cmd_tournament)

    p = sub.add_parser("verify", help="check built-in distortion bounds on a random suite")
    p.add_argument("--bound", required=True,
                   help=f"bound name or 'all'; known: {', '.join(audit.BUILTIN_BOUNDS)}")
    p.add_argument("--suite", default="random", choices=["random"])
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--seed", default="0")
    p.add_argument("--max-n", type=int, default=8)
    p.add_argument("--max-m", type=int, default=6)
    p.add_argument("--max-k", type=int, default=4)
    p.add_argument("--kinds", default=None, help="comma list of line,graph,euclidean")
    p.add_argument("--csv", default=None, help="per-instance CSV report path")
    p.add_argument("--json", default=None, help="JSON summary path")
    p.add_argument("--plot", default=None, help="render a figure beside the CSV")
    p.add_argument("--workers", type=int, default=_default_workers())
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("search", help="randomized worst-case search for a mechanism")
    p.add_argument("--in", dest="in_rule", required=True, choices=sorted(RULES))
    p.add_argument("--over", dest="over_rule", required=True, choices=sorted(RULES))
    p.add_argument("--scope", default="reps", choices=[s.value for s in Scope])
    p.add_argument("--objective", required=True, choices=[o.value for o in ALL_OBJECTIVES])
    p.add_argument("--sampler", default="line", choices=list(generators.RANDOM_KINDS) + ["mixed"])
    p.add_argument("--iterations", type=int, required=True)
    p.add_argument("--seed", default="0")
    p.add_argument("--max-n", type=int, default=8)
    p.add_argument("--max-m", type=int, default=6)
    p.add_argument("--max-k", type=int, default=4)
    p.add_argument("--csv", default=None, help="per-iteration CSV path")
    p.add_argument("--out", default=None, help="JSON summary + witness path")
    p.add_argument("--plot", default=None, help="render a progress figure")
    p.add_argument("--workers", type=int, default=_default_workers())
    p.set_defaults(fn=cmd_search)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except DistortionLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
