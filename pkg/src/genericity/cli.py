"""Command line interface.

Exit status: 0 on success, 1 when a census finds geometric violations,
2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import automaton, experiments, freegroup, geometry, psl2z
from .automaton import AutomatonError
from .experiments import BudgetExceeded, ExperimentConfig

EXIT_OK, EXIT_VIOLATIONS, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _add_backend(p: argparse.ArgumentParser, default: str | None = "psl2z") -> None:
    p.add_argument(
        "--backend",
        default=default,
        required=default is None,
        help="psl2z, braid:N, free:K or an automaton JSON file",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="genericity", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="structure of an automaton file")
    p.add_argument("path")

    for name, helptext in (("genericity", "rigid census per sphere"), ("asymptotics", "growth and limit proportions")):
        p = sub.add_parser(name, help=helptext)
        _add_backend(p)
        p.add_argument("--lmin", type=int, default=1)
        p.add_argument("--lmax", type=int, default=10)
        p.add_argument("--prefix", help="rigid word for the bound certificates (default: shortest witness)")
        p.add_argument("--w-far", dest="w_far", help="word whose avoidance rate is reported")
        p.add_argument("--json", dest="json_out", help="write the JSON report here instead of stdout")
        if name == "genericity":
            p.add_argument("--mode", choices=experiments.MODES, default="exhaustive")
            p.add_argument("--samples", type=int, default=10_000)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--radius", "-R", type=float, default=1)
            p.add_argument("--horizon", "-N", type=int, default=50)
            p.add_argument("--k-max", dest="k_max", type=int, default=5)
            p.add_argument("--budget", type=int, default=experiments.DEFAULT_BUDGET)
            p.add_argument("--no-geometry", dest="geometry", action="store_false")
            p.add_argument("--workers", type=int, default=1)
            p.add_argument("--csv", dest="csv_out")

    p = sub.add_parser("classify", help="isometry type of a word")
    _add_backend(p)
    p.add_argument("--word", required=True)
    p.add_argument("--horizon", "-N", type=int, default=50)

    p = sub.add_parser("distance", help="distance between two points")
    _add_backend(p)
    p.add_argument("--from", dest="source", required=True, help="p/q for psl2z, a word for free:K")
    p.add_argument("--to", dest="target", required=True)
    return parser


def _config(args: argparse.Namespace) -> ExperimentConfig:
    fields = {k: v for k, v in vars(args).items() if k in ExperimentConfig.__dataclass_fields__}
    return ExperimentConfig(**fields)


def cmd_analyze(args) -> int:
    aut = automaton.load(args.path)
    report = automaton.check_anf_hypothesis(aut)
    print(json.dumps(report.to_dict(aut), indent=1, ensure_ascii=False))
    return EXIT_OK


def cmd_genericity(args) -> int:
    cfg = _config(args)
    report = experiments.run_genericity(cfg)
    experiments.write_outputs(report, cfg)
    if not cfg.json_out:
        sys.stdout.write(experiments.report_json(report))
    else:
        for row in report["rows"]:
            lox = row["p_rigid_lox_decimal"]
            extra = "" if lox is None else f"  rigid+lox {lox:.6f}"
            print(f"l={row['l']:3d}  sphere {row['sphere']}  rigid {row['p_rigid_decimal']:.6f}{extra}")
    n_bad = report["summary"]["violations"]
    if n_bad:
        print(f"{n_bad} geometric violations", file=sys.stderr)
        return EXIT_VIOLATIONS
    return EXIT_OK


def cmd_asymptotics(args) -> int:
    cfg = _config(args)
    report = {"config": cfg.to_dict(), "asymptotics": experiments.run_asymptotics(cfg)}
    text = experiments.report_json(report)
    if cfg.json_out:
        with open(cfg.json_out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_classify(args) -> int:
    target = experiments.resolve_backend(args.backend)
    if target.action is None:
        raise UsageError(f"backend {args.backend!r} has no isometric action")
    w = target.automaton.parse(args.word)
    print(geometry.classify(target.action, w, args.horizon).tag)
    return EXIT_OK


def cmd_distance(args) -> int:
    if args.backend == "psl2z":
        u, v = psl2z.FareyVertex.parse(args.source), psl2z.FareyVertex.parse(args.target)
        print(psl2z.farey_distance(u, v))
        return EXIT_OK
    target = experiments.resolve_backend(args.backend)
    if not args.backend.startswith("free:"):
        raise UsageError(f"no distance for backend {args.backend!r}")
    alpha = target.automaton.alphabet
    print(freegroup.tree_distance(freegroup.reduce(alpha.parse(args.source)), freegroup.reduce(alpha.parse(args.target))))
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "genericity": cmd_genericity,
    "asymptotics": cmd_asymptotics,
    "classify": cmd_classify,
    "distance": cmd_distance,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (UsageError, AutomatonError, BudgetExceeded, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
