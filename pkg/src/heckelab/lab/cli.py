"""Command-line entry point: reduce, orbit, heights, count, experiment."""

from __future__ import annotations

import argparse
import json
import sys

from ..errors import (BudgetExceeded, DegreeSearchExhausted, IterationLimit, PrecisionLoss,
                      WitnessVerificationFailed)
from ..hecke import dump_orbit_jsonl, enumerate_orbit_g1
from ..mixeduni import LevelStructure, MixedPoint, mixed_act, point_residual, reduce_to_F
from ..siegel import SiegelPoint
from .config import DEFAULT_TOLERANCES, Experiment, ExperimentConfig
from .counting import ORACLES
from .experiments import run
from .report import json_text

EXIT_OK, EXIT_VERIFY, EXIT_BUDGET = 0, 2, 3


def _tolerance_flags(p: argparse.ArgumentParser):
    for name, default in DEFAULT_TOLERANCES.items():
        p.add_argument(f"--{name}", type=type(default), default=None,
                       help=f"override {name} (default {default})")


def _overrides(args) -> dict:
    return {k: getattr(args, k) for k in DEFAULT_TOLERANCES if getattr(args, k, None) is not None}


def _complex(s: str) -> complex:
    return complex(s.replace(" ", "").replace("i", "j"))


def cmd_reduce(args) -> int:
    text = args.point if args.point else sys.stdin.read()
    p = MixedPoint.from_json(json.loads(text))
    tol = _overrides(args).get("tol_act", DEFAULT_TOLERANCES["tol_act"])
    red = reduce_to_F(p, LevelStructure(args.level), tol)
    res = point_residual(mixed_act(red.cert, p), red.point)
    out = {"reduced": red.point.to_json(), "cert": red.cert.to_json(), "coset": list(red.coset),
           "residual": res}
    sys.stdout.write(json_text(out))
    return EXIT_OK if res < tol else EXIT_VERIFY


def _base(args) -> MixedPoint:
    v = tuple(args.v) if args.v else (0, 0)
    return MixedPoint(v, SiegelPoint.from_tau(_complex(args.tau)))


def cmd_orbit(args) -> int:
    base = _base(args)
    pts = enumerate_orbit_g1(base, args.n_max, LevelStructure(args.level), args.threads)
    fh = open(args.output, "w") if args.output else sys.stdout
    try:
        dump_orbit_jsonl(pts, base, fh)
    finally:
        if args.output:
            fh.close()
    return EXIT_OK


def _config(args, experiment, **kw) -> ExperimentConfig:
    return ExperimentConfig(experiment=experiment, tolerances=_overrides(args),
                            output_path=args.output, threads=args.threads, **kw)


def cmd_heights(args) -> int:
    curves = None
    if args.curves:
        with open(args.curves) as fh:
            obj = json.load(fh)
        curves = obj["curves"] if isinstance(obj, dict) else obj
    rep = run(_config(args, Experiment.nt_scaling, curves=curves))
    sys.stdout.write(json_text({k: rep[k] for k in ("rows", "pass_rate", "config_hash", "provenance")}))
    return EXIT_OK if rep["all_pass"] else EXIT_VERIFY


def cmd_count(args) -> int:
    rep = run(_config(args, Experiment.count_points, oracle=args.oracle, T=args.T))
    sys.stdout.write(json_text(rep["rows"][0]))
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    cfg.tolerances.update(_overrides(args))
    if args.output:
        cfg.output_path = args.output
    if args.threads:
        cfg.threads = args.threads
    if args.n_max:
        cfg.n_max = args.n_max
    rep = run(cfg)
    brief = {k: v for k, v in rep.items() if k != "rows"}
    sys.stdout.write(json_text(brief))
    return EXIT_OK if rep.get("all_pass", True) else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="heckelab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="reduce a mixed point (JSON) into the fundamental set")
    p.add_argument("point", nargs="?", help="MixedPoint JSON; read from stdin when omitted")
    p.add_argument("--level", type=int, default=4)
    _tolerance_flags(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("orbit", help="enumerate a g=1 orbit as JSON lines")
    p.add_argument("--tau", default="2j")
    p.add_argument("--v", nargs=2, help="rational V-part, e.g. 1/2 0")
    p.add_argument("--n-max", "--n_max", dest="n_max", type=int, default=2)
    p.add_argument("--level", type=int, default=4)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--output")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("heights", help="Neron-Tate scaling under 2-isogenies")
    p.add_argument("--curves", help="curve JSON file; bundled suite by default")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--output", help="report prefix (<prefix>.csv, <prefix>.json)")
    _tolerance_flags(p)
    p.set_defaults(func=cmd_heights)

    p = sub.add_parser("count", help="count rational points of bounded height")
    p.add_argument("--oracle", choices=sorted(ORACLES), default="parabola")
    p.add_argument("--T", type=int, default=10)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--output")
    _tolerance_flags(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("experiment", help="run an experiment from a JSON config file")
    p.add_argument("config")
    p.add_argument("--output")
    p.add_argument("--threads", type=int)
    p.add_argument("--n-max", "--n_max", dest="n_max", type=int)
    _tolerance_flags(p)
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except WitnessVerificationFailed as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (BudgetExceeded, IterationLimit, PrecisionLoss, DegreeSearchExhausted) as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
