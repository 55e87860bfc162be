"""Command-line entry point: gen, run, bench, ablate, features.

Exit codes: 0 success, 1 usage error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .bench import (ABLATION_VARIANTS, LABELS, PRIMARY_METHODS, BenchmarkConfig,
                    execute, instance_id, run_ablation, run_benchmark)
from .controller import DEFAULT_ALPHA, DEFAULT_P_GATE, DEFAULT_STAGNATION, DEFAULT_WINDOW
from .instances import GENERATED_FAMILIES, Family, Instance, distance_matrix, generate
from .landscape import static_features
from .search import DEFAULT_BUDGET, RunConfig
from .tour import ALL_OPS, Op

log = logging.getLogger("labhh")

EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _csv_list(kind):
    def parse(text):
        try:
            return tuple(kind(v) for v in text.split(",") if v.strip())
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    return parse


def _add_run_flags(p):
    g = p.add_argument_group("method hyperparameters")
    g.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="iterations per run")
    g.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="LinUCB exploration weight")
    g.add_argument("--gate", action=argparse.BooleanOptionalAction, default=True,
                   help="stagnation-triggered 2-opt repair gate")
    g.add_argument("--acceptance", choices=["greedy", "annealing"], default="greedy")
    g.add_argument("--features", choices=["full", "nostatic", "nodynamic", "nocontext"],
                   default="full")
    g.add_argument("--ops", type=_csv_list(Op.parse), default=ALL_OPS,
                   help="comma list of operators (two_opt,swap,relocate,or_opt2)")
    g.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    g.add_argument("--stagnation-window", type=int, default=DEFAULT_STAGNATION)
    g.add_argument("--p-gate", type=float, default=DEFAULT_P_GATE)


def _base_config(args, seed=0) -> RunConfig:
    try:
        return RunConfig(budget=args.budget, acceptance=args.acceptance, gate=args.gate,
                         features=args.features, operators=args.ops, seed=seed,
                         alpha=args.alpha, window=args.window,
                         stagnation_window=args.stagnation_window, p_gate=args.p_gate)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _add_matrix_flags(p):
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--families", type=_csv_list(Family.parse),
                   default=GENERATED_FAMILIES)
    p.add_argument("--sizes", type=_csv_list(int), default=(50, 100, 200))
    p.add_argument("--instances", type=int, default=3, help="instances per family-size cell")
    p.add_argument("--seeds", type=_csv_list(int), default=(1, 2, 3))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="labhh", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"labhh {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="write instance JSON files")
    p.add_argument("--family", type=Family.parse)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--suite", action="store_true",
                   help="write the whole benchmark instance suite into --out (a directory)")
    p.add_argument("--sizes", type=_csv_list(int), default=(50, 100, 200))
    p.add_argument("--instances", type=int, default=3)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("run", help="run one method on one instance, print RunResult JSON")
    p.add_argument("--method", default="labhh",
                   choices=sorted({*PRIMARY_METHODS, *ABLATION_VARIANTS}))
    p.add_argument("--instance", type=Path, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, help="also write the JSON here")
    _add_run_flags(p)

    p = sub.add_parser("bench", help="full benchmark matrix")
    _add_matrix_flags(p)
    p.add_argument("--methods", type=_csv_list(str), default=PRIMARY_METHODS)
    p.add_argument("--with-ablation", action="store_true",
                   help="add the ablation variants to the run pool (shared refs)")
    _add_run_flags(p)

    p = sub.add_parser("ablate", help="component ablation table (AUC)")
    _add_matrix_flags(p)
    _add_run_flags(p)

    p = sub.add_parser("features", help="print static landscape features as JSON")
    p.add_argument("--instance", type=Path)
    p.add_argument("--family", type=Family.parse)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_gen(args) -> int:
    if args.suite:
        args.out.mkdir(parents=True, exist_ok=True)
        for fam in GENERATED_FAMILIES:
            for n in args.sizes:
                for k in range(args.instances):
                    iid = instance_id(fam, n, k)
                    generate(fam, n, k, iid).save(args.out / f"{iid}.json")
        return EXIT_OK
    if args.family is None or args.n is None:
        raise UsageError("gen needs --family and --n (or --suite)")
    try:
        inst = generate(args.family, args.n, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.out.parent != Path(""):
        args.out.parent.mkdir(parents=True, exist_ok=True)
    inst.save(args.out)
    return EXIT_OK


def _load(path) -> Instance:
    try:
        return Instance.load(path)
    except (json.JSONDecodeError, ValueError) as exc:
        raise OSError(f"{path}: invalid instance file: {exc}") from exc


def _cmd_run(args) -> int:
    inst = _load(args.instance)
    base = _base_config(args)
    cfg = BenchmarkConfig(families=(), sizes=(inst.n,), methods=(args.method,), base=base)
    try:
        result = execute(args.method, inst, args.seed, cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result.meta.setdefault("config", cfg.run_config(args.method, args.seed).to_dict())
    result.meta["instance_file"] = str(args.instance)
    text = result.to_json()
    if args.out:
        args.out.write_text(text + "\n", encoding="utf-8")
    print(text)
    return EXIT_OK


def _matrix_config(args, methods, variants=()) -> BenchmarkConfig:
    try:
        return BenchmarkConfig(families=args.families, sizes=args.sizes,
                               instances_per_cell=args.instances, seeds=args.seeds,
                               methods=tuple(methods), variants=tuple(variants),
                               base=_base_config(args), jobs=args.jobs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _progress(done, total):
    log.info("instance %d/%d done", done, total)


def _print_table(table, stream=None):
    stream = stream or sys.stdout
    print(f"{'method':<16}{'gap':>10}{'auc':>10}{'runtime_s':>12}", file=stream)
    for name, s in table.items():
        print(f"{LABELS.get(name, name):<16}{s['mean_gap']:>10.4f}{s['mean_auc']:>10.4f}"
              f"{s['mean_runtime']:>12.3f}", file=stream)


def _cmd_bench(args) -> int:
    variants = ABLATION_VARIANTS if args.with_ablation else ()
    cfg = _matrix_config(args, args.methods, variants)
    report = run_benchmark(cfg, _progress)
    report.write(args.out)
    _print_table(report.summary(cfg.methods)["methods"])
    return EXIT_OK


def _cmd_ablate(args) -> int:
    cfg = _matrix_config(args, ("labhh",), ABLATION_VARIANTS)
    report = run_ablation(cfg, _progress)
    report.write(args.out, summary_name="ablation.json")
    _print_table(report.ablation_table())
    return EXIT_OK


def _cmd_features(args) -> int:
    if args.instance is not None:
        inst = _load(args.instance)
    elif args.family is not None and args.n is not None:
        inst = generate(args.family, args.n, args.seed)
    else:
        raise UsageError("features needs --instance or --family and --n")
    try:
        feats = static_features(inst, distance_matrix(inst))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(json.dumps(feats.to_dict(), indent=2))
    return EXIT_OK


COMMANDS = {"gen": _cmd_gen, "run": _cmd_run, "bench": _cmd_bench,
            "ablate": _cmd_ablate, "features": _cmd_features}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(parser.format_usage().rstrip(), file=sys.stderr)
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"labhh {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"labhh {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
