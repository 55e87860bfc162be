"""Benchmark matrix, ablation suite and report files."""

from __future__ import annotations

import csv
import functools
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import __version__
from .baselines import BASELINES
from .construction import multi_start_nn
from .instances import GENERATED_FAMILIES, Family, Instance, distance_matrix, generate
from .metrics import (convergence_auc, final_gap, group_stats, operator_shares,
                      reference_lengths)
from .search import (Acceptance, ControllerKind, FeatureMask, RunConfig,
                     RunResult, run)
from .tour import ALL_OPS, Op

log = logging.getLogger(__name__)

DEFAULT_SIZES = (50, 100, 200)
DEFAULT_SEEDS = (1, 2, 3)
OP_LABELS = tuple(op.label for op in ALL_OPS)

HH_METHODS = ("labhh", "ucb_hh", "random_hh")
PRIMARY_METHODS = HH_METHODS + ("nn", "two_opt", "ga", "sa", "ils")

LABELS = {
    "labhh": "LA-BHH", "ucb_hh": "UCB-HH", "random_hh": "Random-HH", "nn": "NN",
    "two_opt": "2-opt", "ga": "GA", "sa": "SA", "ils": "ILS",
    "wo_context": "w/o Context", "wo_dynamic": "w/o Dynamic", "wo_static": "w/o Static",
    "w_annealing": "w/ Annealing", "wo_learning": "w/o Learning",
    "wo_two_opt": "w/o 2-opt", "wo_swap": "w/o Swap", "wo_relocate": "w/o Relocate",
    "wo_or_opt2": "w/o Or-opt-2",
}


def _drop(op: Op):
    return tuple(o for o in ALL_OPS if o is not op)


# Overrides applied on top of the base (default) RunConfig.
HH_OVERRIDES = {
    "labhh": {},
    "ucb_hh": {"controller": ControllerKind.UCB1, "gate": False,
               "features": FeatureMask.NO_CONTEXT},
    "random_hh": {"controller": ControllerKind.RANDOM, "gate": False,
                  "features": FeatureMask.NO_CONTEXT},
}

ABLATION_OVERRIDES = {
    "wo_context": {"features": FeatureMask.NO_CONTEXT},
    "wo_dynamic": {"features": FeatureMask.NO_DYNAMIC, "gate": False},
    "wo_static": {"features": FeatureMask.NO_STATIC},
    "w_annealing": {"acceptance": Acceptance.ANNEALING},
    "wo_learning": {"controller": ControllerKind.RANDOM, "features": FeatureMask.NO_CONTEXT},
    "wo_two_opt": {"operators": _drop(Op.TWO_OPT)},
    "wo_swap": {"operators": _drop(Op.SWAP)},
    "wo_relocate": {"operators": _drop(Op.RELOCATE)},
    "wo_or_opt2": {"operators": _drop(Op.OR_OPT2)},
}
ABLATION_VARIANTS = tuple(ABLATION_OVERRIDES)


@dataclass(frozen=True)
class BenchmarkConfig:
    families: tuple = GENERATED_FAMILIES
    sizes: tuple = DEFAULT_SIZES
    instances_per_cell: int = 3
    seeds: tuple = DEFAULT_SEEDS
    methods: tuple = PRIMARY_METHODS
    variants: tuple = ()
    base: RunConfig = field(default_factory=RunConfig)
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "families", tuple(Family.parse(f) for f in self.families))
        for name in (*self.methods, *self.variants):
            if name not in HH_OVERRIDES and name not in BASELINES \
                    and name not in ABLATION_OVERRIDES:
                raise ValueError(f"unknown method or variant {name!r}")
        if self.instances_per_cell < 1 or not self.seeds or not self.sizes:
            raise ValueError("benchmark needs at least one instance, size and seed")

    @property
    def run_names(self) -> tuple:
        """Methods then variants, without duplicates."""
        return tuple(dict.fromkeys((*self.methods, *self.variants)))

    def instance_keys(self) -> list[tuple[Family, int, int]]:
        return [(f, n, k) for f in self.families for n in self.sizes
                for k in range(self.instances_per_cell)]

    def run_config(self, name: str, seed: int) -> RunConfig:
        overrides = HH_OVERRIDES.get(name, ABLATION_OVERRIDES.get(name, {}))
        return replace(self.base, seed=seed, **overrides)

    def to_dict(self) -> dict:
        return {
            "families": [f.value for f in self.families],
            "sizes": list(self.sizes),
            "instances_per_cell": self.instances_per_cell,
            "seeds": list(self.seeds),
            "methods": list(self.methods),
            "variants": list(self.variants),
            "base": self.base.to_dict(),
            "version": __version__,
        }


def instance_id(family: Family, n: int, index: int) -> str:
    return f"{family.value}-n{n}-i{index}"


@functools.lru_cache(maxsize=8)
def _prepared(family: Family, n: int, index: int):
    inst = generate(family, n, index, instance_id(family, n, index))
    dm = distance_matrix(inst)
    return inst, dm, multi_start_nn(dm)


def execute(name: str, inst: Instance, seed: int, cfg: BenchmarkConfig, dm=None,
            initial=None) -> RunResult:
    """One run of method or variant ``name``."""
    if name in BASELINES:
        return BASELINES[name](inst, cfg.base.budget, seed, dm=dm, initial=initial)
    return run(inst, cfg.run_config(name, seed), dm=dm, method=name, initial=initial)


def _job(args):
    (family, n, index), names, seeds, cfg = args
    inst, dm, init = _prepared(family, n, index)
    return [execute(name, inst, seed, cfg, dm, init) for name in names for seed in seeds]


@dataclass(frozen=True)
class ReportRow:
    instance_id: str
    family: str
    n: int
    method: str
    seed: int
    final_length: float
    ref_length: float
    final_gap: float
    auc: float
    runtime_s: float


CSV_COLUMNS = ("instance_id", "family", "n", "method", "seed", "final_length",
               "ref_length", "final_gap", "auc", "runtime_s")


@dataclass
class BenchmarkReport:
    config: BenchmarkConfig
    rows: list
    results: list

    def rows_for(self, names) -> list:
        names = set(names)
        return [r for r in self.rows if r.method in names]

    def summary(self, names=None) -> dict:
        """Gap, AUC and runtime aggregates over ``names`` (all runs by default)."""
        names = self.config.run_names if names is None else tuple(names)
        rows = self.rows_for(names)
        by_method = group_stats(rows, lambda r: r.method)
        table = {}
        for name in names:
            if name not in by_method:
                continue
            s = by_method[name]
            table[name] = {"label": LABELS.get(name, name), "runs": s["runs"],
                           "mean_gap": s["mean_final_gap"], "se_gap": s["se_final_gap"],
                           "mean_auc": s["mean_auc"], "se_auc": s["se_auc"],
                           "mean_runtime": s["mean_runtime_s"]}
        return {
            "methods": table,
            "by_family": _nested(rows, lambda r: (r.method, r.family)),
            "by_size": _nested(rows, lambda r: (r.method, r.n)),
            "operator_shares": self.operator_shares(
                [m for m in names if m in HH_OVERRIDES or m in ABLATION_OVERRIDES]),
            "config": self.config.to_dict(),
        }

    def operator_shares(self, names) -> dict:
        totals = {name: [0] * 4 for name in names}
        for res in self.results:
            if res.method in totals:
                for k, c in enumerate(res.operator_counts):
                    totals[res.method][k] += c
        return {name: dict(zip(OP_LABELS, operator_shares(c))) for name, c in totals.items()}

    def ablation_table(self) -> dict:
        names = ("labhh",) + tuple(v for v in self.config.variants if v != "labhh")
        return self.summary(names)["methods"]

    def write(self, out_dir, names=None, summary_name="summary.json") -> Path:
        out = Path(out_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
            write_rows(out / "results.csv", self.rows)
            write_traces(out / "traces.csv", self.results)
            write_operator_counts(out / "operators.csv", self.results)
            with (out / summary_name).open("w", encoding="utf-8", newline="\n") as fh:
                json.dump(self.summary(names), fh, indent=2, default=str)
                fh.write("\n")
        except OSError as exc:
            raise OSError(f"cannot write benchmark output to {out}: {exc}") from exc
        return out


def _nested(rows, key) -> dict:
    flat = group_stats(rows, key)
    out: dict = {}
    for (method, group), s in flat.items():
        out.setdefault(method, {})[str(group)] = {
            "mean_gap": s["mean_final_gap"], "se_gap": s["se_final_gap"],
            "mean_auc": s["mean_auc"], "se_auc": s["se_auc"], "runs": s["runs"]}
    return out


def build_rows(results, families: dict) -> list[ReportRow]:
    """Gap/AUC rows; refs are per-instance minima over every result given."""
    refs = reference_lengths((r.instance_id, r.best_length) for r in results)
    rows = []
    for res in results:
        ref = refs[res.instance_id]
        family, n = families[res.instance_id]
        rows.append(ReportRow(
            instance_id=res.instance_id, family=family, n=n, method=res.method,
            seed=res.seed, final_length=res.best_length, ref_length=ref,
            final_gap=final_gap(res.best_length, ref),
            auc=convergence_auc(res.trace, ref, res.budget),
            runtime_s=res.wall_time))
    rows.sort(key=lambda r: (r.instance_id, r.method, r.seed))
    return rows


def run_benchmark(cfg: BenchmarkConfig = BenchmarkConfig(), progress=None) -> BenchmarkReport:
    """Run every (instance, method/variant, seed) cell and score it.

    Outputs are identical for any ``cfg.jobs``: runs are deterministic and
    results are sorted before the reduction.
    """
    keys = cfg.instance_keys()
    names = cfg.run_names
    tasks = [(key, names, tuple(cfg.seeds), cfg) for key in keys]
    results: list[RunResult] = []
    jobs = max(1, int(cfg.jobs))
    if jobs == 1:
        batches = map(_job, tasks)
        for k, batch in enumerate(batches, 1):
            results.extend(batch)
            if progress:
                progress(k, len(tasks))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for k, batch in enumerate(pool.map(_job, tasks), 1):
                results.extend(batch)
                if progress:
                    progress(k, len(tasks))
    results.sort(key=lambda r: (r.instance_id, r.method, r.seed))
    families = {instance_id(f, n, k): (f.value, n) for f, n, k in keys}
    rows = build_rows(results, families)
    log.info("benchmark finished: %d runs over %d instances", len(results), len(keys))
    return BenchmarkReport(cfg, rows, results)


def run_ablation(cfg: BenchmarkConfig | None = None, progress=None) -> BenchmarkReport:
    """Full method plus the nine component-removal variants on one shared pool."""
    if cfg is None:
        cfg = BenchmarkConfig()
    if not cfg.variants:
        cfg = replace(cfg, variants=ABLATION_VARIANTS)
    cfg = replace(cfg, methods=tuple(dict.fromkeys(("labhh", *cfg.methods))))
    return run_benchmark(cfg, progress)


def write_rows(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow([r.instance_id, r.family, r.n, r.method, r.seed,
                        repr(r.final_length), repr(r.ref_length), repr(r.final_gap),
                        repr(r.auc), f"{r.runtime_s:.6f}"])


def read_rows(path) -> list[ReportRow]:
    with open(path, encoding="utf-8", newline="") as fh:
        return [ReportRow(d["instance_id"], d["family"], int(d["n"]), d["method"],
                          int(d["seed"]), float(d["final_length"]), float(d["ref_length"]),
                          float(d["final_gap"]), float(d["auc"]), float(d["runtime_s"]))
                for d in csv.DictReader(fh)]


def write_traces(path, results) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("instance_id", "method", "seed", "iteration", "best_length"))
        for res in results:
            for t, v in res.trace:
                w.writerow((res.instance_id, res.method, res.seed, t, repr(float(v))))


def write_operator_counts(path, results) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("instance_id", "method", "seed", *OP_LABELS))
        for res in results:
            w.writerow((res.instance_id, res.method, res.seed, *res.operator_counts))


def default_jobs() -> int:
    return os.cpu_count() or 1
