"""Command-line front end: ``mteba run | compare | inspect-tree``."""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .adaptation import STRATEGIES, EstimationStrategy, StrategyError, build_difference_table, check_strategy
from .dataset import Dataset, DatasetError, load_dataset, load_schema, remove_missing
from .evaluation import (
    MetricsReport,
    boxplot_stats,
    fold_split,
    make_folds,
    median_report,
    run_experiment,
    significance_marker,
    wilcoxon_signed_rank,
)
from .modeltree import ModelTree

log = logging.getLogger("mteba")


@dataclass
class RunConfig:
    dataset: Path
    schema: Path
    strategies: list[str]
    ks: list[int] = field(default_factory=lambda: [1])
    folds: int = 3
    seeds: list[int] = field(default_factory=lambda: [0])
    out: Path = Path("results")

    def __post_init__(self):
        if not self.strategies:
            raise StrategyError("at least one strategy is required")
        if not self.ks:
            raise StrategyError("at least one K value is required")
        for s in self.strategies:
            if s not in STRATEGIES:
                raise StrategyError(f"unknown strategy {s!r}; choose from {', '.join(STRATEGIES)}")

    def variants(self) -> list[EstimationStrategy]:
        """Every (strategy, K) pair; r-eba appears once, with K = 1."""
        out: list[EstimationStrategy] = []
        for name in self.strategies:
            for k in self.ks:
                v = EstimationStrategy(name, k)
                if v not in out:
                    out.append(v)
        return out


@dataclass(frozen=True)
class ReportRow:
    strategy: str
    k: int
    seed: str
    report: MetricsReport


def _load(config: RunConfig) -> Dataset:
    data = remove_missing(load_dataset(config.dataset, load_schema(config.schema)))
    if len(data) < config.folds:
        raise DatasetError(f"only {len(data)} complete projects; need at least {config.folds}")
    return data


def _num(v: float) -> str:
    return repr(float(v))


def run_all(config: RunConfig, data: Dataset | None = None) -> list[ReportRow]:
    data = data if data is not None else _load(config)
    for v in config.variants():
        check_strategy(v, data.schema)
    rows = []
    for v in config.variants():
        reports = []
        for seed in config.seeds:
            rep = run_experiment(data, v, seed=seed, folds=config.folds)
            reports.append(rep)
            rows.append(ReportRow(v.name, v.k, str(seed), rep))
        if len(config.seeds) > 1:
            rows.append(ReportRow(v.name, v.k, "median", median_report(reports)))
    return rows


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    path.write_text(buf.getvalue(), encoding="utf-8")


def write_outputs(rows: Sequence[ReportRow], out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out / "report.csv",
        ["strategy", "K", "seed", "mmre", "mdmre", "pred25", "n"],
        [[r.strategy, r.k, r.seed, _num(r.report.mmre), _num(r.report.mdmre), _num(r.report.pred25), r.report.n]
         for r in rows],
    )
    per_seed = [r for r in rows if r.seed != "median"]
    _write_csv(
        out / "residuals.csv",
        ["strategy", "K", "seed", "id", "actual", "predicted", "residual"],
        [[r.strategy, r.k, r.seed, p.id, _num(p.actual), _num(p.predicted), _num(p.residual)]
         for r in per_seed for p in r.report.pairs],
    )
    box = []
    for r in per_seed:
        b = boxplot_stats(r.report.residuals)
        box.append([r.strategy, r.k, r.seed, _num(b.min), _num(b.q1), _num(b.median), _num(b.q3),
                    _num(b.max_whisker), " ".join(_num(o) for o in b.outliers)])
    _write_csv(
        out / "boxplot.csv",
        ["strategy", "K", "seed", "min", "q1", "median", "q3", "max_whisker", "outliers"],
        box,
    )


def format_grid(rows: Sequence[ReportRow]) -> str:
    lines = [f"{'strategy':<10}{'K':>3}{'seed':>8}{'MMRE%':>9}{'MdMRE%':>9}{'PRED%':>9}"]
    for r in rows:
        rep = r.report
        lines.append(
            f"{r.strategy:<10}{r.k:>3}{r.seed:>8}"
            f"{100 * rep.mmre:>9.1f}{100 * rep.mdmre:>9.1f}{rep.pred25:>9.1f}"
        )
    return "\n".join(lines)


def cmd_run(config: RunConfig) -> list[ReportRow]:
    rows = run_all(config)
    write_outputs(rows, config.out)
    print(format_grid(rows))
    return rows


@dataclass(frozen=True)
class ComparisonRow:
    seed: int
    k: int
    baseline: str
    strategy: str
    n: int
    z: float
    p: float

    @property
    def marker(self) -> str:
        return significance_marker(self.p)


def compare_all(config: RunConfig, baseline: str, data: Dataset | None = None) -> list[ComparisonRow]:
    data = data if data is not None else _load(config)
    if baseline not in STRATEGIES:
        raise StrategyError(f"unknown baseline strategy {baseline!r}")
    for name in [baseline, *config.strategies]:
        check_strategy(EstimationStrategy(name), data.schema)
    out = []
    for seed in config.seeds:
        for k in config.ks:
            base = run_experiment(data, EstimationStrategy(baseline, k), seed=seed, folds=config.folds)
            for name in config.strategies:
                other = run_experiment(data, EstimationStrategy(name, k), seed=seed, folds=config.folds)
                if [p.id for p in base.pairs] != [p.id for p in other.pairs]:
                    raise StrategyError("residuals are not paired per project")
                res = wilcoxon_signed_rank(base.residuals, other.residuals)
                out.append(ComparisonRow(seed, k, baseline, name, res.n, res.z, res.p))
    return out


def cmd_compare(config: RunConfig, baseline: str) -> list[ComparisonRow]:
    rows = compare_all(config, baseline)
    config.out.mkdir(parents=True, exist_ok=True)
    _write_csv(
        config.out / "significance.csv",
        ["seed", "K", "baseline", "strategy", "n", "z", "p", "marker"],
        [[r.seed, r.k, r.baseline, r.strategy, r.n, _num(r.z), _num(r.p), r.marker] for r in rows],
    )
    print(f"{'seed':>6}{'K':>3}  {'baseline':<8} vs {'strategy':<8}{'z':>9}{'p':>9}")
    for r in rows:
        print(f"{r.seed:>6}{r.k:>3}  {r.baseline:<8} vs {r.strategy:<8}{r.z:>9.2f}{r.p:>9.4f} {r.marker}")
    print("a: significant at 1%, b: significant at 5%")
    return rows


def inspect_tree(config: RunConfig, fold: int, seed: int, data: Dataset | None = None) -> ModelTree:
    data = data if data is not None else _load(config)
    plan = make_folds(data, config.folds, seed)
    train, _ = fold_split(data, plan, fold)
    table = build_difference_table(train)
    return ModelTree.fit(table.to_matrix())


def cmd_inspect_tree(config: RunConfig, fold: int, seed: int) -> Path:
    if config.strategies and "mt-eba" not in config.strategies:
        raise StrategyError("inspect-tree applies to mt-eba only")
    text = inspect_tree(config, fold, seed).dump()
    config.out.mkdir(parents=True, exist_ok=True)
    path = config.out / f"tree_fold{fold}_seed{seed}.txt"
    path.write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return path


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mteba", description="Analogy-based effort estimation experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, strategy_required=True):
        p.add_argument("--dataset", required=True, type=Path)
        p.add_argument("--schema", required=True, type=Path)
        p.add_argument("--strategy", action="append", default=[], required=strategy_required,
                       help="strategy token, repeatable: " + ", ".join(STRATEGIES))
        p.add_argument("--k", type=_int_list, default=[1], help="analogy counts, e.g. 1,2,3")
        p.add_argument("--folds", type=int, default=3)
        p.add_argument("--seed", type=_int_list, default=[0], help="seeds, e.g. 0,1,2")
        p.add_argument("--out", type=Path, default=Path("results"))

    common(sub.add_parser("run", help="cross-validate strategies and write report files"))
    cmp_ = sub.add_parser("compare", help="Wilcoxon tests of a baseline against other strategies")
    common(cmp_)
    cmp_.add_argument("--baseline", required=True)
    tree = sub.add_parser("inspect-tree", help="dump the model tree built on one training fold")
    common(tree, strategy_required=False)
    tree.add_argument("--fold", type=int, required=True)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        strategies = [t.strip() for s in args.strategy for t in s.split(",") if t.strip()]
        if args.command == "inspect-tree" and not strategies:
            strategies = ["mt-eba"]
        config = RunConfig(args.dataset, args.schema, strategies, args.k, args.folds, args.seed, args.out)
        if args.command == "run":
            cmd_run(config)
        elif args.command == "compare":
            cmd_compare(config, args.baseline)
        else:
            if len(config.seeds) != 1:
                raise StrategyError("inspect-tree takes exactly one seed")
            cmd_inspect_tree(config, args.fold, config.seeds[0])
    except (DatasetError, StrategyError, ValueError, OSError) as exc:
        print(f"mteba: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
