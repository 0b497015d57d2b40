"""Command-line entry point: clean -> curate -> split -> train/eval -> report.

Every stage writes its outputs as CSV plus a ``manifest.<stage>.json``
carrying the inputs, the effective configuration, seeds, tool version, and
wall time, so any number can be traced back to the exact run that produced
it and re-run from the manifest alone. Settings come from an optional JSON
config file; any command-line flag overrides its config key.

Exit codes: 0 success, 1 data errors, 2 configuration errors. Messages go
to standard error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from pathlib import Path

from . import __version__
from .baseline import BaselineConfig, evaluate_cv, overfit_gap_experiment
from .curate import CurationConfig, DEFAULT_QUALITY_WEIGHTS, curate_target, curation_summary
from .dataset import ColumnMap, DatasetError, emit_csv, ingest_csv, protocol_filter
from .dedupe import assign_intra_weights, clean_set
from .folds import assign_folds, write_plan_csv
from .metrics import EvalPair, MetricReport, bootstrap_ci
from .molparse import SmilesError

logger = logging.getLogger(__name__)


class ConfigError(Exception):
    pass


_DEFAULTS: dict = {
    "input": None,
    "target": None,
    "others": [],
    "predictions": None,
    "metrics_files": [],
    "name": None,
    "output_dir": None,  # resolved against $SOLCURATE_OUT, then ./solcurate_out
    "smiles_col": "smiles",
    "value_col": "log_s",
    "seed": 0,
    "folds": 10,
    "neutralize": True,
    "protocol_filter": False,
    "merge_threshold": 0.5,
    "quality_weights": None,  # path to a JSON {set_id: weight} map or inline dict
    "lam": 1.0,
    "radius": 2,
    "n_bits": 256,
    "metric": "all",
    "bootstrap": 1000,
    "dataset_label": None,
    "method_label": "ridge",
    "samples": 200,
    "features": 50,
    "config_counts": [1, 4, 16, 64],
    "trials": 50,
}

_METRIC_CHOICES = ("rmse", "curmse", "curmse_error_weighted", "all")


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    unknown = set(raw) - set(_DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return raw


def _effective_config(args: argparse.Namespace) -> dict:
    cfg = dict(_DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(_load_config_file(args.config))
    for key in _DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    if cfg["output_dir"] is None:
        cfg["output_dir"] = os.environ.get("SOLCURATE_OUT", "solcurate_out")
    if isinstance(cfg["config_counts"], str):
        try:
            cfg["config_counts"] = [int(tok) for tok in cfg["config_counts"].split(",")]
        except ValueError as exc:
            raise ConfigError(f"bad config_counts: {cfg['config_counts']!r}") from exc
    if cfg["metric"] not in _METRIC_CHOICES:
        raise ConfigError(f"metric must be one of {_METRIC_CHOICES}")
    return cfg


def _require(cfg: dict, key: str) -> str:
    if not cfg.get(key):
        raise ConfigError(f"{key} is required (flag --{key.replace('_', '-')} or config key)")
    return cfg[key]


def _outdir(cfg: dict) -> Path:
    out = Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(sub: str, cfg: dict, inputs: list[str], outputs: list[str],
                    started: float) -> None:
    manifest = {
        "subcommand": sub,
        "tool_version": __version__,
        "inputs": inputs,
        "effective_config": {k: v for k, v in sorted(cfg.items())},
        "seeds": {"seed": cfg["seed"]},
        "outputs": outputs,
        "wall_time_s": round(time.perf_counter() - started, 6),
    }
    path = _outdir(cfg) / f"manifest.{sub}.json"
    with path.open("w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _column_map(cfg: dict) -> ColumnMap:
    return ColumnMap(smiles=cfg["smiles_col"], value=cfg["value_col"])


def _quality_config(cfg: dict) -> CurationConfig:
    qualities = dict(DEFAULT_QUALITY_WEIGHTS)
    qw = cfg["quality_weights"]
    if isinstance(qw, str):
        try:
            with open(qw, encoding="utf-8") as fh:
                qualities.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read quality weights {qw}: {exc}") from exc
    elif isinstance(qw, dict):
        qualities.update(qw)
    elif qw is not None:
        raise ConfigError("quality_weights must be a path or a mapping")
    return CurationConfig(d=cfg["merge_threshold"], qualities=qualities)


# ---------------------------------------------------------------------------
# stages
# ---------------------------------------------------------------------------

def _cmd_clean(cfg: dict) -> None:
    started = time.perf_counter()
    path = _require(cfg, "input")
    name = cfg["name"] or Path(path).stem
    out = _outdir(cfg)

    table = ingest_csv(path, _column_map(cfg), name=name,
                       rejected_path=out / f"{name}.ingest_rejected.csv")
    print(f"{name}: {len(table)} records ingested from {path}")
    if cfg["protocol_filter"]:
        before = len(table)
        table = protocol_filter(table)
        print(f"{name}: protocol filter dropped {before - len(table)} records")

    cleaned, report = clean_set(table, neutralize=cfg["neutralize"])
    weighted = assign_intra_weights(cleaned)

    clean_path = out / f"{name}.clean.csv"
    emit_csv(weighted, clean_path)
    report_path = out / f"{name}.clean_report.csv"
    with report_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(report.CSV_HEADER)
        writer.writerow(report.csv_row())
    outputs = [clean_path.name, report_path.name]
    if report.rejections:
        removed_path = out / f"{name}.removed.csv"
        with removed_path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["row", "smiles", "reason"])
            writer.writerows(report.rejections)
        outputs.append(removed_path.name)
    print(report.as_text())
    _write_manifest("clean", cfg, [path], outputs, started)


def _cmd_curate(cfg: dict) -> None:
    started = time.perf_counter()
    target_path = _require(cfg, "target")
    out = _outdir(cfg)
    target = ingest_csv(target_path)
    others = [ingest_csv(p) for p in cfg["others"]]
    curated = curate_target(target, others, _quality_config(cfg))
    summary = curation_summary(target, curated)

    name = cfg["name"] or target.name
    curated_path = out / f"{name}.curated.csv"
    emit_csv(curated, curated_path)
    summary_path = out / f"{name}.curation_summary.csv"
    with summary_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dataset", "records_before", "records_after", "mean_weight", "no_op"])
        writer.writerow([name, summary.records_before, summary.records_after,
                         repr(summary.mean_weight), summary.no_op])
    if summary.no_op:
        print(f"notice: curation of {name} was a no-op (output identical to input)")
    print(f"{name}: {summary.records_before} -> {summary.records_after} records, "
          f"mean weight {summary.mean_weight:.3f}")
    _write_manifest("curate", cfg, [target_path, *cfg["others"]],
                    [curated_path.name, summary_path.name], started)


def _cmd_split(cfg: dict) -> None:
    started = time.perf_counter()
    path = _require(cfg, "input")
    out = _outdir(cfg)
    table = ingest_csv(path)
    plan = assign_folds(table, k=cfg["folds"], seed=cfg["seed"])
    name = cfg["name"] or table.name
    plan_path = out / f"{name}.plan.csv"
    write_plan_csv(plan, plan_path)
    print(f"{name}: {len(plan.assignment)} molecules dealt into {plan.k} folds (seed {plan.seed})")
    _write_manifest("split", cfg, [path], [plan_path.name], started)


def _cmd_train_eval(cfg: dict) -> None:
    started = time.perf_counter()
    path = _require(cfg, "input")
    out = _outdir(cfg)
    table = ingest_csv(path)
    plan = assign_folds(table, k=cfg["folds"], seed=cfg["seed"])
    config = BaselineConfig(lam=cfg["lam"], radius=cfg["radius"], n_bits=cfg["n_bits"])
    per_fold = evaluate_cv(table, plan, config)

    name = cfg["name"] or table.name
    pred_path = out / f"{name}.predictions.csv"
    with pred_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["molecule_key", "predicted", "observed", "weight", "fold"])
        for fold, pairs in enumerate(per_fold):
            for p in pairs:
                writer.writerow([p.molecule_key, repr(p.predicted),
                                 repr(p.observed), repr(p.weight), fold])
    n = sum(len(pairs) for pairs in per_fold)
    print(f"{name}: cross-validated predictions for {n} records "
          f"(lam={config.lam}, radius={config.radius}, bits={config.n_bits})")
    _write_manifest("train-eval", cfg, [path], [pred_path.name], started)


def _read_predictions(path: str) -> list[EvalPair]:
    pairs = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            pairs.append(EvalPair(
                molecule_key=row["molecule_key"],
                predicted=float(row["predicted"]),
                observed=float(row["observed"]),
                weight=float(row.get("weight") or 1.0),
            ))
    if not pairs:
        raise DatasetError(f"{path} contains no prediction rows")
    return pairs


def _cmd_eval(cfg: dict) -> None:
    started = time.perf_counter()
    path = _require(cfg, "predictions")
    out = _outdir(cfg)
    pairs = _read_predictions(path)
    metrics = ["rmse", "curmse", "curmse_error_weighted"] if cfg["metric"] == "all" \
        else [cfg["metric"]]
    dataset = cfg["dataset_label"] or Path(path).stem.split(".")[0]
    method = cfg["method_label"]

    name = cfg["name"] or dataset
    metrics_path = out / f"{name}.metrics.csv"
    with metrics_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dataset", "method", "metric", "point", "ci_halfwidth",
                         "n_records", "n_molecules", "formatted"])
        for metric in metrics:
            report = bootstrap_ci(pairs, metric=metric, b=cfg["bootstrap"], seed=cfg["seed"])
            writer.writerow([dataset, method, metric, repr(report.point),
                             repr(report.ci_halfwidth), report.n_records,
                             report.n_molecules, report.formatted])
            print(f"{dataset} [{method}] {metric}: {report.formatted} "
                  f"({report.n_records} records, {report.n_molecules} molecules)")
    _write_manifest("eval", cfg, [path], [metrics_path.name], started)


def _cmd_hpo_demo(cfg: dict) -> None:
    started = time.perf_counter()
    out = _outdir(cfg)
    rows = overfit_gap_experiment(
        n_samples=cfg["samples"],
        n_features=cfg["features"],
        config_counts=cfg["config_counts"],
        trials=cfg["trials"],
        seed=cfg["seed"],
    )
    gap_path = out / "hpo_gap_table.csv"
    with gap_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["config_count", "mean_gap", "se_gap", "trials"])
        for row in rows:
            writer.writerow([row.config_count, repr(row.mean_gap),
                             repr(row.se_gap), row.trials])
    print("configs  mean(holdout - reported)  standard error")
    for row in rows:
        print(f"{row.config_count:7d}  {row.mean_gap:24.4f}  {row.se_gap:.4f}")
    _write_manifest("hpo-demo", cfg, [], [gap_path.name], started)


def emit_report(
    cells: list[tuple[str, str, MetricReport]],
    row_order: list[str] | None = None,
    col_order: list[str] | None = None,
) -> str:
    """Markdown dataset-by-method grid; the lowest point value of each row
    is bold, ties all bold. Missing cells print n/a."""
    rows = row_order or sorted({d for d, _, _ in cells})
    cols = col_order or sorted({m for _, m, _ in cells})
    by_cell = {(d, m): r for d, m, r in cells}

    lines = ["| dataset | " + " | ".join(cols) + " |",
             "| --- |" + " --- |" * len(cols)]
    for d in rows:
        present = [by_cell[(d, m)].point for m in cols if (d, m) in by_cell]
        lowest = min(present) if present else None
        rendered = []
        for m in cols:
            report = by_cell.get((d, m))
            if report is None:
                rendered.append("n/a")
            elif lowest is not None and report.point == lowest:
                rendered.append(f"**{report.formatted}**")
            else:
                rendered.append(report.formatted)
        lines.append(f"| {d} | " + " | ".join(rendered) + " |")
    return "\n".join(lines) + "\n"


def _cmd_report(cfg: dict) -> None:
    started = time.perf_counter()
    if not cfg["metrics_files"]:
        raise ConfigError("report needs at least one metrics CSV (--metrics-files)")
    out = _outdir(cfg)
    by_metric: dict[str, list[tuple[str, str, MetricReport]]] = {}
    for path in cfg["metrics_files"]:
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                report = MetricReport(
                    metric_name=row["metric"],
                    point=float(row["point"]),
                    ci_halfwidth=float(row["ci_halfwidth"]),
                    n_records=int(row["n_records"]),
                    n_molecules=int(row["n_molecules"]),
                    formatted=row["formatted"],
                )
                by_metric.setdefault(row["metric"], []).append(
                    (row["dataset"], row["method"], report)
                )
    sections = []
    for metric in sorted(by_metric):
        sections.append(f"## {metric}\n\n" + emit_report(by_metric[metric]))
    text = "\n".join(sections)
    report_path = out / "report.md"
    report_path.write_text(text, encoding="utf-8")
    print(text, end="")
    _write_manifest("report", cfg, list(cfg["metrics_files"]), [report_path.name], started)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="solcurate",
        description="Solubility dataset cleaning, curation, and evaluation.",
    )
    parser.add_argument("--version", action="version", version=f"solcurate {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON config file; flags override its keys")
        p.add_argument("--output-dir", dest="output_dir",
                       help="output directory (default $SOLCURATE_OUT or ./solcurate_out)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--name", default=None, help="dataset name for output files")

    p = sub.add_parser("clean", help="standardize, deduplicate, and weight a raw CSV")
    common(p)
    p.add_argument("--input", default=None)
    p.add_argument("--smiles-col", dest="smiles_col", default=None)
    p.add_argument("--value-col", dest="value_col", default=None)
    p.add_argument("--no-neutralize", dest="neutralize", action="store_false", default=None)
    p.add_argument("--protocol-filter", dest="protocol_filter", action="store_true",
                   default=None, help="drop records outside 25±5 C / pH 7±1")

    p = sub.add_parser("curate", help="merge other sets into a cleaned target set")
    common(p)
    p.add_argument("--target", default=None, help="cleaned target CSV")
    p.add_argument("--others", nargs="*", default=None, help="cleaned CSVs to merge from")
    p.add_argument("--quality-weights", dest="quality_weights", default=None,
                   help="JSON file mapping set_id to quality weight")
    p.add_argument("--merge-threshold", dest="merge_threshold", type=float, default=None)

    p = sub.add_parser("split", help="write a molecule-coherent fold plan")
    common(p)
    p.add_argument("--input", default=None, help="cleaned CSV")
    p.add_argument("--folds", type=int, default=None)

    p = sub.add_parser("train-eval", help="cross-validate the ridge baseline")
    common(p)
    p.add_argument("--input", default=None, help="cleaned CSV")
    p.add_argument("--folds", type=int, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--radius", type=int, default=None)
    p.add_argument("--bits", dest="n_bits", type=int, default=None)

    p = sub.add_parser("eval", help="score a predictions CSV")
    common(p)
    p.add_argument("--predictions", default=None)
    p.add_argument("--metric", choices=_METRIC_CHOICES, default=None)
    p.add_argument("--bootstrap", type=int, default=None, help="bootstrap resamples")
    p.add_argument("--dataset-label", dest="dataset_label", default=None)
    p.add_argument("--method-label", dest="method_label", default=None)

    p = sub.add_parser("hpo-demo", help="zero-signal selection-bias experiment")
    common(p)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--features", type=int, default=None)
    p.add_argument("--config-counts", dest="config_counts", default=None,
                   help="comma-separated, e.g. 1,4,16,64")
    p.add_argument("--trials", type=int, default=None)

    p = sub.add_parser("report", help="markdown dataset-by-method table")
    common(p)
    p.add_argument("--metrics-files", dest="metrics_files", nargs="*", default=None)

    return parser


_COMMANDS = {
    "clean": _cmd_clean,
    "curate": _cmd_curate,
    "split": _cmd_split,
    "train-eval": _cmd_train_eval,
    "eval": _cmd_eval,
    "hpo-demo": _cmd_hpo_demo,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    if not logging.getLogger().handlers:
        logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                            format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _effective_config(args)
        _COMMANDS[args.subcommand](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DatasetError, SmilesError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
