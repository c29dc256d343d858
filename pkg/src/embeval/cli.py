"""Batch orchestration: validate configs, run evaluation sweeps, analyze
score tables, and render report plots.

Exit codes: 0 success, 1 validation error, 2 runtime error, 3 success with
non-convergence flags present.  Failures also emit a machine-readable JSON
error report on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import analysis, report, svgplot
from .compose import RandomProjectionEncoder
from .config import (
    EvalCell,
    RunConfig,
    Workspace,
    build_workspace,
    classifier_spec_for,
    expand_cells,
    load_config,
    validate_config,
)
from .errors import ConfigError, EmbevalError, LoadError
from .evaluators import (
    DEFAULT_L2_GRID,
    ClassifierSpec,
    EvalResult,
    run_similarity_cell,
    run_transfer_task,
    run_ucp_cell,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_PARTIAL = 3


def _report_error(stage: str, exc: BaseException) -> None:
    payload = {"stage": stage, "error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def _execute_cell(ws: Workspace, cell: EvalCell, base_seed: int) -> EvalResult:
    task = ws.tasks[cell.task]
    encoder = ws.encoders[cell.encoder]
    if cell.protocol == "ucp":
        return run_ucp_cell(task, encoder, cell.normalized, split=cell.split)
    if cell.protocol == "learned_sim":
        grid = tuple(cell.overrides.get("l2_grid", DEFAULT_L2_GRID))
        return run_similarity_cell(task, encoder, cell.normalized, l2_grid=grid)
    spec = classifier_spec_for(cell, cell.classifier, base_seed)
    return run_transfer_task(task, encoder, spec, cell.normalized)


def _run_sweep(ws: Workspace, sweep_cfg) -> analysis.SizeSweepResult:
    wv = ws.vectors[sweep_cfg.vectors]
    spec = ClassifierSpec(kind=sweep_cfg.classifier, l2_grid=(1e-3,), seed=sweep_cfg.seed)
    datasets = [ws.tasks[t] for t in sweep_cfg.tasks]
    references = [ws.encoders[r] for r in sweep_cfg.references]
    return analysis.size_sweep(
        datasets,
        lambda size: RandomProjectionEncoder(
            wv, size, sweep_cfg.seed, name=f"{sweep_cfg.name}-{size}"
        ),
        sweep_cfg.sizes,
        spec,
        normalized=sweep_cfg.normalized,
        reference_encoders=references,
    )


def cmd_validate(args) -> int:
    try:
        config = load_config(args.config)
        _apply_cli_overrides(config, args)
        validate_config(config)
    except ConfigError as e:
        _report_error("validate", e)
        return EXIT_VALIDATION
    cells = expand_cells(config)
    print(f"config OK: {len(cells)} evaluation cells, {len(config.sweeps)} sweeps")
    return EXIT_OK


def _apply_cli_overrides(config: RunConfig, args) -> None:
    if getattr(args, "out", None):
        config.out = Path(args.out)
    if getattr(args, "workers", None):
        config.workers = args.workers
    if getattr(args, "seed", None) is not None:
        config.seed = args.seed


def cmd_run(args) -> int:
    try:
        config = load_config(args.config)
        _apply_cli_overrides(config, args)
        if config.out is None:
            raise ConfigError("no output directory: set [run] out or pass --out")
        validate_config(config)
    except ConfigError as e:
        _report_error("validate", e)
        return EXIT_VALIDATION

    out = config.out
    try:
        ws = build_workspace(config)
        cells = expand_cells(config)
        results: dict[str, EvalResult] = {}
        if config.workers > 1 and len(cells) > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                futures = {
                    cell.cell_id: pool.submit(_execute_cell, ws, cell, config.seed)
                    for cell in cells
                }
                results = {cid: fut.result() for cid, fut in futures.items()}
        else:
            for cell in cells:
                results[cell.cell_id] = _execute_cell(ws, cell, config.seed)
        sweep_results = [(sw.name, _run_sweep(ws, sw)) for sw in config.sweeps]
    except (EmbevalError, OSError) as e:
        _write_error_report(out, "run", e)
        return EXIT_RUNTIME

    try:
        out.mkdir(parents=True, exist_ok=True)
        ordered = [results[cid] for cid in sorted(results)]
        report.write_results_csv(out / "results.csv", ordered)
        report.write_diagnostics_csv(out / "diagnostics.csv", ordered)
        delta_records = _deltas_from_results(ordered)
        if delta_records:  # normalization=both requests the delta comparison
            report.write_deltas_csv(out / "deltas.csv", delta_records)
        for name, sweep in sweep_results:
            report.write_sweep_csv(out / f"sweep_{name}.csv", sweep)
    except (EmbevalError, OSError) as e:
        _write_error_report(out, "run", e)
        return EXIT_RUNTIME
    print(f"wrote {len(ordered)} result cells to {out / 'results.csv'}")

    if any(r.diagnostics.get("converged") is False for r in ordered):
        print("warning: non-convergence flags present", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def _write_error_report(out: Path, stage: str, exc: BaseException) -> None:
    _report_error(stage, exc)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "error.json").write_text(
            json.dumps(
                {
                    "stage": stage,
                    "error": type(exc).__name__,
                    "message": str(exc),
                    "traceback": traceback.format_exc(),
                },
                indent=2,
            ),
            encoding="utf-8",
        )
    except OSError:
        pass


def _deltas_from_results(results) -> list:
    """Delta records for every encoder cell evaluated under both
    normalization flags.  Encoders run with a single flag have nothing to
    compare and are skipped; duplicate flags within a cell remain an error."""
    groups: dict[tuple, list] = {}
    for r in results:
        groups.setdefault((r.task, r.protocol, r.classifier, r.encoder), []).append(r)
    records = []
    for key in sorted(groups):
        rs = groups[key]
        if {r.normalized for r in rs} != {False, True}:
            continue
        records.extend(analysis.normalization_delta(rs))
    return records


def cmd_analyze(args) -> int:
    if not args.results and not args.table:
        _report_error("analyze", ConfigError("nothing to analyze: pass --results or --table"))
        return EXIT_VALIDATION
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if args.results:
            results = report.read_results_csv(args.results)
            records = _deltas_from_results(results)
            report.write_deltas_csv(out / "deltas.csv", records)
            print(f"wrote {len(records)} delta records to {out / 'deltas.csv'}")
        if args.table:
            table = analysis.load_score_table(args.table)
            rows = analysis.dispersion_report(table)
            report.write_dispersion_csv(out / "dispersion.csv", rows)
            print(f"wrote dispersion for {len(rows)} columns to {out / 'dispersion.csv'}")
            if table.tasks_of_kind("transfer") and table.tasks_of_kind("probing"):
                corr = analysis.transfer_probing_correlation(table)
                report.write_correlation_csv(out / "correlation.csv", corr)
                print(
                    f"grand mean correlation {corr.grand_mean:.3f} "
                    f"({corr.n_undefined} undefined cells)"
                )
    except (ConfigError, LoadError, OSError) as e:
        _report_error("analyze", e)
        return EXIT_VALIDATION
    except EmbevalError as e:
        _report_error("analyze", e)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_plot(args) -> int:
    if not args.deltas and not args.table and not args.sweep:
        _report_error("plot", ConfigError("nothing to plot: pass --deltas, --table or --sweep"))
        return EXIT_VALIDATION
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if args.deltas:
            _plot_deltas(args.deltas, out, args.sts_tenth)
        if args.table:
            _plot_heatmap(args.table, out)
        if args.sweep:
            _plot_sweep(args.sweep, out)
    except (ConfigError, LoadError, OSError) as e:
        _report_error("plot", e)
        return EXIT_VALIDATION
    except EmbevalError as e:
        _report_error("plot", e)
        return EXIT_RUNTIME
    return EXIT_OK


def _plot_deltas(path: str, out: Path, sts_tenth: bool) -> None:
    records = report.read_deltas_csv(path)
    if not records:
        raise ConfigError(f"{path}: no delta records")
    multi_task = len({r.task for r in records}) > 1
    labels, values, rows = [], [], []
    for r in records:
        label = f"{r.encoder}/{r.task}" if multi_task else r.encoder
        plotted = r.delta_pp
        if sts_tenth and r.protocol != "classify":
            plotted = r.delta_pp / 10.0
        labels.append(label)
        values.append(plotted)
        rows.append(
            [
                r.encoder,
                r.task,
                r.protocol,
                r.classifier,
                r.metric,
                report.fmt_value(r.delta_pp),
                report.fmt_value(plotted),
            ]
        )
    title = "Normalization delta (pp)" + (", pair tasks scaled by 1/10" if sts_tenth else "")
    (out / "delta_bars.svg").write_text(
        svgplot.bar_chart(labels, values, title=title, ylabel="delta pp"), encoding="utf-8"
    )
    import csv

    with (out / "delta_bars.csv").open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["encoder", "task", "protocol", "classifier", "metric", "delta_pp", "plotted_value"]
        )
        writer.writerows(rows)


def _plot_heatmap(path: str, out: Path) -> None:
    table = analysis.load_score_table(path)
    corr = analysis.transfer_probing_correlation(table)
    title = f"Transfer vs probing rank correlation (grand mean {corr.grand_mean:.2f})"
    (out / "correlation_heatmap.svg").write_text(
        svgplot.heatmap(corr.transfer_tasks, corr.probing_tasks, corr.rho, title=title),
        encoding="utf-8",
    )
    report.write_correlation_csv(out / "correlation_heatmap.csv", corr)


def _plot_sweep(path: str, out: Path) -> None:
    points, references = report.read_sweep_csv(path)
    if not points:
        raise ConfigError(f"{path}: no sweep points")
    (out / "size_sweep.svg").write_text(
        svgplot.line_chart(
            points,
            references=references,
            title="Mean transfer score by embedding size",
            xlabel="embedding size",
            ylabel="mean score",
        ),
        encoding="utf-8",
    )
    import csv

    with (out / "size_sweep.csv").open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["kind", "label", "size", "score"])
        for x, y in points:
            writer.writerow(["point", "mean", report.fmt_value(x), report.fmt_value(y)])
        for label, y in references:
            writer.writerow(["reference", label, "", report.fmt_value(y)])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embeval",
        description="Fair sentence-embedding evaluation: size-matched encoders, "
        "tunable normalization, multiple protocols and classifiers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a run config without running")
    p_validate.add_argument("--config", required=True)
    p_validate.set_defaults(func=cmd_validate)

    p_run = sub.add_parser("run", help="execute every evaluation cell in a config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", help="output directory (overrides [run] out)")
    p_run.add_argument("--workers", type=int, help="concurrent cells (overrides [run] workers)")
    p_run.add_argument("--seed", type=int, help="base seed (overrides [run] seed)")
    p_run.set_defaults(func=cmd_run)

    p_analyze = sub.add_parser("analyze", help="meta-analysis of results or score tables")
    p_analyze.add_argument("--results", help="results.csv from a run")
    p_analyze.add_argument("--table", help="external score-table CSV (encoder,task,kind,score)")
    p_analyze.add_argument("--out", required=True)
    p_analyze.set_defaults(func=cmd_analyze)

    p_plot = sub.add_parser("plot", help="render SVG charts with backing CSVs")
    p_plot.add_argument("--deltas", help="deltas.csv from analyze")
    p_plot.add_argument("--table", help="score-table CSV for the correlation heatmap")
    p_plot.add_argument("--sweep", help="sweep_*.csv from a run")
    p_plot.add_argument(
        "--sts-tenth",
        action="store_true",
        help="scale pair-task deltas by 1/10 in the bar chart",
    )
    p_plot.add_argument("--out", required=True)
    p_plot.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EmbevalError as e:  # uncategorized library failure
        _report_error(args.command, e)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
