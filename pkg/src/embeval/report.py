"""Result-store file formats: results, diagnostics, and analysis CSVs.

The results CSV keeps one metric per row
("task,encoder,dim,protocol,classifier,normalized,metric,value,hyperparams")
so new metrics never break the schema.  Rows are sorted and floats formatted
with a fixed rule, which makes identical runs produce identical bytes.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence, Union

from .analysis import CorrelationReport, DeltaRecord, DispersionRow, SizeSweepResult
from .errors import LoadError
from .evaluators import EvalResult

RESULTS_HEADER = [
    "task",
    "encoder",
    "dim",
    "protocol",
    "classifier",
    "normalized",
    "metric",
    "value",
    "hyperparams",
]

DELTAS_HEADER = [
    "encoder",
    "task",
    "protocol",
    "classifier",
    "metric",
    "standard",
    "normalized",
    "delta_pp",
]


def fmt_value(v: float) -> str:
    return format(float(v), ".12g")


def _fmt_bool(b: bool) -> str:
    return "true" if b else "false"


def _open_writer(path: Path):
    fh = path.open("w", encoding="utf-8", newline="")
    return fh, csv.writer(fh, lineterminator="\n")


def write_results_csv(path: Union[str, Path], results: Sequence[EvalResult]) -> None:
    path = Path(path)
    rows = []
    for r in results:
        hyper = json.dumps(r.hyperparams, sort_keys=True, separators=(",", ":"))
        for metric in sorted(r.metrics):
            rows.append(
                [
                    r.task,
                    r.encoder,
                    str(r.embedding_size),
                    r.protocol,
                    r.classifier,
                    _fmt_bool(r.normalized),
                    metric,
                    fmt_value(r.metrics[metric]),
                    hyper,
                ]
            )
    rows.sort()
    fh, writer = _open_writer(path)
    with fh:
        writer.writerow(RESULTS_HEADER)
        writer.writerows(rows)


def read_results_csv(path: Union[str, Path]) -> list[EvalResult]:
    """Rebuild result cells from the one-metric-per-row file."""
    path = Path(path)
    grouped: dict[tuple, EvalResult] = {}
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != RESULTS_HEADER:
            raise LoadError(f"{path}: unexpected results header {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(RESULTS_HEADER):
                raise LoadError(f"{path}:{lineno}: expected {len(RESULTS_HEADER)} fields")
            task, encoder, dim, protocol, classifier, normalized, metric, value, hyper = row
            key = (task, encoder, dim, protocol, classifier, normalized, hyper)
            if key not in grouped:
                grouped[key] = EvalResult(
                    task=task,
                    encoder=encoder,
                    embedding_size=int(dim),
                    protocol=protocol,
                    classifier=classifier,
                    normalized=normalized == "true",
                    metrics={},
                    hyperparams=json.loads(hyper),
                    diagnostics={},
                )
            grouped[key].metrics[metric] = float(value)
    return list(grouped.values())


def write_diagnostics_csv(path: Union[str, Path], results: Sequence[EvalResult]) -> None:
    path = Path(path)
    rows = []
    for r in results:
        for key in sorted(r.diagnostics):
            rows.append(
                [
                    r.task,
                    r.encoder,
                    r.protocol,
                    r.classifier,
                    _fmt_bool(r.normalized),
                    key,
                    json.dumps(r.diagnostics[key], sort_keys=True, separators=(",", ":")),
                ]
            )
    rows.sort()
    fh, writer = _open_writer(path)
    with fh:
        writer.writerow(
            ["task", "encoder", "protocol", "classifier", "normalized", "key", "value"]
        )
        writer.writerows(rows)


def write_deltas_csv(path: Union[str, Path], records: Sequence[DeltaRecord]) -> None:
    fh, writer = _open_writer(Path(path))
    with fh:
        writer.writerow(DELTAS_HEADER)
        for r in records:
            writer.writerow(
                [
                    r.encoder,
                    r.task,
                    r.protocol,
                    r.classifier,
                    r.metric,
                    fmt_value(r.standard),
                    fmt_value(r.normalized),
                    fmt_value(r.delta_pp),
                ]
            )


def read_deltas_csv(path: Union[str, Path]) -> list[DeltaRecord]:
    path = Path(path)
    records = []
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != DELTAS_HEADER:
            raise LoadError(f"{path}: unexpected deltas header {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(DELTAS_HEADER):
                raise LoadError(f"{path}:{lineno}: expected {len(DELTAS_HEADER)} fields")
            records.append(
                DeltaRecord(
                    encoder=row[0],
                    task=row[1],
                    protocol=row[2],
                    classifier=row[3],
                    metric=row[4],
                    standard=float(row[5]),
                    normalized=float(row[6]),
                )
            )
    return records


def write_dispersion_csv(path: Union[str, Path], rows: Sequence[DispersionRow]) -> None:
    fh, writer = _open_writer(Path(path))
    with fh:
        writer.writerow(["column", "range", "std"])
        for r in rows:
            writer.writerow([r.column, fmt_value(r.range), fmt_value(r.std)])


def write_correlation_csv(path: Union[str, Path], report: CorrelationReport) -> None:
    """Cells plus the per-probing-task averages and the grand mean."""
    fh, writer = _open_writer(Path(path))
    with fh:
        writer.writerow(["transfer_task", "probing_task", "rho"])
        for i, t in enumerate(report.transfer_tasks):
            for j, p in enumerate(report.probing_tasks):
                v = report.rho[i, j]
                writer.writerow([t, p, "nan" if v != v else fmt_value(v)])
        for p in report.probing_tasks:
            if p in report.probing_averages:
                writer.writerow(["__average__", p, fmt_value(report.probing_averages[p])])
        writer.writerow(["__grand_mean__", "", fmt_value(report.grand_mean)])


def write_sweep_csv(path: Union[str, Path], sweep: SizeSweepResult) -> None:
    """Curve points and constant-size reference scores, one row each."""
    fh, writer = _open_writer(Path(path))
    with fh:
        writer.writerow(["kind", "label", "size", "score"])
        for point in sweep.points:
            for task in sorted(point.task_scores):
                writer.writerow(
                    ["task", task, str(point.size), fmt_value(point.task_scores[task])]
                )
            writer.writerow(["point", "mean", str(point.size), fmt_value(point.mean_score)])
        for name in sorted(sweep.references):
            size, score = sweep.references[name]
            writer.writerow(["reference", name, str(size), fmt_value(score)])


def read_sweep_csv(path: Union[str, Path]):
    """Return (mean curve points, references) for plotting."""
    path = Path(path)
    points: list[tuple[float, float]] = []
    references: list[tuple[str, float]] = []
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["kind", "label", "size", "score"]:
            raise LoadError(f"{path}: unexpected sweep header {header}")
        for row in reader:
            if not row:
                continue
            kind, label, size, score = row
            if kind == "point":
                points.append((float(size), float(score)))
            elif kind == "reference":
                references.append((label, float(score)))
    points.sort()
    return points, references
