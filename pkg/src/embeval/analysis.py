"""Meta-analysis over score tables: normalization deltas, dispersion,
transfer-vs-probing rank correlations, and embedding-size sweeps.

Everything here is a pure function of already-computed scores; analysis
never re-trains anything.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .compose import Encoder
from .corpus import LabeledDataset
from .errors import DegenerateSeriesError, EvaluationError, LoadError
from .evaluators import ClassifierSpec, EvalResult, run_transfer_task
from .metrics import dispersion, spearman

TASK_KINDS = ("transfer", "probing")


@dataclass
class ScoreTable:
    """An encoders x tasks score matrix with a kind tag per task column."""

    encoders: list[str]
    tasks: list[str]
    kinds: dict[str, str]
    cells: dict[tuple[str, str], float]
    provenance: str = "internal"

    def column(self, task: str) -> np.ndarray:
        """Scores of every encoder on one task; missing cells are an error."""
        if task not in self.tasks:
            raise KeyError(f"unknown task {task!r}")
        missing = [e for e in self.encoders if (e, task) not in self.cells]
        if missing:
            raise EvaluationError(f"task {task!r} missing scores for encoders {missing}")
        return np.array([self.cells[(e, task)] for e in self.encoders])

    def tasks_of_kind(self, kind: str) -> list[str]:
        return [t for t in self.tasks if self.kinds[t] == kind]


def load_score_table(path: Union[str, Path]) -> ScoreTable:
    """Read the "encoder,task,kind,score" CSV; kind must be transfer or probing."""
    path = Path(path)
    encoders: list[str] = []
    tasks: list[str] = []
    kinds: dict[str, str] = {}
    cells: dict[tuple[str, str], float] = {}
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["encoder", "task", "kind", "score"]:
            raise LoadError(f"{path}: expected header 'encoder,task,kind,score'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise LoadError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
            encoder, task, kind, score_str = (f.strip() for f in row)
            if kind not in TASK_KINDS:
                raise LoadError(f"{path}:{lineno}: kind must be one of {TASK_KINDS}")
            try:
                score = float(score_str)
            except ValueError:
                raise LoadError(f"{path}:{lineno}: non-numeric score {score_str!r}") from None
            if task in kinds and kinds[task] != kind:
                raise LoadError(f"{path}:{lineno}: task {task!r} tagged with two kinds")
            if (encoder, task) in cells:
                raise LoadError(f"{path}:{lineno}: duplicate cell ({encoder}, {task})")
            if encoder not in encoders:
                encoders.append(encoder)
            if task not in tasks:
                tasks.append(task)
            kinds[task] = kind
            cells[(encoder, task)] = score
    if not cells:
        raise LoadError(f"{path}: empty score table")
    return ScoreTable(
        encoders=encoders, tasks=tasks, kinds=kinds, cells=cells, provenance="external import"
    )


@dataclass
class DeltaRecord:
    """Normalized-minus-standard score difference in percentage points."""

    encoder: str
    task: str
    protocol: str
    classifier: str
    metric: str
    standard: float
    normalized: float

    @property
    def delta_pp(self) -> float:
        return 100.0 * (self.normalized - self.standard)


_DELTA_METRIC = {"ucp": "pearson", "learned_sim": "pearson", "classify": "accuracy"}


def normalization_delta(
    results: Iterable[EvalResult], metric: Optional[str] = None
) -> list[DeltaRecord]:
    """Pair up normalized/unnormalized results and report per-encoder deltas.

    Results are matched on (task, encoder, protocol, classifier); an encoder
    with only one half of the pair is an error.  The compared metric defaults
    per protocol (pearson for similarity protocols, accuracy for
    classification).
    """
    groups: dict[tuple, dict[bool, EvalResult]] = {}
    for r in results:
        key = (r.task, r.encoder, r.protocol, r.classifier)
        slot = groups.setdefault(key, {})
        if r.normalized in slot:
            raise EvaluationError(
                f"duplicate {'normalized' if r.normalized else 'standard'} result for {key}"
            )
        slot[r.normalized] = r
    records = []
    for key in groups:
        task, encoder, protocol, classifier = key
        slot = groups[key]
        if True not in slot or False not in slot:
            missing = "normalized" if True not in slot else "standard"
            raise EvaluationError(f"encoder {encoder!r} on task {task!r}: missing {missing} result")
        m = metric or _DELTA_METRIC.get(protocol, "accuracy")
        std_res, norm_res = slot[False], slot[True]
        if m not in std_res.metrics or m not in norm_res.metrics:
            raise EvaluationError(f"encoder {encoder!r}: metric {m!r} absent from a result")
        records.append(
            DeltaRecord(
                encoder=encoder,
                task=task,
                protocol=protocol,
                classifier=classifier,
                metric=m,
                standard=std_res.metrics[m],
                normalized=norm_res.metrics[m],
            )
        )
    return records


@dataclass
class DispersionRow:
    column: str
    range: float
    std: float


def dispersion_report(
    table: ScoreTable, columns: Optional[Sequence[str]] = None
) -> list[DispersionRow]:
    """Across-encoder spread of each requested column (all columns by default).

    A single-encoder table has no spread: range and std are 0.
    """
    cols = list(columns) if columns is not None else list(table.tasks)
    rows = []
    for col in cols:
        # sorting makes the summary an exact function of the score multiset,
        # so reordering table rows cannot perturb the last float bit
        scores = np.sort(table.column(col))
        if scores.size == 1:
            rows.append(DispersionRow(column=col, range=0.0, std=0.0))
            continue
        summary = dispersion(scores)
        rows.append(DispersionRow(column=col, range=summary.range, std=summary.std))
    return rows


@dataclass
class CorrelationReport:
    """Spearman rho between transfer and probing columns, over encoders."""

    transfer_tasks: list[str]
    probing_tasks: list[str]
    rho: np.ndarray  # transfer x probing; NaN marks undefined cells
    probing_averages: dict[str, float]
    grand_mean: float
    n_undefined: int


def transfer_probing_correlation(table: ScoreTable) -> CorrelationReport:
    """Correlate every transfer column with every probing column across encoders.

    Needs at least 3 encoders and both column kinds.  A degenerate
    (constant) column makes its cells undefined; those are excluded from the
    averages with a warning rather than zero-filled.
    """
    if len(table.encoders) < 3:
        raise EvaluationError("need at least 3 encoders for rank correlations")
    transfer = table.tasks_of_kind("transfer")
    probing = table.tasks_of_kind("probing")
    if not transfer or not probing:
        raise EvaluationError("need both transfer and probing columns")
    rho = np.full((len(transfer), len(probing)), np.nan)
    undefined = 0
    for i, t in enumerate(transfer):
        t_scores = table.column(t)
        for j, p in enumerate(probing):
            try:
                rho[i, j] = spearman(t_scores, table.column(p))
            except DegenerateSeriesError:
                undefined += 1
                warnings.warn(
                    f"correlation of {t!r} and {p!r} undefined (constant scores); excluded",
                    stacklevel=2,
                )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # all-NaN columns
        col_means = np.nanmean(rho, axis=0)
    averages = {
        p: float(col_means[j]) for j, p in enumerate(probing) if not np.isnan(col_means[j])
    }
    defined = rho[~np.isnan(rho)]
    if defined.size == 0:
        raise EvaluationError("every correlation cell is undefined")
    return CorrelationReport(
        transfer_tasks=transfer,
        probing_tasks=probing,
        rho=rho,
        probing_averages=averages,
        grand_mean=float(defined.mean()),
        n_undefined=undefined,
    )


@dataclass
class SweepPoint:
    size: int
    task_scores: dict[str, float]
    mean_score: float


@dataclass
class SizeSweepResult:
    points: list[SweepPoint]
    references: dict[str, tuple[int, float]]  # encoder -> (size, mean score)


def size_sweep(
    datasets: Sequence[LabeledDataset],
    encoder_for_size: Callable[[int], Encoder],
    sizes: Sequence[int],
    spec: ClassifierSpec,
    normalized: bool = False,
    reference_encoders: Sequence[Encoder] = (),
) -> SizeSweepResult:
    """Mean transfer accuracy as a function of embedding size.

    Sizes must be strictly increasing.  Reference encoders of fixed size are
    scored once each and reported as horizontal baselines.
    """
    sizes = list(sizes)
    if any(b <= a for a, b in zip(sizes, sizes[1:])) or not sizes:
        raise ValueError("sizes must be non-empty and strictly increasing")

    def mean_over_tasks(enc: Encoder) -> tuple[dict[str, float], float]:
        scores = {}
        for ds in datasets:
            scores[ds.name] = run_transfer_task(ds, enc, spec, normalized).metrics["accuracy"]
        return scores, float(np.mean(list(scores.values())))

    points = []
    for size in sizes:
        enc = encoder_for_size(int(size))
        if enc.output_dim != size:
            raise EvaluationError(
                f"generator returned dim {enc.output_dim} for requested size {size}"
            )
        task_scores, mean_score = mean_over_tasks(enc)
        points.append(SweepPoint(size=int(size), task_scores=task_scores, mean_score=mean_score))
    references = {}
    for enc in reference_encoders:
        _, mean_score = mean_over_tasks(enc)
        references[enc.name] = (enc.output_dim, mean_score)
    return SizeSweepResult(points=points, references=references)
