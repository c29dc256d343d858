"""Declarative run configuration: a sectioned key=value file (INI dialect).

Sections
  [run]               seed, out, workers
  [vectors NAME]      path, dim
  [frequencies NAME]  path
  [encoder NAME]      type = average | sif | pool_concat | random_projection
                             | concat | precomputed, plus type-specific keys
  [task NAME]         kind = pairs (train/dev/test) | labeled (path,
                      n_classes, split = cv | fixed, ...)
  [eval NAME]         task, encoder, protocol = ucp | learned_sim | classify,
                      classifier, normalization = on | off | both, overrides
  [sweep NAME]        vectors, sizes, seed, tasks, classifier, references

Validation resolves every referenced name and checks that referenced files
exist without reading them; loading happens only at run time.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from . import compose, corpus, wordvec
from .errors import ConfigError
from .evaluators import DEFAULT_HIDDEN_SIZES, DEFAULT_L2_GRID

ENCODER_TYPES = ("average", "sif", "pool_concat", "random_projection", "concat", "precomputed")
PROTOCOLS = ("ucp", "learned_sim", "classify")
CLASSIFIER_KINDS = ("logreg", "mlp")
NORMALIZATION_CHOICES = ("on", "off", "both")


@dataclass
class EncoderConfig:
    name: str
    type: str
    options: dict[str, str]


@dataclass
class TaskConfig:
    name: str
    kind: str  # "pairs" | "labeled"
    options: dict[str, str]


@dataclass
class EvalConfig:
    name: str
    task: str
    encoder: str
    protocol: str
    classifiers: tuple[str, ...]
    normalization: str
    split: str
    overrides: dict[str, object]


@dataclass
class SweepConfig:
    name: str
    vectors: str
    sizes: tuple[int, ...]
    seed: int
    tasks: tuple[str, ...]
    classifier: str
    normalized: bool
    references: tuple[str, ...]


@dataclass
class RunConfig:
    base_dir: Path
    seed: int
    out: Optional[Path]
    workers: int
    vectors: dict[str, dict]
    frequencies: dict[str, Path]
    encoders: dict[str, EncoderConfig]
    tasks: dict[str, TaskConfig]
    evals: list[EvalConfig]
    sweeps: list[SweepConfig]


def _parse_list(raw: str) -> list[str]:
    return [part.strip() for part in raw.split(",") if part.strip()]


def _parse_indices(raw: str, where: str) -> tuple[int, ...]:
    """Comma-separated ints and half-open a:b ranges, e.g. "0:100,150,200:210"."""
    out: list[int] = []
    for part in _parse_list(raw):
        if ":" in part:
            lo_s, _, hi_s = part.partition(":")
            try:
                lo, hi = int(lo_s), int(hi_s)
            except ValueError:
                raise ConfigError(f"{where}: bad index range {part!r}") from None
            if hi <= lo:
                raise ConfigError(f"{where}: empty index range {part!r}")
            out.extend(range(lo, hi))
        else:
            try:
                out.append(int(part))
            except ValueError:
                raise ConfigError(f"{where}: bad index {part!r}") from None
    if not out:
        raise ConfigError(f"{where}: empty index list")
    return tuple(out)


class _Section:
    """Typed accessors over one config section with error context."""

    def __init__(self, name: str, items: dict[str, str]):
        self.name = name
        self.items = dict(items)
        self.seen: set[str] = set()

    def get(self, key: str, default=None, required: bool = False) -> Optional[str]:
        self.seen.add(key)
        if key in self.items:
            return self.items[key].strip()
        if required:
            raise ConfigError(f"[{self.name}]: missing required key {key!r}")
        return default

    def get_int(self, key: str, default=None, required: bool = False) -> Optional[int]:
        raw = self.get(key, required=required)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"[{self.name}]: {key} must be an integer, got {raw!r}") from None

    def get_float(self, key: str, default=None) -> Optional[float]:
        raw = self.get(key)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"[{self.name}]: {key} must be a number, got {raw!r}") from None

    def get_bool(self, key: str, default: bool = False) -> bool:
        raw = self.get(key)
        if raw is None:
            return default
        low = raw.lower()
        if low in ("true", "on", "yes", "1"):
            return True
        if low in ("false", "off", "no", "0"):
            return False
        raise ConfigError(f"[{self.name}]: {key} must be a boolean, got {raw!r}")

    def get_choice(self, key: str, choices, default=None, required: bool = False):
        raw = self.get(key, default=default, required=required)
        if raw is not None and raw not in choices:
            raise ConfigError(f"[{self.name}]: {key} must be one of {choices}, got {raw!r}")
        return raw

    def reject_unknown(self) -> None:
        unknown = sorted(set(self.items) - self.seen)
        if unknown:
            raise ConfigError(f"[{self.name}]: unknown keys {unknown}")


def load_config(path: Union[str, Path]) -> RunConfig:
    """Parse and structurally check a config file; no referenced file is read."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(
        interpolation=None, delimiters=("=",), inline_comment_prefixes=("#", ";")
    )
    try:
        with path.open(encoding="utf-8") as fh:
            parser.read_file(fh)
    except configparser.Error as e:
        raise ConfigError(f"{path}: {e}") from None
    base = path.parent.resolve()

    seed, out, workers = 0, None, 1
    vectors: dict[str, dict] = {}
    frequencies: dict[str, Path] = {}
    encoders: dict[str, EncoderConfig] = {}
    tasks: dict[str, TaskConfig] = {}
    evals: list[EvalConfig] = []
    sweeps: list[SweepConfig] = []

    for raw_name in parser.sections():
        section = _Section(raw_name, dict(parser.items(raw_name)))
        words = raw_name.split()
        head = words[0]
        if head == "run":
            seed = section.get_int("seed", default=0)
            out_raw = section.get("out")
            out = (base / out_raw) if out_raw else None
            workers = section.get_int("workers", default=1)
            if workers < 1:
                raise ConfigError("[run]: workers must be >= 1")
            section.reject_unknown()
            continue
        if len(words) != 2:
            raise ConfigError(f"section [{raw_name}]: expected '<kind> <name>'")
        name = words[1]
        if head == "vectors":
            vectors[name] = {
                "path": base / section.get("path", required=True),
                "dim": section.get_int("dim"),
            }
        elif head == "frequencies":
            frequencies[name] = base / section.get("path", required=True)
        elif head == "encoder":
            etype = section.get_choice("type", ENCODER_TYPES, required=True)
            options = {k: v for k, v in section.items.items() if k != "type"}
            encoders[name] = EncoderConfig(name=name, type=etype, options=options)
            continue  # per-type keys are checked during build/validate
        elif head == "task":
            kind = section.get_choice("kind", ("pairs", "labeled"), required=True)
            options = {k: v for k, v in section.items.items() if k != "kind"}
            tasks[name] = TaskConfig(name=name, kind=kind, options=options)
            continue
        elif head == "eval":
            protocol = section.get_choice("protocol", PROTOCOLS, required=True)
            classifiers = tuple(_parse_list(section.get("classifier", default="logreg")))
            for c in classifiers:
                if c not in CLASSIFIER_KINDS:
                    raise ConfigError(f"[{raw_name}]: unknown classifier {c!r}")
            overrides: dict[str, object] = {}
            raw_grid = section.get("l2_grid")
            if raw_grid:
                overrides["l2_grid"] = tuple(float(x) for x in _parse_list(raw_grid))
            raw_hidden = section.get("hidden_sizes")
            if raw_hidden:
                overrides["hidden_sizes"] = tuple(int(x) for x in _parse_list(raw_hidden))
            for key in ("max_epochs",):
                v = section.get_int(key)
                if v is not None:
                    overrides[key] = v
            for key in ("tolerance", "learning_rate"):
                v = section.get_float(key)
                if v is not None:
                    overrides[key] = v
            cell_seed = section.get_int("seed")
            if cell_seed is not None:
                overrides["seed"] = cell_seed
            evals.append(
                EvalConfig(
                    name=name,
                    task=section.get("task", required=True),
                    encoder=section.get("encoder", required=True),
                    protocol=protocol,
                    classifiers=classifiers,
                    normalization=section.get_choice(
                        "normalization", NORMALIZATION_CHOICES, default="both"
                    ),
                    split=section.get_choice(
                        "split", corpus.PAIR_SPLITS, default="test"
                    ),
                    overrides=overrides,
                )
            )
            section.reject_unknown()
            continue
        elif head == "sweep":
            family = section.get("family", default="random_projection")
            if family != "random_projection":
                raise ConfigError(f"[{raw_name}]: unsupported sweep family {family!r}")
            sizes = tuple(int(x) for x in _parse_list(section.get("sizes", required=True)))
            sweeps.append(
                SweepConfig(
                    name=name,
                    vectors=section.get("vectors", required=True),
                    sizes=sizes,
                    seed=section.get_int("seed", default=0),
                    tasks=tuple(_parse_list(section.get("tasks", required=True))),
                    classifier=section.get_choice(
                        "classifier", CLASSIFIER_KINDS, default="logreg"
                    ),
                    normalized=section.get_bool("normalization", default=False),
                    references=tuple(_parse_list(section.get("references", default=""))),
                )
            )
            section.reject_unknown()
            continue
        else:
            raise ConfigError(f"unknown section kind [{raw_name}]")
        section.reject_unknown()

    return RunConfig(
        base_dir=base,
        seed=seed,
        out=out,
        workers=workers,
        vectors=vectors,
        frequencies=frequencies,
        encoders=encoders,
        tasks=tasks,
        evals=evals,
        sweeps=sweeps,
    )


def _encoder_refs(cfg: EncoderConfig) -> tuple[list[str], list[str], list[Path]]:
    """(vector refs, encoder refs, file paths) used by one encoder config."""
    vec_refs, enc_refs, paths = [], [], []
    if cfg.type in ("average", "sif", "pool_concat", "random_projection"):
        if "vectors" not in cfg.options:
            raise ConfigError(f"[encoder {cfg.name}]: missing required key 'vectors'")
        vec_refs.append(cfg.options["vectors"])
    if cfg.type == "concat":
        if "parts" not in cfg.options:
            raise ConfigError(f"[encoder {cfg.name}]: missing required key 'parts'")
        enc_refs.extend(_parse_list(cfg.options["parts"]))
    if cfg.type == "precomputed":
        if "path" not in cfg.options:
            raise ConfigError(f"[encoder {cfg.name}]: missing required key 'path'")
    return vec_refs, enc_refs, paths


def validate_config(config: RunConfig) -> None:
    """Resolve every name and check referenced files exist (existence only)."""
    for name, vec in config.vectors.items():
        if not vec["path"].is_file():
            raise ConfigError(f"[vectors {name}]: file not found: {vec['path']}")
    for name, fpath in config.frequencies.items():
        if not fpath.is_file():
            raise ConfigError(f"[frequencies {name}]: file not found: {fpath}")

    for name, cfg in config.encoders.items():
        vec_refs, enc_refs, _ = _encoder_refs(cfg)
        for ref in vec_refs:
            if ref not in config.vectors:
                raise ConfigError(f"[encoder {name}]: unknown vectors {ref!r}")
        for ref in enc_refs:
            if ref not in config.encoders:
                raise ConfigError(f"[encoder {name}]: unknown part encoder {ref!r}")
        if cfg.type == "sif":
            freq_ref = cfg.options.get("frequencies")
            if freq_ref is None:
                raise ConfigError(f"[encoder {name}]: missing required key 'frequencies'")
            if freq_ref not in config.frequencies:
                raise ConfigError(f"[encoder {name}]: unknown frequencies {freq_ref!r}")
        if cfg.type == "random_projection" and "dim" not in cfg.options:
            raise ConfigError(f"[encoder {name}]: missing required key 'dim'")
        if cfg.type == "precomputed":
            p = config.base_dir / cfg.options["path"]
            if not p.is_file():
                raise ConfigError(f"[encoder {name}]: file not found: {p}")
    _check_concat_cycles(config)

    for name, task in config.tasks.items():
        where = f"[task {name}]"
        if task.kind == "pairs":
            for key in ("train", "dev", "test"):
                if key not in task.options:
                    raise ConfigError(f"{where}: missing required key {key!r}")
                p = config.base_dir / task.options[key]
                if not p.is_file():
                    raise ConfigError(f"{where}: file not found: {p}")
        else:
            for key in ("path", "n_classes", "split"):
                if key not in task.options:
                    raise ConfigError(f"{where}: missing required key {key!r}")
            p = config.base_dir / task.options["path"]
            if not p.is_file():
                raise ConfigError(f"{where}: file not found: {p}")
            split = task.options["split"]
            if split not in ("cv", "fixed"):
                raise ConfigError(f"{where}: split must be cv or fixed, got {split!r}")
            if split == "fixed":
                for key in ("train_indices", "test_indices"):
                    if key not in task.options:
                        raise ConfigError(f"{where}: missing required key {key!r}")
                    _parse_indices(task.options[key], where)

    if not config.evals and not config.sweeps:
        raise ConfigError("config declares no [eval ...] or [sweep ...] sections")
    for ev in config.evals:
        where = f"[eval {ev.name}]"
        if ev.task not in config.tasks:
            raise ConfigError(f"{where}: unknown task {ev.task!r}")
        if ev.encoder not in config.encoders:
            raise ConfigError(f"{where}: unknown encoder {ev.encoder!r}")
        kind = config.tasks[ev.task].kind
        if ev.protocol in ("ucp", "learned_sim") and kind != "pairs":
            raise ConfigError(f"{where}: protocol {ev.protocol} needs a pairs task")
        if ev.protocol == "classify" and kind != "labeled":
            raise ConfigError(f"{where}: protocol classify needs a labeled task")
    for sw in config.sweeps:
        where = f"[sweep {sw.name}]"
        if sw.vectors not in config.vectors:
            raise ConfigError(f"{where}: unknown vectors {sw.vectors!r}")
        if list(sw.sizes) != sorted(set(sw.sizes)):
            raise ConfigError(f"{where}: sizes must be strictly increasing")
        for t in sw.tasks:
            if t not in config.tasks or config.tasks[t].kind != "labeled":
                raise ConfigError(f"{where}: unknown or non-labeled task {t!r}")
        for ref in sw.references:
            if ref not in config.encoders:
                raise ConfigError(f"{where}: unknown reference encoder {ref!r}")


def _check_concat_cycles(config: RunConfig) -> None:
    state: dict[str, int] = {}  # 0 visiting, 1 done

    def visit(name: str) -> None:
        if state.get(name) == 1:
            return
        if state.get(name) == 0:
            raise ConfigError(f"[encoder {name}]: concat cycle detected")
        state[name] = 0
        cfg = config.encoders[name]
        if cfg.type == "concat":
            for ref in _parse_list(cfg.options["parts"]):
                if ref in config.encoders:
                    visit(ref)
        state[name] = 1

    for name in config.encoders:
        visit(name)


@dataclass
class Workspace:
    """Loaded datasets and constructed encoders, ready for evaluation."""

    config: RunConfig
    vectors: dict[str, wordvec.WordVectors] = field(default_factory=dict)
    frequencies: dict[str, dict[str, float]] = field(default_factory=dict)
    encoders: dict[str, compose.Encoder] = field(default_factory=dict)
    tasks: dict[str, object] = field(default_factory=dict)


def build_workspace(config: RunConfig) -> Workspace:
    """Load every referenced file and construct encoders and datasets."""
    ws = Workspace(config=config)
    for name, vec in config.vectors.items():
        ws.vectors[name] = wordvec.load_word_vectors(
            vec["path"], expected_dim=vec["dim"], name=name
        )
    for name, fpath in config.frequencies.items():
        ws.frequencies[name] = compose.load_frequencies(fpath)

    def build_encoder(name: str) -> compose.Encoder:
        if name in ws.encoders:
            return ws.encoders[name]
        cfg = config.encoders[name]
        opts = cfg.options
        where = f"[encoder {name}]"
        try:
            if cfg.type == "average":
                enc = compose.AverageEncoder(ws.vectors[opts["vectors"]], name=name)
            elif cfg.type == "pool_concat":
                ops = _parse_list(opts.get("ops", "min,avg,max"))
                enc = compose.PoolConcatEncoder(ws.vectors[opts["vectors"]], ops, name=name)
            elif cfg.type == "sif":
                model = compose.SifModel(
                    a=float(opts.get("a", compose.DEFAULT_SIF_A)),
                    freq=ws.frequencies[opts["frequencies"]],
                    floor=float(opts.get("floor", compose.DEFAULT_FREQ_FLOOR)),
                )
                remove = opts.get("remove_component", "true").lower() not in ("false", "off", "0")
                enc = compose.SifEncoder(
                    ws.vectors[opts["vectors"]], model, remove_component=remove, name=name
                )
            elif cfg.type == "random_projection":
                enc = compose.RandomProjectionEncoder(
                    ws.vectors[opts["vectors"]],
                    target_dim=int(opts["dim"]),
                    seed=int(opts.get("seed", 0)),
                    name=name,
                )
            elif cfg.type == "concat":
                parts = [build_encoder(ref) for ref in _parse_list(opts["parts"])]
                enc = compose.ConcatEncoder(parts, name=name)
            else:  # precomputed
                enc = compose.PrecomputedEncoder(config.base_dir / opts["path"], name=name)
        except (KeyError, ValueError) as e:
            raise ConfigError(f"{where}: {e}") from e
        ws.encoders[name] = enc
        return enc

    for name in config.encoders:
        build_encoder(name)

    for name, task in config.tasks.items():
        if task.kind == "pairs":
            ws.tasks[name] = corpus.load_pair_dataset(
                config.base_dir / task.options["train"],
                config.base_dir / task.options["dev"],
                config.base_dir / task.options["test"],
                name=name,
            )
        else:
            where = f"[task {name}]"
            n_classes = int(task.options["n_classes"])
            if task.options["split"] == "cv":
                policy: corpus.SplitPolicy = corpus.CrossValidation(
                    k=int(task.options.get("folds", 10)),
                    seed=int(task.options.get("seed", 0)),
                )
            else:
                policy = corpus.FixedSplit(
                    train_indices=_parse_indices(task.options["train_indices"], where),
                    test_indices=_parse_indices(task.options["test_indices"], where),
                )
            ws.tasks[name] = corpus.load_labeled_dataset(
                config.base_dir / task.options["path"],
                corpus.DatasetManifest(n_classes=n_classes, policy=policy),
                name=name,
            )
    return ws


@dataclass(frozen=True)
class EvalCell:
    """One expanded (task, encoder, protocol, classifier, normalized) unit of work."""

    cell_id: str
    task: str
    encoder: str
    protocol: str
    classifier: str
    normalized: bool
    split: str
    overrides: dict

    def __hash__(self):  # overrides dict is never mutated after expansion
        return hash(self.cell_id)


def expand_cells(config: RunConfig) -> list[EvalCell]:
    """Expand normalization=both and classifier lists into individual cells."""
    cells = []
    for ev in config.evals:
        flags = {"on": (True,), "off": (False,), "both": (False, True)}[ev.normalization]
        if ev.protocol == "classify":
            kinds = ev.classifiers
        elif ev.protocol == "learned_sim":
            kinds = ("ridge",)
        else:
            kinds = ("none",)
        for kind in kinds:
            for flag in flags:
                cells.append(
                    EvalCell(
                        cell_id=f"{ev.name}:{kind}:{'norm' if flag else 'std'}",
                        task=ev.task,
                        encoder=ev.encoder,
                        protocol=ev.protocol,
                        classifier=kind,
                        normalized=flag,
                        split=ev.split,
                        overrides=dict(ev.overrides),
                    )
                )
    return cells


def classifier_spec_for(cell: EvalCell, kind: str, base_seed: int):
    """Build the training spec for a cell, deriving a stable per-cell seed."""
    import zlib

    from .evaluators import ClassifierSpec

    overrides = dict(cell.overrides)
    seed = overrides.pop("seed", None)
    if seed is None:
        seed = (zlib.crc32(cell.cell_id.encode()) ^ base_seed) & 0x7FFFFFFF
    return ClassifierSpec(
        kind=kind,
        l2_grid=tuple(overrides.get("l2_grid", DEFAULT_L2_GRID)),
        hidden_sizes=tuple(overrides.get("hidden_sizes", DEFAULT_HIDDEN_SIZES)),
        seed=seed,
        max_epochs=int(overrides.get("max_epochs", 2000)),
        tolerance=float(overrides.get("tolerance", 1e-5)),
        learning_rate=float(overrides.get("learning_rate", 0.1)),
    )
