import csv
import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from embeval import analysis, report
from embeval.cli import main
from embeval.config import expand_cells, load_config, validate_config
from embeval.errors import ConfigError
from embeval.evaluators import EvalResult

from test_analysis import TABLE2, TABLE2_DELTAS, ucp_result


def write_toy_workspace(root, n=30):
    """Word vectors, a labeled task, and a tiny pair task, all separable."""
    rng = np.random.default_rng(0)
    vec_lines = []
    mr_lines = []
    for i in range(n):
        label = i % 2
        sign = 1.0 if label == 0 else -1.0
        v = np.array([sign * 2.0, 0.0]) + rng.normal(size=2) * 0.1
        vec_lines.append(f"w{i} {v[0]:.6f} {v[1]:.6f}\n")
        mr_lines.append(f"{label}\tw{i}\n")
    # pair task: single-token sides; gold follows cosine sign
    for i in range(n, n + 24):
        v = rng.normal(size=2) * 1.5
        vec_lines.append(f"w{i} {v[0]:.6f} {v[1]:.6f}\n")
    (root / "vecs.txt").write_text("".join(vec_lines))
    (root / "mr.tsv").write_text("".join(mr_lines))
    (root / "freq.txt").write_text("".join(f"w{i} {i + 1}\n" for i in range(n)))

    def sts_lines(offset, count):
        lines = []
        for j in range(count):
            a = n + (offset + 2 * j) % 24
            b = n + (offset + 2 * j + 1) % 24
            lines.append(f"genre\tfile\t2012\t{j}\t{(j % 6):.1f}\tw{a}\tw{b}\n")
        return "".join(lines)

    (root / "sts-train.csv").write_text(sts_lines(0, 8))
    (root / "sts-dev.csv").write_text(sts_lines(3, 6))
    (root / "sts-test.csv").write_text(sts_lines(5, 6))


BASE_CONFIG = """\
[run]
seed = 42
out = out
workers = 1

[vectors toy]
path = vecs.txt

[encoder avg]
type = average
vectors = toy

[task mr]
kind = labeled
path = mr.tsv
n_classes = 2
split = fixed
train_indices = 0:20
test_indices = 20:30

[eval cls]
task = mr
encoder = avg
protocol = classify
classifier = logreg
normalization = both
l2_grid = 1e-3
max_epochs = 800
"""


def write_config(root, text=BASE_CONFIG, name="run.ini"):
    path = root / name
    path.write_text(text)
    return path


class TestConfigParsing:
    def test_load_and_validate(self, tmp_path):
        write_toy_workspace(tmp_path)
        cfg = load_config(write_config(tmp_path))
        validate_config(cfg)
        assert cfg.seed == 42
        assert len(expand_cells(cfg)) == 2  # normalization both -> two cells

    def test_unknown_reference(self, tmp_path):
        write_toy_workspace(tmp_path)
        text = BASE_CONFIG.replace("encoder = avg", "encoder = nonexistent")
        cfg = load_config(write_config(tmp_path, text))
        with pytest.raises(ConfigError, match="nonexistent"):
            validate_config(cfg)

    def test_missing_file(self, tmp_path):
        write_toy_workspace(tmp_path)
        text = BASE_CONFIG.replace("path = mr.tsv", "path = gone.tsv")
        cfg = load_config(write_config(tmp_path, text))
        with pytest.raises(ConfigError, match="not found"):
            validate_config(cfg)

    def test_protocol_task_kind_mismatch(self, tmp_path):
        write_toy_workspace(tmp_path)
        text = BASE_CONFIG.replace("protocol = classify", "protocol = ucp")
        cfg = load_config(write_config(tmp_path, text))
        with pytest.raises(ConfigError, match="pairs"):
            validate_config(cfg)

    def test_unknown_key_rejected(self, tmp_path):
        write_toy_workspace(tmp_path)
        cfg_path = write_config(tmp_path, BASE_CONFIG + "typo_key = 1\n")
        with pytest.raises(ConfigError, match="unknown keys"):
            load_config(cfg_path)

    def test_concat_cycle_detected(self, tmp_path):
        write_toy_workspace(tmp_path)
        text = BASE_CONFIG + (
            "\n[encoder c1]\ntype = concat\nparts = c2\n"
            "\n[encoder c2]\ntype = concat\nparts = c1\n"
        )
        cfg = load_config(write_config(tmp_path, text))
        with pytest.raises(ConfigError, match="cycle"):
            validate_config(cfg)


class TestCliValidate:
    def test_ok(self, tmp_path, capsys):
        write_toy_workspace(tmp_path)
        cfg = write_config(tmp_path)
        assert main(["validate", "--config", str(cfg)]) == 0
        assert "2 evaluation cells" in capsys.readouterr().out

    def test_invalid_exits_one(self, tmp_path, capsys):
        write_toy_workspace(tmp_path)
        text = BASE_CONFIG.replace("path = mr.tsv", "path = gone.tsv")
        cfg = write_config(tmp_path, text)
        assert main(["validate", "--config", str(cfg)]) == 1
        err = json.loads(capsys.readouterr().err)
        assert err["stage"] == "validate"


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestCliRun:
    def test_both_expansion_gives_two_rows(self, tmp_path):
        write_toy_workspace(tmp_path)
        cfg = write_config(tmp_path)
        assert main(["run", "--config", str(cfg)]) == 0
        rows = read_rows(tmp_path / "out" / "results.csv")
        assert rows[0] == report.RESULTS_HEADER
        assert len(rows) - 1 == 2
        normalized_flags = sorted(r[5] for r in rows[1:])
        assert normalized_flags == ["false", "true"]
        assert all(r[6] == "accuracy" for r in rows[1:])
        assert all(float(r[7]) == 1.0 for r in rows[1:])
        diag = read_rows(tmp_path / "out" / "diagnostics.csv")
        keys = {r[5] for r in diag[1:]}
        assert {"train_accuracy", "converged", "oov_tokens"} <= keys
        # normalization=both requests the delta analysis
        deltas = report.read_deltas_csv(tmp_path / "out" / "deltas.csv")
        assert len(deltas) == 1 and deltas[0].metric == "accuracy"

    def test_rerun_bytewise_identical(self, tmp_path):
        write_toy_workspace(tmp_path)
        cfg = write_config(tmp_path)
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "r1")]) == 0
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "r2")]) == 0
        b1 = (tmp_path / "r1" / "results.csv").read_bytes()
        b2 = (tmp_path / "r2" / "results.csv").read_bytes()
        assert b1 == b2
        assert (tmp_path / "r1" / "diagnostics.csv").read_bytes() == (
            tmp_path / "r2" / "diagnostics.csv"
        ).read_bytes()

    def test_missing_dataset_exits_one_without_outputs(self, tmp_path, capsys):
        write_toy_workspace(tmp_path)
        text = BASE_CONFIG.replace("path = mr.tsv", "path = gone.tsv")
        cfg = write_config(tmp_path, text)
        assert main(["run", "--config", str(cfg)]) == 1
        assert not (tmp_path / "out").exists()
        capsys.readouterr()

    def test_nonconvergence_exits_three(self, tmp_path, capsys):
        write_toy_workspace(tmp_path)
        text = BASE_CONFIG.replace("max_epochs = 800", "max_epochs = 2\ntolerance = 1e-12")
        assert "max_epochs = 2" in text
        cfg = write_config(tmp_path, text)
        assert main(["run", "--config", str(cfg)]) == 3
        assert (tmp_path / "out" / "results.csv").exists()
        capsys.readouterr()

    def test_full_protocol_matrix_with_workers(self, tmp_path):
        write_toy_workspace(tmp_path)
        text = BASE_CONFIG + """
[task sts]
kind = pairs
train = sts-train.csv
dev = sts-dev.csv
test = sts-test.csv

[encoder sif]
type = sif
vectors = toy
frequencies = tf

[frequencies tf]
path = freq.txt

[encoder both]
type = concat
parts = avg,sif

[eval u]
task = sts
encoder = avg
protocol = ucp
normalization = both

[eval sim]
task = sts
encoder = avg
protocol = learned_sim
normalization = off
l2_grid = 1e-4,1e-2

[eval mlpcls]
task = mr
encoder = both
protocol = classify
classifier = mlp
normalization = on
hidden_sizes = 3
l2_grid = 1e-3
max_epochs = 200

[sweep grow]
vectors = toy
sizes = 2,4
seed = 9
tasks = mr
classifier = logreg
references = avg
"""
        cfg = write_config(tmp_path, text, name="full.ini")
        code = main(["run", "--config", str(cfg), "--out", str(tmp_path / "full"), "--workers", "3"])
        assert code in (0, 3)
        rows = read_rows(tmp_path / "full" / "results.csv")
        protocols = {r[3] for r in rows[1:]}
        assert protocols == {"classify", "ucp", "learned_sim"}
        sweep_rows = read_rows(tmp_path / "full" / "sweep_grow.csv")
        kinds = {r[0] for r in sweep_rows[1:]}
        assert {"point", "task", "reference"} <= kinds

    def test_workers_do_not_change_results(self, tmp_path):
        write_toy_workspace(tmp_path)
        text = BASE_CONFIG + """
[task sts]
kind = pairs
train = sts-train.csv
dev = sts-dev.csv
test = sts-test.csv

[eval u]
task = sts
encoder = avg
protocol = ucp
normalization = both
"""
        cfg = write_config(tmp_path, text, name="w.ini")
        main(["run", "--config", str(cfg), "--out", str(tmp_path / "s1"), "--workers", "1"])
        main(["run", "--config", str(cfg), "--out", str(tmp_path / "s4"), "--workers", "4"])
        assert (tmp_path / "s1" / "results.csv").read_bytes() == (
            tmp_path / "s4" / "results.csv"
        ).read_bytes()


def table2_results():
    results = []
    for enc, (std, norm) in TABLE2.items():
        results.append(ucp_result(enc, False, std))
        results.append(ucp_result(enc, True, norm))
    return results


class TestCliAnalyze:
    def test_deltas_from_results_csv(self, tmp_path, capsys):
        results_path = tmp_path / "results.csv"
        report.write_results_csv(results_path, table2_results())
        out = tmp_path / "an"
        assert main(["analyze", "--results", str(results_path), "--out", str(out)]) == 0
        records = report.read_deltas_csv(out / "deltas.csv")
        assert len(records) == 9
        got = {r.encoder: round(r.delta_pp) for r in records}
        assert got == TABLE2_DELTAS
        capsys.readouterr()

    def test_table_analysis(self, tmp_path, table2_path, capsys):
        out = tmp_path / "an"
        assert main(["analyze", "--table", str(table2_path), "--out", str(out)]) == 0
        rows = read_rows(out / "dispersion.csv")
        by_col = {r[0]: (float(r[1]), float(r[2])) for r in rows[1:]}
        assert by_col["ucp-standard"][0] == pytest.approx(0.29)
        assert by_col["ucp-standard"][1] == pytest.approx(0.086, abs=1e-3)
        assert by_col["ucp-normalized"][1] == pytest.approx(0.024, abs=1e-3)
        capsys.readouterr()

    def test_nothing_to_do_exits_one(self, tmp_path, capsys):
        assert main(["analyze", "--out", str(tmp_path / "x")]) == 1
        capsys.readouterr()


def synthetic_score_table(tmp_path):
    path = tmp_path / "scores.csv"
    lines = ["encoder,task,kind,score\n"]
    scores = {
        "t1": [0.2, 0.5, 0.9],
        "t2": [0.9, 0.1, 0.4],
        "p1": [0.3, 0.6, 0.1],
        "p2": [0.8, 0.2, 0.5],
    }
    for task, vals in scores.items():
        kind = "transfer" if task.startswith("t") else "probing"
        for i, v in enumerate(vals):
            lines.append(f"e{i},{task},{kind},{v}\n")
    path.write_text("".join(lines))
    return path


class TestCliPlot:
    def test_delta_bars_cross_checked_against_csv(self, tmp_path, capsys):
        results_path = tmp_path / "results.csv"
        report.write_results_csv(results_path, table2_results())
        an = tmp_path / "an"
        main(["analyze", "--results", str(results_path), "--out", str(an)])
        out = tmp_path / "plots"
        assert main(["plot", "--deltas", str(an / "deltas.csv"), "--out", str(out)]) == 0

        svg = ET.parse(out / "delta_bars.svg").getroot()
        bars = [e for e in svg.iter() if e.get("class") == "bar"]
        assert len(bars) == 9
        by_label = {b.get("data-label"): b for b in bars}
        tallest = max(bars, key=lambda b: float(b.get("height")))
        assert tallest.get("data-label") == "glove-300d"
        assert float(by_label["glove-300d"].get("data-value")) == pytest.approx(21.0)

        csv_rows = read_rows(out / "delta_bars.csv")
        assert csv_rows[0][-1] == "plotted_value"
        plotted = {r[0]: float(r[-1]) for r in csv_rows[1:]}
        for b in bars:
            assert plotted[b.get("data-label")] == pytest.approx(float(b.get("data-value")))
        capsys.readouterr()

    def test_sts_tenth_scaling(self, tmp_path, capsys):
        results_path = tmp_path / "results.csv"
        report.write_results_csv(results_path, table2_results())
        an = tmp_path / "an"
        main(["analyze", "--results", str(results_path), "--out", str(an)])
        out = tmp_path / "plots"
        main(["plot", "--deltas", str(an / "deltas.csv"), "--sts-tenth", "--out", str(out)])
        svg = ET.parse(out / "delta_bars.svg").getroot()
        bars = {e.get("data-label"): e for e in svg.iter() if e.get("class") == "bar"}
        assert float(bars["glove-300d"].get("data-value")) == pytest.approx(2.1)
        capsys.readouterr()

    def test_heatmap_cells(self, tmp_path, capsys):
        table_path = synthetic_score_table(tmp_path)
        out = tmp_path / "plots"
        assert main(["plot", "--table", str(table_path), "--out", str(out)]) == 0
        svg = ET.parse(out / "correlation_heatmap.svg").getroot()
        cells = [e for e in svg.iter() if e.get("class") == "cell"]
        assert len(cells) == 4
        backing = read_rows(out / "correlation_heatmap.csv")
        rendered = {(c.get("data-row"), c.get("data-col")): float(c.get("data-value")) for c in cells}
        for row in backing[1:]:
            if row[0].startswith("__"):
                continue
            assert rendered[(row[0], row[1])] == pytest.approx(float(row[2]))
        capsys.readouterr()

    def test_sweep_plot(self, tmp_path, capsys):
        sweep = analysis.SizeSweepResult(
            points=[
                analysis.SweepPoint(size=100, task_scores={"a": 0.6}, mean_score=0.6),
                analysis.SweepPoint(size=300, task_scores={"a": 0.7}, mean_score=0.7),
            ],
            references={"fixed": (512, 0.68)},
        )
        sweep_path = tmp_path / "sweep_x.csv"
        report.write_sweep_csv(sweep_path, sweep)
        out = tmp_path / "plots"
        assert main(["plot", "--sweep", str(sweep_path), "--out", str(out)]) == 0
        svg = ET.parse(out / "size_sweep.svg").getroot()
        pts = [e for e in svg.iter() if e.get("class") == "pt"]
        refs = [e for e in svg.iter() if e.get("class") == "ref"]
        assert len(pts) == 2 and len(refs) == 1
        assert float(refs[0].get("data-y")) == pytest.approx(0.68)
        capsys.readouterr()

    def test_nothing_to_plot_exits_one(self, tmp_path, capsys):
        assert main(["plot", "--out", str(tmp_path / "p")]) == 1
        capsys.readouterr()


class TestMixedNormalizationFlags:
    def test_run_pairs_deltas_per_encoder(self, tmp_path, capsys):
        # one encoder evaluated both ways, another only normalized: the run
        # must succeed and report deltas only for the paired encoder
        write_toy_workspace(tmp_path)
        text = BASE_CONFIG + """
[encoder wide]
type = random_projection
vectors = toy
dim = 4
seed = 3

[eval single]
task = mr
encoder = wide
protocol = classify
classifier = logreg
normalization = on
l2_grid = 1e-3
max_epochs = 800
"""
        cfg = write_config(tmp_path, text, name="mixed.ini")
        assert main(["run", "--config", str(cfg)]) == 0
        records = report.read_deltas_csv(tmp_path / "out" / "deltas.csv")
        assert [r.encoder for r in records] == ["avg"]
        capsys.readouterr()

    def test_plot_missing_file_is_clean_validation_error(self, tmp_path, capsys):
        code = main(["plot", "--deltas", str(tmp_path / "nope.csv"), "--out", str(tmp_path)])
        assert code == 1
        err = json.loads(capsys.readouterr().err)
        assert err["stage"] == "plot"


class TestResultsCsvRoundTrip:
    def test_read_back(self, tmp_path):
        path = tmp_path / "results.csv"
        original = table2_results()
        report.write_results_csv(path, original)
        back = report.read_results_csv(path)
        assert len(back) == len(original)
        by_key = {(r.encoder, r.normalized): r for r in back}
        for r in original:
            twin = by_key[(r.encoder, r.normalized)]
            assert twin.metrics == r.metrics
            assert twin.embedding_size == r.embedding_size
