import csv
import io

import pytest

from dyncut import gen_synthetic, write_dimacs, build_seg2
from dyncut.bench import (CSV_COLUMNS, BenchConfig, CutMismatchError,
                          flow_reuse_probe, load_input, run_bench)
from dyncut.cli import load_config_file, main

from conftest import golden_graph


def test_csv_schema_is_stable():
    cfg = BenchConfig(input="synthetic:seg2_random:4x4", problem="seg2",
                      modes=("serial",), n_subgraphs=1, repetitions=1)
    report = run_bench(cfg)
    rows = list(csv.DictReader(io.StringIO(report.to_csv())))
    assert list(rows[0].keys()) == CSV_COLUMNS
    assert rows[0]["mode"] == "serial"
    assert rows[0]["converged"] == "1"


def test_single_pixel_single_subgraph_report():
    cfg = BenchConfig(input="synthetic:seg2_random:1x1", problem="seg2",
                      modes=("serial",), n_subgraphs=1, repetitions=1)
    report = run_bench(cfg)
    row = report.rows[0]
    assert row.relative_time == 1.0
    assert row.converged


def test_worst_case_synthetic_report_flags():
    cfg = BenchConfig(input="synthetic:seg1_worst:16x16", problem="seg1",
                      modes=("baseline_pbk", "naive_converged"),
                      n_subgraphs=4, iter_patience=5, max_iterations=60,
                      repetitions=1)
    report = run_bench(cfg)
    by_mode = {row.mode: row for row in report.rows}
    assert not by_mode["baseline_pbk"].converged
    assert by_mode["baseline_pbk"].iterations == 60
    assert by_mode["naive_converged"].converged
    assert by_mode["naive_converged"].cut_value == by_mode["serial"].cut_value


def test_dimacs_input_bench(tmp_path):
    path = tmp_path / "g.dimacs"
    path.write_text(write_dimacs(golden_graph()))
    cfg = BenchConfig(input=str(path), problem="raw",
                      modes=("naive_converged",), n_subgraphs=2,
                      iter_patience=3, repetitions=1)
    report = run_bench(cfg)
    by_mode = {row.mode: row for row in report.rows}
    assert by_mode["naive_converged"].cut_value == by_mode["serial"].cut_value
    assert by_mode["naive_converged"].relative_reused_flow is not None


def test_flow_reuse_probe_runs():
    img = gen_synthetic("seg2_random", 16, 16, seed=1)
    g = build_seg2(img)
    probe = flow_reuse_probe(g, img, n_subgraphs=2, iterations=5,
                             repetitions=1)
    assert 0.0 <= probe.relative_reused_flow <= 1.0
    assert probe.maxflow == probe.reused_flow or \
        probe.maxflow > probe.reused_flow


def test_load_input_rejects_bad_specs():
    with pytest.raises(ValueError, match="synthetic"):
        load_input(BenchConfig(input="synthetic:seg1_worst", problem="seg1"))
    with pytest.raises(ValueError, match="needs an image"):
        load_input(BenchConfig(input="nonexistent.dimacs", problem="seg2"))


def test_mismatch_detection(monkeypatch):
    import dyncut.bench as bench_mod

    cfg = BenchConfig(input="synthetic:seg2_random:4x4", problem="seg2",
                      modes=("naive_converged",), n_subgraphs=2,
                      repetitions=1)

    real_engine = bench_mod.Engine

    class LyingEngine(real_engine):
        def run(self):
            result = super().run()
            result.cut_value = result.cut_value + bench_mod.Cap(1)
            return result

    monkeypatch.setattr(bench_mod, "Engine", LyingEngine)
    with pytest.raises(CutMismatchError):
        run_bench(cfg)


# -- CLI ------------------------------------------------------------------------------


def test_cli_end_to_end(tmp_path, capsys):
    out = tmp_path / "report.csv"
    code = main(["--input", "synthetic:seg2_random:6x6", "--problem", "seg2",
                 "--mode", "naive_converged", "--threads", "2",
                 "--iter", "5", "--repetitions", "1", "--out", str(out)])
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert {row["mode"] for row in rows} == {"serial", "naive_converged"}


def test_cli_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "bench.cfg"
    cfg.write_text(
        "# comment line\n"
        "input = synthetic:seg2_random:6x6\n"
        "problem = seg2\n"
        "threads = 2\n"
        "iter = 5\n"
        "repetitions = 1\n"
        "mode = naive_converged\n")
    code = main(["--config", str(cfg), "--threads", "3"])
    assert code == 0
    out = capsys.readouterr().out
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["n_subgraphs"] == "3"


def test_cli_rejects_unknown_config_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("inputt = x\n")
    with pytest.raises(ValueError, match="unknown key"):
        load_config_file(str(cfg))


def test_cli_error_paths(tmp_path, capsys):
    assert main([]) == 2                             # no input
    missing = tmp_path / "missing.pgm"
    code = main(["--input", str(missing), "--problem", "seg2",
                 "--repetitions", "1"])
    assert code == 2
