import csv
import json
import statistics

import numpy as np
import pytest
from click.testing import CliRunner

from tspqaoa import bench
from tspqaoa.cli import main
from tspqaoa.encoding import EdgeEncoding
from tspqaoa.instance import generate_random, read_instance, write_instance


def small_config(tmp_path, **kw):
    base = dict(count=3, n=3, workers=1, out=tmp_path / "records.csv", timing=False)
    base.update(kw)
    return bench.ExperimentConfig(**base)


def test_config_defaults_and_overrides(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"count": 5, "n": 4, "encodings": "both", "weight_range": "2..9"}))
    cfg = bench.load_config(path, count=7, p=None)
    assert cfg.count == 7 and cfg.n == 4 and cfg.p == 2
    assert cfg.encodings == ["onehot", "edge"]
    assert cfg.weight_range == (2, 9)
    assert cfg.optimizer == "cobyla" and cfg.max_evals == 200


@pytest.mark.parametrize(
    "bad",
    [{"count": 0}, {"n": 2}, {"weight_range": "0..5"}, {"encodings": ["binary"]}, {"p": 2, "max_evals": 4}, {"bogus": 1}],
)
def test_config_rejects(bad):
    with pytest.raises(ValueError):
        bench.ExperimentConfig(**bad)


def test_instance_seeds_are_stable():
    assert bench.instance_seeds(0, 5) == bench.instance_seeds(0, 5)
    assert bench.instance_seeds(0, 5)[:3] == bench.instance_seeds(0, 3)
    assert len(set(bench.instance_seeds(1, 100))) == 100


def test_experiment_record_count_and_header(tmp_path):
    cfg = small_config(tmp_path)
    records = bench.run_experiment(cfg)
    assert len(records) == 6
    rows = list(csv.reader(cfg.out.open()))
    assert tuple(rows[0]) == bench.CSV_COLUMNS
    assert [(r[0], r[2]) for r in rows[1:]] == [(str(i), e) for i in range(3) for e in ("edge", "onehot")]
    for r in records:
        assert r.relative_error >= 0 and r.optimal_cost <= r.found_cost
    assert bench.read_records(cfg.out) == records


def test_experiment_is_byte_identical(tmp_path):
    a = small_config(tmp_path, n=4, count=2, out=tmp_path / "a.csv")
    b = small_config(tmp_path, n=4, count=2, out=tmp_path / "b.csv", workers=2)
    bench.run_experiment(a)
    bench.run_experiment(b)
    assert a.out.read_bytes() == b.out.read_bytes()


def test_timing_only_changes_wall_time(tmp_path):
    plain = bench.run_experiment(small_config(tmp_path), write=False)
    timed = bench.run_experiment(small_config(tmp_path, timing=True), write=False)
    strip = lambda rs: [r.row()[:-1] for r in rs]  # noqa: E731
    assert strip(plain) == strip(timed)
    assert all(r.wall_time_ms > 0 for r in timed)


def test_failed_runs_become_error_rows(tmp_path, monkeypatch):
    def boom(inst, cfg):
        raise RuntimeError("synthetic failure")

    monkeypatch.setattr(bench, "optimize", boom)
    cfg = small_config(tmp_path, count=2, encodings=["edge"])
    records = bench.run_experiment(cfg)
    assert len(records) == 2 and all(r.failed for r in records)
    text = cfg.out.read_text()
    assert text.count(",error,") == 2
    assert all(r.failed for r in bench.read_records(cfg.out))


def test_histogram_all_zero():
    h = bench.histogram([0.0, 0.0, 0.0], 0.05)
    assert h.counts == [3] and h.bin_edges == [0.0, 0.05]
    assert h.mean == 0 and h.median == 0 and h.count == 3


def test_histogram_bins():
    h = bench.histogram([0, 0, 0.01, 0.07, 0.2], 0.05)
    assert h.bin_edges == pytest.approx([0, 0.05, 0.1, 0.15, 0.2, 0.25])
    assert h.counts == [3, 1, 0, 0, 1]
    assert sum(h.counts) == h.count == 5
    assert h.modal_bin() == (0.0, 0.05)
    e = bench.histogram([12, 3, 40, 41, 44], 5)
    assert e.counts[0] == 1 and e.counts[2] == 1 and e.counts[8] == 3


def test_summarize_matches_raw_columns(tmp_path):
    cfg = small_config(tmp_path, n=4, count=4)
    bench.run_experiment(cfg)
    summary = bench.summarize(bench.read_records(cfg.out))
    with cfg.out.open() as fh:
        rows = list(csv.DictReader(fh))
    for enc, s in summary.items():
        mine = [r for r in rows if r["encoding"] == enc]
        assert s.mean_relative_error == statistics.fmean(float(r["relative_error"]) for r in mine)
        assert s.mean_eval_count == statistics.fmean(float(r["eval_count"]) for r in mine)
        assert s.runs == 4 and s.failures == 0
        assert sum(s.relative_error_hist.counts) == sum(s.eval_count_hist.counts) == 4


def test_summarize_empty():
    with pytest.raises(ValueError):
        bench.summarize([])


def test_write_summary(tmp_path):
    records = bench.run_experiment(small_config(tmp_path), write=False)
    summary = bench.summarize(records)
    bench.write_summary(summary, tmp_path / "s.bins.csv", tmp_path / "s.summary.json")
    payload = json.loads((tmp_path / "s.summary.json").read_text())
    assert set(payload) == {"edge", "onehot"}
    bins = list(csv.DictReader((tmp_path / "s.bins.csv").open()))
    assert {b["metric"] for b in bins} == {"relative_error", "eval_count"}


@pytest.mark.parametrize("seed", range(3))
def test_verify_passes_n4(seed):
    checks = bench.verify(generate_random(4, seed))
    assert all(c.passed for c in checks), [c for c in checks if not c.passed]
    assert max(c.residual for c in checks) < 1e-10


def test_verify_n5_counts():
    checks = {c.name: c for c in bench.verify(generate_random(5, 1))}
    assert checks["|F| = (n-1)! for edge"].passed
    assert checks["|F| = (n-1)! for onehot"].passed


def test_corrupted_phase_table_fails(monkeypatch):
    original = EdgeEncoding.phase_table

    def corrupted(self, inst):
        p0, p1 = original(self, inst)
        p1 = p1.copy()
        p1[0] += 0.01
        return p0, p1

    inst = generate_random(4, 0)
    enc = EdgeEncoding(4)
    direct = bench.check_phase_identity(enc, inst, *corrupted(enc, inst))
    assert not direct.passed and direct.residual == pytest.approx(0.01)
    monkeypatch.setattr(EdgeEncoding, "phase_table", corrupted)
    checks = {c.name: c for c in bench.verify(inst)}
    assert not checks["phase sum equals tour cost"].passed


def test_cli_generate_and_verify(tmp_path):
    runner = CliRunner()
    out = tmp_path / "inst"
    res = runner.invoke(main, ["generate", "--n", "4", "--count", "2", "--seed", "5", "--weight-range", "3..9", "--out", str(out)])
    assert res.exit_code == 0, res.output
    files = sorted(out.glob("*.json"))
    assert len(files) == 2
    inst = read_instance(files[0])
    off = inst.weights[~np.eye(4, dtype=bool)]
    assert off.min() >= 3 and off.max() <= 9
    res = runner.invoke(main, ["verify", str(files[0])])
    assert res.exit_code == 0, res.output
    assert "FAIL" not in res.output and "qubits: one-hot 9, edge 6" in res.output


def test_cli_solve(tmp_path):
    path = tmp_path / "i.json"
    write_instance(generate_random(4, 2), path)
    res = CliRunner().invoke(main, ["solve", str(path), "--encoding", "edge", "--max-evals", "30"])
    assert res.exit_code == 0, res.output
    payload = json.loads(res.output)
    assert payload["eval_count"] <= 30 and payload["relative_error"] >= 0
    res = CliRunner().invoke(main, ["solve", "--n", "3", "--encoding", "both", "--cost-form", "eq1"])
    assert set(json.loads(res.output)) == {"edge", "onehot"}


def test_cli_experiment_and_report(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"count": 2, "n": 3, "workers": 1, "timing": False, "out": str(tmp_path / "x.csv")}))
    out = tmp_path / "r.csv"
    runner = CliRunner()
    res = runner.invoke(main, ["experiment", "--config", str(cfg), "--encoding", "edge", "--out", str(out)])
    assert res.exit_code == 0, res.output
    assert len(out.read_text().splitlines()) == 3
    res = runner.invoke(main, ["report", str(out), "--out", str(tmp_path / "rep")])
    assert res.exit_code == 0, res.output
    assert (tmp_path / "rep.bins.csv").exists() and (tmp_path / "rep.summary.json").exists()


def test_cli_bad_weight_range():
    res = CliRunner().invoke(main, ["experiment", "--weight-range", "1-20"])
    assert res.exit_code != 0
