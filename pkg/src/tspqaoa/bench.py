"""Experiment harness: batch runs, summaries and single-instance diagnostics.

Records CSV columns, in this order::

    instance_id,seed,encoding,p,optimal_cost,found_cost,relative_error,eval_count,wall_time_ms

Failed runs are kept as rows with ``relative_error`` set to ``error`` and the
found cost left empty. Rows are sorted by ``(instance_id, encoding)``.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from itertools import permutations
from pathlib import Path
from typing import Iterable, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .encoding import EdgeEncoding, OneHotEncoding, enumerate_feasible, scan_feasible
from .exact import brute_force, held_karp
from .instance import TspInstance, as_normalized, generate_random, tour_cost
from .qaoa import Evolution, QaoaConfig, optimize

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "instance_id",
    "seed",
    "encoding",
    "p",
    "optimal_cost",
    "found_cost",
    "relative_error",
    "eval_count",
    "wall_time_ms",
)
ERROR_MARK = "error"


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    count: int = Field(1000, ge=1)
    n: int = Field(4, ge=3, le=6)
    seed: int = Field(0, ge=0)
    encodings: list[Literal["edge", "onehot"]] = ["onehot", "edge"]
    p: int = Field(2, ge=1)
    optimizer: Literal["cobyla", "nelder-mead"] = "cobyla"
    max_evals: int = 200
    weight_range: tuple[int, int] = (1, 20)
    workers: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    out: Path = Path("records.csv")
    cost_form: Literal["plain", "eq1"] = "plain"
    timing: bool = True

    @field_validator("encodings", mode="before")
    @classmethod
    def _expand_both(cls, v):
        if v == "both" or v == ["both"]:
            return ["onehot", "edge"]
        if isinstance(v, str):
            return [v]
        return v

    @field_validator("weight_range", mode="before")
    @classmethod
    def _parse_range(cls, v):
        return parse_weight_range(v) if isinstance(v, str) else v

    @model_validator(mode="after")
    def _check(self) -> ExperimentConfig:
        lo, hi = self.weight_range
        if not 1 <= lo <= hi:
            raise ValueError(f"weight_range must satisfy 1 <= lo <= hi, got {lo}..{hi}")
        if not self.encodings:
            raise ValueError("encodings must not be empty")
        if self.max_evals < 2 * self.p + 1:
            raise ValueError(f"max_evals must be >= 2p+1 = {2 * self.p + 1}")
        return self


def parse_weight_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise ValueError(f"weight range must look like 'lo..hi', got {text!r}")
    return int(lo), int(hi)


def load_config(path: str | Path | None = None, **overrides) -> ExperimentConfig:
    """Read a JSON config file; keyword overrides (e.g. CLI flags) win."""
    data = {}
    if path is not None:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    data.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.model_validate(data)


@dataclass(frozen=True)
class ExperimentRecord:
    instance_id: int
    seed: int
    encoding: str
    p: int
    optimal_cost: float
    found_cost: float | None
    relative_error: float | None
    eval_count: int
    wall_time_ms: float

    @property
    def failed(self) -> bool:
        return self.relative_error is None

    def row(self) -> list[str]:
        return [
            str(self.instance_id),
            str(self.seed),
            self.encoding,
            str(self.p),
            _fmt(self.optimal_cost),
            "" if self.found_cost is None else _fmt(self.found_cost),
            ERROR_MARK if self.relative_error is None else _fmt(self.relative_error),
            str(self.eval_count),
            f"{self.wall_time_ms:.3f}",
        ]


def _fmt(x: float) -> str:
    return repr(float(x))


def instance_seeds(master_seed: int, count: int) -> list[int]:
    """Per-instance seeds, independent of worker count and execution order."""
    children = np.random.SeedSequence(master_seed).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def _run_one(job: tuple[int, int, str, ExperimentConfig]) -> ExperimentRecord:
    instance_id, seed, encoding, cfg = job
    inst = generate_random(cfg.n, seed, *cfg.weight_range)
    qcfg = QaoaConfig(
        p=cfg.p,
        encoding=encoding,
        optimizer=cfg.optimizer,
        max_evals=cfg.max_evals,
        seed=seed,
        cost_form=cfg.cost_form,
    )
    start = time.perf_counter()
    try:
        res = optimize(inst, qcfg)
    except Exception as exc:  # noqa: BLE001 - failures become explicit rows
        log.error("instance %d (%s) failed: %s", instance_id, encoding, exc)
        return ExperimentRecord(
            instance_id, seed, encoding, cfg.p, held_karp(inst).cost, None, None, 0, 0.0
        )
    elapsed = (time.perf_counter() - start) * 1000 if cfg.timing else 0.0
    return ExperimentRecord(
        instance_id,
        seed,
        encoding,
        cfg.p,
        res.optimal_cost,
        res.found_cost,
        res.relative_error,
        res.eval_count,
        elapsed,
    )


def run_experiment(cfg: ExperimentConfig, *, write: bool = True) -> list[ExperimentRecord]:
    seeds = instance_seeds(cfg.seed, cfg.count)
    jobs = [(i, s, enc, cfg) for i, s in enumerate(seeds) for enc in cfg.encodings]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(_run_one, jobs, chunksize=8))
    else:
        records = [_run_one(j) for j in jobs]
    records.sort(key=lambda r: (r.instance_id, r.encoding))
    if write:
        write_records(records, cfg.out)
    return records


def write_records(records: Iterable[ExperimentRecord], path: str | Path) -> None:
    path = Path(path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow(r.row())


def read_records(path: str | Path) -> list[ExperimentRecord]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        out = []
        for row in reader:
            failed = row["relative_error"] == ERROR_MARK
            out.append(
                ExperimentRecord(
                    instance_id=int(row["instance_id"]),
                    seed=int(row["seed"]),
                    encoding=row["encoding"],
                    p=int(row["p"]),
                    optimal_cost=float(row["optimal_cost"]),
                    found_cost=None if failed else float(row["found_cost"]),
                    relative_error=None if failed else float(row["relative_error"]),
                    eval_count=int(row["eval_count"]),
                    wall_time_ms=float(row["wall_time_ms"]),
                )
            )
    return out


@dataclass(frozen=True)
class Histogram:
    bin_edges: list[float]
    counts: list[int]
    mean: float
    median: float
    count: int

    def modal_bin(self) -> tuple[float, float]:
        i = int(np.argmax(self.counts))
        return self.bin_edges[i], self.bin_edges[i + 1]


def histogram(values: list[float], width: float) -> Histogram:
    """Fixed-width bins starting at 0; the last bin contains the maximum."""
    if not values:
        raise ValueError("cannot build a histogram from no values")
    arr = np.asarray(values, dtype=float)
    nbins = int(math.floor(arr.max() / width)) + 1
    edges = width * np.arange(nbins + 1)
    counts, _ = np.histogram(arr, bins=edges)
    return Histogram(
        [float(e) for e in edges],
        [int(c) for c in counts],
        statistics.fmean(values),
        statistics.median(values),
        len(values),
    )


@dataclass(frozen=True)
class EncodingSummary:
    encoding: str
    runs: int
    failures: int
    mean_relative_error: float
    median_relative_error: float
    fraction_optimal: float
    mean_eval_count: float
    median_eval_count: float
    mean_wall_time_ms: float
    relative_error_hist: Histogram
    eval_count_hist: Histogram


def summarize(
    records: list[ExperimentRecord],
    *,
    error_bin_width: float = 0.05,
    eval_bin_width: float = 5,
) -> dict[str, EncodingSummary]:
    if not records:
        raise ValueError("no records to summarize")
    out = {}
    for enc in sorted({r.encoding for r in records}):
        rows = [r for r in records if r.encoding == enc]
        ok = [r for r in rows if not r.failed]
        if not ok:
            raise ValueError(f"every {enc} run failed")
        errs = [r.relative_error for r in ok]
        evals = [float(r.eval_count) for r in ok]
        eh = histogram(errs, error_bin_width)
        ch = histogram(evals, eval_bin_width)
        out[enc] = EncodingSummary(
            encoding=enc,
            runs=len(rows),
            failures=len(rows) - len(ok),
            mean_relative_error=eh.mean,
            median_relative_error=eh.median,
            fraction_optimal=sum(e == 0 for e in errs) / len(errs),
            mean_eval_count=ch.mean,
            median_eval_count=ch.median,
            mean_wall_time_ms=statistics.fmean(r.wall_time_ms for r in ok),
            relative_error_hist=eh,
            eval_count_hist=ch,
        )
    return out


def write_summary(summary: dict[str, EncodingSummary], bins_path: str | Path, json_path: str | Path) -> None:
    with Path(bins_path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["encoding", "metric", "bin_lo", "bin_hi", "count"])
        for enc, s in summary.items():
            for metric, h in (("relative_error", s.relative_error_hist), ("eval_count", s.eval_count_hist)):
                for lo, hi, c in zip(h.bin_edges, h.bin_edges[1:], h.counts):
                    w.writerow([enc, metric, _fmt(lo), _fmt(hi), c])
    payload = {enc: asdict(s) for enc, s in summary.items()}
    Path(json_path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: float
    detail: str = ""


def check_phase_identity(encoding: EdgeEncoding, inst, phase0, phase1) -> Check:
    """Per-qubit branch phases summed over each feasible state versus its tour cost."""
    ninst = as_normalized(inst)
    worst = 0.0
    for rest in permutations(range(1, encoding.n)):
        order = (0,) + rest
        a = encoding.encode(order)
        bits = np.array([a >> i & 1 for i in range(encoding.qubit_count)], dtype=bool)
        total = float(np.where(bits, phase1, phase0).sum())
        worst = max(worst, abs(total - tour_cost(ninst, order)))
    return Check("phase sum equals tour cost", worst < 1e-12, worst)


def verify(inst: TspInstance, *, angle_seed: int = 0) -> list[Check]:
    """Run the invariant suite on one instance; failures are reported, not raised."""
    if inst.n > 6:
        raise ValueError(f"verify supports n <= 6, got n={inst.n}")
    ninst = as_normalized(inst)
    n = inst.n
    edge, onehot = EdgeEncoding(n), OneHotEncoding(n)
    checks = [check_phase_identity(edge, ninst, *edge.phase_table(ninst))]

    expected = math.factorial(n - 1)
    fe, fo = enumerate_feasible(edge, ninst), enumerate_feasible(onehot, ninst)
    for enc, fs in ((edge, fe), (onehot, fo)):
        checks.append(Check(f"|F| = (n-1)! for {enc.kind}", len(fs) == expected, abs(len(fs) - expected)))
        if enc.qubit_count <= 16:
            scanned = scan_feasible(enc)
            same = sorted(scanned) == sorted(int(a) for a in fs.indices)
            checks.append(Check(f"exhaustive scan agrees for {enc.kind}", same, 0.0 if same else 1.0))
        roundtrip = all(enc.encode(enc.decode(int(a))) == a for a in fs.indices)
        checks.append(Check(f"decode/encode round trip for {enc.kind}", roundtrip, 0.0 if roundtrip else 1.0))

    spread = float(np.max(np.abs(np.sort(fe.costs) - np.sort(fo.costs))))
    checks.append(Check("encodings share the tour-cost multiset", spread < 1e-12, spread))

    rng = np.random.default_rng(angle_seed)
    angles = rng.uniform(0, 2 * math.pi, size=6)
    for enc, fs in ((edge, fe), (onehot, fo)):
        state = Evolution(ninst, enc, feasible=fs).state(angles)
        probs = state.probabilities()
        outside = np.ones(probs.size, dtype=bool)
        outside[fs.indices] = False
        leak = float(probs[outside].sum())
        drift = abs(state.norm() - 1)
        checks.append(Check(f"mixer keeps {enc.kind} state feasible", leak <= 1e-10, leak))
        checks.append(Check(f"norm preserved for {enc.kind}", drift <= 1e-10, drift))

    hk, bf = held_karp(inst).cost, brute_force(inst).cost
    checks.append(Check("Held-Karp matches brute force", abs(hk - bf) <= 1e-9, abs(hk - bf)))
    return checks
