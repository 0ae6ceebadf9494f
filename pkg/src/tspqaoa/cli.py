"""Command line entry point: ``tspqaoa generate|solve|experiment|report|verify``."""

from __future__ import annotations

import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import click

from . import bench
from .encoding import gate_count_report
from .instance import generate_random, read_instance, write_instance
from .qaoa import QaoaConfig, optimize

ENCODINGS = click.Choice(["edge", "onehot", "both"])
OPTIMIZERS = click.Choice(["cobyla", "nelder-mead"])
COST_FORMS = click.Choice(["plain", "eq1"])


def _weight_range(ctx, param, value):
    if value is None:
        return None
    try:
        return bench.parse_weight_range(value)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None


def _load_or_generate(path, n, seed, weight_range):
    if path is not None:
        return read_instance(path)
    if n is None:
        raise click.UsageError("give an instance file or --n (with --seed)")
    lo, hi = weight_range or (1, 20)
    return generate_random(n, seed, lo, hi)


@click.group()
@click.option("-v", "--verbose", is_flag=True)
def main(verbose: bool) -> None:
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")


@main.command()
@click.option("--n", type=int, default=4, show_default=True)
@click.option("--count", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--weight-range", callback=_weight_range, default="1..20", show_default=True)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=Path("instances"), show_default=True)
def generate(n, count, seed, weight_range, out):
    """Write COUNT random instances as JSON files into OUT."""
    out.mkdir(parents=True, exist_ok=True)
    for i, s in enumerate(bench.instance_seeds(seed, count)):
        path = out / f"instance_{i:04d}.json"
        write_instance(generate_random(n, s, *weight_range), path)
        click.echo(path)


@main.command()
@click.argument("instance", required=False, type=click.Path(exists=True, dir_okay=False))
@click.option("--n", type=int)
@click.option("--seed", type=int, default=0, show_default=True, help="Instance seed (if generated) and angle seed.")
@click.option("--weight-range", callback=_weight_range)
@click.option("--encoding", type=ENCODINGS, default="edge", show_default=True)
@click.option("--p", type=int, default=2, show_default=True)
@click.option("--optimizer", type=OPTIMIZERS, default="cobyla", show_default=True)
@click.option("--max-evals", type=int, default=200, show_default=True)
@click.option("--cost-form", type=COST_FORMS, default="plain", show_default=True)
def solve(instance, n, seed, weight_range, encoding, p, optimizer, max_evals, cost_form):
    """Run QAOA on one instance and print the result as JSON."""
    inst = _load_or_generate(instance, n, seed, weight_range)
    kinds = ["onehot", "edge"] if encoding == "both" else [encoding]
    results = {}
    for kind in kinds:
        cfg = QaoaConfig(p=p, encoding=kind, optimizer=optimizer, max_evals=max_evals, seed=seed, cost_form=cost_form)
        res = optimize(inst, cfg)
        payload = asdict(res)
        payload["final_distribution"] = {str(k): v for k, v in res.final_distribution.items()}
        results[kind] = payload
    click.echo(json.dumps(results if len(kinds) > 1 else results[kinds[0]], indent=2))


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--n", type=int)
@click.option("--count", type=int)
@click.option("--seed", type=int)
@click.option("--encoding", type=ENCODINGS)
@click.option("--p", type=int)
@click.option("--optimizer", type=OPTIMIZERS)
@click.option("--max-evals", type=int)
@click.option("--weight-range", callback=_weight_range)
@click.option("--workers", type=int)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--cost-form", type=COST_FORMS)
@click.option("--timing/--no-timing", default=None, help="Record wall time (disable for byte-identical reruns).")
def experiment(config_path, encoding, **flags):
    """Run a batch of QAOA experiments and write the records CSV."""
    try:
        cfg = bench.load_config(config_path, encodings=encoding, **flags)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    records = bench.run_experiment(cfg)
    click.echo(f"wrote {len(records)} records to {cfg.out}")
    _print_summary(bench.summarize(records))


@main.command()
@click.argument("records", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", type=click.Path(path_type=Path), help="Output prefix for <out>.bins.csv and <out>.summary.json.")
@click.option("--error-bin-width", type=float, default=0.05, show_default=True)
@click.option("--eval-bin-width", type=float, default=5, show_default=True)
def report(records, out, error_bin_width, eval_bin_width):
    """Summarize a records CSV into histograms and statistics."""
    summary = bench.summarize(
        bench.read_records(records), error_bin_width=error_bin_width, eval_bin_width=eval_bin_width
    )
    prefix = out or records.with_suffix("")
    bench.write_summary(summary, f"{prefix}.bins.csv", f"{prefix}.summary.json")
    _print_summary(summary)


@main.command()
@click.argument("instance", required=False, type=click.Path(exists=True, dir_okay=False))
@click.option("--n", type=int)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--weight-range", callback=_weight_range)
def verify(instance, n, seed, weight_range):
    """Check encoding, simulator and solver invariants on one instance."""
    inst = _load_or_generate(instance, n, seed, weight_range)
    checks = bench.verify(inst)
    for c in checks:
        click.echo(f"{'PASS' if c.passed else 'FAIL'}  {c.name:<42} residual={c.residual:.3e}")
    counts = gate_count_report(inst.n)
    click.echo(f"qubits: one-hot {counts.onehot_qubits}, edge {counts.edge_qubits}")
    if not all(c.passed for c in checks):
        sys.exit(1)


def _print_summary(summary: dict[str, bench.EncodingSummary]) -> None:
    click.echo(f"{'encoding':<8} {'runs':>5} {'fail':>4} {'mean err':>9} {'optimal':>8} {'mean evals':>10} {'median evals':>12}")
    for s in summary.values():
        click.echo(
            f"{s.encoding:<8} {s.runs:>5} {s.failures:>4} {s.mean_relative_error:>9.4f} "
            f"{s.fraction_optimal:>8.3f} {s.mean_eval_count:>10.2f} {s.median_eval_count:>12.1f}"
        )


if __name__ == "__main__":
    main()
