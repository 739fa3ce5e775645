import logging
from pathlib import Path

import click

from app.commands.common import (
    POSITIVE_FLOAT,
    POSITIVE_INT,
    fmt_error,
    fmt_time,
    load_manifest,
    parse_floats,
    resolve_mode,
)
from app.core.config import get_out_dir
from app.experiments.runner import ExperimentRunner, run_manifest
from app.experiments.storage import RecordStore
from app.models.gate import TargetGate
from app.models.spin import SpinSystem
from app.schemas.manifest import NPolicy, RunSettings, default_grid

logger = logging.getLogger(__name__)


@click.command("sweep")
@click.option("--manifest", "manifest_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              required=True, help="JSON sweep manifest.")
def sweep_command(manifest_path):
    """Run the error-curve or minimum-time study described by a manifest."""
    manifest = load_manifest(manifest_path)
    out_dir = Path(manifest.out_dir) if manifest.out_dir else get_out_dir()
    logger.info(f"Sweep {manifest.study.value} for d={manifest.d_list} into {out_dir}")
    summary = run_manifest(manifest, out_dir)
    for (d, label), points in summary.curves.items():
        best = min(p.best_error for p in points)
        click.echo(f"d = {d}; phase = {label}; points = {len(points)}; lowest error = {fmt_error(best)}")
    for row in summary.min_times:
        if row.estimate is None:
            click.echo(f"d = {row.d} ({row.parity}); phase = {row.phase_label}; failed: {row.failure}")
            continue
        estimate = row.estimate
        click.echo(
            f"d = {row.d} ({row.parity}); phase = {row.phase_label}; "
            f"T_min = {fmt_time(estimate.T_min)} ({estimate.method.value})"
        )
    click.echo(f"records = {out_dir / 'records.csv'}")
    for path in summary.datasets:
        click.echo(f"dataset = {path}")


@click.command("min-time")
@click.option("--d", "d", type=int, required=True)
@click.option("--threshold", type=click.FloatRange(min=0, max=1, min_open=True, max_open=True),
              default=1e-5, show_default=True)
@click.option("--grid", default=None, help="Durations as 'a,b,c' or 'start:stop:step' (default 0.5:12:0.5).")
@click.option("--refine", default="0.1,0.02", show_default=True, help="Refinement steps, comma separated.")
@click.option("--N", "N", type=POSITIVE_INT, default=None)
@click.option("--lambda-dt", type=POSITIVE_FLOAT, default=200.0, show_default=True)
@click.option("--restarts", type=POSITIVE_INT, default=30, show_default=True)
@click.option("--max-iters", type=POSITIVE_INT, default=10000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--phase", default="auto", show_default=True)
@click.option("--no-pft-seed", is_flag=True, help="Random restarts at every grid point.")
@click.option("--workers", type=POSITIVE_INT, default=1, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path), default=None)
def min_time_command(
    d, threshold, grid, refine, N, lambda_dt, restarts, max_iters, seed, phase, no_pft_seed, workers, out_dir
):
    """Estimate the minimum duration whose best error is below the threshold."""
    system, target = SpinSystem(d=d), TargetGate.qft(d)
    mode = resolve_mode(target, phase)
    T_grid = parse_floats(grid, "--grid") if grid else default_grid()
    steps = parse_floats(refine, "--refine") if refine else []
    if any(step <= 0 for step in steps):
        raise click.BadParameter("refinement steps must be positive", param_hint="--refine")
    settings = RunSettings(
        n=N or NPolicy().slices_for(d),
        lambda_over_dt=lambda_dt,
        max_iters=max_iters,
        threshold=threshold,
        refine_steps=steps,
        pft_seed=not no_pft_seed,
    )
    store = RecordStore(out_dir or get_out_dir())
    runner = ExperimentRunner(settings, store=store, workers=workers)
    estimate = runner.min_time(system, target, mode, T_grid, restarts, seed)
    click.echo(f"d = {d}; phase = {estimate.phase_label}; threshold = {threshold:g}")
    click.echo(f"T_min = {fmt_time(estimate.T_min)} ({estimate.method.value})")
    T_fail, T_pass = estimate.bracketing
    click.echo(f"bracket = ({T_fail:g}, {T_pass:g}) 1/q")
    if estimate.record is not None:
        record = estimate.record
        classified = f"; classified = {record.classified_phase}" if record.classified_phase else ""
        click.echo(f"error at T_min = {fmt_error(record.final_error)}{classified}")
    click.echo(f"records = {store.records_path}")
