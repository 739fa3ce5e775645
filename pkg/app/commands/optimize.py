import logging
from pathlib import Path
from typing import Optional

import click

from app.commands.common import POSITIVE_FLOAT, POSITIVE_INT, fmt_error, fmt_time, resolve_mode
from app.core.errors import InvalidDuration
from app.experiments.jobs import recorded_error
from app.experiments.runner import ExperimentRunner, mode_label
from app.models.gate import TargetGate
from app.models.spin import SpinSystem
from app.optimizer.krotov import optimize as krotov_optimize
from app.optimizer.propagation import forward_trajectory
from app.schemas.archive import PulseMetadata
from app.schemas.manifest import NPolicy, RunSettings
from app.schemas.optimization import KrotovConfig
from app.utils.archive import load_pulse, save_pulse
from app.utils.pulses import pft_continue

logger = logging.getLogger(__name__)


@click.command("optimize")
@click.option("--d", "d", type=int, required=True, help="Number of levels (2..8).")
@click.option("--T", "T", type=float, required=True, help="Pulse duration in units of 1/q.")
@click.option("--N", "N", type=POSITIVE_INT, default=None, help="Time slices (default from the N policy).")
@click.option("--lambda-dt", type=POSITIVE_FLOAT, default=200.0, show_default=True, help="lambda / dt.")
@click.option("--restarts", type=POSITIVE_INT, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--phase", default="auto", show_default=True, help="auto, index k or label.")
@click.option("--max-iters", type=POSITIVE_INT, default=10000, show_default=True)
@click.option("--epsilon", type=POSITIVE_FLOAT, default=1e-10, show_default=True)
@click.option("--workers", type=POSITIVE_INT, default=1, show_default=True)
@click.option("--out", "out", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Write the best pulse to this archive.")
def optimize_command(d, T, N, lambda_dt, restarts, seed, phase, max_iters, epsilon, workers, out):
    """Optimize one QFT pulse with multi-restart Krotov and report its error."""
    system, target = SpinSystem(d=d), TargetGate.qft(d)
    if not T > 0:
        raise InvalidDuration(f"--T must be positive, got {T}")
    mode = resolve_mode(target, phase)
    settings = RunSettings(
        n=N or NPolicy().slices_for(d),
        lambda_over_dt=lambda_dt,
        epsilon=epsilon,
        max_iters=max_iters,
    )
    result = ExperimentRunner(settings, workers=workers).multi_restart(
        system, target, T, mode, restarts, seed
    )
    best = result.best
    click.echo(f"d = {d}; T = {fmt_time(T)}; N = {settings.n}; mode = {mode_label(target, mode)}")
    click.echo(f"final error = {fmt_error(best.final_error)}")
    phase_text = best.classified_phase if best.classified_phase else best.phase_label
    click.echo(f"phase = {phase_text}")
    click.echo(f"best restart = {best.restart_index} (seed {best.seed}); iterations = {best.iterations}")
    click.echo(f"max amplitude = {result.best_pulse.max_amplitude():.4g} q")
    if out is not None:
        metadata = PulseMetadata(
            **system.describe(), phase_label=phase_text, final_error=best.final_error, seed=best.seed
        )
        save_pulse(out, result.best_pulse, metadata)
        click.echo(f"archive = {out}")
    click.echo(f"wallclock = {best.wallclock_seconds:.1f} s")


@click.command("continue")
@click.option("--in", "source", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--deltaT", "delta_t", type=float, required=True, help="Shortening in units of 1/q.")
@click.option("--reoptimize", is_flag=True, help="Run Krotov from the compressed pulse.")
@click.option("--lambda-dt", type=POSITIVE_FLOAT, default=200.0, show_default=True)
@click.option("--max-iters", type=POSITIVE_INT, default=10000, show_default=True)
@click.option("--epsilon", type=POSITIVE_FLOAT, default=1e-10, show_default=True)
@click.option("--phase", default="auto", show_default=True)
@click.option("--out", "out", type=click.Path(dir_okay=False, path_type=Path), default=None)
def continue_command(source, delta_t, reoptimize, lambda_dt, max_iters, epsilon, phase, out: Optional[Path]):
    """Compress an archived pulse to T - deltaT, optionally re-optimizing it."""
    pulse, metadata = load_pulse(source)
    system = SpinSystem(d=metadata.d, q=metadata.q, detuning=metadata.detuning)
    target = TargetGate.qft(metadata.d)
    mode = resolve_mode(target, phase)
    shorter = pft_continue(pulse, delta_t)
    error = recorded_error(target, mode, forward_trajectory(system, shorter).final)
    click.echo(f"T = {fmt_time(pulse.T)} -> {fmt_time(shorter.T)}; N = {shorter.n}")
    click.echo(f"compressed error = {fmt_error(error)}")
    if reoptimize:
        config = KrotovConfig.from_lambda_over_dt(
            lambda_dt, shorter.dt, epsilon=epsilon, max_iters=max_iters, mode=mode
        )
        trace = krotov_optimize(system, target, shorter, config)
        shorter = trace.final_pulse
        error = recorded_error(target, mode, trace.final_unitary)
        click.echo(
            f"reoptimized error = {fmt_error(error)}; "
            f"iterations = {trace.iterations} ({trace.stop_reason.value})"
        )
    out = out or source.with_name(f"{source.stem}_T{shorter.T:g}.json")
    save_pulse(out, shorter, metadata.model_copy(update={"final_error": error}))
    click.echo(f"archive = {out}")
