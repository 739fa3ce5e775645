import click

from app.verify import GRADIENT_SLICES, run_suite


@click.command("verify")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--gradient-slices", type=click.IntRange(min=10), default=GRADIENT_SLICES, show_default=True)
@click.pass_context
def verify_command(ctx, seed, gradient_slices):
    """Run the built-in invariant suite; exit 2 when any check fails."""
    results = run_suite(seed=seed, gradient_slices=gradient_slices)
    for result in results:
        click.echo(result.line())
    failed = [r for r in results if not r.passed]
    click.echo(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if failed:
        ctx.exit(2)
