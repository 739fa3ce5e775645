import click

from app.models.gate import TargetGate


@click.command("phases")
@click.option("--d", "d", type=int, required=True)
def phases_command(d):
    """Print phi0 and the admissible global phases of the QFT target."""
    target = TargetGate.qft(d)
    labels = target.labels()
    click.echo(f"phi0 = {labels[0]}; set = {', '.join(labels)}")
    click.echo(f"radians = {', '.join(f'{phi:.9f}' for phi in target.phases)}")
