from pathlib import Path

import click

from app.core.config import get_out_dir
from app.experiments.plots import Figure, export_pulse_plot, export_records_plot
from app.experiments.storage import read_records
from app.utils.archive import load_pulse

EXISTING_FILE = click.Path(exists=True, dir_okay=False, path_type=Path)


@click.command("export-plot")
@click.option("--figure", type=click.Choice([f.value for f in Figure]), required=True)
@click.option("--records", "records_path", type=EXISTING_FILE, default=None, help="Records CSV.")
@click.option("--archive", "archive_path", type=EXISTING_FILE, default=None, help="Pulse archive (pulse figure).")
@click.option("--threshold", type=float, default=1e-5, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False, path_type=Path), default=None)
def export_plot_command(figure, records_path, archive_path, threshold, out_dir):
    """Write a plot-ready CSV and its SVG chart."""
    figure = Figure(figure)
    out_dir = out_dir or get_out_dir()
    if figure == Figure.pulse:
        if archive_path is None:
            raise click.UsageError("--figure pulse needs --archive")
        pulse, _ = load_pulse(archive_path)
        csv_path, svg_path = export_pulse_plot(pulse, out_dir, stem=archive_path.stem)
    else:
        if records_path is None:
            raise click.UsageError(f"--figure {figure.value} needs --records")
        csv_path, svg_path = export_records_plot(read_records(records_path), figure, out_dir, threshold)
    click.echo(f"csv = {csv_path}")
    click.echo(f"svg = {svg_path}")
