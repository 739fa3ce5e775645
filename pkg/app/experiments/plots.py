"""Plot-ready CSV datasets and static SVG charts for export-plot.

Charts are always rendered from the CSV that was just written, so the same
CSV gives a byte-identical SVG.
"""
import csv
import logging
from collections import defaultdict
from enum import Enum
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from app.core.errors import CorruptArchive, StorageUnavailable  # noqa: E402
from app.optimizer.propagation import Pulse  # noqa: E402
from app.schemas.records import SweepRecord  # noqa: E402

logger = logging.getLogger(__name__)

plt.rcParams["svg.hashsalt"] = "qudit-qft-pulses"
plt.rcParams["svg.fonttype"] = "path"

PLOT_COLUMNS = ["d", "phase", "T", "final_error"]
PULSE_COLUMNS = ["t", "ux", "uy"]
# log axes cannot show an exact zero
ERROR_FLOOR = 1e-16


class Figure(str, Enum):
    error_curve = "error-curve"
    min_time = "min-time"
    pulse = "pulse"


def error_curve_rows(records: list[SweepRecord]) -> list[dict]:
    """Best final_error per (d, phase, T), sorted by d, phase and T."""
    best: dict[tuple[int, str, float], float] = {}
    for record in records:
        key = (record.d, record.phase_label, record.T)
        best[key] = min(best.get(key, record.final_error), record.final_error)
    return [
        {"d": d, "phase": phase, "T": T, "final_error": error}
        for (d, phase, T), error in sorted(best.items())
    ]


def min_time_rows(records: list[SweepRecord], threshold: float) -> list[dict]:
    """Smallest T of the passing run at the top of each (d, phase) curve."""
    curves: dict[tuple[int, str], list[dict]] = defaultdict(list)
    for row in error_curve_rows(records):
        curves[(row["d"], row["phase"])].append(row)
    rows = []
    for key in sorted(curves):
        points = curves[key]
        if points[-1]["final_error"] >= threshold:
            logger.warning(f"d={key[0]} {key[1]}: no passing duration in the records, skipped")
            continue
        top = len(points) - 1
        while top > 0 and points[top - 1]["final_error"] < threshold:
            top -= 1
        rows.append(points[top])
    return rows


def pulse_rows(pulse: Pulse) -> list[dict]:
    times = pulse.dt * np.arange(1, pulse.n + 1)
    return [
        {"t": float(t), "ux": float(ux), "uy": float(uy)}
        for t, ux, uy in zip(times, pulse.ux, pulse.uy)
    ]


def write_dataset(path: Path, columns: list[str], rows: list[dict]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.DictWriter(handle, fieldnames=columns)
            writer.writeheader()
            for row in rows:
                writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    except OSError as exc:
        raise StorageUnavailable(f"cannot write {path}: {exc}") from exc
    return path


def read_dataset(path: Path, columns: list[str]) -> list[dict]:
    try:
        with Path(path).open(newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            if reader.fieldnames != columns:
                raise CorruptArchive(f"{path} does not have the columns {','.join(columns)}")
            return list(reader)
    except OSError as exc:
        raise StorageUnavailable(f"cannot read {path}: {exc}") from exc


def _save_svg(fig, path: Path) -> Path:
    try:
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as exc:
        raise StorageUnavailable(f"cannot write {path}: {exc}") from exc
    finally:
        plt.close(fig)
    logger.info(f"Saved {path}")
    return path


def render_error_curve(csv_path: Path, svg_path: Path) -> Path:
    series: dict[tuple[int, str], list[tuple[float, float]]] = defaultdict(list)
    for row in read_dataset(csv_path, PLOT_COLUMNS):
        series[(int(row["d"]), row["phase"])].append((float(row["T"]), float(row["final_error"])))
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for (d, phase), points in sorted(series.items()):
        T, error = zip(*sorted(points))
        ax.semilogy(T, np.maximum(error, ERROR_FLOOR), marker="o", markersize=3, label=f"d={d} {phase}")
    ax.set_xlabel("T (1/q)")
    ax.set_ylabel("gate error")
    ax.set_title("QFT gate error versus pulse duration")
    if series:
        ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return _save_svg(fig, svg_path)


def render_min_time(csv_path: Path, svg_path: Path) -> Path:
    # odd and even d drawn as separate lines, best phase per d
    best: dict[str, dict[int, float]] = {"odd": {}, "even": {}}
    for row in read_dataset(csv_path, PLOT_COLUMNS):
        d, T = int(row["d"]), float(row["T"])
        tag = "odd" if d % 2 else "even"
        best[tag][d] = min(best[tag].get(d, T), T)
    fig, ax = plt.subplots(figsize=(6, 4))
    for tag, marker in (("even", "s"), ("odd", "o")):
        if best[tag]:
            dims = sorted(best[tag])
            ax.plot(dims, [best[tag][d] for d in dims], marker=marker, label=f"{tag} d")
    ax.set_xlabel("d")
    ax.set_ylabel("T_min (1/q)")
    ax.set_title("Minimum QFT gate time versus number of levels")
    if best["odd"] or best["even"]:
        ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return _save_svg(fig, svg_path)


def render_pulse(csv_path: Path, svg_path: Path) -> Path:
    rows = read_dataset(csv_path, PULSE_COLUMNS)
    t = [float(r["t"]) for r in rows]
    fig, axs = plt.subplots(2, 1, figsize=(7, 4.5), sharex=True)
    for ax, key in zip(axs, ("ux", "uy")):
        ax.step(t, [float(r[key]) for r in rows], where="pre")
        ax.set_ylabel(f"{key} (q)")
        ax.grid(True, alpha=0.3)
    axs[1].set_xlabel("t (1/q)")
    axs[0].set_title("Optimized control amplitudes")
    fig.tight_layout()
    return _save_svg(fig, svg_path)


RENDERERS = {
    Figure.error_curve: render_error_curve,
    Figure.min_time: render_min_time,
    Figure.pulse: render_pulse,
}


def export_records_plot(
    records: list[SweepRecord], figure: Figure, out_dir: Path, threshold: float = 1e-5
) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    if figure == Figure.error_curve:
        rows = error_curve_rows(records)
    else:
        rows = min_time_rows(records, threshold)
    stem = figure.value.replace("-", "_")
    csv_path = write_dataset(out_dir / f"{stem}.csv", PLOT_COLUMNS, rows)
    return csv_path, RENDERERS[figure](csv_path, out_dir / f"{stem}.svg")


def export_pulse_plot(pulse: Pulse, out_dir: Path, stem: str = "pulse") -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    csv_path = write_dataset(out_dir / f"{stem}.csv", PULSE_COLUMNS, pulse_rows(pulse))
    return csv_path, render_pulse(csv_path, out_dir / f"{stem}.svg")
