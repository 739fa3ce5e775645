"""Tests for plot datasets and their SVG rendering."""
import pytest

from app.core.errors import CorruptArchive
from app.experiments.plots import (
    PLOT_COLUMNS,
    Figure,
    error_curve_rows,
    export_pulse_plot,
    export_records_plot,
    min_time_rows,
    read_dataset,
)
from app.optimizer.propagation import Pulse
from app.schemas.optimization import StopReason
from app.schemas.records import SweepRecord


def record(d, T, error, phase="invariant", restart=0):
    return SweepRecord(
        d=d,
        T=T,
        phase_label=phase,
        restart_index=restart,
        seed=restart,
        final_error=error,
        iterations=1,
        stop_reason=StopReason.converged,
    )


RECORDS = [
    record(3, 1.0, 0.3),
    record(3, 1.0, 0.2, restart=1),
    record(3, 2.0, 1e-3),
    record(3, 2.5, 4e-6),
    record(3, 3.0, 1e-8),
    record(4, 2.0, 2e-6),
    record(4, 3.0, 1e-9),
    record(5, 3.0, 0.5),
]


class TestDatasets:
    def test_error_curve_keeps_best_restart(self):
        rows = error_curve_rows(RECORDS)
        assert rows[0] == {"d": 3, "phase": "invariant", "T": 1.0, "final_error": 0.2}
        assert len(rows) == 7

    def test_min_time_rows(self):
        rows = min_time_rows(RECORDS, 1e-5)
        assert [(r["d"], r["T"]) for r in rows] == [(3, 2.5), (4, 2.0)]

    def test_read_dataset_checks_header(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("a,b\n", encoding="utf-8")
        with pytest.raises(CorruptArchive):
            read_dataset(path, PLOT_COLUMNS)


class TestRendering:
    @pytest.mark.parametrize("figure", [Figure.error_curve, Figure.min_time])
    def test_records_figures(self, tmp_path, figure):
        csv_path, svg_path = export_records_plot(RECORDS, figure, tmp_path)
        assert read_dataset(csv_path, PLOT_COLUMNS)
        assert svg_path.read_text(encoding="utf-8").lstrip().startswith("<?xml")

    def test_svg_is_reproducible(self, tmp_path):
        first = export_records_plot(RECORDS, Figure.error_curve, tmp_path / "a")[1].read_bytes()
        second = export_records_plot(RECORDS, Figure.error_curve, tmp_path / "b")[1].read_bytes()
        assert first == second

    def test_pulse_figure(self, tmp_path):
        pulse = Pulse(ux=[0.0, 1.0, -1.0, 0.5], uy=[0.2, 0.2, 0.2, 0.2], T=2.0)
        csv_path, svg_path = export_pulse_plot(pulse, tmp_path, stem="p")
        rows = read_dataset(csv_path, ["t", "ux", "uy"])
        assert [float(r["t"]) for r in rows] == [0.5, 1.0, 1.5, 2.0]
        assert svg_path.name == "p.svg"
