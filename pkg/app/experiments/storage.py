"""Append-only sweep records and per-run pulse archives under one results directory."""
import csv
import logging
import threading
from pathlib import Path
from typing import Iterable, Optional

from app.core.errors import CorruptArchive, StorageUnavailable
from app.optimizer.propagation import Pulse
from app.schemas.archive import PulseMetadata
from app.schemas.records import RECORD_COLUMNS, CurvePoint, MinTimeRow, SweepRecord
from app.utils.archive import save_pulse

logger = logging.getLogger(__name__)

RECORDS_FILE = "records.csv"
PULSE_DIR = "pulses"


class RecordStore:
    """Append-only records.csv plus pulse archives under one results directory."""

    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)
        self.records_path = self.out_dir / RECORDS_FILE
        self._lock = threading.Lock()
        try:
            (self.out_dir / PULSE_DIR).mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageUnavailable(f"cannot create results directory {self.out_dir}: {exc}") from exc

    def archive_path(self, d: int, T: float, phase_label: str, seed: int, tag: str = "") -> Path:
        safe_phase = phase_label.replace("/", "_")
        suffix = f"_{tag}" if tag else ""
        return self.out_dir / PULSE_DIR / f"d{d}_T{T:.6f}_{safe_phase}_s{seed}{suffix}.json"

    def save_archive(
        self, pulse: Pulse, metadata: PulseMetadata, phase_label: str, tag: str = ""
    ) -> str:
        path = self.archive_path(metadata.d, pulse.T, phase_label, metadata.seed or 0, tag)
        save_pulse(path, pulse, metadata)
        return str(path.relative_to(self.out_dir))

    def append(self, record: SweepRecord) -> None:
        """Append one row, writing the header first if the file is new or empty.

        Raises:
            StorageUnavailable: The records file cannot be written.
        """
        with self._lock:
            try:
                is_new = not self.records_path.exists() or self.records_path.stat().st_size == 0
                with self.records_path.open("a", newline="", encoding="utf-8") as handle:
                    writer = csv.DictWriter(handle, fieldnames=RECORD_COLUMNS)
                    if is_new:
                        writer.writeheader()
                    writer.writerow(record.to_row())
            except OSError as exc:
                raise StorageUnavailable(f"cannot append to {self.records_path}: {exc}") from exc

    def extend(self, records: Iterable[SweepRecord]) -> None:
        for record in records:
            self.append(record)

    def read_all(self) -> list[SweepRecord]:
        return read_records(self.records_path) if self.records_path.exists() else []

    def query(
        self,
        d: Optional[int] = None,
        T_range: Optional[tuple[float, float]] = None,
        phase: Optional[str] = None,
        error_range: Optional[tuple[float, float]] = None,
    ) -> list[SweepRecord]:
        """Records matching every given filter; ranges are inclusive.

        Args:
            d: Number of levels.
            T_range: (low, high) pulse duration.
            phase: Phase label, e.g. "invariant" or "9pi/6".
            error_range: (low, high) final error.

        Returns:
            Matching records in file order.
        """
        rows = self.read_all()
        if d is not None:
            rows = [r for r in rows if r.d == d]
        if T_range is not None:
            rows = [r for r in rows if T_range[0] <= r.T <= T_range[1]]
        if phase is not None:
            rows = [r for r in rows if r.phase_label == phase]
        if error_range is not None:
            rows = [r for r in rows if error_range[0] <= r.final_error <= error_range[1]]
        return rows


def read_records(path: Path) -> list[SweepRecord]:
    try:
        with Path(path).open(newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            if reader.fieldnames != RECORD_COLUMNS:
                raise CorruptArchive(f"{path} does not have the records header")
            return [SweepRecord.from_row(row) for row in reader]
    except OSError as exc:
        raise StorageUnavailable(f"cannot read records {path}: {exc}") from exc
    except (KeyError, ValueError) as exc:
        raise CorruptArchive(f"malformed record in {path}: {exc}") from exc


CURVE_COLUMNS = ["T", "best_error"]
MIN_TIME_COLUMNS = [
    "d",
    "parity",
    "phase",
    "classified",
    "T_min",
    "T_fail",
    "T_pass",
    "method",
    "failure",
]


def _write_rows(path: Path, columns: list[str], rows: Iterable[dict]) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.DictWriter(handle, fieldnames=columns)
            writer.writeheader()
            writer.writerows(rows)
    except OSError as exc:
        raise StorageUnavailable(f"cannot write {path}: {exc}") from exc
    logger.info(f"Wrote {path}")
    return path


def write_curve_dataset(out_dir: Path, d: int, phase_label: str, points: list[CurvePoint]) -> Path:
    safe_phase = phase_label.replace("/", "_")
    rows = [{"T": repr(p.T), "best_error": repr(p.best_error)} for p in points]
    return _write_rows(Path(out_dir) / f"curve_d{d}_{safe_phase}.csv", CURVE_COLUMNS, rows)


def write_min_time_dataset(out_dir: Path, rows: list[MinTimeRow]) -> Path:
    def as_dict(row: MinTimeRow) -> dict:
        estimate = row.estimate
        record = estimate.record if estimate else None
        return {
            "d": row.d,
            "parity": row.parity,
            "phase": row.phase_label,
            "classified": (record.classified_phase or "") if record else "",
            "T_min": repr(estimate.T_min) if estimate else "",
            "T_fail": repr(estimate.T_fail) if estimate else "",
            "T_pass": repr(estimate.T_pass) if estimate else "",
            "method": estimate.method.value if estimate else "",
            "failure": row.failure or "",
        }

    return _write_rows(Path(out_dir) / "min_time.csv", MIN_TIME_COLUMNS, [as_dict(r) for r in rows])
