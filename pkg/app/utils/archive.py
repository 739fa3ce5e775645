"""JSON pulse archives with a checksum over the canonical payload."""
import hashlib
import json
from pathlib import Path

from pydantic import ValidationError

from app.core.errors import CorruptArchive, StorageUnavailable, VersionMismatch
from app.optimizer.propagation import Pulse
from app.schemas.archive import SCHEMA_VERSION, PulseArchive, PulseMetadata


def payload_checksum(payload: dict) -> str:
    body = {key: value for key, value in payload.items() if key != "checksum"}
    normalized = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(normalized.encode("utf-8")).hexdigest()


def pulse_to_archive(pulse: Pulse, metadata: PulseMetadata) -> dict:
    # float repr is the shortest string that round-trips, so samples reload bit-exactly
    payload = {
        **metadata.model_dump(),
        "schema_version": SCHEMA_VERSION,
        "T": pulse.T,
        "N": pulse.n,
        "ux": [float(x) for x in pulse.ux],
        "uy": [float(x) for x in pulse.uy],
    }
    payload["checksum"] = payload_checksum(payload)
    return payload


def archive_to_pulse(payload) -> tuple[Pulse, PulseMetadata]:
    if not isinstance(payload, dict):
        raise CorruptArchive("archive is not a JSON object")
    version = payload.get("schema_version")
    if version != SCHEMA_VERSION:
        raise VersionMismatch(f"unknown archive schema_version {version!r}")
    if payload.get("checksum") != payload_checksum(payload):
        raise CorruptArchive("archive checksum mismatch")
    try:
        archive = PulseArchive.model_validate(payload)
    except ValidationError as exc:
        raise CorruptArchive(f"invalid archive: {exc.errors()[0]['msg']}") from exc
    metadata = PulseMetadata.model_validate(archive.model_dump(include=set(PulseMetadata.model_fields)))
    return Pulse(ux=archive.ux, uy=archive.uy, T=archive.T), metadata


def save_pulse(path: Path, pulse: Pulse, metadata: PulseMetadata) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(pulse_to_archive(pulse, metadata), indent=1), encoding="utf-8")
    except OSError as exc:
        raise StorageUnavailable(f"cannot write archive {path}: {exc}") from exc
    return path


def load_pulse(path: Path) -> tuple[Pulse, PulseMetadata]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CorruptArchive(f"cannot read archive {path}: {exc}") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptArchive(f"archive {path} is not valid JSON") from exc
    return archive_to_pulse(payload)
