"""Option parsing shared by the subcommands."""
import json
from pathlib import Path

import click
from pydantic import ValidationError

from app.core.errors import InvalidSpec, PhaseNotAdmissible
from app.models.gate import TargetGate
from app.schemas.manifest import SweepManifest
from app.schemas.optimization import OptimizationMode

POSITIVE_INT = click.IntRange(min=1)
POSITIVE_FLOAT = click.FloatRange(min=0, min_open=True)


def parse_floats(value: str, name: str) -> list[float]:
    """Comma list "1,1.5,2" or range "start:stop:step" (stop included)."""
    try:
        if ":" in value:
            start, stop, step = (float(part) for part in value.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            count = int(round((stop - start) / step))
            values = [round(start + k * step, 10) for k in range(count + 1)]
            return [v for v in values if v <= stop + 1e-9]
        return [float(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise click.BadParameter(f"{value!r} is neither a comma list nor start:stop:step", param_hint=name)


def resolve_mode(target: TargetGate, phase: str) -> OptimizationMode:
    """'auto' is phase-invariant; an index k or a label such as 9pi/6 locks the phase."""
    if phase == "auto":
        return OptimizationMode.invariant()
    labels = target.labels()
    if phase in labels:
        return OptimizationMode.locked(target.phases[labels.index(phase)])
    try:
        index = int(phase)
    except ValueError:
        index = -1
    if not 0 <= index < target.d:
        raise PhaseNotAdmissible(
            f"phase {phase!r} is not 'auto', an index 0..{target.d - 1} or one of {', '.join(labels)}"
        )
    return OptimizationMode.locked(target.phases[index])


def load_manifest(path: Path) -> SweepManifest:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InvalidSpec(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidSpec(f"manifest {path} is not valid JSON: {exc}") from exc
    try:
        return SweepManifest.model_validate(payload)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first["loc"])
        raise InvalidSpec(f"invalid manifest {path}: {where}: {first['msg']}") from exc


def fmt_error(value: float) -> str:
    return f"{value:.3e}"


def fmt_time(value: float) -> str:
    return f"{value:g} 1/q"
