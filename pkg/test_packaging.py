"""Tests for the worker image, the pinned requirements and the documented public API."""
import re
from pathlib import Path

import pytest

from app.experiments.runner import ExperimentRunner, min_time_vs_d
from app.experiments.storage import RecordStore
from app.optimizer.krotov import backward_sweep, forward_sweep, slice_gradient, update_slice
from app.optimizer.propagation import forward_trajectory, step_propagator, step_propagators
from app.utils.linalg import hermitian_eig

ROOT = Path(__file__).parent

# installed for pydantic or used only as the Celery broker transport
INDIRECT = {"annotated-types", "pydantic_core", "typing-inspection", "typing_extensions", "redis"}
IMPORT_NAMES = {"python-dotenv": "dotenv"}


def requirement_names():
    lines = (ROOT / "requirements.txt").read_text(encoding="utf-8").splitlines()
    return [line.split("==")[0] for line in lines if line and not line.startswith("#")]


def imported_modules():
    modules = set()
    for path in [*ROOT.glob("app/**/*.py"), *ROOT.glob("*.py")]:
        for match in re.finditer(r"^\s*(?:from|import) (\w+)", path.read_text(encoding="utf-8"), re.M):
            modules.add(match.group(1))
    return modules


class TestWorkerImage:
    def test_compose_build_has_a_dockerfile(self):
        assert "build: ." in (ROOT / "docker-compose.yml").read_text(encoding="utf-8")
        dockerfile = (ROOT / "Dockerfile").read_text(encoding="utf-8")
        assert "COPY requirements.txt" in dockerfile
        assert "pip install --no-cache-dir -r requirements.txt" in dockerfile

    def test_image_runs_the_celery_app(self):
        dockerfile = (ROOT / "Dockerfile").read_text(encoding="utf-8")
        assert '"app.core.celery_app"' in dockerfile
        assert "celery -A app.core.celery_app worker" in (ROOT / "docker-compose.yml").read_text(encoding="utf-8")


class TestRequirements:
    def test_every_pin_is_used(self):
        modules = imported_modules()
        for name in requirement_names():
            if name in INDIRECT:
                continue
            assert IMPORT_NAMES.get(name, name) in modules, f"{name} is pinned but never imported"

    def test_no_platform_only_pins(self):
        assert "colorama" not in requirement_names()


class TestDocstrings:
    @pytest.mark.parametrize(
        "func",
        [
            update_slice,
            forward_sweep,
            backward_sweep,
            slice_gradient,
            step_propagator,
            step_propagators,
            forward_trajectory,
            hermitian_eig,
            ExperimentRunner.make_job,
            min_time_vs_d,
            RecordStore.query,
        ],
    )
    def test_documented(self, func):
        assert func.__doc__ and func.__doc__.strip()

    @pytest.mark.parametrize("func", [forward_sweep, backward_sweep, step_propagator, forward_trajectory])
    def test_sections(self, func):
        assert "Args:" in func.__doc__ and "Returns:" in func.__doc__
