"""Tests for environment settings, the error hierarchy and manifest parsing."""
import pytest
from pydantic import ValidationError

from app.commands.common import parse_floats, resolve_mode
from app.core import config
from app.core.errors import (
    CorruptArchive,
    NoPassingPoint,
    PhaseNotAdmissible,
    QftPulseError,
    UnsupportedDimension,
    UserError,
)
from app.models.gate import TargetGate
from app.schemas.manifest import SweepManifest, default_grid


class TestEnvironment:
    def test_defaults(self, monkeypatch):
        for name in ("QPF_OUT_DIR", "QPF_LOG_LEVEL", "QPF_BROKER_URL", "QPF_RESULT_BACKEND"):
            monkeypatch.delenv(name, raising=False)
        assert str(config.get_out_dir()) == "results"
        assert config.get_log_level() == "INFO"
        assert config.get_broker_url() is None
        assert config.get_result_backend() is None

    def test_overrides(self, monkeypatch):
        monkeypatch.setenv("QPF_LOG_LEVEL", "debug")
        monkeypatch.setenv("QPF_BROKER_URL", "redis://localhost:6379/0")
        monkeypatch.delenv("QPF_RESULT_BACKEND", raising=False)
        assert config.get_log_level() == "DEBUG"
        assert config.get_result_backend() == "redis://localhost:6379/0"


class TestErrors:
    def test_exit_codes(self):
        assert UnsupportedDimension("x").exit_code == 1
        assert CorruptArchive("x").exit_code == 1
        assert NoPassingPoint("x").exit_code == 2

    def test_hierarchy(self):
        assert issubclass(UserError, QftPulseError)
        assert not issubclass(NoPassingPoint, UserError)
        assert str(UnsupportedDimension("d=9")) == "d=9"


class TestManifest:
    def test_defaults(self):
        manifest = SweepManifest(d_list=[3, 7])
        assert manifest.T_grid == default_grid()
        assert manifest.T_grid[0] == 0.5 and manifest.T_grid[-1] == 12.0
        assert manifest.run_settings(3).n == 100
        assert manifest.run_settings(7).n == 200

    def test_auto_modes(self):
        manifest = SweepManifest(d_list=[3])
        assert manifest.modes_for(4) == ["invariant", "per-phase"]
        assert manifest.modes_for(5) == ["invariant"]

    @pytest.mark.parametrize(
        "payload",
        [
            {"d_list": [1]},
            {"d_list": []},
            {"d_list": [3], "T_grid": [2.0, 1.0]},
            {"d_list": [3], "refine_steps": [0.0]},
            {"d_list": [3], "unknown": 1},
        ],
    )
    def test_rejects(self, payload):
        with pytest.raises(ValidationError):
            SweepManifest.model_validate(payload)


class TestOptionParsing:
    def test_comma_list(self):
        assert parse_floats("1, 1.5,2", "--grid") == [1.0, 1.5, 2.0]

    def test_range_includes_stop(self):
        assert parse_floats("0.5:2:0.5", "--grid") == [0.5, 1.0, 1.5, 2.0]

    def test_phase_by_label_and_index(self):
        target = TargetGate.qft(3)
        assert resolve_mode(target, "9pi/6").phase == target.phases[2]
        assert resolve_mode(target, "1").phase == target.phases[1]
        assert not resolve_mode(target, "auto").is_locked
        with pytest.raises(PhaseNotAdmissible):
            resolve_mode(target, "pi/3")
