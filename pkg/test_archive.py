"""Tests for JSON pulse archives."""
import json

import numpy as np
import pytest

from app.core.errors import CorruptArchive, VersionMismatch
from app.schemas.archive import PulseMetadata
from app.schemas.optimization import GuessSpec
from app.utils.archive import load_pulse, payload_checksum, pulse_to_archive, save_pulse
from app.utils.pulses import random_spline_guess


@pytest.fixture
def pulse():
    return random_spline_guess(GuessSpec(n=50, knot_stride=5, seed=11), 2.5)


@pytest.fixture
def metadata():
    return PulseMetadata(d=3, spin=1.0, phase_label="9pi/6", final_error=3.2e-9, seed=11)


def write_payload(path, payload):
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


class TestArchive:
    def test_round_trip_is_bit_exact(self, tmp_path, pulse, metadata):
        path = save_pulse(tmp_path / "p.json", pulse, metadata)
        loaded, loaded_meta = load_pulse(path)
        assert np.array_equal(loaded.ux, pulse.ux)
        assert np.array_equal(loaded.uy, pulse.uy)
        assert loaded.T == pulse.T
        assert loaded_meta == metadata

    def test_payload_fields(self, pulse, metadata):
        payload = pulse_to_archive(pulse, metadata)
        assert payload["schema_version"] == 1
        assert payload["N"] == 50 and payload["d"] == 3
        assert payload["checksum"] == payload_checksum(payload)

    def test_tampered_sample_detected(self, tmp_path, pulse, metadata):
        payload = pulse_to_archive(pulse, metadata)
        payload["ux"][7] += 1e-9
        with pytest.raises(CorruptArchive, match="checksum"):
            load_pulse(write_payload(tmp_path / "p.json", payload))

    def test_unknown_version(self, tmp_path, pulse, metadata):
        payload = pulse_to_archive(pulse, metadata)
        payload["schema_version"] = 2
        payload["checksum"] = payload_checksum(payload)
        with pytest.raises(VersionMismatch):
            load_pulse(write_payload(tmp_path / "p.json", payload))

    def test_length_mismatch_with_valid_checksum(self, tmp_path, pulse, metadata):
        payload = pulse_to_archive(pulse, metadata)
        payload["N"] = 49
        payload["checksum"] = payload_checksum(payload)
        with pytest.raises(CorruptArchive):
            load_pulse(write_payload(tmp_path / "p.json", payload))

    def test_not_json(self, tmp_path):
        path = tmp_path / "p.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(CorruptArchive):
            load_pulse(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(CorruptArchive):
            load_pulse(tmp_path / "absent.json")
