"""Tests for array geometry and fractional delays."""

import math

import numpy as np
import pytest

from src.acoustics.delays import fractional_delay, sinc_kernel, spectral_delay
from src.acoustics.geometry import (
    ArrayGeometry,
    linear_array,
    load_geometry,
    save_geometry,
    unit_vector,
)
from src.utils.exceptions import FileAccessError, FormatError, ValidationError


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------


class TestArrayGeometry:
    def test_pair_enumeration(self, circle):
        assert circle.num_mics == 8
        assert circle.num_pairs == 28
        assert circle.pairs[0] == (0, 1)
        assert circle.pairs[-1] == (6, 7)

    def test_adjacent_spacing(self, circle):
        assert circle.pair_distance(0) == pytest.approx(0.08, abs=1e-12)

    def test_pair_index_out_of_range(self, circle):
        with pytest.raises(ValidationError):
            circle.pair_distance(28)

    def test_coincident_microphones_rejected(self):
        with pytest.raises(ValidationError, match="coincide"):
            ArrayGeometry(np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]))

    def test_single_microphone_rejected(self):
        with pytest.raises(ValidationError):
            ArrayGeometry(np.zeros((1, 3)))

    def test_positions_are_read_only(self, circle):
        with pytest.raises(ValueError):
            circle.mic_positions[0, 0] = 1.0

    def test_endfire_delay_difference(self, mic_pair):
        delays = mic_pair.arrival_delays((0.0, 0.0))
        assert delays[0] - delays[1] == pytest.approx(0.08 / mic_pair.speed_of_sound, rel=1e-12)

    def test_broadside_has_no_delay(self, mic_pair):
        np.testing.assert_allclose(mic_pair.arrival_delays((math.pi / 2, 0.0)), 0.0, atol=1e-15)

    def test_unit_vector_norm(self):
        for doa in [(0.0, 0.0), (1.0, 0.5), (-2.0, -1.2)]:
            assert np.linalg.norm(unit_vector(doa)) == pytest.approx(1.0)

    def test_linear_array_is_centered(self):
        geometry = linear_array(4, 0.05)
        np.testing.assert_allclose(geometry.mic_positions.mean(axis=0), 0.0, atol=1e-15)


class TestGeometryFiles:
    def test_round_trip(self, tmp_path, circle):
        path = save_geometry(circle, tmp_path / "array.txt")
        loaded = load_geometry(path)
        np.testing.assert_allclose(loaded.mic_positions, circle.mic_positions, atol=1e-9)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileAccessError):
            load_geometry(tmp_path / "missing.txt")

    def test_wrong_column_count(self, tmp_path):
        path = tmp_path / "array.txt"
        path.write_text("0.0 0.0\n0.1 0.0\n")
        with pytest.raises(FormatError):
            load_geometry(path)

    def test_non_numeric(self, tmp_path):
        path = tmp_path / "array.txt"
        path.write_text("a b c\n")
        with pytest.raises(FormatError):
            load_geometry(path)

    def test_comments_are_skipped(self, tmp_path):
        path = tmp_path / "array.txt"
        path.write_text("# two mics\n-0.04 0 0\n0.04 0 0\n")
        assert load_geometry(path).pair_distance(0) == pytest.approx(0.08)


# ---------------------------------------------------------------------------
# Fractional delays
# ---------------------------------------------------------------------------


class TestDelays:
    def test_spectral_integer_delay_is_circular_shift(self):
        x = np.random.default_rng(0).standard_normal(256)
        np.testing.assert_allclose(spectral_delay(x, 3.0), np.roll(x, 3), atol=1e-10)

    def test_spectral_delay_preserves_power(self):
        x = np.random.default_rng(1).standard_normal((3, 1000))
        delayed = spectral_delay(x, np.array([0.25, 1.5, -2.7]))
        np.testing.assert_allclose(np.mean(delayed ** 2, axis=1), np.mean(x ** 2, axis=1), rtol=1e-2)

    def test_sinc_kernel_has_unit_dc_gain(self):
        assert sinc_kernel(0.37).sum() == pytest.approx(1.0)

    def test_integer_delay_is_exact_shift(self):
        x = np.arange(10.0)
        np.testing.assert_array_equal(fractional_delay(x, 2), [0, 0, 0, 1, 2, 3, 4, 5, 6, 7])
        np.testing.assert_array_equal(fractional_delay(x, -3), [3, 4, 5, 6, 7, 8, 9, 0, 0, 0])

    def test_half_sample_delay_of_low_frequency_tone(self):
        t = np.arange(2000)
        x = np.sin(2 * np.pi * 0.01 * t)
        expected = np.sin(2 * np.pi * 0.01 * (t - 0.5))
        np.testing.assert_allclose(fractional_delay(x, 0.5)[64:-64], expected[64:-64], atol=1e-3)
