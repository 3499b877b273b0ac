"""Tests for scene synthesis and multichannel WAV files."""

import math

import numpy as np
import pytest
import soundfile as sf

from src.acoustics.geometry import circular_array
from src.acoustics.scene import (
    MultichannelSignal,
    SceneSpec,
    fibonacci_directions,
    generate_isotropic_field,
    generate_plane_wave,
    mix_scene,
    simulate_scene,
)
from src.acoustics.wavio import PCM16_HEADROOM, pcm16_headroom_gain, read_wav, write_wav
from src.utils.exceptions import DimensionError, FileAccessError, FormatError, ValidationError


# ---------------------------------------------------------------------------
# Scene synthesis
# ---------------------------------------------------------------------------


class TestSceneSpec:
    def test_rejects_non_positive_duration(self):
        with pytest.raises(ValueError):
            SceneSpec(duration_s=0.0)

    def test_rejects_non_finite_doa(self):
        with pytest.raises(ValueError):
            SceneSpec(direct_doa=(math.nan, 0.0))

    def test_num_samples(self):
        assert SceneSpec(duration_s=0.5, sample_rate=16000).num_samples == 8000


class TestPlaneWave:
    def test_deterministic(self, circle):
        spec = SceneSpec(direct_doa=(0.4, 0.1), duration_s=0.25, seed=5)
        first = generate_plane_wave(spec, circle)
        second = generate_plane_wave(spec, circle)
        np.testing.assert_array_equal(first.samples, second.samples)

    def test_seed_changes_signal(self, circle):
        first = generate_plane_wave(SceneSpec(duration_s=0.25, seed=1), circle)
        second = generate_plane_wave(SceneSpec(duration_s=0.25, seed=2), circle)
        assert not np.allclose(first.samples, second.samples)

    def test_equal_channel_power(self, circle):
        signal = generate_plane_wave(SceneSpec(direct_doa=(1.1, 0.2), duration_s=1.0, seed=3), circle)
        power_db = 10 * np.log10(signal.channel_power())
        assert np.ptp(power_db) < 0.1

    def test_broadside_channels_identical(self, mic_pair):
        signal = generate_plane_wave(SceneSpec(direct_doa=(math.pi / 2, 0.0), duration_s=0.1), mic_pair)
        np.testing.assert_allclose(signal.samples[0], signal.samples[1], atol=1e-9)

    def test_sinc_method_matches_spectral_in_interior(self, mic_pair):
        spec = SceneSpec(direct_doa=(0.2, 0.0), duration_s=0.25, seed=4)
        spectral = generate_plane_wave(spec, mic_pair, delay_method="spectral").samples
        sinc = generate_plane_wave(spec, mic_pair, delay_method="sinc").samples
        interior = slice(100, -100)
        error = np.mean((spectral[:, interior] - sinc[:, interior]) ** 2)
        assert error < 0.1 * np.mean(spectral[:, interior] ** 2)

    def test_unknown_delay_method(self, mic_pair):
        with pytest.raises(ValidationError):
            generate_plane_wave(SceneSpec(duration_s=0.1), mic_pair, delay_method="cubic")

    def test_non_finite_doa_rejected(self, mic_pair):
        spec = SceneSpec.model_construct(direct_doa=(math.inf, 0.0), drr_db=0.0, duration_s=0.1,
                                         sample_rate=16000, seed=0)
        with pytest.raises(ValidationError):
            generate_plane_wave(spec, mic_pair)


class TestIsotropicField:
    def test_too_few_directions(self, circle):
        with pytest.raises(ValidationError):
            generate_isotropic_field(SceneSpec(duration_s=0.1), circle, 63)

    def test_unit_power(self, circle):
        signal = generate_isotropic_field(SceneSpec(duration_s=1.0, seed=2), circle, 64)
        np.testing.assert_allclose(signal.channel_power(), 1.0, rtol=0.1)

    def test_fibonacci_directions_are_unit_vectors(self):
        directions = fibonacci_directions(100)
        np.testing.assert_allclose(np.linalg.norm(directions, axis=1), 1.0)
        np.testing.assert_allclose(directions.mean(axis=0), 0.0, atol=0.05)


class TestMixScene:
    @pytest.fixture
    def components(self, circle):
        spec = SceneSpec(duration_s=0.25, seed=9)
        return generate_plane_wave(spec, circle), generate_isotropic_field(spec, circle, 64)

    def test_zero_db_equal_powers(self, components):
        direct, diffuse = components
        mixed = mix_scene(direct, diffuse, 0.0)
        added = mixed.samples - direct.samples
        assert np.mean(added ** 2) == pytest.approx(np.mean(direct.samples ** 2), rel=1e-9)

    def test_ten_db_ratio(self, components):
        direct, diffuse = components
        added = mix_scene(direct, diffuse, 10.0).samples - direct.samples
        assert np.mean(added ** 2) / np.mean(direct.samples ** 2) == pytest.approx(0.1, rel=1e-9)

    def test_infinite_ratios(self, components):
        direct, diffuse = components
        np.testing.assert_array_equal(mix_scene(direct, diffuse, math.inf).samples, direct.samples)
        np.testing.assert_array_equal(mix_scene(direct, diffuse, -math.inf).samples, diffuse.samples)

    def test_nan_ratio(self, components):
        with pytest.raises(ValidationError):
            mix_scene(*components, math.nan)

    def test_shape_mismatch(self, components, circle):
        direct, _ = components
        other = generate_isotropic_field(SceneSpec(duration_s=0.5, seed=9), circle, 64)
        with pytest.raises(DimensionError):
            mix_scene(direct, other, 0.0)

    def test_silent_component(self, components):
        direct, diffuse = components
        silent = MultichannelSignal(np.zeros_like(diffuse.samples), diffuse.sample_rate, diffuse.geometry)
        with pytest.raises(ValidationError):
            mix_scene(direct, silent, 0.0)

    def test_simulate_scene_matches_manual_mix(self, circle, components):
        direct, diffuse = components
        spec = SceneSpec(duration_s=0.25, seed=9, drr_db=3.0)
        np.testing.assert_array_equal(simulate_scene(spec, circle, 64).samples,
                                      mix_scene(direct, diffuse, 3.0).samples)


class TestMultichannelSignal:
    def test_mono_is_promoted(self):
        assert MultichannelSignal(np.zeros(10), 16000).samples.shape == (1, 10)

    def test_channel_count_must_match_geometry(self, circle):
        with pytest.raises(DimensionError):
            MultichannelSignal(np.zeros((4, 10)), 16000, circle)

    def test_non_finite_rejected(self):
        with pytest.raises(ValidationError):
            MultichannelSignal(np.array([[0.0, math.nan]]), 16000)


# ---------------------------------------------------------------------------
# WAV files
# ---------------------------------------------------------------------------


class TestWavIO:
    def test_float32_round_trip_is_exact(self, tmp_path, circle):
        samples = np.random.default_rng(0).uniform(-1, 1, (8, 400)).astype(np.float32).astype(np.float64)
        path = write_wav(tmp_path / "x.wav", MultichannelSignal(samples, 16000, circle))
        loaded = read_wav(path, circle)
        np.testing.assert_array_equal(loaded.samples, samples)
        assert loaded.sample_rate == 16000

    def test_pcm16_round_trip_error(self, tmp_path):
        samples = np.random.default_rng(1).uniform(-1, 0.999, (2, 400))
        path = write_wav(tmp_path / "x.wav", MultichannelSignal(samples, 8000), encoding="pcm16")
        loaded = read_wav(path)
        assert np.max(np.abs(loaded.samples - samples)) <= 1.0 / 32768

    def test_pcm16_rejects_out_of_range_samples(self, tmp_path):
        samples = np.array([[0.5, -0.25, 1.0]])
        with pytest.raises(FormatError):
            write_wav(tmp_path / "x.wav", MultichannelSignal(samples, 8000), encoding="pcm16")
        assert not (tmp_path / "x.wav").exists()

    def test_pcm16_accepts_full_negative_range(self, tmp_path):
        samples = np.array([[-1.0, 32767 / 32768, 0.0]])
        path = write_wav(tmp_path / "x.wav", MultichannelSignal(samples, 8000), encoding="pcm16")
        np.testing.assert_array_equal(read_wav(path).samples, samples)

    def test_headroom_gain(self, circle):
        scene = simulate_scene(SceneSpec(drr_db=0.0, duration_s=0.2, seed=7), circle, 64)
        gain = pcm16_headroom_gain(scene)
        assert np.max(np.abs(scene.samples * gain)) == pytest.approx(PCM16_HEADROOM)
        assert pcm16_headroom_gain(MultichannelSignal(np.full((2, 10), 0.5), 8000)) == 1.0

    def test_channel_count_mismatch(self, tmp_path, circle):
        path = write_wav(tmp_path / "x.wav", MultichannelSignal(np.zeros((8, 100)), 16000, circle))
        with pytest.raises(DimensionError):
            read_wav(path, circular_array(4))

    def test_unsupported_subtype(self, tmp_path):
        path = tmp_path / "x.wav"
        sf.write(str(path), np.zeros((100, 2)), 16000, subtype="PCM_24")
        with pytest.raises(FormatError):
            read_wav(path)

    def test_unsupported_encoding_on_write(self, tmp_path):
        with pytest.raises(FormatError):
            write_wav(tmp_path / "x.wav", MultichannelSignal(np.zeros((1, 10)), 16000), encoding="pcm24")

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileAccessError):
            read_wav(tmp_path / "missing.wav")
