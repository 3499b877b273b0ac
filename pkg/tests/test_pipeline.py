"""Tests for the beamformer, the feature pipeline and UDFT matrix files."""

import math

import numpy as np
import pytest

from src.acoustics.geometry import circular_array
from src.acoustics.scene import MultichannelSignal, SceneSpec, generate_plane_wave
from src.features.beamformer import beamform_das
from src.features.feature_io import (
    FLAG_FEATURES,
    FLAG_POSTERIORS,
    FLAG_VARIANCES,
    decode_matrix,
    encode_matrix,
    read_labels,
    read_matrix,
    write_labels,
    write_matrix,
)
from src.features.melbank import build_mel_filterbank
from src.features.pipeline import (
    FeaturePipeline,
    UtteranceFeatures,
    assemble,
    deltas,
    logmelspec,
    mvn,
    splice,
)
from src.frontend.stft import Spectrogram, stft_channel
from src.utils.exceptions import DimensionError, FileAccessError, FormatError, ValidationError


def _power(x):
    return float(np.mean(x[..., 64:-64] ** 2))


# ---------------------------------------------------------------------------
# Beamformer
# ---------------------------------------------------------------------------


class TestBeamformer:
    @pytest.fixture
    def wave(self, circle):
        return generate_plane_wave(SceneSpec(direct_doa=(0.0, 0.0), duration_s=0.5, seed=31), circle)

    def test_single_channel_passthrough(self):
        mono = MultichannelSignal(np.arange(10.0), 16000)
        out = beamform_das(mono, (0.3, 0.0))
        np.testing.assert_array_equal(out.samples, mono.samples)
        assert out.geometry is None

    def test_look_direction_passes_with_unit_gain(self, wave):
        out = beamform_das(wave, (0.0, 0.0))
        assert out.num_channels == 1
        assert 10 * math.log10(_power(out.samples) / _power(wave.samples[0])) == pytest.approx(0.0, abs=0.5)

    def test_other_direction_is_attenuated(self, wave):
        steered = _power(beamform_das(wave, (0.0, 0.0)).samples)
        opposite = _power(beamform_das(wave, (math.pi, 0.0)).samples)
        assert opposite < 0.5 * steered

    def test_white_noise_gain(self, wave, circle):
        noise = MultichannelSignal(np.random.default_rng(0).standard_normal(wave.samples.shape), 16000, circle)
        snr_in = _power(wave.samples[0]) / _power(noise.samples[0])
        snr_out = _power(beamform_das(wave, (0.0, 0.0)).samples) / _power(beamform_das(noise, (0.0, 0.0)).samples)
        assert 10 * math.log10(snr_out / snr_in) == pytest.approx(10 * math.log10(8), abs=1.0)

    def test_needs_geometry(self):
        with pytest.raises(ValidationError):
            beamform_das(MultichannelSignal(np.zeros((2, 100)), 16000), (0.0, 0.0))


# ---------------------------------------------------------------------------
# Feature streams
# ---------------------------------------------------------------------------


class TestLogMelSpec:
    @pytest.fixture
    def fb(self):
        return build_mel_filterbank(16000, 512, 24)

    def test_zero_spectrum(self, fb, stft_config):
        spec = Spectrogram(np.zeros((4, 257), dtype=complex), stft_config)
        np.testing.assert_allclose(logmelspec(spec, fb), math.log(1e-20))

    def test_gain_becomes_offset(self, fb, stft_config):
        spec = stft_channel(np.random.default_rng(0).standard_normal(4000), stft_config)
        doubled = Spectrogram(2.0 * spec.frames, stft_config)
        np.testing.assert_allclose(logmelspec(doubled, fb) - logmelspec(spec, fb), math.log(4.0), atol=1e-9)

    def test_matches_naive_loop(self, fb, stft_config):
        spec = stft_channel(np.random.default_rng(1).standard_normal(2000), stft_config)
        power = np.abs(spec.frames) ** 2
        result = logmelspec(spec, fb)
        for t in range(spec.num_frames):
            for f in range(24):
                assert result[t, f] == pytest.approx(math.log(np.dot(fb.weights[f], power[t])), rel=1e-10)


class TestMvn:
    def test_zero_mean_unit_variance(self):
        x = np.random.default_rng(0).normal(3.0, 2.0, (50, 6))
        normalized, stats = mvn(x)
        np.testing.assert_allclose(normalized.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(normalized.std(axis=0), 1.0, atol=1e-12)
        np.testing.assert_allclose(stats.mean, x.mean(axis=0))

    def test_constant_dimension(self):
        x = np.random.default_rng(1).standard_normal((20, 3))
        x[:, 1] = 7.5
        normalized, _ = mvn(x)
        np.testing.assert_array_equal(normalized[:, 1], 0.0)

    def test_idempotent(self):
        once, _ = mvn(np.random.default_rng(2).standard_normal((30, 4)))
        twice, _ = mvn(once)
        np.testing.assert_allclose(twice, once, atol=1e-12)

    def test_single_frame_rejected(self):
        with pytest.raises(ValidationError):
            mvn(np.ones((1, 24)))


class TestDeltas:
    def test_constant_has_zero_delta(self):
        np.testing.assert_allclose(deltas(np.full((10, 24), 3.0)), 0.0, atol=1e-12)

    def test_ramp_interior(self):
        t = np.arange(12, dtype=float)[:, np.newaxis]
        ramp = np.hstack([0.5 * t, -2.0 * t])
        np.testing.assert_allclose(deltas(ramp)[2:-2], np.tile([0.5, -2.0], (8, 1)), rtol=1e-9)

    def test_single_frame(self):
        out = deltas(np.ones((1, 24)))
        assert out.shape == (1, 24)
        np.testing.assert_allclose(out, 0.0, atol=1e-12)


class TestSplice:
    def test_width(self):
        assert splice(np.zeros((7, 72)), 5).shape == (7, 792)

    def test_single_frame_is_replicated(self):
        frame = np.arange(4.0)[np.newaxis, :]
        np.testing.assert_array_equal(splice(frame, 5), np.tile(frame, (1, 11)))

    def test_interior_row(self):
        x = np.random.default_rng(0).standard_normal((20, 3))
        np.testing.assert_array_equal(splice(x, 2)[10], np.concatenate(x[8:13]))

    def test_edges_replicate(self):
        x = np.arange(5.0)[:, np.newaxis]
        np.testing.assert_array_equal(splice(x, 2)[0], [0, 0, 0, 1, 2])
        np.testing.assert_array_equal(splice(x, 2)[4], [2, 3, 4, 4, 4])

    def test_locality(self):
        x = np.random.default_rng(1).standard_normal((30, 4))
        changed = x.copy()
        changed[15] += 1.0
        differs = np.any(splice(x, 5) != splice(changed, 5), axis=1)
        np.testing.assert_array_equal(np.flatnonzero(differs), np.arange(10, 21))

    def test_negative_context(self):
        with pytest.raises(ValidationError):
            splice(np.zeros((3, 2)), -1)


class TestAssemble:
    def test_width(self):
        assert assemble(np.zeros((5, 24)), np.zeros((5, 24)), np.zeros((5, 24))).shape == (5, 72)

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            assemble(np.zeros((5, 24)), np.zeros((5, 24)), np.zeros((4, 24)))

    def test_utterance_width_mismatch(self):
        with pytest.raises(DimensionError):
            UtteranceFeatures(np.zeros((5, 70)), np.zeros((5, 24)))

    def test_full_variances(self):
        variances = np.random.default_rng(0).uniform(0, 0.01, (5, 24))
        features = UtteranceFeatures(np.zeros((5, 72)), variances, context=1)
        full = features.full_variances()
        np.testing.assert_array_equal(full[:, :48], 0.0)
        np.testing.assert_array_equal(full[:, 48:], variances)
        assert features.spliced.shape == (5, 216)


# ---------------------------------------------------------------------------
# End-to-end pipeline
# ---------------------------------------------------------------------------


class TestFeaturePipeline:
    def test_output_layout(self, short_scene, circle):
        features = FeaturePipeline(circle).process(short_scene, (0.3, 0.0))
        frames = features.num_frames
        assert features.frames.shape == (frames, 72)
        assert features.variances.shape == (frames, 24)
        assert features.spliced.shape == (frames, 792)
        np.testing.assert_allclose(features.frames[:, :24].mean(axis=0), 0.0, atol=1e-9)
        assert np.all((features.frames[:, 48:] > 0.0) & (features.frames[:, 48:] <= 1.0))
        assert np.all(features.variances >= 0.0)

    def test_deterministic(self, short_scene, circle):
        first = FeaturePipeline(circle).process(short_scene, (0.3, 0.0))
        second = FeaturePipeline(circle).process(short_scene, (0.3, 0.0))
        np.testing.assert_array_equal(first.frames, second.frames)
        np.testing.assert_array_equal(first.variances, second.variances)

    def test_frame_view(self, short_scene, circle):
        features = FeaturePipeline(circle).process(short_scene, (0.3, 0.0))
        frame = features.frame(4)
        np.testing.assert_array_equal(frame.assembled, features.frames[4])
        np.testing.assert_array_equal(frame.diffuseness.variance, features.variances[4])

    def test_beamforming_changes_spectral_stream_only(self, short_scene, circle):
        beamformed = FeaturePipeline(circle).process(short_scene, (0.3, 0.0))
        single = FeaturePipeline(circle, beamform=False).process(short_scene, (0.3, 0.0))
        assert not np.allclose(beamformed.frames[:, :24], single.frames[:, :24])
        np.testing.assert_array_equal(beamformed.frames[:, 48:], single.frames[:, 48:])

    def test_channel_count_mismatch(self, short_scene):
        with pytest.raises(DimensionError):
            FeaturePipeline(circular_array(4)).process(MultichannelSignal(short_scene.samples, 16000), (0.0, 0.0))


# ---------------------------------------------------------------------------
# UDFT files
# ---------------------------------------------------------------------------


class TestFeatureFiles:
    def test_round_trip(self, tmp_path):
        matrix = np.random.default_rng(0).standard_normal((7, 72)).astype(np.float32).astype(np.float64)
        path = write_matrix(tmp_path / "u.feat", matrix, FLAG_FEATURES)
        np.testing.assert_array_equal(read_matrix(path, FLAG_FEATURES), matrix)

    def test_kind_mismatch(self, tmp_path):
        path = write_matrix(tmp_path / "u.var", np.zeros((3, 24)), FLAG_VARIANCES)
        with pytest.raises(FormatError):
            read_matrix(path, FLAG_FEATURES)

    def test_bad_magic(self):
        data = bytearray(encode_matrix(np.zeros((2, 2)), FLAG_POSTERIORS))
        data[:4] = b"XXXX"
        with pytest.raises(FormatError):
            decode_matrix(bytes(data))

    def test_truncated_payload(self):
        data = encode_matrix(np.zeros((2, 3)))
        with pytest.raises(FormatError):
            decode_matrix(data[:-4])

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileAccessError):
            read_matrix(tmp_path / "missing.feat")

    def test_labels(self, tmp_path):
        path = write_labels(tmp_path / "u.lab", np.array([0, 3, 1]))
        np.testing.assert_array_equal(read_labels(path), [0, 3, 1])

    def test_malformed_labels(self, tmp_path):
        path = tmp_path / "u.lab"
        path.write_text("0\nx\n")
        with pytest.raises(FormatError):
            read_labels(path)
