"""Tests for baseline, arithmetic and margin-weighted decoding and frame accuracy evaluation."""

import numpy as np
import pandas as pd
import pytest
import simplejson

from src.decoding.arithmetic_decoder import ArithmeticDecoder, decode_frame_arithmetic
from src.decoding.baseline_decoder import BaselineDecoder, decode_frame_baseline
from src.decoding.decoder_factory import DecoderFactory
from src.decoding.evaluation import (
    LabeledUtterance,
    decode_utterances,
    evaluate_frame_accuracy,
    evaluate_modes,
    plot_sweep,
    sweep_num_samples,
    write_reports,
)
from src.decoding.sampler import FeatureDistribution, SampleSet, draw_samples
from src.decoding.trainer import init_mlp
from src.decoding.weighted_decoder import (
    WeightedDecoder,
    decode_frame_weighted,
    mce_weights,
    sample_margins,
    weighted_average,
)
from src.features.pipeline import UtteranceFeatures
from src.utils.exceptions import DimensionError, ValidationError


@pytest.fixture
def model():
    """Classifier over 6-dim frames spliced with one frame of context."""
    return init_mlp([18, 8, 3], seed=2)


@pytest.fixture
def utterance_inputs():
    rng = np.random.default_rng(0)
    frames = rng.standard_normal((12, 6))
    variances = np.zeros((12, 6))
    variances[:, 4:] = 0.5
    return frames, variances


def _utterances(count=3, variance=0.5, seed=0):
    rng = np.random.default_rng(seed)
    utterances = []
    for u in range(count):
        frames = rng.standard_normal((15, 6))
        variances = np.full((15, 6), variance)
        utterances.append(LabeledUtterance(frames, variances, rng.integers(0, 3, 15), name=f"utt{u}"))
    return utterances


# ---------------------------------------------------------------------------
# Margin weights
# ---------------------------------------------------------------------------


class TestMceWeights:
    def test_known_margins(self):
        weights = mce_weights(np.array([[0.75, 0.25], [0.625, 0.375]]))
        np.testing.assert_allclose(weights.e, [0.5, 0.25])
        np.testing.assert_allclose(weights.omega, [2 / 3, 1 / 3])

    def test_equal_margins_reduce_to_mean(self):
        posteriors = np.array([[0.6, 0.3, 0.1], [0.1, 0.3, 0.6]])
        omega = mce_weights(posteriors).omega
        np.testing.assert_allclose(weighted_average(posteriors, omega), posteriors.mean(axis=0), atol=1e-12)

    def test_uniform_posteriors_fall_back_to_uniform_weights(self):
        posteriors = np.full((4, 3), 1 / 3)
        np.testing.assert_allclose(mce_weights(posteriors).omega, 0.25)

    def test_one_hot_weights_select_sample(self):
        posteriors = np.random.default_rng(0).dirichlet(np.ones(4), size=3)
        np.testing.assert_allclose(weighted_average(posteriors, np.array([0.0, 1.0, 0.0])), posteriors[1])

    def test_matches_naive_loop(self):
        posteriors = np.random.default_rng(1).dirichlet(np.ones(4), size=7)
        margins = [sorted(row)[-1] - sorted(row)[-2] for row in posteriors]
        expected = sum(m * row for m, row in zip(margins, posteriors)) / sum(margins)
        combined = WeightedDecoder(init_mlp([4, 4])).combine(posteriors)
        np.testing.assert_allclose(combined, expected, atol=1e-12)

    def test_weights_form_convex_combination(self):
        posteriors = np.random.default_rng(2).dirichlet(np.ones(5), size=20)
        omega = mce_weights(posteriors).omega
        assert np.all(omega >= 0.0)
        assert omega.sum() == pytest.approx(1.0, abs=1e-12)

    def test_single_class_rejected(self):
        with pytest.raises(ValidationError):
            mce_weights(np.ones((3, 1)))

    def test_margins_along_last_axis(self):
        posteriors = np.array([[[0.5, 0.3, 0.2]], [[0.1, 0.1, 0.8]]])
        np.testing.assert_allclose(sample_margins(posteriors), [[0.2], [0.7]])


# ---------------------------------------------------------------------------
# Frame decoders
# ---------------------------------------------------------------------------


class TestFrameDecoding:
    def test_arithmetic_combine(self):
        combined = ArithmeticDecoder(init_mlp([2, 2])).combine(np.array([[0.8, 0.2], [0.6, 0.4]]))
        np.testing.assert_allclose(combined, [0.7, 0.3])

    def test_zero_variance_matches_baseline(self, model):
        dist = FeatureDistribution(np.random.default_rng(0).standard_normal(18), np.zeros(18))
        baseline = BaselineDecoder(model).decode_frame(dist).p
        for decoder in (ArithmeticDecoder(model), WeightedDecoder(model)):
            np.testing.assert_array_equal(decoder.decode_frame(dist, 30, seed=4).p, baseline)

    def test_single_sample_modes_agree(self, model):
        dist = FeatureDistribution(np.zeros(18), np.full(18, 0.3))
        samples = draw_samples(dist, 1, seed=8)
        np.testing.assert_array_equal(decode_frame_weighted(model, samples).p,
                                      decode_frame_arithmetic(model, samples).p)

    def test_sample_order_does_not_matter(self, model):
        samples = draw_samples(FeatureDistribution(np.zeros(18), np.full(18, 1.0)), 9, seed=1)
        shuffled = SampleSet(samples.samples[::-1].copy(), samples.seed, samples.frame_index)
        for decoder in (ArithmeticDecoder(model), WeightedDecoder(model)):
            np.testing.assert_allclose(decoder.decode_samples(shuffled).p, decoder.decode_samples(samples).p,
                                       atol=1e-12)

    def test_outputs_are_distributions(self, model):
        dist = FeatureDistribution(np.ones(18), np.full(18, 2.0))
        for decoder in (ArithmeticDecoder(model), WeightedDecoder(model)):
            p = decoder.decode_frame(dist, 25, seed=3).p
            assert np.all(p >= 0.0)
            assert p.sum() == pytest.approx(1.0, abs=1e-12)

    def test_baseline_ignores_variance(self, model):
        mean = np.random.default_rng(5).standard_normal(18)
        np.testing.assert_array_equal(decode_frame_baseline(model, mean).p,
                                      BaselineDecoder(model).decode_frame(FeatureDistribution(mean, np.ones(18))).p)


class TestUtteranceDecoding:
    def test_zero_variance_modes_identical(self, model, utterance_inputs):
        frames, _ = utterance_inputs
        factory = DecoderFactory(model, context=1)
        outputs = [factory.get_decoder(mode).decode_utterance(frames, np.zeros_like(frames), 20, seed=0)
                   for mode in ("baseline", "arithmetic", "weighted")]
        np.testing.assert_array_equal(outputs[1], outputs[0])
        np.testing.assert_array_equal(outputs[2], outputs[0])

    def test_single_sample_weighted_equals_arithmetic(self, model, utterance_inputs):
        frames, variances = utterance_inputs
        factory = DecoderFactory(model, context=1)
        weighted = factory.get_decoder("weighted").decode_utterance(frames, variances, 1, seed=6)
        arithmetic = factory.get_decoder("arithmetic").decode_utterance(frames, variances, 1, seed=6)
        np.testing.assert_array_equal(weighted, arithmetic)

    def test_sampling_moves_posteriors(self, model, utterance_inputs):
        frames, variances = utterance_inputs
        factory = DecoderFactory(model, context=1)
        baseline = factory.get_decoder("baseline").decode_utterance(frames, variances)
        arithmetic = factory.get_decoder("arithmetic").decode_utterance(frames, variances, 10, seed=0)
        assert arithmetic.shape == (12, 3)
        assert not np.allclose(arithmetic, baseline)
        np.testing.assert_allclose(arithmetic.sum(axis=1), 1.0, atol=1e-12)

    def test_deterministic(self, model, utterance_inputs):
        decoder = WeightedDecoder(model, context=1)
        np.testing.assert_array_equal(decoder.decode_utterance(*utterance_inputs, 5, seed=2),
                                      decoder.decode_utterance(*utterance_inputs, 5, seed=2))

    def test_width_mismatch(self, model):
        frames = np.zeros((4, 5))
        for decoder in (BaselineDecoder(model, 1), WeightedDecoder(model, 1)):
            with pytest.raises(DimensionError):
                decoder.decode_utterance(frames, np.ones_like(frames), 3, seed=0)

    def test_variance_width_mismatch(self, model, utterance_inputs):
        frames, variances = utterance_inputs
        with pytest.raises(DimensionError, match="variances"):
            ArithmeticDecoder(model, context=1).decode_utterance(frames, variances[:, :4], 3, seed=0)


class TestDecoderFactory:
    def test_caches_instances(self, model):
        factory = DecoderFactory(model, context=1)
        first = factory.get_decoder("weighted")
        assert factory.get_decoder("WEIGHTED") is first
        assert factory.get_decoder("weighted", context=2) is not first
        factory.clear_cache()
        assert factory.get_decoder("weighted") is not first

    def test_mode_classes(self, model):
        factory = DecoderFactory(model)
        assert isinstance(factory.get_decoder("baseline"), BaselineDecoder)
        assert isinstance(factory.get_decoder("arithmetic"), ArithmeticDecoder)
        assert isinstance(factory.get_decoder("weighted"), WeightedDecoder)

    def test_unknown_mode(self, model):
        with pytest.raises(ValidationError):
            DecoderFactory(model).get_decoder("geometric")


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


class TestEvaluation:
    def test_utterance_from_features(self):
        features = UtteranceFeatures(np.arange(12.0).reshape(2, 6), np.full((2, 2), 0.3), context=1)
        utt = LabeledUtterance.from_features(features, [0, 1], "u")
        np.testing.assert_array_equal(utt.variances[:, :4], 0.0)
        np.testing.assert_array_equal(utt.variances[:, 4:], 0.3)
        assert utt.labels.dtype == np.int64
        assert utt.name == "u"

    def test_zero_variance_accuracies_equal(self, model):
        reports = evaluate_modes(model, _utterances(variance=0.0), 10, seed=0, context=1)
        assert [r.mode for r in reports] == ["baseline", "arithmetic", "weighted"]
        assert len({r.accuracy for r in reports}) == 1

    def test_single_sample_weighted_equals_arithmetic(self, model):
        utterances = _utterances()
        weighted = evaluate_frame_accuracy(model, utterances, "weighted", 1, seed=3, context=1)
        arithmetic = evaluate_frame_accuracy(model, utterances, "arithmetic", 1, seed=3, context=1)
        assert weighted.accuracy == arithmetic.accuracy

    def test_report_fields(self, model):
        report = evaluate_frame_accuracy(model, _utterances(), "baseline", 30, seed=0, context=1)
        assert report.num_samples == 1
        assert report.num_frames == 45
        assert report.accuracy == report.correct / 45
        assert [u["name"] for u in report.per_utterance] == ["utt0", "utt1", "utt2"]

    def test_empty_input(self, model):
        with pytest.raises(ValidationError):
            evaluate_frame_accuracy(model, [], "weighted", 3, seed=0, context=1)

    def test_jobs_do_not_change_results(self, model):
        inputs = [(u.frames, u.variances) for u in _utterances()]
        serial = decode_utterances(model, inputs, "weighted", 5, seed=1, context=1)
        threaded = decode_utterances(model, inputs, "weighted", 5, seed=1, context=1, jobs=3)
        for a, b in zip(serial, threaded):
            np.testing.assert_array_equal(a, b)

    def test_label_count_checked(self):
        with pytest.raises(DimensionError):
            LabeledUtterance(np.zeros((4, 6)), np.zeros((4, 6)), np.zeros(3))

    def test_write_reports(self, tmp_path, model):
        reports = evaluate_modes(model, _utterances(), 4, seed=0, context=1)
        write_reports(reports, tmp_path / "r.json", tmp_path / "r.csv")
        payload = simplejson.loads((tmp_path / "r.json").read_text())
        assert [r["mode"] for r in payload["reports"]] == ["baseline", "arithmetic", "weighted"]
        assert len(payload["reports"][0]["per_utterance"]) == 3
        table = pd.read_csv(tmp_path / "r.csv")
        assert list(table["mode"]) == ["baseline", "arithmetic", "weighted"]
        assert "per_utterance" not in table.columns

    def test_sweep_and_plot(self, tmp_path, model):
        sweep = sweep_num_samples(model, _utterances(), [1, 3, 10], seed=0, context=1)
        assert len(sweep) == 9
        assert list(sweep.columns) == ["mode", "num_samples", "accuracy"]
        assert sweep[sweep["mode"] == "baseline"]["accuracy"].nunique() == 1
        path = plot_sweep(sweep, tmp_path / "sweep.png")
        assert path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
