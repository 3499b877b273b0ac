# Main application entry point for SpatialUD

import argparse
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import simplejson
from pydantic import ValidationError as PydanticValidationError

from .acoustics.geometry import ArrayGeometry, circular_array, geometry_to_list, load_geometry
from .acoustics.scene import MultichannelSignal, SceneSpec, simulate_scene
from .acoustics.wavio import ENCODINGS, pcm16_headroom_gain, read_wav, write_wav
from .config.config import LOG_LEVEL, LOG_TO_FILE
from .config.run_config import RunConfig, resolve_run_config
from .decoding.decoder_factory import DECODE_MODES
from .decoding.evaluation import (
    LabeledUtterance,
    accuracy_report,
    decode_utterances,
    evaluate_modes,
    plot_sweep,
    sweep_num_samples,
    write_reports,
    write_table,
)
from .decoding.mlp import MlpModel
from .decoding.model_io import load_model, save_model
from .decoding.sampler import CLIP_MODES
from .decoding.trainer import LabeledDataset, TrainConfig, train_mlp
from .experiments.synthetic_task import RingTask, run_ordering_experiment, train_ring_model
from .features.diffuseness import GAMMA_DIFF_MODES
from .features.feature_io import (
    FLAG_FEATURES,
    FLAG_POSTERIORS,
    FLAG_VARIANCES,
    read_labels,
    read_matrix,
    write_matrix,
)
from .features.pipeline import FeaturePipeline, UtteranceFeatures, splice
from .frontend.stft import WINDOWS, StftConfig
from .utils.exceptions import ConfigError, DimensionError, SpatialUDError
from .utils.fileio import atomic_write_text
from .utils.logger import setup_logging


class SpatialUD:
    """Main class for the SpatialUD system.

    This class runs one resolved CLI configuration: scene simulation, feature
    extraction, classifier training, uncertainty decoding and evaluation.
    """

    def __init__(self, config: RunConfig):
        """Initialize the SpatialUD system.

        Args:
            config: The resolved run configuration
        """
        self.config = config
        self.logger = logging.getLogger("spatial_ud")
        self.output_dir = config.output_path

    def run(self) -> Dict[str, Any]:
        """Echo the configuration and run the configured subcommand.

        Returns:
            Paths of the files written, keyed by role
        """
        commands = {
            "simulate": self.simulate,
            "extract": self.extract,
            "train": self.train,
            "decode": self.decode,
            "eval": self.evaluate,
        }
        self.logger.info(f"Running {self.config.subcommand} (seed {self.config.seed})")
        self.config.echo()
        outputs = commands[self.config.subcommand]()
        self.logger.info(f"{self.config.subcommand} finished")
        return outputs

    def _geometry(self) -> ArrayGeometry:
        return load_geometry(self.config.geometry) if self.config.geometry else circular_array()

    def _doa(self):
        return tuple(math.radians(v) for v in self.config.doa)

    def _train_config(self) -> TrainConfig:
        cfg = self.config
        return TrainConfig(hidden_sizes=cfg.hidden, epochs=cfg.epochs, batch_size=cfg.batch_size,
                           learning_rate=cfg.lr, momentum=cfg.momentum, seed=cfg.seed)

    def simulate(self) -> Dict[str, Any]:
        """Synthesize a scene and write it with a ground-truth sidecar.

        PCM16 scenes are scaled by one common gain to fit the integer range;
        the gain is recorded in the sidecar.
        """
        cfg = self.config
        geometry = self._geometry()
        spec = SceneSpec(direct_doa=self._doa(), drr_db=cfg.drr, duration_s=cfg.duration,
                         sample_rate=cfg.sample_rate, seed=cfg.seed)
        signal = simulate_scene(spec, geometry, cfg.directions)
        gain = pcm16_headroom_gain(signal) if cfg.encoding == "pcm16" else 1.0
        if gain != 1.0:
            self.logger.info(f"Scaling scene by {gain:.4f} for PCM16 headroom")
            signal = MultichannelSignal(signal.samples * gain, signal.sample_rate, signal.geometry)

        wav_path = write_wav(self.output_dir / f"{cfg.name}.wav", signal, cfg.encoding)
        sidecar = {
            "drr_db": cfg.drr if math.isfinite(cfg.drr) else str(cfg.drr),
            "direct_doa_deg": list(cfg.doa),
            "duration_s": cfg.duration,
            "sample_rate": cfg.sample_rate,
            "seed": cfg.seed,
            "n_directions": cfg.directions,
            "encoding": cfg.encoding,
            "gain": gain,
            "geometry": geometry_to_list(geometry),
            "speed_of_sound": geometry.speed_of_sound,
        }
        sidecar_path = atomic_write_text(self.output_dir / f"{cfg.name}.json",
                                         simplejson.dumps(sidecar, indent=2, sort_keys=True, allow_nan=False) + "\n")
        return {"wav": wav_path, "sidecar": sidecar_path}

    def extract(self) -> Dict[str, Any]:
        """Compute feature and variance files for every input WAV."""
        cfg = self.config
        if not cfg.wav:
            raise ConfigError("extract needs at least one --wav file")
        geometry = self._geometry()
        signals = [read_wav(path, geometry) for path in cfg.wav]

        stft_config = StftConfig(dft_length=cfg.dft_length, hop=cfg.hop, window=cfg.window,
                                 sample_rate=signals[0].sample_rate)
        pipeline = FeaturePipeline(geometry, stft_config, forgetting_factor=cfg.forgetting_factor,
                                   variance_scale=cfg.var_scale, cdr_max=cfg.cdr_max, n_filters=cfg.n_mel,
                                   gamma_diff_mode=cfg.gamma_diff_mode, context=cfg.context,
                                   beamform=cfg.beamform)
        doa = self._doa()

        def _extract(item):
            path, signal = item
            features = pipeline.process(signal, doa)
            stem = Path(path).stem
            feat = write_matrix(self.output_dir / f"{stem}.feat", features.frames, FLAG_FEATURES)
            var = write_matrix(self.output_dir / f"{stem}.var", features.variances, FLAG_VARIANCES)
            return feat, var

        items = list(zip(cfg.wav, signals))
        if cfg.jobs > 1:
            with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
                written = list(pool.map(_extract, items))
        else:
            written = [_extract(item) for item in items]
        return {"features": [f for f, _ in written], "variances": [v for _, v in written]}

    def train(self) -> Dict[str, Any]:
        """Train a classifier on feature files or on the synthetic ring task."""
        cfg = self.config
        if cfg.synthetic:
            model = train_ring_model(RingTask(), cfg.train_frames, self._train_config(), cfg.seed)
        else:
            if not cfg.features or len(cfg.features) != len(cfg.labels):
                raise ConfigError("train needs matching --features and --labels lists, or --synthetic")
            inputs, labels = [], []
            for feat_path, label_path in zip(cfg.features, cfg.labels):
                frames = read_matrix(feat_path, FLAG_FEATURES)
                utterance_labels = read_labels(label_path)
                if utterance_labels.shape[0] != frames.shape[0]:
                    raise DimensionError(f"{label_path}: {utterance_labels.shape[0]} labels for {frames.shape[0]} frames")
                inputs.append(splice(frames, cfg.context))
                labels.append(utterance_labels)
            model = train_mlp(LabeledDataset(np.concatenate(inputs), np.concatenate(labels)), self._train_config())

        model_path = save_model(cfg.model or self.output_dir / "model.udnn", model)
        return {"model": model_path}

    def _load_inputs(self, require_labels: bool) -> List[LabeledUtterance]:
        cfg = self.config
        if not cfg.features or len(cfg.features) != len(cfg.variances):
            raise ConfigError("Need matching --features and --variances lists")
        if cfg.labels and len(cfg.labels) != len(cfg.features):
            raise ConfigError("--labels must list one file per feature file")
        if require_labels and not cfg.labels:
            raise ConfigError("Evaluation needs --labels")

        utterances = []
        for k, (feat_path, var_path) in enumerate(zip(cfg.features, cfg.variances)):
            frames = read_matrix(feat_path, FLAG_FEATURES)
            features = UtteranceFeatures(frames, read_matrix(var_path, FLAG_VARIANCES), context=cfg.context)
            labels = read_labels(cfg.labels[k]) if cfg.labels else np.zeros(frames.shape[0], dtype=np.int64)
            utterances.append(LabeledUtterance.from_features(features, labels, Path(feat_path).stem))
        return utterances

    def _model(self) -> MlpModel:
        if not self.config.model:
            raise ConfigError(f"{self.config.subcommand} needs --model")
        return load_model(self.config.model)

    def decode(self) -> Dict[str, Any]:
        """Write per-frame posteriors and, with labels, an accuracy report."""
        cfg = self.config
        model = self._model()
        utterances = self._load_inputs(require_labels=False)
        posteriors = decode_utterances(model, [(u.frames, u.variances) for u in utterances], cfg.mode,
                                       cfg.num_samples, cfg.seed, cfg.context, cfg.clip, cfg.jobs)
        written = [write_matrix(self.output_dir / f"{u.name}.post", post, FLAG_POSTERIORS)
                   for u, post in zip(utterances, posteriors)]
        outputs: Dict[str, Any] = {"posteriors": written}
        if cfg.labels:
            report = accuracy_report(posteriors, utterances, cfg.mode, cfg.num_samples, cfg.seed)
            write_reports([report], self.output_dir / "decode_report.json", self.output_dir / "decode_report.csv")
            outputs["report"] = report
        return outputs

    def evaluate(self) -> Dict[str, Any]:
        """Compare the decode modes and sweep the number of samples."""
        cfg = self.config
        out = self.output_dir
        if cfg.synthetic:
            task = RingTask()
            model = load_model(cfg.model) if cfg.model else train_ring_model(
                task, cfg.train_frames, self._train_config(), cfg.seed)
            result = run_ordering_experiment(model, task, range(cfg.eval_seeds), cfg.eval_frames, cfg.num_samples)
            payload = {
                "num_samples": cfg.num_samples,
                "mean_accuracy": result.mean_accuracy(),
                "t_statistic": result.t_statistic,
                "p_value": result.p_value,
                "per_seed": [{"seed": int(row.seed), **{m: float(getattr(row, m)) for m in DECODE_MODES}}
                             for row in result.accuracies.itertuples()],
            }
            atomic_write_text(out / "eval_report.json", simplejson.dumps(payload, indent=2, sort_keys=True) + "\n")
            write_table(result.accuracies, out / "eval_report.csv")
            sweep = sweep_num_samples(model, [task.test_utterance(cfg.eval_frames, cfg.seed)],
                                      cfg.num_samples_grid, cfg.seed, context=0)
            outputs: Dict[str, Any] = {"result": result}
        else:
            model = self._model()
            utterances = self._load_inputs(require_labels=True)
            reports = evaluate_modes(model, utterances, cfg.num_samples, cfg.seed, cfg.context, cfg.clip, cfg.jobs)
            write_reports(reports, out / "eval_report.json", out / "eval_report.csv")
            sweep = sweep_num_samples(model, utterances, cfg.num_samples_grid, cfg.seed, cfg.context, cfg.clip, cfg.jobs)
            outputs = {"reports": reports}

        outputs["sweep"] = write_table(sweep, out / "sweep.csv")
        if cfg.plot:
            outputs["plot"] = plot_sweep(sweep, out / "sweep.png")
        return outputs


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Flat key=value config file (CLI flags take precedence)")
    parser.add_argument("--log-level", dest="log_level", help="Logging level")
    parser.add_argument("--output-dir", dest="output_dir", help="Directory for all outputs")
    parser.add_argument("--seed", type=int, help="Run seed; every random stream derives from it")


def _add_frontend(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--geometry", help="Microphone geometry text file (default: 8-mic circle, 8 cm spacing)")
    parser.add_argument("--doa", help="Direction as AZ,EL in degrees")


def _add_training(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--synthetic", action="store_true", help="Use the synthetic ring task")
    parser.add_argument("--train-frames", dest="train_frames", type=int, help="Synthetic training set size")
    parser.add_argument("--hidden", help="Hidden layer sizes, comma-separated")
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--batch-size", dest="batch_size", type=int)
    parser.add_argument("--lr", type=float, help="Learning rate")
    parser.add_argument("--momentum", type=float)


def _add_decoding(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--features", nargs="+", help="UDFT feature files")
    parser.add_argument("--variances", nargs="+", help="UDFT variance files, parallel to --features")
    parser.add_argument("--labels", nargs="+", help="Label files, parallel to --features")
    parser.add_argument("--model", help="UDNN model file")
    parser.add_argument("--num-samples", dest="num_samples", type=int, help="Samples L per frame")
    parser.add_argument("--clip", choices=CLIP_MODES)
    parser.add_argument("--context", type=int, help="Splicing context on each side")
    parser.add_argument("--jobs", type=int, help="Parallel utterances")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser; unset flags stay absent so config files can fill them."""
    parser = argparse.ArgumentParser(
        prog="spatial-ud",
        description="SpatialUD: spatial diffuseness features and sampling-based uncertainty decoding",
        argument_default=argparse.SUPPRESS,
    )
    subparsers = parser.add_subparsers(dest="subcommand", required=True)

    simulate = subparsers.add_parser("simulate", help="Synthesize a plane wave in isotropic noise",
                                     argument_default=argparse.SUPPRESS)
    _add_common(simulate)
    _add_frontend(simulate)
    simulate.add_argument("--drr", type=float, help="Direct-to-diffuse ratio in dB (inf/-inf allowed)")
    simulate.add_argument("--duration", type=float, help="Duration in seconds")
    simulate.add_argument("--sample-rate", dest="sample_rate", type=int)
    simulate.add_argument("--directions", type=int, help="Plane waves in the isotropic field (>= 64)")
    simulate.add_argument("--encoding", choices=list(ENCODINGS))
    simulate.add_argument("--name", help="Output file stem")

    extract = subparsers.add_parser("extract", help="Compute logmelspec+delta+diffuseness features",
                                    argument_default=argparse.SUPPRESS)
    _add_common(extract)
    _add_frontend(extract)
    extract.add_argument("--wav", nargs="+", help="Multichannel WAV files")
    extract.add_argument("--dft-length", dest="dft_length", type=int)
    extract.add_argument("--hop", type=int)
    extract.add_argument("--window", choices=WINDOWS)
    extract.add_argument("--lambda", dest="forgetting_factor", type=float,
                         help="Coherence forgetting factor (default 0.8); ground-truth diffuseness checks use 0.998")
    extract.add_argument("--var-scale", dest="var_scale", type=float, help="Scale of the across-pair variance")
    extract.add_argument("--cdr-max", dest="cdr_max", type=float)
    extract.add_argument("--n-mel", dest="n_mel", type=int)
    extract.add_argument("--gamma-diff-mode", dest="gamma_diff_mode", choices=GAMMA_DIFF_MODES)
    extract.add_argument("--no-beamform", dest="beamform", action="store_false",
                         help="Take logmelspec from microphone 0 instead of the beamformer")
    extract.add_argument("--context", type=int)
    extract.add_argument("--jobs", type=int)

    train = subparsers.add_parser("train", help="Train a classifier", argument_default=argparse.SUPPRESS)
    _add_common(train)
    _add_training(train)
    train.add_argument("--features", nargs="+", help="UDFT feature files")
    train.add_argument("--labels", nargs="+", help="Label files, parallel to --features")
    train.add_argument("--context", type=int)
    train.add_argument("--model", help="Output model path (default <output-dir>/model.udnn)")

    decode = subparsers.add_parser("decode", help="Decode posteriors with or without uncertainty",
                                   argument_default=argparse.SUPPRESS)
    _add_common(decode)
    _add_decoding(decode)
    decode.add_argument("--mode", choices=DECODE_MODES)

    evaluate = subparsers.add_parser("eval", help="Compare decode modes and sweep L",
                                     argument_default=argparse.SUPPRESS)
    _add_common(evaluate)
    _add_decoding(evaluate)
    _add_training(evaluate)
    evaluate.add_argument("--num-samples-grid", dest="num_samples_grid", help="Sample counts, comma-separated")
    evaluate.add_argument("--eval-seeds", dest="eval_seeds", type=int, help="Seeds of the synthetic experiment")
    evaluate.add_argument("--eval-frames", dest="eval_frames", type=int, help="Synthetic test frames per seed")
    evaluate.add_argument("--plot", action="store_true", help="Also write sweep.png")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for the SpatialUD application.

    Returns:
        Process exit code: 0 on success, the error's code otherwise
    """
    args = vars(build_parser().parse_args(argv))
    subcommand = args.pop("subcommand")
    config_path = args.pop("config", None)

    logger = setup_logging(log_level=args.get("log_level", LOG_LEVEL), log_to_file=LOG_TO_FILE, run_name=subcommand)

    try:
        config = resolve_run_config(subcommand, args, config_path)
        if "log_level" not in args and config.log_level != LOG_LEVEL:
            setup_logging(log_level=config.log_level, log_to_file=LOG_TO_FILE, run_name=subcommand)
        SpatialUD(config).run()
    except PydanticValidationError as e:
        logger.error(f"Invalid parameters: {e}")
        return ConfigError.exit_code
    except SpatialUDError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
