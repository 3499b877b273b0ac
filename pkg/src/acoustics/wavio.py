# Multichannel WAV reading and writing

import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
import soundfile as sf

from ..utils.exceptions import DimensionError, FileAccessError, FormatError
from ..utils.fileio import atomic_write
from .geometry import ArrayGeometry
from .scene import MultichannelSignal

logger = logging.getLogger("acoustics.wavio")

# encoding name -> soundfile subtype
ENCODINGS = {"float32": "FLOAT", "pcm16": "PCM_16"}
PCM16_SCALE = 32768.0
PCM16_MAX = 32767.0 / PCM16_SCALE
# Peak level simulated scenes are scaled to before PCM16 encoding
PCM16_HEADROOM = 0.9


def pcm16_headroom_gain(signal: MultichannelSignal, peak: float = PCM16_HEADROOM) -> float:
    """Return the common gain that brings the signal's peak down to ``peak``.

    The same gain applies to every channel, so inter-channel coherence is
    unchanged. Signals already below ``peak`` get a gain of 1.
    """
    current = float(np.max(np.abs(signal.samples))) if signal.samples.size else 0.0
    if current <= peak:
        return 1.0
    return peak / current


def read_wav(path: Union[str, Path], geometry: Optional[ArrayGeometry] = None) -> MultichannelSignal:
    """Read a PCM16 or float32 multichannel WAV file.

    Args:
        path: WAV file path
        geometry: Array geometry the recording belongs to; its microphone
            count must equal the channel count

    Returns:
        The signal as float64 samples in [-1, 1) for PCM16

    Raises:
        FileAccessError: If the file does not exist or cannot be opened
        FormatError: If the encoding is neither PCM16 nor float32
        DimensionError: If the channel count differs from the geometry
    """
    path = Path(path)
    if not path.is_file():
        raise FileAccessError(f"WAV file not found: {path}")
    try:
        info = sf.info(str(path))
    except RuntimeError as e:
        raise FormatError(f"Cannot parse {path} as audio: {e}") from e

    if info.subtype == "PCM_16":
        data, rate = sf.read(str(path), dtype="int16", always_2d=True)
        samples = data.T.astype(np.float64) / PCM16_SCALE
    elif info.subtype == "FLOAT":
        data, rate = sf.read(str(path), dtype="float32", always_2d=True)
        samples = data.T.astype(np.float64)
    else:
        raise FormatError(f"Unsupported WAV encoding {info.subtype} in {path}; expected PCM_16 or FLOAT")

    if geometry is not None and samples.shape[0] != geometry.num_mics:
        raise DimensionError(
            f"{path} has {samples.shape[0]} channels but the geometry has {geometry.num_mics} microphones"
        )
    logger.debug(f"Read {path}: {samples.shape[0]} ch, {samples.shape[1]} samples, {info.subtype}")
    return MultichannelSignal(samples, int(rate), geometry)


def write_wav(path: Union[str, Path], signal: MultichannelSignal, encoding: str = "float32") -> Path:
    """Write a signal atomically as a multichannel WAV file.

    PCM16 samples are quantized as round(x * 32768), so the round-trip
    error is at most 1/32768. Samples outside [-1, 32767/32768] are
    rejected rather than clipped.

    Raises:
        FormatError: If ``encoding`` is not "float32" or "pcm16", or a
            PCM16 sample is out of range
        FileAccessError: If the destination is not writable
    """
    if encoding not in ENCODINGS:
        raise FormatError(f"Unsupported encoding {encoding}; choose from {', '.join(ENCODINGS)}")

    if encoding == "pcm16":
        peak_low, peak_high = float(np.min(signal.samples, initial=0.0)), float(np.max(signal.samples, initial=0.0))
        if peak_low < -1.0 or peak_high > PCM16_MAX:
            raise FormatError(
                f"Samples span [{peak_low:.3f}, {peak_high:.3f}], outside the PCM16 range; "
                f"scale the signal (see pcm16_headroom_gain) or write float32"
            )
        data = np.round(signal.samples * PCM16_SCALE).astype(np.int16).T
    else:
        data = signal.samples.astype(np.float32).T

    def _write(tmp: Path) -> None:
        sf.write(str(tmp), data, signal.sample_rate, subtype=ENCODINGS[encoding], format="WAV")

    target = atomic_write(path, _write)
    logger.info(f"Wrote {target} ({signal.num_channels} ch, {encoding})")
    return target
