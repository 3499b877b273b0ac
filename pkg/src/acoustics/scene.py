# Synthetic multichannel scenes: plane wave, spherically isotropic noise and their mixture

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..config.config import DEFAULT_SAMPLE_RATE, MIN_ISOTROPIC_DIRECTIONS
from ..utils.exceptions import DimensionError, ValidationError
from ..utils.rng import philox_generator
from ..utils.validators import validate_doa
from .delays import fractional_delay, spectral_delay
from .geometry import ArrayGeometry

logger = logging.getLogger("acoustics.scene")


class SceneSpec(BaseModel):
    """Description of a synthetic scene; identical specs give identical signals."""

    model_config = ConfigDict(frozen=True)

    direct_doa: Tuple[float, float] = (0.0, 0.0)  # azimuth, elevation in radians
    drr_db: float = 0.0
    duration_s: float = Field(1.0, gt=0)
    sample_rate: int = Field(DEFAULT_SAMPLE_RATE, gt=0)
    seed: int = 0

    @field_validator("direct_doa")
    @classmethod
    def _finite_doa(cls, value):
        if not all(math.isfinite(v) for v in value):
            raise ValueError(f"direct_doa must be finite, got {value}")
        return value

    @property
    def num_samples(self) -> int:
        return int(round(self.duration_s * self.sample_rate))


@dataclass
class MultichannelSignal:
    """C x N real samples with their sample rate and array geometry.

    ``geometry`` may be None only for signals without spatial meaning,
    such as a beamformer output.
    """

    samples: np.ndarray
    sample_rate: int
    geometry: Optional[ArrayGeometry] = None

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim == 1:
            samples = samples[np.newaxis, :]
        if samples.ndim != 2:
            raise DimensionError(f"Samples must be C x N, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise ValidationError("Samples must be finite")
        if self.sample_rate <= 0:
            raise ValidationError(f"Sample rate must be positive, got {self.sample_rate}")
        if self.geometry is not None and samples.shape[0] != self.geometry.num_mics:
            raise DimensionError(
                f"Signal has {samples.shape[0]} channels but geometry has {self.geometry.num_mics} microphones"
            )
        self.samples = samples

    @property
    def num_channels(self) -> int:
        return self.samples.shape[0]

    @property
    def num_samples(self) -> int:
        return self.samples.shape[1]

    def channel_power(self) -> np.ndarray:
        """Mean power of every channel."""
        return np.mean(self.samples ** 2, axis=1)


def fibonacci_directions(count: int) -> np.ndarray:
    """Quasi-uniform unit vectors on the sphere from the golden-angle lattice.

    Returns:
        Array of shape (count, 3)
    """
    k = np.arange(count) + 0.5
    z = 1.0 - 2.0 * k / count
    phi = math.pi * (3.0 - math.sqrt(5.0)) * np.arange(count)
    rho = np.sqrt(1.0 - z ** 2)
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)


def generate_plane_wave(spec: SceneSpec, geometry: ArrayGeometry, delay_method: str = "spectral") -> MultichannelSignal:
    """Generate a white-noise plane wave arriving from ``spec.direct_doa``.

    Args:
        spec: Scene description (seed, duration, rate, DOA)
        geometry: Microphone array
        delay_method: "spectral" (exact band-limited phase shift, equal channel
            powers) or "sinc" (64-tap windowed-sinc FIR)

    Returns:
        The coherent multichannel signal

    Raises:
        ValidationError: If the DOA is not finite or the method is unknown
    """
    doa = validate_doa(spec.direct_doa)
    n = spec.num_samples
    source = philox_generator(spec.seed, "plane-wave").standard_normal(n)
    delays = geometry.arrival_delays(doa) * spec.sample_rate

    if delay_method == "spectral":
        samples = spectral_delay(np.tile(source, (geometry.num_mics, 1)), delays)
    elif delay_method == "sinc":
        samples = np.stack([fractional_delay(source, d) for d in delays])
    else:
        raise ValidationError(f"Unknown delay method: {delay_method}")

    logger.debug(f"Plane wave from {np.degrees(doa)} deg, delays {np.round(delays, 3)} samples")
    return MultichannelSignal(samples, spec.sample_rate, geometry)


def generate_isotropic_field(spec: SceneSpec, geometry: ArrayGeometry, n_directions: int) -> MultichannelSignal:
    """Superpose independent white plane waves from quasi-uniform directions.

    Direction k draws its source from the stream ``("isotropic", k)`` and
    contributes power 1/n_directions, so every channel has unit expected power.
    Delays are applied as DFT phase shifts in one accumulated spectrum.

    Raises:
        ValidationError: If fewer than 64 directions are requested
    """
    if n_directions < MIN_ISOTROPIC_DIRECTIONS:
        raise ValidationError(f"Isotropic field needs at least {MIN_ISOTROPIC_DIRECTIONS} directions, got {n_directions}")

    n = spec.num_samples
    omega = 2.0 * np.pi * np.fft.rfftfreq(n)
    directions = fibonacci_directions(n_directions)
    spectrum = np.zeros((geometry.num_mics, omega.shape[0]), dtype=complex)

    logger.info(f"Synthesizing isotropic field: {n_directions} directions, {spec.duration_s:.2f} s")
    for k, direction in enumerate(directions):
        source = np.fft.rfft(philox_generator(spec.seed, "isotropic", k).standard_normal(n))
        delays = -(geometry.mic_positions @ direction) / geometry.speed_of_sound * spec.sample_rate
        spectrum += source[np.newaxis, :] * np.exp(-1j * np.outer(delays, omega))

    samples = np.fft.irfft(spectrum, n=n, axis=-1) / math.sqrt(n_directions)
    return MultichannelSignal(samples, spec.sample_rate, geometry)


def mix_scene(direct: MultichannelSignal, diffuse: MultichannelSignal, drr_db: float) -> MultichannelSignal:
    """Add the diffuse field to the direct signal at a direct-to-diffuse ratio.

    The direct signal keeps unit gain; the diffuse signal is scaled so that the
    ratio of mean array powers equals 10**(drr_db/10). ``+inf`` returns the
    direct signal and ``-inf`` the diffuse signal unchanged.

    Raises:
        DimensionError: If geometry, length or sample rate differ
        ValidationError: If a finite ratio is requested for a silent component
    """
    if direct.samples.shape != diffuse.samples.shape:
        raise DimensionError(f"Cannot mix shapes {direct.samples.shape} and {diffuse.samples.shape}")
    if direct.sample_rate != diffuse.sample_rate:
        raise DimensionError(f"Cannot mix sample rates {direct.sample_rate} and {diffuse.sample_rate}")
    if direct.geometry != diffuse.geometry:
        raise DimensionError("Cannot mix signals recorded with different geometries")

    if math.isinf(drr_db) and drr_db > 0:
        return MultichannelSignal(direct.samples.copy(), direct.sample_rate, direct.geometry)
    if math.isinf(drr_db):
        return MultichannelSignal(diffuse.samples.copy(), diffuse.sample_rate, diffuse.geometry)
    if math.isnan(drr_db):
        raise ValidationError("DRR must not be NaN")

    direct_power = float(np.mean(direct.samples ** 2))
    diffuse_power = float(np.mean(diffuse.samples ** 2))
    if direct_power == 0.0 or diffuse_power == 0.0:
        raise ValidationError("Both scene components need nonzero power for a finite DRR")

    gain = math.sqrt(direct_power / (diffuse_power * 10.0 ** (drr_db / 10.0)))
    logger.debug(f"Mixing at DRR {drr_db} dB, diffuse gain {gain:.6g}")
    return MultichannelSignal(direct.samples + gain * diffuse.samples, direct.sample_rate, direct.geometry)


def simulate_scene(spec: SceneSpec, geometry: ArrayGeometry, n_directions: int) -> MultichannelSignal:
    """Plane wave plus isotropic field mixed at ``spec.drr_db``."""
    if math.isinf(spec.drr_db) and spec.drr_db > 0:
        return generate_plane_wave(spec, geometry)
    diffuse = generate_isotropic_field(spec, geometry, n_directions)
    if math.isinf(spec.drr_db):
        return diffuse
    return mix_scene(generate_plane_wave(spec, geometry), diffuse, spec.drr_db)
