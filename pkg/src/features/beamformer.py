# Time-domain delay-and-sum beamformer

import logging
from typing import Tuple

import numpy as np

from ..acoustics.delays import fractional_delay
from ..acoustics.scene import MultichannelSignal
from ..utils.exceptions import ValidationError
from ..utils.validators import validate_doa

logger = logging.getLogger("features.beamformer")


def beamform_das(signal: MultichannelSignal, doa: Tuple[float, float]) -> MultichannelSignal:
    """Steer the array toward ``doa`` and average the aligned channels.

    Each channel is advanced by its plane-wave arrival delay with the
    windowed-sinc fractional delay, so a wave from the look direction passes
    with unit gain.

    Args:
        signal: Multichannel recording with its geometry
        doa: Look direction (azimuth, elevation) in radians

    Returns:
        Single-channel signal without geometry

    Raises:
        ValidationError: If the look direction is non-finite or a multichannel
            signal carries no geometry
    """
    doa = validate_doa(doa)
    if signal.num_channels == 1:
        return MultichannelSignal(signal.samples.copy(), signal.sample_rate, None)
    if signal.geometry is None:
        raise ValidationError("Delay-and-sum needs the array geometry")

    delays = signal.geometry.arrival_delays(doa) * signal.sample_rate
    aligned = np.stack([fractional_delay(channel, -delay) for channel, delay in zip(signal.samples, delays)])
    logger.debug(f"Delay-and-sum toward {np.degrees(doa)} deg over {signal.num_channels} channels")
    return MultichannelSignal(aligned.mean(axis=0), signal.sample_rate, None)
