# Fractional delay of sampled signals

import math

import numpy as np
from scipy.signal import oaconvolve

from ..config.config import FRACTIONAL_DELAY_TAPS

KAISER_BETA = 8.0


def spectral_delay(signal: np.ndarray, delays: np.ndarray) -> np.ndarray:
    """Delay each row of ``signal`` by an arbitrary number of samples.

    The delay is applied as a linear phase on the real DFT, which is the
    ideal band-limited interpolator for a periodically extended signal.
    Channel magnitude spectra, and hence channel powers, are left untouched.

    Args:
        signal: Array of shape (N,) or (C, N)
        delays: Scalar or array of C delays in samples (positive = later)

    Returns:
        Delayed signal with the shape of ``signal``
    """
    x = np.atleast_2d(np.asarray(signal, dtype=float))
    n = x.shape[-1]
    tau = np.broadcast_to(np.asarray(delays, dtype=float), (x.shape[0],))
    spectrum = np.fft.rfft(x, axis=-1)
    omega = 2.0 * np.pi * np.fft.rfftfreq(n)
    delayed = np.fft.irfft(spectrum * np.exp(-1j * np.outer(tau, omega)), n=n, axis=-1)
    return delayed.reshape(np.shape(signal))


def sinc_kernel(fraction: float, num_taps: int = FRACTIONAL_DELAY_TAPS) -> np.ndarray:
    """Kaiser-windowed sinc interpolator for a delay of ``fraction`` in [0, 1).

    Tap i realizes the offset ``i - (num_taps // 2 - 1)`` samples; the window
    is centred on the sinc peak so the kernel stays symmetric about it.
    """
    half = num_taps // 2
    offsets = np.arange(num_taps) - (half - 1) - fraction
    window = np.i0(KAISER_BETA * np.sqrt(np.clip(1.0 - (offsets / half) ** 2, 0.0, None))) / np.i0(KAISER_BETA)
    kernel = np.sinc(offsets) * window
    return kernel / kernel.sum()


def fractional_delay(signal: np.ndarray, delay: float, num_taps: int = FRACTIONAL_DELAY_TAPS) -> np.ndarray:
    """Delay a 1-D signal by ``delay`` samples with a windowed-sinc FIR filter.

    Integer delays are exact shifts. Samples shifted in from outside the
    signal are zero; the output has the input length.
    """
    x = np.asarray(signal, dtype=float)
    n = x.shape[0]
    whole = math.floor(delay)
    fraction = delay - whole

    if fraction == 0.0:
        out = np.zeros_like(x)
        src = np.arange(n) - whole
        valid = (src >= 0) & (src < n)
        out[valid] = x[src[valid]]
        return out

    filtered = oaconvolve(x, sinc_kernel(fraction, num_taps))
    # filtered[t + half - 1] approximates x(t - fraction)
    src = np.arange(n) - whole + (num_taps // 2 - 1)
    valid = (src >= 0) & (src < filtered.shape[0])
    out = np.zeros_like(x)
    out[valid] = filtered[src[valid]]
    return out
