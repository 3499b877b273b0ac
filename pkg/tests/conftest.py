"""Shared fixtures for the SpatialUD test suite."""

import numpy as np
import pytest

from src.acoustics.geometry import circular_array, linear_array
from src.acoustics.scene import SceneSpec, simulate_scene
from src.decoding.mlp import Layer, MlpModel
from src.frontend.stft import StftConfig


@pytest.fixture
def circle():
    """Default 8-microphone circular array, 8 cm adjacent spacing."""
    return circular_array()


@pytest.fixture
def mic_pair():
    """Two microphones 8 cm apart on the x axis."""
    return linear_array(2, 0.08)


@pytest.fixture
def stft_config():
    return StftConfig()


@pytest.fixture
def short_scene(circle):
    """Half a second of plane wave in isotropic noise at 0 dB."""
    spec = SceneSpec(direct_doa=(0.3, 0.0), drr_db=0.0, duration_s=0.5, seed=11)
    return simulate_scene(spec, circle, 64)


@pytest.fixture
def tiny_model():
    """Hand-set 2-2-2 network with known weights."""
    return MlpModel([
        Layer(np.array([[1.0, -1.0], [0.5, 2.0]]), np.array([0.0, 0.1]), "sigmoid"),
        Layer(np.array([[2.0, -1.0], [-0.5, 1.5]]), np.array([0.2, -0.2]), "softmax"),
    ])
