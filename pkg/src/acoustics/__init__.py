# Acoustics package initialization

from .geometry import ArrayGeometry, circular_array, linear_array, load_geometry, save_geometry
from .scene import (
    MultichannelSignal,
    SceneSpec,
    generate_isotropic_field,
    generate_plane_wave,
    mix_scene,
    simulate_scene,
)
from .wavio import read_wav, write_wav

__all__ = [
    'ArrayGeometry',
    'circular_array',
    'linear_array',
    'load_geometry',
    'save_geometry',
    'MultichannelSignal',
    'SceneSpec',
    'generate_isotropic_field',
    'generate_plane_wave',
    'mix_scene',
    'simulate_scene',
    'read_wav',
    'write_wav'
]
