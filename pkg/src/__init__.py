# SpatialUD package initialization

__version__ = "0.1.0"
__author__ = "SpatialUD Team"

# Import SpatialUD class after all dependencies are loaded
from .main import SpatialUD as _SpatialUD

# Export SpatialUD
SpatialUD = _SpatialUD

__all__ = ['SpatialUD']
