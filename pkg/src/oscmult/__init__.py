"""Oscillating spectral multipliers: class conditions, kernels on R^n and on the
Heisenberg group, and Calderon-Zygmund machinery for weak type (1,1)."""

__version__ = "0.1.0"

from .grid import SampledFunction, UniformGrid, fourier, inverse_fourier
from .multiplier import HardyStrong, MultiplierSpec, Oscillating, class_membership

__all__ = [
    "HardyStrong",
    "MultiplierSpec",
    "Oscillating",
    "SampledFunction",
    "UniformGrid",
    "class_membership",
    "fourier",
    "inverse_fourier",
]
