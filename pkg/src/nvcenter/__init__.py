"""Spin, vibronic, optical-cycle and defect-thermodynamics models of the
negatively charged nitrogen-vacancy center in diamond."""

from . import core, density, excited, ground, lineshape, pumploop, rates, thermo, vibronic
from .core import ConvergenceError, InputError, NVModelError

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError", "InputError", "NVModelError", "core", "density", "excited", "ground",
    "lineshape", "pumploop", "rates", "thermo", "vibronic", "__version__",
]
