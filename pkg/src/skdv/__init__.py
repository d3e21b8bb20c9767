"""Pseudospectral simulator and diagnostics for the coupled
Schrodinger-KdV system on a periodic box."""

from .integrator import BlowUpError, RunResult, StepperConfig, run
from .model import InitialData, ModelParams, SystemState, make_initial_data
from .spectral import ComplexField, RealField, SpectralGrid

__all__ = [
    "BlowUpError",
    "ComplexField",
    "InitialData",
    "ModelParams",
    "RealField",
    "RunResult",
    "SpectralGrid",
    "StepperConfig",
    "SystemState",
    "make_initial_data",
    "run",
]

__version__ = "0.1.0"
