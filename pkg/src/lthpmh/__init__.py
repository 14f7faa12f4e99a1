"""Homotopy perturbation series with frequency expansion and a tuned
convergence-control parameter for the autonomous conservative oscillator,
checked against a fixed-step RK4 reference."""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    InsufficientSpanError,
    IntegrationBlowupError,
    InvalidParameterError,
    LTHPMError,
    UnsupportedRegimeError,
)
from .metrics import ErrorReport, SweepRow, evaluate, percent_frequency_error, rms_error, sweep
from .model import OscillatorParams, State, acceleration, defect, energy
from .oracle import Trajectory, extract_frequency, integrate
from .residual import ResidualProfile, averaged_square_residual, optimize_h, residual_delta
from .series import (
    FrequencyExpansion,
    SeriesSolution,
    build_solution,
    eval_displacement,
    eval_in_tau,
    eval_velocity,
    lambda0,
    lambda1,
    omega0,
)

__all__ = [
    "DomainError",
    "InsufficientSpanError",
    "IntegrationBlowupError",
    "InvalidParameterError",
    "LTHPMError",
    "UnsupportedRegimeError",
    "ErrorReport",
    "SweepRow",
    "evaluate",
    "percent_frequency_error",
    "rms_error",
    "sweep",
    "OscillatorParams",
    "State",
    "acceleration",
    "defect",
    "energy",
    "Trajectory",
    "extract_frequency",
    "integrate",
    "ResidualProfile",
    "averaged_square_residual",
    "optimize_h",
    "residual_delta",
    "FrequencyExpansion",
    "SeriesSolution",
    "build_solution",
    "eval_displacement",
    "eval_in_tau",
    "eval_velocity",
    "lambda0",
    "lambda1",
    "omega0",
]
