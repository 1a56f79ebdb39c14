"""Pseudo-spectral simulator and verification lab for a fractional
dispersive interface equation on a periodic domain.

The package evaluates the nonlocal interface nonlinearity two independent
ways (graded singular quadrature in physical space, and a cubic symbol
contraction in Fourier space), integrates the profile equation with an
integrating-factor RK4 scheme, and monitors the weighted norms, band
sup-norms, and corrected phases used to probe the long-time behaviour.
"""

from .params import AlphaParams, DomainError, dispersion, make_alpha_params
from .grid import Grid, GridError, SpectralField, from_samples, l2_norm
from .quadrature import QuadratureSpec, QuadratureSpecError
from .symbols import QuadratureAccuracyError, SymbolTable, c_tilde, m1_cube
from .nonlinearity import NonlinearEvaluator, eval_cubic_spectral
from .evolution import BlowupError, SimState, Stepper, StepperConfig
from .config import ConfigError, RunConfig, load_config

__version__ = "0.1.0"

__all__ = [
    "AlphaParams",
    "BlowupError",
    "ConfigError",
    "DomainError",
    "Grid",
    "GridError",
    "NonlinearEvaluator",
    "QuadratureAccuracyError",
    "QuadratureSpec",
    "QuadratureSpecError",
    "RunConfig",
    "SimState",
    "SpectralField",
    "Stepper",
    "StepperConfig",
    "SymbolTable",
    "c_tilde",
    "dispersion",
    "eval_cubic_spectral",
    "from_samples",
    "l2_norm",
    "load_config",
    "m1_cube",
    "make_alpha_params",
    "__version__",
]
