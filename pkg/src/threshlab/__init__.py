"""Threshold phenomena for nonlocal reaction-diffusion equations.

Submodules: kernels, convops, tailtheory, criteria, simulator, waves,
thresholds, config and cli.
"""
from .errors import NumericalGuard, ThreshlabError, ValidationError
from .kernels import Cauchy, Gaussian, Laplace, LogNormalTail, PowerLaw, Tabulated, WeibullTail, make_kernel
from .criteria import Nonlinearity

__version__ = "0.1.0"

__all__ = ["Cauchy", "Gaussian", "Laplace", "LogNormalTail", "PowerLaw", "Tabulated", "WeibullTail",
           "make_kernel", "Nonlinearity", "ThreshlabError", "ValidationError", "NumericalGuard"]
