"""Minimax inference over structured normal means.

Given a finite family of candidate mean vectors observed through Gaussian
noise, this package computes exponential-divergence functionals that bound
the minimax identification risk from both sides, estimates the
nearest-vector decoder's risk by Monte Carlo, optimizes measurement-energy
designs under a budget, and runs an interactive search that beats any
passive design on planted biclusters.
"""

from . import adaptive, bounds, design, family, risk, sampling, zoo
from ._kernels import HAS_NUMBA, KERNEL_PATH
from .errors import CapabilityError, OptimizerInconclusive, ValidationError

__version__ = "0.1.0"

__all__ = [
    "adaptive",
    "bounds",
    "design",
    "family",
    "risk",
    "sampling",
    "zoo",
    "HAS_NUMBA",
    "KERNEL_PATH",
    "CapabilityError",
    "OptimizerInconclusive",
    "ValidationError",
    "__version__",
]
