"""Probability-density propagation on SO(3) x T^2.

A spectral Fokker-Planck solver for stochastic hybrid systems whose
continuous state is an attitude plus two angular-velocity components:
the continuous dynamics are integrated in coefficient space via harmonic
analysis on SO(3) x T^2, the jump dynamics by quadrature collocation on the
same grid, combined with first-order operator splitting.  A vectorized
Monte Carlo sampler provides an independent cross-check.
"""

from .workspace import BandLimit, HarmonicWorkspace, build_workspace
from .transform import (
    GridDensity,
    SpectralDensity,
    forward,
    inverse,
    spectral_derivative,
    torus_convolution,
)

__version__ = "0.1.0"

__all__ = [
    "BandLimit",
    "HarmonicWorkspace",
    "build_workspace",
    "GridDensity",
    "SpectralDensity",
    "forward",
    "inverse",
    "spectral_derivative",
    "torus_convolution",
    "__version__",
]
