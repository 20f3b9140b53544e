"""SpecWin - Spectra of weighted composition operators.

SpecWin is a numerical laboratory for operators f -> psi * (f o phi) on the
Hardy space and the weighted Bergman spaces, where phi is an automorphism of
the unit disk and psi a rational weight times a finite Blaschke product.
It can:

- Classify automorphisms and build their half-plane models
- Predict spectra from closed-form results
- Build finite truncations and sample pseudospectra
- Construct approximate eigenvectors of the adjoint from reproducing kernels
- Cross-check all of the above in a verification battery

Example:
    Predicting the spectrum of a weighted hyperbolic operator:

    >>> from specwin import SpaceSpec, SymbolSpec, predict_spectrum
    >>> from specwin.core.mobius import hyperbolic_r
    >>> prediction = predict_spectrum(SymbolSpec.polynomial([0.5, 1.0]), hyperbolic_r(0.5), SpaceSpec.hardy())
    >>> prediction.shape.value
    'disk'
"""

from .settings import METADATA

__version__ = METADATA.version
__author__ = METADATA.author

from .core.mobius import MobiusMap, classify
from .core.oracle import SpectrumSet, predict_spectrum
from .core.space import KernelCombination, SpaceSpec
from .core.symbol import SymbolSpec
from .types import (
    ConfigurationError,
    MapKind,
    RunConfig,
    SpecWinError,
    SpectrumShape,
    Verdict,
    WitnessKind,
)

__all__ = [
    "ConfigurationError",
    "KernelCombination",
    "MapKind",
    "MobiusMap",
    "RunConfig",
    "SpaceSpec",
    "SpecWinError",
    "SpectrumSet",
    "SpectrumShape",
    "SymbolSpec",
    "Verdict",
    "WitnessKind",
    "__version__",
    "classify",
    "predict_spectrum",
]
