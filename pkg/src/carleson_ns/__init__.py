"""Meyer wavelets, dyadic Carleson-type norms and a divergence-free field whose
BMO^-1 norm blows up while its Carleson quantity stays bounded."""

from .counterexample import CounterexampleParams, validate_params, verify_theorem
from .dyadic import CoefficientField, DyadicCube, SpaceParams, TimeCoefficientField, tl_norm
from .kernels import BACKEND
from .meyer import GridSpec, MeyerProfile, WaveletIndex, build_profile

__all__ = [
    "BACKEND",
    "CoefficientField",
    "CounterexampleParams",
    "DyadicCube",
    "GridSpec",
    "MeyerProfile",
    "SpaceParams",
    "TimeCoefficientField",
    "WaveletIndex",
    "build_profile",
    "tl_norm",
    "validate_params",
    "verify_theorem",
]
