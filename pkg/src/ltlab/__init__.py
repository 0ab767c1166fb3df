"""Numerical laboratory for eigenvalue-sum inequalities of the perturbed Fermi sea."""

__version__ = "0.1.0"

from .physcore import PhysicsParams, SemiclassicalConstants  # noqa: F401
from .boxsim import BoxSpec, FourierPotential, SpectralOutcome  # noqa: F401
