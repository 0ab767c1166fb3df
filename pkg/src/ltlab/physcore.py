"""Semiclassical constants of the free Fermi gas and the excess-energy density.

Units: hbar = 2m = 1, so a plane wave of momentum p has energy p^2.  All
constants depend on the dimension d and the spin multiplicity q; densities and
energies are per unit volume.
"""

from dataclasses import dataclass
from math import gamma, pi

import numpy as np

__all__ = [
    "PhysicsParams",
    "SemiclassicalConstants",
    "sphere_area",
    "k_sc",
    "l_sc",
    "rho0",
    "mu_from_rho0",
    "semiclassical",
    "delta_t",
    "sc_potential_integrand",
    "sc_potential_functional",
    "legendre_dual_constant",
    "ANNOUNCED_RATIOS",
]

# Published best-known ratios between the optimal and the semiclassical kinetic
# constant.  Reference metadata only (shown in report footers); nothing in this
# package asserts them.
ANNOUNCED_RATIOS = {"r2": 0.04493, "r3": 0.1279}


@dataclass(frozen=True)
class PhysicsParams:
    """Ambient configuration: dimension d, spin count q, chemical potential mu."""

    d: int
    q: int = 1
    mu: float = 1.0

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 1:
            raise ValueError(f"dimension must be an integer >= 1, got {self.d!r}")
        if not isinstance(self.q, int) or self.q < 1:
            raise ValueError(f"spin count must be an integer >= 1, got {self.q!r}")
        if not np.isfinite(self.mu) or self.mu < 0:
            raise ValueError(f"chemical potential must be >= 0, got {self.mu!r}")


@dataclass(frozen=True)
class SemiclassicalConstants:
    """The four free-gas quantities tied together by the duality identities."""

    k_sc: float
    l_sc: float
    rho0: float
    kinetic_density: float


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere S^{d-1} in R^d, 2 pi^{d/2} / Gamma(d/2)."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return 2.0 * pi ** (d / 2.0) / gamma(d / 2.0)


def k_sc(params: PhysicsParams) -> float:
    """Sharp phase-space constant for the kinetic energy of the free gas."""
    d, q = params.d, params.q
    return (d / (d + 2.0)) * (d * (2.0 * pi) ** d / (q * sphere_area(d))) ** (2.0 / d)


def l_sc(params: PhysicsParams) -> float:
    """Sharp phase-space constant for sums of eigenvalues below the Fermi level."""
    d, q = params.d, params.q
    return 2.0 * q * sphere_area(d) / (d * (d + 2.0) * (2.0 * pi) ** d)


def rho0(params: PhysicsParams) -> float:
    """Density of the uniform gas at chemical potential mu: q|S^{d-1}| mu^{d/2} / (d (2pi)^d)."""
    d, q = params.d, params.q
    return q * sphere_area(d) / (d * (2.0 * pi) ** d) * params.mu ** (d / 2.0)


def mu_from_rho0(rho: float, d: int, q: int = 1) -> float:
    """Invert the density relation: the Fermi level that produces density rho."""
    if rho < 0:
        raise ValueError("density must be >= 0")
    params = PhysicsParams(d=d, q=q, mu=0.0)
    return ((2.0 + d) / d) * k_sc(params) * rho ** (2.0 / d)


def semiclassical(params: PhysicsParams) -> SemiclassicalConstants:
    """All four constants at once; kinetic_density = (d/2) l_sc mu^{1+d/2}."""
    d = params.d
    return SemiclassicalConstants(
        k_sc=k_sc(params),
        l_sc=l_sc(params),
        rho0=rho0(params),
        kinetic_density=(d / 2.0) * l_sc(params) * params.mu ** (1.0 + d / 2.0),
    )


def delta_t(rho, params: PhysicsParams):
    """Excess kinetic-energy density of a local deviation rho from the uniform gas.

    (rho0+rho)_+^{1+2/d} - rho0^{1+2/d} - ((d+2)/d) rho0^{2/d} rho, convex and
    nonnegative, vanishing quadratically at rho = 0.  The positive part extends
    the expression linearly below -rho0, which the dual optimization needs.
    Accepts scalars or arrays.
    """
    d = params.d
    r0 = rho0(params)
    rho = np.asarray(rho, dtype=float)
    base = np.maximum(r0 + rho, 0.0) ** (1.0 + 2.0 / d)
    out = base - r0 ** (1.0 + 2.0 / d) - ((d + 2.0) / d) * r0 ** (2.0 / d) * rho
    return float(out) if out.ndim == 0 else out


def sc_potential_integrand(v, params: PhysicsParams):
    """Pointwise integrand of the dual potential functional.

    (V-mu)_-^{1+d/2} - mu^{1+d/2} + ((2+d)/2) mu^{d/2} V; nonnegative, vanishing
    at V = 0.  Vectorized over V.
    """
    d, mu = params.d, params.mu
    v = np.asarray(v, dtype=float)
    neg_part = np.maximum(mu - v, 0.0) ** (1.0 + d / 2.0)
    out = neg_part - mu ** (1.0 + d / 2.0) + ((2.0 + d) / 2.0) * mu ** (d / 2.0) * v
    return float(out) if out.ndim == 0 else out


def sc_potential_functional(values, weights, params: PhysicsParams) -> float:
    """Quadrature of the dual potential integrand over sampled V values.

    ``values`` are potential samples, ``weights`` the matching quadrature
    weights (a scalar cell volume or an array).  Non-finite samples are
    rejected.
    """
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValueError("potential samples must be finite")
    weights = np.asarray(weights, dtype=float)
    return float(np.sum(weights * sc_potential_integrand(values, params)))


def legendre_dual_constant(kinetic_constant: float, d: int) -> float:
    """Eigenvalue-sum constant dual to a kinetic constant K:  (2/(d+2)) (d/((d+2)K))^{d/2}."""
    if kinetic_constant <= 0:
        raise ValueError("kinetic constant must be > 0")
    return (2.0 / (d + 2.0)) * (d / ((d + 2.0) * kinetic_constant)) ** (d / 2.0)
