"""Static response functions of the Fermi sea.

Two families, both functions of the rescaled momentum x = |k|/sqrt(mu):

* ``phi_d``: the off-diagonal (particle-hole) kernel weight.  Bounded for
  d >= 2, log-divergent at x = 2 for d = 1.
* ``psi_d``: the second-order (Lindhard-type) energy response.  Finite for
  d >= 2 with an infinite derivative at x = 2; log-divergent at x = 2 for
  d = 1 (the Peierls point, where the momentum transfer connects the two
  Fermi points).

All closed forms are stated at mu = 1; callers pass physical k and mu and the
module rescales.  Quadrature routes use adaptive Gauss-Kronrod panels with
endpoint square-root singularities removed by trigonometric substitution and
interior log singularities handed to the subdivision as split points.
"""

from dataclasses import dataclass
from math import acos, asin, cos, gamma, log, pi, sin, sqrt

import numpy as np
from scipy import integrate

from .physcore import sphere_area

__all__ = [
    "ResponseSample",
    "DivergenceFlag",
    "phi1",
    "phi_d",
    "phi3_closed",
    "phi_d_zero",
    "psi1",
    "psi2",
    "psi3",
    "psi_d",
    "psi_d_recursion",
    "divergence_at",
    "weight_density_1d",
    "weight_potential_1d",
]

_QUAD_KW = dict(epsabs=1e-11, epsrel=1e-11, limit=300)


@dataclass(frozen=True)
class ResponseSample:
    k: float  # rescaled momentum |k|/sqrt(mu)
    value: float
    abs_error: float
    method: str  # closed_form | quadrature | recursion

    def __post_init__(self):
        if self.value < 0 or self.abs_error < 0:
            raise ValueError("response values and error estimates are nonnegative")


@dataclass(frozen=True)
class DivergenceFlag:
    at_k: float
    kind: str  # log_divergence | infinite_derivative


def divergence_at(d: int) -> DivergenceFlag:
    """The anomaly at the Fermi-sphere diameter x = 2: a genuine divergence in
    d = 1, an infinite derivative for d >= 2."""
    kind = "log_divergence" if d == 1 else "infinite_derivative"
    return DivergenceFlag(at_k=2.0, kind=kind)


def _rescale(k: float, mu: float) -> float:
    if mu <= 0:
        raise ValueError("mu must be > 0 for momentum rescaling")
    return abs(k) / sqrt(mu)


def _quad(f, a, b, points=None, **kw):
    opts = dict(_QUAD_KW)
    opts.update(kw)
    if points:
        val, err = integrate.quad(f, a, b, points=points, **opts)
    else:
        val, err = integrate.quad(f, a, b, **opts)
    return val, err


# ----------------------------------------------------------------------------
# phi family
# ----------------------------------------------------------------------------


def _phi1_value(x: float) -> tuple[float, float]:
    """Quadrature value of phi_1 at rescaled x >= 0, x != 2.

    The defining integral runs over v in [-1, min(1, x-1)] with inverse
    square-root singularities at both ends; substituting v = m + r sin(theta)
    with m, r matched to the singular endpoints makes the integrand smooth.
    """
    if x == 0.0:
        # Continuous extension: the integration window shrinks but the
        # endpoint singularities conspire to the finite limit pi/2.
        return pi / 2.0, 0.0
    if x < 2.0:
        m = (x - 2.0) / 2.0
        r = x / 2.0

        def f(theta):
            v = m + r * sin(theta)
            return 1.0 / sqrt((1.0 - v) * (x + 1.0 - v))

        return _quad(f, -pi / 2.0, pi / 2.0)
    # x > 2: both singular endpoints are those of 1 - v^2
    def f(theta):
        v = sin(theta)
        return 1.0 / sqrt((x - v) ** 2 - 1.0)

    return _quad(f, -pi / 2.0, pi / 2.0)


def phi1(k: float, mu: float = 1.0):
    """Off-diagonal kernel weight in one dimension.

    Log-divergent at x = 2 (returns a flag); behaves like pi/x at infinity.
    """
    x = _rescale(k, mu)
    if x == 2.0:
        return DivergenceFlag(at_k=2.0, kind="log_divergence")
    if x == 0.0:
        return ResponseSample(k=0.0, value=pi / 2.0, abs_error=0.0, method="closed_form")
    val, err = _phi1_value(x)
    return ResponseSample(k=x, value=val, abs_error=err, method="quadrature")


def phi_d(k: float, d: int, mu: float = 1.0) -> ResponseSample:
    """Off-diagonal kernel weight for d >= 2, by the radial reduction to phi_1.

    phi_d(x) = |S^{d-2}| int_0^1 r^{d-2}/sqrt(1-r^2) phi_1(x/sqrt(1-r^2)) dr.
    The substitution r = sin(theta) removes the endpoint singularity; the
    interior point where the inner argument crosses 2 carries an integrable
    log singularity and is passed to the subdivision.
    """
    if d < 2:
        raise ValueError("the radial reduction needs d >= 2; use phi1 for d = 1")
    x = _rescale(k, mu)

    def f(theta):
        c = cos(theta)
        if c < 1e-12:
            return 0.0
        inner = x / c
        if inner == 2.0:
            inner = 2.0 + 1e-14
        val, _ = _phi1_value(inner)
        return sin(theta) ** (d - 2) * val

    points = None
    if 0.0 < x < 2.0:
        points = [acos(x / 2.0)]
    val, err = _quad(f, 0.0, pi / 2.0, points=points, epsabs=1e-9, epsrel=1e-9)
    area = sphere_area(d - 1)
    return ResponseSample(
        k=x, value=area * val, abs_error=area * err + 1e-9, method="quadrature"
    )


def phi3_closed(k: float, mu: float = 1.0) -> ResponseSample:
    """Closed form of phi_3 on [0, 2]:  pi^2 + 2 pi x (I(x) - pi/4) with
    I(x) = int_0^1 arcsin sqrt(u(2-xu)/(2+x(1-2u))) du."""
    x = _rescale(k, mu)
    if x > 2.0:
        raise ValueError("closed form only valid for rescaled momentum in [0, 2]")
    if x == 0.0:
        return ResponseSample(k=0.0, value=pi * pi, abs_error=0.0, method="closed_form")

    def f(u):
        t = u * (2.0 - x * u) / (2.0 + x * (1.0 - 2.0 * u))
        t = min(max(t, 0.0), 1.0)
        return asin(sqrt(t))

    val, err = _quad(f, 0.0, 1.0)
    value = pi * pi + 2.0 * pi * x * (val - pi / 4.0)
    return ResponseSample(k=x, value=value, abs_error=2.0 * pi * x * err + 1e-12, method="closed_form")


def phi_d_zero(d: int) -> float:
    """Maximum of phi_d (attained at x = 0), in closed form via Beta integrals."""
    if d == 1:
        return pi / 2.0
    if d == 2:
        # |S^0| * int_0^1 dr/sqrt(1-r^2) * (pi/2)
        return pi * pi / 2.0
    if d == 3:
        return pi * pi
    # pi^2 |S^{d-4}| int_0^1 sqrt(1-r^2) r^{d-4} dr
    integral = 0.25 * sqrt(pi) * gamma((d - 3) / 2.0) / gamma(d / 2.0)
    return pi * pi * sphere_area(d - 3) * integral


# ----------------------------------------------------------------------------
# psi family
# ----------------------------------------------------------------------------


def psi1(k: float, mu: float = 1.0):
    """Second-order response in one dimension: (1/(4 pi x)) log((2+x)/|2-x|).

    Log-divergent at x = 2; the x -> 0 limit is 1/(4 pi).
    """
    x = _rescale(k, mu)
    if x == 2.0:
        return DivergenceFlag(at_k=2.0, kind="log_divergence")
    if x < 1e-9:
        return ResponseSample(k=x, value=1.0 / (4.0 * pi), abs_error=1e-15, method="closed_form")
    val = log((2.0 + x) / abs(2.0 - x)) / (4.0 * pi * x)
    return ResponseSample(k=x, value=val, abs_error=1e-15, method="closed_form")


def psi2(k: float, mu: float = 1.0) -> ResponseSample:
    """Second-order response in two dimensions, constant 1/(8 pi) up to x = 2."""
    x = _rescale(k, mu)
    if x <= 2.0:
        val = 1.0 / (8.0 * pi)
    else:
        val = (1.0 - sqrt(1.0 - 4.0 / (x * x))) / (8.0 * pi)
    return ResponseSample(k=x, value=val, abs_error=1e-16, method="closed_form")


def psi3(k: float, mu: float = 1.0) -> ResponseSample:
    """Second-order response in three dimensions.

    (1/(16 pi^2)) (1 + (1/x)(1 - x^2/4) log((2+x)/|2-x|)); the prefactor kills
    the log at x = 2, leaving the finite value 1/(16 pi^2) with an infinite
    one-sided derivative there.
    """
    x = _rescale(k, mu)
    c = 1.0 / (16.0 * pi * pi)
    if x < 1e-9:
        return ResponseSample(k=x, value=2.0 * c, abs_error=1e-15, method="closed_form")
    if x == 2.0:
        return ResponseSample(k=2.0, value=c, abs_error=0.0, method="closed_form")
    val = c * (1.0 + (1.0 - x * x / 4.0) * log((2.0 + x) / abs(2.0 - x)) / x)
    return ResponseSample(k=x, value=val, abs_error=1e-15, method="closed_form")


def _psi_d_zero(d: int) -> float:
    # |S^{d-2}|/(2 (2pi)^d) int_0^1 r^{d-2}/sqrt(1-r^2) dr, the x -> 0 limit
    integral = 0.5 * sqrt(pi) * gamma((d - 1) / 2.0) / gamma(d / 2.0)
    return sphere_area(d - 1) / (2.0 * (2.0 * pi) ** d) * integral


def psi_d(k: float, d: int, mu: float = 1.0) -> ResponseSample:
    """Second-order response for d >= 2 by the defining radial quadrature.

    psi_d(x) = |S^{d-2}|/(2 x (2pi)^d) int_0^1 log((2s+x)/|2s-x|) r^{d-2} dr
    with s = sqrt(1-r^2).  The interior log zero of |2s-x| (present for x < 2)
    is a split point; x = 0 is evaluated by the analytic limit.
    """
    if d < 2:
        raise ValueError("the radial quadrature needs d >= 2; use psi1 for d = 1")
    x = _rescale(k, mu)
    if x < 1e-9:
        return ResponseSample(k=x, value=_psi_d_zero(d), abs_error=1e-15, method="closed_form")

    def f(r):
        s = 2.0 * sqrt(max(1.0 - r * r, 0.0))
        if s == x:
            return 0.0
        return log((s + x) / abs(s - x)) * r ** (d - 2)

    points = None
    if x < 2.0:
        points = [sqrt(1.0 - x * x / 4.0)]
    val, err = _quad(f, 0.0, 1.0, points=points, epsabs=1e-12, epsrel=1e-12)
    pref = sphere_area(d - 1) / (2.0 * x * (2.0 * pi) ** d)
    return ResponseSample(k=x, value=pref * val, abs_error=pref * err + 1e-12, method="quadrature")


def psi_d_recursion(k: float, d: int, mu: float = 1.0) -> ResponseSample:
    """Cross-check route for d >= 3: reduce psi_d to psi_2 over the transverse
    momentum,  psi_d(x) = |S^{d-3}|/(2pi)^{d-2} int_0^1 r^{d-3} psi_2(x/sqrt(1-r^2)) dr.

    Note the reduction carries no 1/sqrt(1-r^2) weight: the transverse measure
    cancels exactly because the in-plane integral is two-dimensional.  (With
    the extra weight the d = 3 value at x = 0 would disagree with the closed
    form by a factor pi/2.)
    """
    if d < 3:
        raise ValueError("the recursion reduces to psi_2 and needs d >= 3")
    x = _rescale(k, mu)

    def f(r):
        s = sqrt(max(1.0 - r * r, 0.0))
        if s < 1e-12:
            return 0.0
        return r ** (d - 3) * psi2(x / s).value

    points = None
    if 0.0 < x < 2.0:
        points = [sqrt(1.0 - x * x / 4.0)]
    val, err = _quad(f, 0.0, 1.0, points=points)
    pref = sphere_area(d - 2) / (2.0 * pi) ** (d - 2)
    return ResponseSample(k=x, value=pref * val, abs_error=pref * err + 1e-12, method="recursion")


# ----------------------------------------------------------------------------
# one-dimensional weight functions
# ----------------------------------------------------------------------------


def weight_density_1d(k: float, mu: float) -> float:
    """Density-side weight in one dimension,
    sqrt(mu)|k| / ((sqrt(mu)+|k|) log((2 sqrt(mu)+|k|)/|2 sqrt(mu)-|k||)).

    Vanishes at |k| = 2 sqrt(mu) where the log blows up; tends to sqrt(mu) as
    k -> 0.  Even in k.
    """
    if mu <= 0:
        raise ValueError("mu must be > 0")
    s = sqrt(mu)
    a = abs(k)
    if a == 2.0 * s:
        return 0.0
    if a < 1e-12 * s:
        return s
    return s * a / ((s + a) * log((2.0 * s + a) / abs(2.0 * s - a)))


def weight_potential_1d(k: float, mu: float):
    """Potential-side weight in one dimension, the reciprocal of the density
    weight:  ((sqrt(mu)+|k|)/(sqrt(mu)|k|)) log((2 sqrt(mu)+|k|)/|2 sqrt(mu)-|k||).

    Divergent at |k| = 2 sqrt(mu) (returns a flag); tends to 1/sqrt(mu) as
    k -> 0.
    """
    if mu <= 0:
        raise ValueError("mu must be > 0")
    s = sqrt(mu)
    a = abs(k)
    if a == 2.0 * s:
        return DivergenceFlag(at_k=2.0, kind="log_divergence")
    if a < 1e-12 * s:
        return 1.0 / s
    return (s + a) / (s * a) * log((2.0 * s + a) / abs(2.0 * s - a))
