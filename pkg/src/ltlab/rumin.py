"""Phase-space lower-bound machinery and lattice counting.

The layer-cake argument bounds the relative kinetic energy of an admissible
state from below by R_d(rho) = int_0^inf (sqrt(rho) - sqrt(f(e)))_+^2 de,
where f(e) is the phase-space volume of the shell | |p|^2 - 1 | <= e at unit
Fermi level (spinless, q = 1).  Its infimum against the excess-energy density
produces an explicit constant khat(d); on the finite box the continuum shell
volume is replaced by an exact lattice count.
"""

import math
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy import integrate, optimize

from . import budget
from .errors import ResourceBudgetError
from .physcore import PhysicsParams, delta_t, sphere_area

__all__ = [
    "RuminProfile",
    "LatticeCount",
    "f_continuum",
    "rumin_R",
    "khat",
    "f_lattice",
    "lattice_count_ball",
    "lemma_bound_constant",
]

# The density normalization of the lower-bound lemma: the unit-Fermi-level
# phase-space density at q = 1, matching the shell volume f(e) below.  (The
# lemma's printed statement carries the (2 pi) power in the numerator, which is
# inconsistent with its own proof; the proof's normalization is used here.)
DENSITY_NORMALIZATION_NOTE = (
    "uniform background rho0 = |S^{d-1}| / (d (2 pi)^d) at mu = 1, q = 1, "
    "as forced by the shell-volume function of the proof"
)


@dataclass(frozen=True)
class RuminProfile:
    d: int
    rho_grid: np.ndarray
    r_values: np.ndarray
    khat: float
    rho_at_min: float
    note: str = DENSITY_NORMALIZATION_NOTE


@dataclass(frozen=True)
class LatticeCount:
    L: float
    mu: float
    e: float
    count: int
    density: float


def f_continuum(e: float, d: int) -> float:
    """Phase-space volume of the shell | |p|^2 - 1 | <= e:
    (|S^{d-1}|/(d (2pi)^d)) ((1+e)^{d/2} - (1-e)_+^{d/2})."""
    if e < 0:
        raise ValueError("shell width must be >= 0")
    c = sphere_area(d) / (d * (2.0 * math.pi) ** d)
    return c * ((1.0 + e) ** (d / 2.0) - max(1.0 - e, 0.0) ** (d / 2.0))


def rumin_R(rho: float, d: int) -> float:
    """Layer-cake lower-bound function R_d(rho) = int_0^e* (sqrt(rho)-sqrt(f(e)))^2 de,
    with e* the root of f(e*) = rho (bisection), then adaptive quadrature on the
    rescaled interval."""
    if rho < 0:
        raise ValueError("density must be >= 0")
    if rho == 0.0:
        return 0.0
    hi = 1.0
    while f_continuum(hi, d) < rho:
        hi *= 2.0
        if hi > 1e300:
            raise OverflowError("no finite crossing point")
    e_star = optimize.brentq(lambda e: f_continuum(e, d) - rho, 0.0, hi,
                             xtol=1e-300, rtol=8.9e-16, maxiter=200)
    sq = math.sqrt(rho)

    def g(t):
        v = sq - math.sqrt(f_continuum(e_star * t, d))
        return v * v if v > 0.0 else 0.0

    scale = max(1.0, rho * e_star)
    out = integrate.quad(g, 0.0, 1.0, epsabs=1e-13 * scale, epsrel=1e-11,
                         limit=200, full_output=1)
    return e_star * out[0]


def _ratio(rho: float, d: int) -> float:
    dt = delta_t(rho, PhysicsParams(d=d, q=1, mu=1.0))
    if dt <= 0.0:
        return math.inf
    return rumin_R(rho, d) / dt


def khat(d: int, n_grid: int = 400, rho_lo: float = 1e-6, rho_hi: float = 1e8) -> RuminProfile:
    """Infimum of R_d / delta_t over a log grid, refined by golden section.

    The q = 1, mu = 1 normalization ties the excess-energy density to the same
    background as f_continuum.  The profile records R_d on the grid.
    """
    grid = np.geomspace(rho_lo, rho_hi, n_grid)
    r_values = np.array([rumin_R(r, d) for r in grid])
    params = PhysicsParams(d=d, q=1, mu=1.0)
    ratios = r_values / delta_t(grid, params)
    i = int(np.argmin(ratios))
    lo = math.log(grid[max(i - 1, 0)])
    hi = math.log(grid[min(i + 1, n_grid - 1)])
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    e = a + phi * (b - a)
    fc = _ratio(math.exp(c), d)
    fe = _ratio(math.exp(e), d)
    while (b - a) > 1e-6:
        if fc <= fe:
            b, e, fe = e, c, fc
            c = b - phi * (b - a)
            fc = _ratio(math.exp(c), d)
        else:
            a, c, fc = c, e, fe
            e = a + phi * (b - a)
            fe = _ratio(math.exp(e), d)
    rho_min = math.exp(0.5 * (a + b))
    best = min(float(ratios[i]), _ratio(rho_min, d))
    return RuminProfile(d=d, rho_grid=grid, r_values=r_values, khat=best,
                        rho_at_min=rho_min)


def _axis_step(L: float) -> float:
    return 2.0 * math.pi / L


def f_lattice(e: float, d: int, mu: float, L: float) -> LatticeCount:
    """Exact lattice count (1/L^d) #{p in (2 pi Z/L)^d : |p^2 - mu| <= e}.

    Enumerates the integer box ||n||_inf <= ceil(L sqrt(mu+e)/(2 pi)) with the
    innermost coordinate vectorized; comparisons use the same floating-point
    expressions as a naive per-point loop so the two agree exactly.
    """
    if e < 0 or mu < 0 or L <= 0:
        raise ValueError("need e >= 0, mu >= 0, L > 0")
    step = _axis_step(L)
    bound = int(math.floor(math.sqrt(mu + e) / step)) + 1
    candidates = (2 * bound + 1) ** d
    if candidates > budget.lattice_budget():
        raise ResourceBudgetError(
            f"{candidates} candidate lattice points exceed the enumeration budget"
        )
    axis = np.arange(-bound, bound + 1, dtype=float)
    axis_sq = (step * axis) ** 2
    count = 0
    if d == 1:
        count = int(np.count_nonzero(np.abs(axis_sq - mu) <= e))
    elif d == 2:
        for sx in axis_sq:
            count += int(np.count_nonzero(np.abs(sx + axis_sq - mu) <= e))
    elif d == 3:
        for sx in axis_sq:
            for sy in axis_sq:
                count += int(np.count_nonzero(np.abs(sx + sy + axis_sq - mu) <= e))
    else:
        for nvec in product(axis_sq, repeat=d):
            if abs(sum(nvec) - mu) <= e:
                count += 1
    return LatticeCount(L=L, mu=mu, e=e, count=count, density=count / L ** d)


def lattice_count_ball(R: float, d: int) -> int:
    """Exact number of integer points in the closed ball of radius R."""
    if R < 0:
        raise ValueError("radius must be >= 0")
    r2 = R * R
    bound = int(math.isqrt(int(r2))) + 1
    candidates = (2 * bound + 1) ** d
    if candidates > budget.lattice_budget():
        raise ResourceBudgetError(
            f"{candidates} candidate lattice points exceed the enumeration budget"
        )
    axis = np.arange(-bound, bound + 1, dtype=np.int64)
    if d == 1:
        return int(np.count_nonzero(axis * axis <= r2))
    if d == 2:
        sq = axis * axis
        total = 0
        for sx in sq:
            total += int(np.count_nonzero(sx + sq <= r2))
        return total
    if d == 3:
        sq = axis * axis
        plane = sq[:, None] + sq[None, :]
        total = 0
        for sx in sq:
            total += int(np.count_nonzero(plane <= r2 - sx))
        return total
    total = 0
    for nvec in product(axis.tolist(), repeat=d):
        if sum(v * v for v in nvec) <= r2:
            total += 1
    return total


def lemma_bound_constant(d: int, mu: float, L: float, e_values) -> float:
    """Smallest constant C with f_lattice <= C (mu^{(d-1)/2}/L +
    mu^{d/2-1} e 1(e<=mu) + e^{d/2} 1(e>=mu)) over the sampled shell widths.

    Only the existence of C is proven; the fitted value is reported, never
    asserted against a number.
    """
    if mu <= 1.0 / L ** 2:
        raise ValueError("the bound shape needs mu > 1/L^2")
    worst = 0.0
    for e in e_values:
        f = f_lattice(e, d, mu, L).density
        g = mu ** ((d - 1) / 2.0) / L
        if e <= mu:
            g += mu ** (d / 2.0 - 1.0) * e
        if e >= mu:
            g += e ** (d / 2.0)
        worst = max(worst, f / g)
    return worst
