"""Plane-wave spectral engine on the periodic box.

The box is C_L = [-L/2, L/2)^d with periodic boundary conditions; the basis is
the plane waves e^{i p x}/L^{d/2} with p = 2 pi n / L and the integer index n
bounded by ||n||_inf <= n_max.  A real periodic potential enters through its
Fourier coefficients c_n (V = sum c_n e^{i p_n x}, Hermitian symmetric), which
make the Hamiltonian a Hermitian matrix with diagonal |p|^2 and off-diagonal
c_{n - n'}.

Spin enters every trace as a multiplicity factor q: the potential is
spin-independent, so all spatial computations are done once and scaled.

Conventions fixed here and relied on by the tests:

* Occupation: a level is occupied iff its eigenvalue is <= mu.  Ties within
  1e-10 of mu are flagged as degenerate rather than resolved.
* The relative energy subtracts the continuum background density rho0(mu)
  times int V; the variant subtracting the finite-box count is reported
  alongside (``relative_energy_box``), and is the exactly nonpositive one.
* Continuum comparisons use the unitary Fourier transform,
  Vhat(k) = (2 pi)^{-d/2} int V e^{-ikx} dx, i.e. Vhat(p_n) = (2 pi)^{-d/2}
  L^d c_n for the periodized potential.
"""

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from . import budget
from .errors import ConfigError, CutoffError, DegeneracyError, ResourceBudgetError
from .physcore import PhysicsParams, l_sc, rho0, sc_potential_functional
from .response import psi1, psi_d

__all__ = [
    "BoxSpec",
    "FourierPotential",
    "SpectralOutcome",
    "DensityGrid",
    "LiYauRecord",
    "PeierlsScan",
    "momentum_lattice",
    "build_hamiltonian",
    "neg_riesz_sum",
    "relative_energy",
    "trace_relation_check",
    "relative_kinetic",
    "free_energy_T",
    "free_energy_T_quadrature",
    "second_order_box",
    "second_order_continuum_radial",
    "peierls_scan",
    "li_yau_check",
    "thermo_sweep",
    "choose_n_max",
    "cutoff_doubling_gap",
]

FERMI_TIE_TOL = 1e-10
CUTOFF_HEADROOM = 0.8


@dataclass(frozen=True)
class BoxSpec:
    """Periodic box plus plane-wave cutoff.

    ``basis_cap`` overrides the configured dense-basis cap for lattice-sum-only
    work (no dense matrix is ever built at the raised size).
    """

    d: int
    L: float
    n_max: int
    basis_cap: Optional[int] = None

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ConfigError(f"spectral runs support d in {{1,2,3}}, got {self.d}")
        if not (self.L > 0):
            raise ConfigError("box side must be > 0")
        if self.n_max < 1:
            raise ConfigError("n_max must be >= 1")
        cap = self.basis_cap if self.basis_cap is not None else budget.basis_cap()
        if self.basis_size > cap:
            raise ResourceBudgetError(
                f"basis size {self.basis_size} exceeds cap {cap}"
            )

    @property
    def basis_size(self) -> int:
        return (2 * self.n_max + 1) ** self.d

    @property
    def cutoff_energy(self) -> float:
        return (2.0 * math.pi * self.n_max / self.L) ** 2

    def check_mu(self, mu: float):
        if self.cutoff_energy <= mu:
            raise CutoffError(
                f"cutoff energy {self.cutoff_energy:.6g} does not exceed mu={mu:.6g}"
            )


class FourierPotential:
    """Real periodic potential given by its Fourier coefficients on (2 pi Z / L)^d."""

    def __init__(self, d: int, L: float, coeffs: dict):
        self.d = d
        self.L = float(L)
        self.coeffs = {tuple(int(v) for v in n): complex(c) for n, c in coeffs.items()}
        self._validate()

    def _validate(self):
        for n, c in self.coeffs.items():
            if len(n) != self.d:
                raise ConfigError(f"mode index {n} does not match dimension {self.d}")
            neg = tuple(-v for v in n)
            if neg not in self.coeffs:
                raise ConfigError(f"missing Hermitian partner of mode {n}")
            if abs(self.coeffs[neg] - c.conjugate()) > 1e-12 * max(1.0, abs(c)):
                raise ConfigError(f"coefficients at {n} and {neg} are not conjugate")
        zero = (0,) * self.d
        if zero in self.coeffs and abs(self.coeffs[zero].imag) > 1e-12:
            raise ConfigError("the zero mode must be real")

    @classmethod
    def from_half_spectrum(cls, d: int, L: float, entries: dict):
        """Build a real potential from one representative per +-n pair; the
        mirror coefficients are filled in by conjugation."""
        coeffs = {}
        for n, c in entries.items():
            n = tuple(int(v) for v in n)
            c = complex(c)
            neg = tuple(-v for v in n)
            if n == neg:
                coeffs[n] = complex(c.real, 0.0)
                continue
            if neg in coeffs and abs(coeffs[neg] - c.conjugate()) > 1e-12 * max(1.0, abs(c)):
                raise ConfigError(f"modes {n} and {neg} given inconsistently")
            coeffs[n] = c
            coeffs.setdefault(neg, c.conjugate())
        return cls(d, L, coeffs)

    @property
    def c0(self) -> float:
        return self.coeffs.get((0,) * self.d, 0j).real

    @property
    def bandwidth(self) -> int:
        if not self.coeffs:
            return 0
        return max(max(abs(v) for v in n) for n in self.coeffs)

    @property
    def abs_sum(self) -> float:
        return sum(abs(c) for c in self.coeffs.values())

    def norm_sq_integral(self) -> float:
        """int |V|^2 over the box, exact by Parseval: L^d sum |c_n|^2."""
        return self.L ** self.d * sum(abs(c) ** 2 for c in self.coeffs.values())

    def sorted_modes(self):
        return sorted(self.coeffs.items())

    def on_grid(self, m_per_dim: int) -> np.ndarray:
        """Sample V on the uniform m^d grid over C_L (used for quadratures)."""
        axes = [
            -self.L / 2.0 + self.L * np.arange(m_per_dim) / m_per_dim
            for _ in range(self.d)
        ]
        out = np.zeros((m_per_dim,) * self.d, dtype=complex)
        for n, c in self.sorted_modes():
            phase = np.ones((), dtype=complex)
            for axis, nv in enumerate(n):
                k = 2.0 * math.pi * nv / self.L
                e = np.exp(1j * k * axes[axis])
                shape = [1] * self.d
                shape[axis] = m_per_dim
                phase = phase * e.reshape(shape)
            out = out + c * phase
        if self.coeffs and np.max(np.abs(out.imag)) > 1e-10 * max(1.0, self.abs_sum):
            raise ConfigError("potential is not real on the grid")
        return out.real


@dataclass(frozen=True)
class DensityGrid:
    """Uniform real-space samples of the perturbed density and its cell volume."""

    values: np.ndarray
    cell_volume: float
    points_per_dim: int


@dataclass(frozen=True)
class SpectralOutcome:
    eigenvalues: np.ndarray
    occupied_perturbed: int
    occupied_free: int
    relative_energy: float
    relative_energy_box: float
    sc_rhs: float
    rho0_used: float
    box_free_density: float
    degenerate: bool
    density: Optional[DensityGrid] = None


@dataclass(frozen=True)
class LiYauRecord:
    lhs: float
    rhs_discrete: float
    rhs_continuum: float
    trace_deviation: float


@dataclass(frozen=True)
class PeierlsScan:
    widths: list
    ratios: list
    mode_counts: list
    slope_vs_logwidth: float


def momentum_lattice(box: BoxSpec):
    """Integer indices (lexicographic) and momenta of the truncated basis."""
    rng = range(-box.n_max, box.n_max + 1)
    n = np.array(list(product(rng, repeat=box.d)), dtype=np.int64)
    p = (2.0 * math.pi / box.L) * n.astype(float)
    return n, p


def build_hamiltonian(box: BoxSpec, V: FourierPotential) -> np.ndarray:
    """Dense Hermitian matrix H[p, p'] = |p|^2 delta + c_{(p-p') L / 2 pi}."""
    if V.d != box.d or abs(V.L - box.L) > 1e-12 * box.L:
        raise ConfigError("potential and box geometry disagree")
    if V.bandwidth > box.n_max:
        raise ConfigError("potential support exceeds the plane-wave cutoff")
    n, p = momentum_lattice(box)
    N = n.shape[0]
    index = {tuple(row): i for i, row in enumerate(n)}
    H = np.zeros((N, N), dtype=complex)
    p2 = np.sum(p * p, axis=1)
    H[np.arange(N), np.arange(N)] = p2
    for m, c in V.sorted_modes():
        for i in range(N):
            j = index.get(tuple(n[i] - np.array(m, dtype=np.int64)))
            if j is not None:
                H[i, j] += c
    return H


def neg_riesz_sum(eigs, mu: float) -> float:
    """Sum of (lambda - mu)_- over a spectrum; tr (H - mu)_- in finite dimensions."""
    eigs = np.asarray(eigs, dtype=float)
    return float(np.sum(np.maximum(mu - eigs, 0.0)))


def _free_spectrum(box: BoxSpec):
    _, p = momentum_lattice(box)
    return np.sum(p * p, axis=1)


def _eigensystem(box: BoxSpec, V: FourierPotential):
    H = build_hamiltonian(box, V)
    eigvals, eigvecs = np.linalg.eigh(H)
    return eigvals, eigvecs


def _occupied_count(eigs, mu: float):
    occ = int(np.sum(eigs <= mu))
    degenerate = bool(np.any(np.abs(eigs - mu) < FERMI_TIE_TOL))
    return occ, degenerate


def _check_cutoff(box: BoxSpec, eigs, occ: int):
    if occ == 0:
        return
    top = float(eigs[occ - 1])
    if top > CUTOFF_HEADROOM * box.cutoff_energy:
        raise CutoffError(
            f"largest occupied eigenvalue {top:.6g} is inside the cutoff shell "
            f"(limit {CUTOFF_HEADROOM * box.cutoff_energy:.6g}); raise n_max"
        )


def _density_values(box: BoxSpec, eigvecs, occ: int, q: int,
                    m_per_dim: int) -> np.ndarray:
    """Perturbed particle density q sum_occ |psi_i(x)|^2 on the uniform grid."""
    _, p = momentum_lattice(box)
    axes = [-box.L / 2.0 + box.L * np.arange(m_per_dim) / m_per_dim] * box.d
    grids = np.meshgrid(*axes, indexing="ij")
    x = np.stack([g.ravel() for g in grids], axis=1)
    waves = np.exp(1j * x @ p.T) / box.L ** (box.d / 2.0)
    psi = waves @ eigvecs[:, :occ]
    pert = q * np.sum(np.abs(psi) ** 2, axis=1)
    return pert.reshape((m_per_dim,) * box.d)


def relative_energy(box: BoxSpec, V: FourierPotential, params: PhysicsParams,
                    compute_density: bool = False) -> SpectralOutcome:
    """Relative energy of the perturbed Fermi sea in the box.

    relative_energy      = q [ -tr(H_V - mu)_- + tr(H_0 - mu)_- ] - rho0 L^d c_0
    relative_energy_box  = same with the continuum rho0 replaced by the box
                           occupation count (the exactly nonpositive variant).

    The free trace is a lattice sum, exact once the cutoff exceeds mu; the
    perturbed trace comes from a dense Hermitian eigendecomposition.
    """
    if box.d != params.d:
        raise ConfigError("box and parameters disagree on the dimension")
    box.check_mu(params.mu)
    mu, q = params.mu, params.q
    eigvals, eigvecs = _eigensystem(box, V)
    p2 = _free_spectrum(box)

    occ_v, degenerate_v = _occupied_count(eigvals, mu)
    occ_0, degenerate_0 = _occupied_count(p2, mu)
    _check_cutoff(box, eigvals, occ_v)

    pert_neg = neg_riesz_sum(eigvals, mu)
    free_neg = neg_riesz_sum(p2, mu)
    r0 = rho0(PhysicsParams(d=params.d, q=1, mu=mu))
    vol = box.L ** box.d
    e_rel = q * (-pert_neg + free_neg - r0 * vol * V.c0)
    e_rel_box = q * (-pert_neg + free_neg - V.c0 * occ_0)

    m_sc = max(16, 4 * (2 * V.bandwidth + 1))
    v_grid = V.on_grid(m_sc)
    cell = (box.L / m_sc) ** box.d
    sc_rhs = -l_sc(params) * sc_potential_functional(v_grid.ravel(), cell, params)

    density = None
    if compute_density:
        m_dens = max(2 * box.n_max + 1, 4 * (2 * V.bandwidth + 1), 16)
        pert = _density_values(box, eigvecs, occ_v, q, m_dens)
        values = pert - q * occ_0 / vol
        density = DensityGrid(
            values=values,
            cell_volume=(box.L / m_dens) ** box.d,
            points_per_dim=m_dens,
        )

    return SpectralOutcome(
        eigenvalues=eigvals,
        occupied_perturbed=q * occ_v,
        occupied_free=q * occ_0,
        relative_energy=e_rel,
        relative_energy_box=e_rel_box,
        sc_rhs=sc_rhs,
        rho0_used=q * r0,
        box_free_density=q * occ_0 / vol,
        degenerate=degenerate_v or degenerate_0,
        density=density,
    )


def trace_relation_check(box: BoxSpec, V: FourierPotential, params: PhysicsParams,
                         oversample: int = 1) -> float:
    """Deviation in the finite-dimensional trace identity

    tr (H_V - mu) Q_V = tr (H_0 - mu) Q_V + int V rho_{Q_V},

    with Q_V the difference of the perturbed and free Fermi projections.  The
    left side uses momentum-space traces, the right side a real-space
    quadrature of V rho_{Q_V} on a grid beyond the Nyquist rate of the
    (band-limited) product.
    """
    box.check_mu(params.mu)
    mu, q = params.mu, params.q
    eigvals, eigvecs = _eigensystem(box, V)
    p2 = _free_spectrum(box)
    occ_v, _ = _occupied_count(eigvals, mu)
    occ_0, _ = _occupied_count(p2, mu)
    _check_cutoff(box, eigvals, occ_v)

    # momentum-space traces
    lhs = float(np.sum(eigvals[:occ_v] - mu)) - (
        float(np.sum(p2[p2 <= mu] - mu)) + V.c0 * occ_0
    )
    u_occ = eigvecs[:, :occ_v]
    kin_v = float(np.real(np.sum((p2[:, None] - mu) * np.abs(u_occ) ** 2)))
    kin_free = float(np.sum(p2[p2 <= mu] - mu))
    tr_h0_q = kin_v - kin_free

    # real-space quadrature of V rho_{Q_V}; V rho has bandwidth <= n_V + 2 n_max
    m = oversample * (V.bandwidth + 2 * box.n_max + 1)
    m = max(m, 4 * (2 * V.bandwidth + 1), 16)
    n, p = momentum_lattice(box)
    axes = [-box.L / 2.0 + box.L * np.arange(m) / m] * box.d
    grids = np.meshgrid(*axes, indexing="ij")
    x = np.stack([g.ravel() for g in grids], axis=1)
    waves = np.exp(1j * x @ p.T) / box.L ** (box.d / 2.0)
    psi = waves @ u_occ
    rho_q = np.sum(np.abs(psi) ** 2, axis=1) - occ_0 / box.L ** box.d
    v_grid = V.on_grid(m).ravel()
    cell = (box.L / m) ** box.d
    int_v_rho = float(np.sum(v_grid * rho_q) * cell)

    return abs(q * lhs - q * (tr_h0_q + int_v_rho))


def relative_kinetic(box: BoxSpec, Q: np.ndarray, mu: float, tol: float = 1e-10) -> float:
    """Relative kinetic energy tr |H_0 - mu|^{1/2} (Q^{++} - Q^{--}) |H_0 - mu|^{1/2}
    of an admissible perturbation Q in the momentum basis.

    Admissibility (-Pi^- <= Q <= Pi^+) is checked through the equivalent block
    inequality Q^2 <= Q^{++} - Q^{--}: the difference must have spectrum above
    -tol.
    """
    p2 = _free_spectrum(box)
    if Q.shape != (p2.size, p2.size):
        raise ConfigError("Q does not match the box basis")
    occ = p2 <= mu
    # Q^{++} - Q^{--}: drop the off-diagonal blocks, flip the occupied one
    qpp_mm = Q.copy()
    qpp_mm[occ[:, None] & ~occ[None, :]] = 0.0
    qpp_mm[~occ[:, None] & occ[None, :]] = 0.0
    qpp_mm[np.ix_(occ, occ)] *= -1.0
    diff = qpp_mm - Q @ Q
    low = float(np.min(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))))
    if low < -tol:
        raise ValueError(f"Q violates the one-body constraint (margin {low:.3e})")
    w = np.abs(p2 - mu)
    diag = np.real(np.diag(Q))
    return float(np.sum(w[~occ] * diag[~occ]) - np.sum(w[occ] * diag[occ]))


# ----------------------------------------------------------------------------
# positive temperature
# ----------------------------------------------------------------------------


def _fermi_free_energy(x, mu, T):
    """-T log(1 + exp(-(x-mu)/T)), overflow-safe, vectorized."""
    x = np.asarray(x, dtype=float)
    z = (x - mu) / T
    return -np.maximum(-z, 0.0) * T - T * np.log1p(np.exp(-np.abs(z)))


def _fermi_occupation(x, mu, T):
    x = np.asarray(x, dtype=float)
    z = (x - mu) / T
    w = np.exp(-np.abs(z))
    return np.where(z >= 0, w / (1.0 + w), 1.0 / (1.0 + w))


def _fermi_curvature(lam, mu, T):
    """Second derivative of the free-energy-per-level function; <= 0."""
    z = (np.asarray(lam, dtype=float) - mu) / T
    w = np.exp(-np.abs(z))
    return -w / (T * (1.0 + w) ** 2)


def free_energy_T(box: BoxSpec, V: FourierPotential, params: PhysicsParams,
                  T: float) -> float:
    """Relative free energy at temperature T:

    q [ sum f(lambda_i^V) - sum f(p^2) - c_0 sum f'(p^2) ],

    with f the Fermi-Dirac free energy per level.  The last term is
    int rho_{f'(H_0)} V, exact in the box.  Nonpositive for every concave f.
    """
    if T <= 0:
        raise ConfigError("temperature must be > 0")
    box.check_mu(params.mu)
    if box.cutoff_energy < params.mu + 30.0 * T:
        raise CutoffError("cutoff does not cover the thermal tail; raise n_max")
    mu, q = params.mu, params.q
    eigvals, _ = _eigensystem(box, V)
    p2 = _free_spectrum(box)
    occ_v, _ = _occupied_count(eigvals, mu)
    _check_cutoff(box, eigvals, occ_v)
    pert = float(np.sum(_fermi_free_energy(eigvals, mu, T)))
    free = float(np.sum(_fermi_free_energy(p2, mu, T)))
    first_order = V.c0 * float(np.sum(_fermi_occupation(p2, mu, T)))
    return q * (pert - free - first_order)


def _box_energy_at(lam, eig_v, p2, c0, q):
    """Zero-temperature box relative energy at Fermi level lam (vectorized)."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    out = np.empty_like(lam)
    for i, lv in enumerate(lam):
        pert = np.sum(np.maximum(lv - eig_v, 0.0))
        free = np.sum(np.maximum(lv - p2, 0.0))
        n0 = np.sum(p2 <= lv)
        out[i] = q * (-pert + free - c0 * n0)
    return out


def free_energy_T_quadrature(box: BoxSpec, V: FourierPotential, params: PhysicsParams,
                             T: float, gl_order: int = 24, window: float = 45.0) -> float:
    """Independent route to the relative free energy: average the
    zero-temperature box energies over shifted Fermi levels against the
    curvature of the partition function,

        - int E_box(lambda) f''(lambda) d lambda.

    The integrand is piecewise smooth with kinks at the eigenvalues of both
    spectra, so the quadrature subdivides there and applies Gauss-Legendre on
    each panel.
    """
    if T <= 0:
        raise ConfigError("temperature must be > 0")
    mu, q = params.mu, params.q
    eig_v, _ = _eigensystem(box, V)
    p2 = _free_spectrum(box)
    lo = mu - window * T
    hi = mu + window * T
    cuts = np.concatenate([[lo], np.sort(np.concatenate([eig_v, p2])), [hi]])
    cuts = np.unique(np.clip(cuts, lo, hi))
    nodes, weights = np.polynomial.legendre.leggauss(gl_order)
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a < 1e-300:
            continue
        lam = 0.5 * (b - a) * nodes + 0.5 * (a + b)
        vals = _box_energy_at(lam, eig_v, p2, V.c0, q) * _fermi_curvature(lam, mu, T)
        total += 0.5 * (b - a) * float(np.dot(weights, vals))
    return -total


# ----------------------------------------------------------------------------
# second-order perturbation theory
# ----------------------------------------------------------------------------


def second_order_box(box: BoxSpec, V: FourierPotential, params: PhysicsParams) -> float:
    """Discrete second-order energy coefficient

        -q sum_{p: p^2 <= mu} sum_{p' in basis: p'^2 > mu} |c_{(p'-p) L/2 pi}|^2 / (p'^2 - p^2).

    Terms are accumulated with exact (correctly rounded) summation so the
    value is reproducible independently of the evaluation order.
    """
    mu, q = params.mu, params.q
    if (2 * box.n_max + 1) ** box.d > budget.lattice_budget():
        raise ResourceBudgetError("momentum enumeration exceeds the lattice budget")
    n, p = momentum_lattice(box)
    p2 = np.sum(p * p, axis=1)
    if np.any(np.abs(p2 - mu) < 1e-12):
        raise DegeneracyError("mu coincides with a free lattice level")
    occ = p2 <= mu
    p_occ = p[occ]
    p2_occ = p2[occ]
    n_occ = n[occ]
    terms = []
    kstep = 2.0 * math.pi / box.L
    for m, c in V.sorted_modes():
        marr = np.array(m, dtype=np.int64)
        inside = np.all(np.abs(n_occ + marr) <= box.n_max, axis=1)
        k = kstep * marr.astype(float)
        shifted = p_occ[inside] + k
        p2_shift = np.sum(shifted * shifted, axis=1)
        mask = p2_shift > mu
        denom = p2_shift[mask] - p2_occ[inside][mask]
        w = c.real * c.real + c.imag * c.imag
        if denom.size:
            terms.append(w / denom)
    if not terms:
        return 0.0
    return -q * math.fsum(np.concatenate(terms))


def second_order_continuum_radial(vhat_abs2: Callable[[float], float],
                                  params: PhysicsParams, k_max: float) -> float:
    """Continuum second-order energy for a radial |Vhat|^2 (unitary convention):

        -q mu^{d/2-1} |S^{d-1}| int_0^kmax Psi_d(k/sqrt(mu)) |Vhat(k)|^2 k^{d-1} dk.
    """
    d, mu, q = params.d, params.mu, params.q
    from .physcore import sphere_area

    def f(k):
        kk = k / math.sqrt(mu)
        if d == 1:
            sample = psi1(kk)
        else:
            sample = psi_d(kk, d)
        val = getattr(sample, "value", None)
        if val is None:
            return 0.0
        return val * vhat_abs2(k) * k ** (d - 1)

    sing = 2.0 * math.sqrt(mu)
    points = [sing] if sing < k_max else None
    val, _ = integrate.quad(f, 0.0, k_max, points=points, limit=400,
                            epsabs=1e-12, epsrel=1e-10)
    return -q * mu ** (d / 2.0 - 1.0) * sphere_area(d) * val


def _packet_modes(d: int, L: float, center: float, width: float,
                  max_modes: int) -> list:
    """Lattice modes whose momentum magnitude falls in [center - width, center),
    deterministically thinned to at most max_modes while keeping +-k pairs."""
    kstep = 2.0 * math.pi / L
    bound = int(math.ceil((center) / kstep)) + 1
    rng = range(-bound, bound + 1)
    half = []
    for nvec in product(rng, repeat=d):
        if nvec <= (0,) * d:
            continue  # keep one representative per +-pair
        k = kstep * math.sqrt(sum(v * v for v in nvec))
        if center - width <= k < center:
            half.append(nvec)
    half.sort()
    if len(half) > max_modes // 2:
        stride = math.ceil(len(half) / (max_modes // 2))
        half = half[::stride]
    return half


def peierls_scan(params: PhysicsParams, L: float, widths, amplitude: float = 0.01,
                 center: Optional[float] = None, max_modes: int = 512) -> PeierlsScan:
    """Second-order response of packets whose Fourier mass concentrates at the
    Fermi-sphere diameter.

    For each width w the potential carries equal real coefficients on the
    lattice modes with |k| in [center - w, center); the reported ratio is
    |second-order energy| / int V^2.  In d = 1 the ratios grow without bound as
    the packet narrows (the log divergence at |k| = 2 sqrt(mu)); in d = 2 they
    stay in a band.  The returned slope is the least-squares fit of ratio
    against log(1/width).
    """
    if params.d not in (1, 2):
        raise ConfigError("the packet contrast is defined for d in {1, 2}")
    if center is None:
        center = 2.0 * math.sqrt(params.mu)
    n_basis = int(math.ceil(L * (center + math.sqrt(params.mu) + 1.0) / (2.0 * math.pi)))
    box = BoxSpec(d=params.d, L=L, n_max=n_basis,
                  basis_cap=max((2 * n_basis + 1) ** params.d, budget.basis_cap()))
    ratios = []
    counts = []
    for w in widths:
        half = _packet_modes(params.d, L, center, w, max_modes)
        if not half:
            raise ConfigError(f"no lattice modes in the packet of width {w}; enlarge L")
        V = FourierPotential.from_half_spectrum(
            params.d, L, {n: amplitude for n in half}
        )
        e2 = second_order_box(box, V, params)
        ratios.append(abs(e2) / V.norm_sq_integral())
        counts.append(len(V.coeffs))
    xs = np.log(1.0 / np.asarray(list(widths), dtype=float))
    ys = np.asarray(ratios, dtype=float)
    slope = float(np.polyfit(xs, ys, 1)[0]) if len(ratios) > 1 else 0.0
    return PeierlsScan(widths=list(widths), ratios=ratios,
                       mode_counts=counts, slope_vs_logwidth=slope)


# ----------------------------------------------------------------------------
# sharp bound for a banished region
# ----------------------------------------------------------------------------


def _indicator_matrix(box: BoxSpec, lo, hi) -> np.ndarray:
    """Plane-wave matrix of multiplication by the indicator of the axis box
    [lo, hi] inside C_L."""
    _, p = momentum_lattice(box)
    mat = np.ones((p.shape[0], p.shape[0]), dtype=complex)
    for t in range(box.d):
        a = p[:, t][:, None] - p[:, t][None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            block = (np.exp(-1j * a * lo[t]) - np.exp(-1j * a * hi[t])) / (1j * a)
        block[np.abs(a) < 1e-300] = hi[t] - lo[t]
        mat *= block
    return mat / box.L ** box.d


def li_yau_check(box: BoxSpec, omega_lo, omega_hi, params: PhysicsParams) -> LiYauRecord:
    """Sharp lower bound on the kinetic cost of emptying an axis-aligned region.

    (i) checks the exact trace identity
        tr (H_0-mu)_-^{1/2} 1_Omega (H_0-mu)_-^{1/2} = (|Omega|/L^d) q sum (p^2-mu)_-
    by computing the left side through the dense indicator matrix; (ii) builds
    the admissible state gamma = 1_{Omega^c} Pi^- 1_{Omega^c}, whose relative
    kinetic energy is compared against the sharp continuum value
    (2/d) K_sc rho0^{1+2/d} |Omega|.
    """
    lo = np.asarray(omega_lo, dtype=float)
    hi = np.asarray(omega_hi, dtype=float)
    if lo.shape != (box.d,) or hi.shape != (box.d,):
        raise ConfigError("region bounds must match the box dimension")
    if np.any(lo < -box.L / 2.0 - 1e-12) or np.any(hi > box.L / 2.0 + 1e-12) or np.any(hi < lo):
        raise ConfigError("region must sit inside the box")
    box.check_mu(params.mu)
    mu, q = params.mu, params.q
    vol_omega = float(np.prod(hi - lo))
    p2 = _free_spectrum(box)

    if vol_omega == 0.0:
        return LiYauRecord(lhs=0.0, rhs_discrete=0.0, rhs_continuum=0.0, trace_deviation=0.0)

    P = _indicator_matrix(box, lo, hi)
    droot = np.sqrt(np.maximum(mu - p2, 0.0))
    M = droot[:, None] * P * droot[None, :]
    lhs_trace = q * float(np.trace(M).real)
    rhs_discrete = q * (vol_omega / box.L ** box.d) * float(np.sum(np.maximum(mu - p2, 0.0)))
    deviation = abs(lhs_trace - rhs_discrete)

    occ = (p2 <= mu).astype(float)
    pi_minus = np.diag(occ).astype(complex)
    one_minus = np.eye(p2.size, dtype=complex) - P
    gamma = one_minus @ pi_minus @ one_minus
    Q = gamma - pi_minus
    kinetic = q * relative_kinetic(box, Q, mu)

    c1 = PhysicsParams(d=params.d, q=1, mu=mu)
    from .physcore import k_sc as _ksc, rho0 as _rho0

    sharp = q * (2.0 / params.d) * _ksc(c1) * _rho0(c1) ** (1.0 + 2.0 / params.d) * vol_omega
    return LiYauRecord(lhs=kinetic, rhs_discrete=rhs_discrete,
                       rhs_continuum=sharp, trace_deviation=deviation)


# ----------------------------------------------------------------------------
# sweeps and cutoff policy
# ----------------------------------------------------------------------------


def choose_n_max(d: int, L: float, mu: float, V: FourierPotential,
                 margin: float = 2.0) -> int:
    """Cutoff rule: energy headroom over mu plus the potential strength, and
    index headroom of three potential bandwidths over the Fermi shell."""
    dv = V.abs_sum
    e_cut = max(4.0 * max(mu, 0.25), margin * (mu + 2.0 * dv + 1.0))
    by_energy = int(math.ceil(L * math.sqrt(e_cut) / (2.0 * math.pi)))
    n_occ = int(math.ceil(L * math.sqrt(max(mu, 0.0)) / (2.0 * math.pi)))
    by_index = n_occ + 3 * max(V.bandwidth, 1) + 2
    return max(by_energy, by_index)


def cutoff_doubling_gap(box: BoxSpec, V: FourierPotential, params: PhysicsParams) -> float:
    """Change in the relative energy when the plane-wave cutoff is doubled."""
    base = relative_energy(box, V, params).relative_energy
    doubled = BoxSpec(d=box.d, L=box.L, n_max=2 * box.n_max,
                      basis_cap=max((2 * 2 * box.n_max + 1) ** box.d, budget.basis_cap()))
    again = relative_energy(doubled, V, params).relative_energy
    return abs(again - base)


def thermo_sweep(make_potential: Callable[[float], FourierPotential],
                 params: PhysicsParams, lengths, n_max_for=None):
    """Relative energies of the same physical potential embedded in boxes of
    growing side.  Returns (outcomes, gaps) with gaps the successive absolute
    differences of the relative energies."""
    outcomes = []
    for L in lengths:
        V = make_potential(L)
        n_max = n_max_for(L) if n_max_for else choose_n_max(params.d, L, params.mu, V)
        box = BoxSpec(d=params.d, L=L, n_max=n_max)
        outcomes.append((L, relative_energy(box, V, params)))
    energies = [o.relative_energy for _, o in outcomes]
    gaps = [abs(b - a) for a, b in zip(energies[:-1], energies[1:])]
    return outcomes, gaps
