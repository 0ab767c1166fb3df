"""Finite-matrix oracle for the variational principle behind the duality.

Everything here is exact linear algebra on small Hermitian matrices: the
eigenvalue-sum variational formula, the relative-trace identity for the
difference of spectral projections, and the quadratic constraint that encodes
admissibility of one-body perturbations.  Random ensembles are seeded per call
and deterministic.
"""

from dataclasses import dataclass
from math import inf

import numpy as np

from .errors import ConfigError, DegeneracyError
from .physcore import PhysicsParams, delta_t

__all__ = [
    "MatrixPair",
    "VariationalCheck",
    "ConstraintCheck",
    "random_hermitian",
    "random_density_matrix",
    "random_projection",
    "neg_part_trace",
    "variational_min_check",
    "relative_trace_identity",
    "constraint_q2_check",
    "sobolev_mu_ratio",
]

HERMITICITY_TOL = 1e-12
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class MatrixPair:
    """Unperturbed matrix A and perturbation B, both Hermitian, same dimension."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        _require_hermitian(self.a, "A")
        _require_hermitian(self.b, "B")
        if self.a.shape != self.b.shape:
            raise ConfigError("A and B must have the same dimension")

    @property
    def dim(self) -> int:
        return self.a.shape[0]


@dataclass(frozen=True)
class VariationalCheck:
    analytic: float
    sampled_min: float
    gap: float
    projection_deviation: float


@dataclass(frozen=True)
class ConstraintCheck:
    equiv_holds: bool
    equality_iff_projection: bool
    min_margin: float
    difference_norm: float
    is_projection: bool


def _require_hermitian(m: np.ndarray, name: str):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ConfigError(f"{name} must be a square matrix")
    scale = max(1.0, float(np.max(np.abs(m))))
    if float(np.max(np.abs(m - m.conj().T))) > HERMITICITY_TOL * scale:
        raise ConfigError(f"{name} is not Hermitian within tolerance")


def random_hermitian(dim: int, rng) -> np.ndarray:
    """Gaussian entries, symmetrized to a complex Hermitian matrix."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2.0


def _haar_unitary(dim: int, rng) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    qmat, r = np.linalg.qr(g)
    return qmat * (np.diag(r) / np.abs(np.diag(r)))


def random_density_matrix(dim: int, rng) -> np.ndarray:
    """Random 0 <= gamma <= 1: Haar-like eigenbasis with uniform occupations."""
    u = _haar_unitary(dim, rng)
    occ = rng.uniform(0.0, 1.0, size=dim)
    return (u * occ) @ u.conj().T


def random_projection(dim: int, rank: int, rng) -> np.ndarray:
    u = _haar_unitary(dim, rng)
    occ = np.zeros(dim)
    occ[:rank] = 1.0
    return (u * occ) @ u.conj().T


def neg_part_trace(m: np.ndarray) -> float:
    """tr M_- = sum of |negative eigenvalues|; >= 0."""
    _require_hermitian(m, "M")
    eigs = np.linalg.eigvalsh(m)
    return float(np.sum(np.maximum(-eigs, 0.0)))


def variational_min_check(pair: MatrixPair, n_samples: int, seed: int = 0) -> VariationalCheck:
    """Eigenvalue-sum variational formula -tr(A+B)_- = inf over 0 <= gamma <= 1
    of tr (A+B) gamma.

    The spectral projection onto the negative subspace attains the infimum;
    random admissible gammas must never go below it.
    """
    if n_samples < 1:
        raise ConfigError("need at least one sample")
    m = pair.a + pair.b
    eigs, vecs = np.linalg.eigh(m)
    analytic = -float(np.sum(np.maximum(-eigs, 0.0)))
    proj = (vecs * (eigs < 0.0)) @ vecs.conj().T
    at_projection = float(np.trace(m @ proj).real)
    rng = np.random.default_rng(seed)
    sampled_min = inf
    for _ in range(n_samples):
        gamma = random_density_matrix(pair.dim, rng)
        sampled_min = min(sampled_min, float(np.trace(m @ gamma).real))
    return VariationalCheck(
        analytic=analytic,
        sampled_min=sampled_min,
        gap=sampled_min - analytic,
        projection_deviation=abs(at_projection - analytic),
    )


def relative_trace_identity(pair: MatrixPair) -> float:
    """Deviation in tr (A+B)(Pi_B - Pi) = -tr |A+B| (Pi_B - Pi)^2, where Pi and
    Pi_B project onto the nonpositive spectral subspaces of A and A+B.

    Raises if either matrix has an eigenvalue within 1e-10 of zero (the
    projections are discontinuous there).  The left side is checked to be
    nonpositive.
    """
    m = pair.a + pair.b
    eigs_a, vecs_a = np.linalg.eigh(pair.a)
    eigs_m, vecs_m = np.linalg.eigh(m)
    if np.min(np.abs(eigs_a)) < DEGENERACY_TOL or np.min(np.abs(eigs_m)) < DEGENERACY_TOL:
        raise DegeneracyError("an eigenvalue sits at the Fermi level; identity skipped")
    pi = (vecs_a * (eigs_a <= 0.0)) @ vecs_a.conj().T
    pi_b = (vecs_m * (eigs_m <= 0.0)) @ vecs_m.conj().T
    q = pi_b - pi
    lhs = float(np.trace(m @ q).real)
    abs_m = (vecs_m * np.abs(eigs_m)) @ vecs_m.conj().T
    rhs = -float(np.trace(abs_m @ q @ q).real)
    if lhs > 1e-10 * max(1.0, float(np.max(np.abs(eigs_m)))):
        raise ArithmeticError("relative trace came out positive; ill-conditioned input")
    return abs(lhs - rhs)


def constraint_q2_check(gamma: np.ndarray, pi_minus: np.ndarray,
                        margin_tol: float = 1e-10, equality_tol: float = 1e-9) -> ConstraintCheck:
    """Quadratic admissibility constraint for Q = gamma - Pi^-:

    Q^2 <= Q^{++} - Q^{--} holds for every 0 <= gamma <= 1, with equality
    exactly when gamma is an orthogonal projection.
    """
    _require_hermitian(gamma, "gamma")
    _require_hermitian(pi_minus, "Pi^-")
    eigs_g = np.linalg.eigvalsh(gamma)
    if eigs_g[0] < -margin_tol or eigs_g[-1] > 1.0 + margin_tol:
        raise ConfigError("gamma is not an admissible density matrix")
    if float(np.max(np.abs(pi_minus @ pi_minus - pi_minus))) > margin_tol:
        raise ConfigError("Pi^- is not an orthogonal projection")
    q = gamma - pi_minus
    pi_plus = np.eye(q.shape[0]) - pi_minus
    qpp = pi_plus @ q @ pi_plus
    qmm = pi_minus @ q @ pi_minus
    diff = qpp - qmm - q @ q
    margins = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    min_margin = float(margins[0])
    norm = float(np.max(np.abs(margins)))
    is_projection = float(np.max(np.abs(gamma @ gamma - gamma))) <= equality_tol
    equality = norm <= equality_tol
    return ConstraintCheck(
        equiv_holds=min_margin >= -margin_tol,
        equality_iff_projection=(equality == is_projection),
        min_margin=min_margin,
        difference_norm=norm,
        is_projection=is_projection,
    )


def sobolev_mu_ratio(momenta: np.ndarray, phi_hat: np.ndarray, L: float,
                     params: PhysicsParams, grid_points: int = 256) -> float:
    """Ratio of the momentum-side form sum |p^2 - mu| |phi_hat|^2 to the
    excess-energy integral of |phi|^2 on a one-dimensional box grid.

    Reported only: the constant relating the two sides is not explicit, and at
    finite box normalization the ratio can even vanish (a single plane wave on
    the Fermi shell has zero numerator but a spread-out density with positive
    excess energy, which is why the normalization constraint matters).
    """
    if params.d != 1:
        raise ConfigError("the real-space side is implemented for d = 1")
    momenta = np.asarray(momenta, dtype=float)
    phi_hat = np.asarray(phi_hat, dtype=complex)
    if momenta.shape != phi_hat.shape:
        raise ConfigError("momentum grid and amplitudes disagree")
    weight = float(np.sum(np.abs(phi_hat) ** 2))
    if weight > 1.0 + 1e-9:
        raise ConfigError("amplitudes must satisfy sum |phi_hat|^2 <= 1")
    numerator = float(np.sum(np.abs(momenta ** 2 - params.mu) * np.abs(phi_hat) ** 2))
    x = -L / 2.0 + L * np.arange(grid_points) / grid_points
    phi = (phi_hat[None, :] * np.exp(1j * np.outer(x, momenta))).sum(axis=1) / np.sqrt(L)
    dens = np.abs(phi) ** 2
    denominator = float(np.sum(delta_t(dens, params)) * (L / grid_points))
    if denominator < 1e-300:
        raise DegeneracyError("excess-energy integral vanished; ratio undefined")
    return numerator / denominator
