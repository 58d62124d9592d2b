"""States, bases, dephasing, and sequential-measurement statistics.

Everything downstream works with the four frozen value types defined here.
A density matrix is eigendecomposed once at construction; the cleaned
spectrum (clipped to [0, 1], renormalized) is what all spectral functions
consume, so repeated measure evaluations never re-diagonalize.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    DimensionTooSmall,
    NotDoublyStochastic,
    NotHermitian,
    NotNormalized,
    NotOrthonormal,
    NotPositive,
    TraceNotOne,
)
from .rng import stream

VALIDATION_TOL = 1e-8

# eigenvalues below RANK_TOL * largest are eigh noise on the kernel, not support
RANK_TOL = 1e-13

SAMPLE_KINDS = ("haar_state_pure", "haar_state_mixed", "haar_unitary_basis", "simplex")


def _frozen(arr):
    arr.setflags(write=False)
    return arr


def _check_square(m, what):
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionTooSmall(f"{what} must be square, got shape {m.shape}")
    if m.shape[0] < 2:
        raise DimensionTooSmall(f"{what} needs dimension >= 2, got {m.shape[0]}")


def _check_same_dim(x, y):
    if x.dim != y.dim:
        raise DimensionMismatch(f"dimensions differ: {x.dim} vs {y.dim}")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated density matrix with its cleaned eigendecomposition.

    `eigenvalues[k]` pairs with column k of `eigenvectors`; the spectrum is
    clipped to [0, 1] and renormalized to unit sum, and `matrix` is rebuilt
    from the cleaned decomposition so it is exactly Hermitian.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def purity(self) -> float:
        return float(np.sum(self.eigenvalues**2))

    def power(self, exponent: float) -> np.ndarray:
        """Pseudo-power on the support: kernel eigenvalues stay zero."""
        lam = self.eigenvalues
        on = lam > lam.max() * RANK_TOL
        powered = np.where(on, lam, 1.0) ** exponent * on
        return (self.eigenvectors * powered) @ self.eigenvectors.conj().T


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    """Orthonormal measurement basis; kets are the columns of `kets`."""

    kets: np.ndarray

    @property
    def dim(self) -> int:
        return self.kets.shape[0]

    def ket(self, index: int) -> np.ndarray:
        return self.kets[:, index]


@dataclass(frozen=True, eq=False)
class ProbDist:
    """Outcome distribution: nonnegative entries with unit sum."""

    probs: np.ndarray

    @property
    def dim(self) -> int:
        return self.probs.shape[0]


@dataclass(frozen=True, eq=False)
class OverlapMatrix:
    """Doubly stochastic matrix of squared basis overlaps.

    Row i holds |<a_i|b_j>|^2 over j, so rows follow the first (dephasing)
    measurement and columns the second one.
    """

    entries: np.ndarray
    cmax: float

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def transpose(self) -> "OverlapMatrix":
        return OverlapMatrix(_frozen(self.entries.T.copy()), self.cmax)


def make_density(entries) -> DensityMatrix:
    """Validate a raw matrix and return the cleaned DensityMatrix.

    Rejects non-square or dim<2 input, Hermiticity drift, eigenvalues below
    -1e-8, and trace off 1 by more than 1e-8. Accepted spectra are clipped
    to [0, 1] and renormalized.
    """
    m = np.asarray(entries, dtype=np.complex128)
    _check_square(m, "a density matrix")
    drift = float(np.max(np.abs(m - m.conj().T)))
    if drift > VALIDATION_TOL:
        raise NotHermitian(f"max Hermiticity drift {drift:.3g} exceeds {VALIDATION_TOL}")
    h = (m + m.conj().T) / 2.0
    tr = float(np.real(np.trace(h)))
    if abs(tr - 1.0) > VALIDATION_TOL:
        raise TraceNotOne(f"trace {tr:.10g} differs from 1 by more than {VALIDATION_TOL}")
    lam, vec = np.linalg.eigh(h)
    if float(lam[0]) < -VALIDATION_TOL:
        raise NotPositive(f"minimum eigenvalue {float(lam[0]):.6g} below -{VALIDATION_TOL}")
    lam = np.clip(lam, 0.0, 1.0)
    lam = lam / lam.sum()
    cleaned = (vec * lam) @ vec.conj().T
    cleaned = (cleaned + cleaned.conj().T) / 2.0
    return DensityMatrix(_frozen(cleaned), _frozen(lam), _frozen(vec))


def make_basis(kets) -> OrthonormalBasis:
    """Validate a matrix of ket columns (Gram within 1e-8 of identity)."""
    u = np.asarray(kets, dtype=np.complex128)
    _check_square(u, "a basis")
    drift = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
    if drift > VALIDATION_TOL:
        raise NotOrthonormal(f"max Gram drift {drift:.3g} exceeds {VALIDATION_TOL}")
    return OrthonormalBasis(_frozen(u))


def make_prob(probs) -> ProbDist:
    """Validate a probability vector; entries are clipped and renormalized."""
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 1 or p.shape[0] < 2:
        raise DimensionTooSmall(f"need a 1-d vector of length >= 2, got shape {p.shape}")
    if float(p.min()) < -VALIDATION_TOL or float(p.max()) > 1.0 + VALIDATION_TOL:
        raise NotNormalized(f"entries outside [0, 1]: min {p.min():.3g}, max {p.max():.3g}")
    total = float(p.sum())
    if abs(total - 1.0) > VALIDATION_TOL:
        raise NotNormalized(f"sum {total:.10g} differs from 1 by more than {VALIDATION_TOL}")
    p = np.clip(p, 0.0, 1.0)
    return ProbDist(_frozen(p / p.sum()))


def make_overlap(entries) -> OverlapMatrix:
    """Validate a doubly stochastic overlap matrix (sums within 1e-8 of 1)."""
    c = np.asarray(entries, dtype=np.float64)
    _check_square(c, "an overlap matrix")
    if float(c.min()) < -VALIDATION_TOL:
        raise NotDoublyStochastic(f"negative entry {c.min():.3g}")
    rows = np.abs(c.sum(axis=1) - 1.0).max()
    cols = np.abs(c.sum(axis=0) - 1.0).max()
    if max(float(rows), float(cols)) > VALIDATION_TOL:
        raise NotDoublyStochastic(
            f"row/column sums off 1 by {float(rows):.3g}/{float(cols):.3g}"
        )
    c = np.clip(c, 0.0, None)
    return OverlapMatrix(_frozen(c), float(c.max()))


def standard_basis(dim: int) -> OrthonormalBasis:
    if dim < 2:
        raise DimensionTooSmall(f"need dimension >= 2, got {dim}")
    return OrthonormalBasis(_frozen(np.eye(dim, dtype=np.complex128)))


def fourier_basis(dim: int) -> OrthonormalBasis:
    """Discrete-Fourier basis, mutually unbiased with the standard one."""
    if dim < 2:
        raise DimensionTooSmall(f"need dimension >= 2, got {dim}")
    j, k = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    u = np.exp(2j * np.pi * j * k / dim) / np.sqrt(dim)
    return OrthonormalBasis(_frozen(u))


def outcome_dist(rho: DensityMatrix, basis: OrthonormalBasis) -> ProbDist:
    """Born probabilities p_k = <a_k| rho |a_k>."""
    _check_same_dim(rho, basis)
    u = basis.kets
    raw = np.real(np.einsum("ik,ij,jk->k", u.conj(), rho.matrix, u))
    raw = np.clip(raw, 0.0, 1.0)
    return ProbDist(_frozen(raw / raw.sum()))


def dephase(rho: DensityMatrix, basis: OrthonormalBasis) -> DensityMatrix:
    """Project onto the basis diagonal: sum_k p_k |a_k><a_k|."""
    _check_same_dim(rho, basis)
    p = outcome_dist(rho, basis).probs
    u = basis.kets
    matrix = (u * p) @ u.conj().T
    matrix = (matrix + matrix.conj().T) / 2.0
    return DensityMatrix(_frozen(matrix), _frozen(p.copy()), _frozen(u.copy()))


def overlap_matrix(a: OrthonormalBasis, b: OrthonormalBasis) -> OverlapMatrix:
    """c_ij = |<a_i|b_j>|^2; unistochastic by construction."""
    _check_same_dim(a, b)
    c = np.abs(a.kets.conj().T @ b.kets) ** 2
    c = np.clip(c, 0.0, None)
    return OverlapMatrix(_frozen(c), float(c.max()))


def sequential_dist(p: ProbDist, c: OverlapMatrix, direction: str = "forward") -> ProbDist:
    """Statistics of the second measurement after dephasing by the first.

    forward: q'_j = sum_i p_i c_ij. dual: p'_i = sum_j c_ij q_j, the same map
    with the roles of the two bases exchanged.
    """
    _check_same_dim(p, c)
    if direction == "forward":
        out = p.probs @ c.entries
    elif direction == "dual":
        out = c.entries @ p.probs
    else:
        raise ValueError(f"unknown direction {direction!r}")
    out = np.clip(out, 0.0, 1.0)
    return ProbDist(_frozen(out / out.sum()))


def fidelity(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """Uhlmann fidelity tr sqrt(sqrt(rho2) rho1 sqrt(rho2)), clipped to [0, 1]."""
    _check_same_dim(rho1, rho2)
    cross = rho1.power(0.5) @ rho2.power(0.5)
    sv = np.linalg.svd(cross, compute_uv=False)
    return float(np.clip(sv.sum(), 0.0, 1.0))


def von_neumann_entropy(rho: DensityMatrix, base: float = 2.0) -> float:
    lam = rho.eigenvalues
    lam = lam[lam > 1e-15]
    return float(-(lam * np.log(lam)).sum() / np.log(base))


def _haar_kets(rng, count: int, dim: int):
    z = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def _haar_unitaries(rng, count: int, dim: int):
    """QR of complex Ginibre with the phase convention fixing Haar measure."""
    z = rng.standard_normal((count, dim, dim)) + 1j * rng.standard_normal((count, dim, dim))
    q, r = np.linalg.qr(z)
    d = np.einsum("nii->ni", r)
    q = q * (d / np.abs(d))[:, None, :]
    return q


def _ginibre_states(rng, count: int, dim: int):
    """Hilbert-Schmidt-distributed mixed states G G^dag / tr."""
    g = rng.standard_normal((count, dim, dim)) + 1j * rng.standard_normal((count, dim, dim))
    m = g @ g.conj().transpose(0, 2, 1)
    tr = np.real(np.einsum("nii->n", m))
    return m / tr[:, None, None]


def sample(kind: str, dim: int, seed: int):
    """Draw one object of the given kind; bit-reproducible in (kind, dim, seed)."""
    if dim < 2:
        raise DimensionTooSmall(f"need dimension >= 2, got {dim}")
    rng = stream(seed)
    if kind == "haar_state_pure":
        ket = _haar_kets(rng, 1, dim)[0]
        return make_density(np.outer(ket, ket.conj()))
    if kind == "haar_state_mixed":
        return make_density(_ginibre_states(rng, 1, dim)[0])
    if kind == "haar_unitary_basis":
        return make_basis(_haar_unitaries(rng, 1, dim)[0])
    if kind == "simplex":
        return ProbDist(_frozen(rng.dirichlet(np.ones(dim))))
    raise ValueError(f"unknown sample kind {kind!r}; expected one of {SAMPLE_KINDS}")
