"""Batched Haar ensembles and vectorized margins for large property sweeps.

These kernels reproduce the scalar qdiv/cdiv/relation results on whole
ensembles at once (states are rotated into the eigenframe of the first
basis, where the dephased state is diagonal), which is what makes the
10^5-sample soundness sweeps affordable. A cross-check test pins the batch
paths to the scalar implementations.
"""

from dataclasses import dataclass

import numpy as np

from .divergence import (
    classical_infidelity,
    euclidean_distance,
    kl_divergence,
    l1_distance,
    renyi_divergence,
    tsallis_divergence,
)
from .errors import AlphaOutOfRange
from .qstate import RANK_TOL, _ginibre_states, _haar_kets, _haar_unitaries
from .relations import _universal_bound_array, relation_sides
from .rng import stream
from .uncertainty import ZERO_CUTOFF, delta_measure, shannon_entropy

DPI_KINDS = (
    "trace",
    "infidelity",
    "renyi_sandwiched",
    "tsallis",
    "relative_entropy",
    "hilbert_schmidt",
)


@dataclass(frozen=True, eq=False)
class TripleBatch:
    """Haar-random (state, basis A, basis B) ensemble, reduced to A-frame data.

    rho holds the states rotated into basis A (so the dephased state is
    diag(p)); spectrum holds each state's eigenvalues.
    """

    rho: np.ndarray
    p: np.ndarray
    q: np.ndarray
    qp: np.ndarray
    overlap: np.ndarray
    spectrum: np.ndarray

    @property
    def count(self) -> int:
        return self.rho.shape[0]

    @property
    def dim(self) -> int:
        return self.rho.shape[1]

    @property
    def cmax(self):
        return self.overlap.max(axis=(1, 2))


def haar_triples(dim: int, count: int, seed: int, pure: bool = False,
                 chunk: int | None = None) -> TripleBatch:
    """Draw an ensemble of states and basis pairs; deterministic in inputs."""
    rng = stream(seed, chunk)
    if pure:
        kets = _haar_kets(rng, count, dim)
        rho = kets[:, :, None] * kets[:, None, :].conj()
    else:
        rho = _ginibre_states(rng, count, dim)
    ua = _haar_unitaries(rng, count, dim)
    ub = _haar_unitaries(rng, count, dim)
    ua_h = ua.conj().transpose(0, 2, 1)
    rho_a = ua_h @ rho @ ua
    rho_a = (rho_a + rho_a.conj().transpose(0, 2, 1)) / 2.0
    m = ua_h @ ub
    overlap = np.abs(m) ** 2
    p = np.clip(np.real(np.einsum("nii->ni", rho_a)), 0.0, 1.0)
    p = p / p.sum(axis=1, keepdims=True)
    q = np.real(np.einsum("nik,nij,njk->nk", ub.conj(), rho, ub))
    q = np.clip(q, 0.0, 1.0)
    q = q / q.sum(axis=1, keepdims=True)
    qp = np.einsum("ni,nij->nj", p, overlap)
    spectrum = np.clip(np.linalg.eigvalsh(rho_a), 0.0, 1.0)
    return TripleBatch(rho_a, p, q, qp, overlap, spectrum)


def relation_margins(rel, batch: TripleBatch, base: float = 2.0):
    """lhs - rhs over the batch (inf-aware subtraction)."""
    lhs, rhs = relation_sides(rel, batch.p, batch.q, batch.qp, batch.cmax, base)
    with np.errstate(invalid="ignore"):
        return lhs - rhs


def _pseudo_power(values, exponent: float):
    on = values > values.max(axis=-1, keepdims=True) * RANK_TOL
    return np.where(on, values, 1.0) ** exponent * on


def _entropy_of(spectrum, base: float):
    return shannon_entropy(spectrum, base=base)


def _infidelity_to_dephased(batch: TripleBatch):
    """sqrt(1 - F^2) between each state and its A-dephased version.

    In the A frame the dephased state is diag(p), so
    F = tr sqrt(sqrt(diag p) rho sqrt(diag p)) comes from one batched eigh.
    """
    root = np.sqrt(batch.p)
    core = batch.rho * root[:, :, None] * root[:, None, :]
    lam = np.clip(np.linalg.eigvalsh(core), 0.0, None)
    lam = lam * (lam > lam.max(axis=1, keepdims=True) * RANK_TOL)
    f = np.clip(np.sqrt(lam).sum(axis=1), 0.0, 1.0)
    return np.sqrt(np.clip(1.0 - f**2, 0.0, None))


def dpi_margins(kind: str, alpha: float | None, batch: TripleBatch,
                base: float = 2.0):
    """Quantum-minus-classical divergence margins across the batch.

    The quantum divergence is taken between each state and its A-dephased
    version; the classical one between the B statistics before and after
    dephasing. Data processing keeps every margin >= -1e-8.
    """
    if kind not in DPI_KINDS:
        raise ValueError(f"unknown divergence kind {kind!r}")
    p, q, qp = batch.p, batch.q, batch.qp
    if kind == "trace":
        diff = batch.rho.copy()
        idx = np.arange(batch.dim)
        diff[:, idx, idx] -= p
        quantum = 0.5 * np.abs(np.linalg.eigvalsh(diff)).sum(axis=1)
        return quantum - l1_distance(q, qp)
    if kind == "hilbert_schmidt":
        fro2 = np.real(np.abs(batch.rho) ** 2).sum(axis=(1, 2))
        quantum = np.sqrt(np.clip(fro2 - (p**2).sum(axis=1), 0.0, None))
        return quantum - euclidean_distance(q, qp)
    if kind == "infidelity":
        return _infidelity_to_dephased(batch) - classical_infidelity(q, qp)
    if kind == "relative_entropy":
        quantum = shannon_entropy(p, base=base) - _entropy_of(batch.spectrum, base)
        return quantum - kl_divergence(q, qp, base=base)
    if kind == "renyi_sandwiched":
        if alpha is None or not 0.5 <= alpha < 1.0:
            raise AlphaOutOfRange("renyi_sandwiched needs 0.5 <= alpha < 1")
        scale = _pseudo_power(p, (1.0 - alpha) / (2.0 * alpha))
        core = batch.rho * scale[:, :, None] * scale[:, None, :]
        lam = np.clip(np.linalg.eigvalsh(core), 0.0, None)
        lam = lam * (lam > lam.max(axis=1, keepdims=True) * RANK_TOL)
        total = (lam**alpha).sum(axis=1)
        with np.errstate(divide="ignore"):
            quantum = np.log(total) / (np.log(base) * (alpha - 1.0))
        return quantum - renyi_divergence(q, qp, alpha, base=base)
    if alpha is None or not 0.0 <= alpha < 1.0:
        raise AlphaOutOfRange("tsallis needs 0 <= alpha < 1")
    lam, vec = np.linalg.eigh(batch.rho)
    lam_a = _pseudo_power(np.clip(lam, 0.0, None), alpha)
    diag_pow = np.einsum("nik,nk->ni", np.abs(vec) ** 2, lam_a)
    cross = (diag_pow * _pseudo_power(p, 1.0 - alpha)).sum(axis=1)
    quantum = (1.0 - cross) / (1.0 - alpha)
    return quantum - tsallis_divergence(q, qp, alpha)


def chain_margins(batch: TripleBatch):
    """The two links of the universal chain on each sample:

    delta(p) - IF(rho, rho_A)  and  IF(rho, rho_A) - universal_bound(q, q').
    """
    infid = _infidelity_to_dephased(batch)
    first = delta_measure(batch.p) - infid
    second = infid - _universal_bound_array(batch.q, batch.qp)
    return first, second
