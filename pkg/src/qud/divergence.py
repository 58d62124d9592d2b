"""Distinguishability measures, quantum and classical, plus their gauges.

Six kinds are supported: trace, infidelity, renyi_sandwiched, tsallis,
relative_entropy, hilbert_schmidt. The first four admit a gauge G putting
them on the common [0, 1] distance scale used by the trade-off relations;
`gauge_inverse` maps a divergence value back through G^{-1}. Divergences
that can diverge return math.inf, and every consumer of these values
(gauges, verdicts) handles inf.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import AlphaOutOfRange, DimensionMismatch, NotGaugeable
from .qstate import RANK_TOL, DensityMatrix, ProbDist, fidelity

DIVERGENCE_KINDS = (
    "trace",
    "infidelity",
    "renyi_sandwiched",
    "tsallis",
    "relative_entropy",
    "hilbert_schmidt",
)

GAUGEABLE_KINDS = ("trace", "infidelity", "renyi_sandwiched", "tsallis")

# Orders used when taking suprema over a family of relations.
DEFAULT_ALPHA_GRID = (0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95, 0.99)

ZERO_CUTOFF = 1e-15

# Mass of rho1 allowed outside the support of rho2 before declaring +inf.
SUPPORT_LEAK_TOL = 1e-9


@dataclass(frozen=True)
class DivergenceSpec:
    """Choice of divergence; alpha is legal only where the kind uses it."""

    kind: str
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in DIVERGENCE_KINDS:
            raise ValueError(f"unknown divergence kind {self.kind!r}")
        if self.kind == "renyi_sandwiched":
            if self.alpha is None or not 0.5 <= self.alpha < 1.0:
                raise AlphaOutOfRange("renyi_sandwiched needs 0.5 <= alpha < 1")
        elif self.kind == "tsallis":
            if self.alpha is None or not 0.0 <= self.alpha < 1.0:
                raise AlphaOutOfRange("tsallis needs 0 <= alpha < 1")
        elif self.alpha is not None:
            raise AlphaOutOfRange(f"{self.kind} takes no alpha")


def _check_dims(x, y):
    if x.dim != y.dim:
        raise DimensionMismatch(f"dimensions differ: {x.dim} vs {y.dim}")


# ---------------------------------------------------------------------------
# classical kernels (reduce over the last axis, accept any batch shape)


def l1_distance(q, qp, axis: int = -1):
    q = np.asarray(q, dtype=np.float64)
    qp = np.asarray(qp, dtype=np.float64)
    return 0.5 * np.abs(q - qp).sum(axis=axis)


def euclidean_distance(q, qp, axis: int = -1):
    q = np.asarray(q, dtype=np.float64)
    qp = np.asarray(qp, dtype=np.float64)
    return np.sqrt(((q - qp) ** 2).sum(axis=axis))


def bhattacharyya(q, qp, axis: int = -1):
    """Classical fidelity sum sqrt(q q')."""
    q = np.asarray(q, dtype=np.float64)
    qp = np.asarray(qp, dtype=np.float64)
    return np.sqrt(np.clip(q * qp, 0.0, None)).sum(axis=axis)


def classical_infidelity(q, qp, axis: int = -1):
    f = bhattacharyya(q, qp, axis=axis)
    return np.sqrt(np.clip(1.0 - f**2, 0.0, None))


def power_overlap(q, qp, alpha: float, axis: int = -1):
    """sum over {q_i > 0} of q^alpha q'^(1-alpha).

    For alpha < 1 a vanishing q' makes the term 0; for alpha > 1 it makes
    the sum +inf, matching the divergence conventions.
    """
    q = np.asarray(q, dtype=np.float64)
    qp = np.asarray(qp, dtype=np.float64)
    on = q > ZERO_CUTOFF
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(on, q, 1.0) ** alpha * np.where(
            on | (qp > ZERO_CUTOFF), qp, 1.0
        ) ** (1.0 - alpha)
    return np.where(on, terms, 0.0).sum(axis=axis)


def renyi_divergence(q, qp, alpha: float, base: float = 2.0, axis: int = -1):
    """log(sum q^alpha q'^(1-alpha)) / (alpha - 1); +inf on support clash."""
    if alpha < 0 or alpha == 1.0:
        raise AlphaOutOfRange(f"need alpha >= 0, alpha != 1, got {alpha}")
    s = power_overlap(q, qp, alpha, axis=axis)
    with np.errstate(divide="ignore"):
        out = np.log(s) / (np.log(base) * (alpha - 1.0))
    return out


def tsallis_divergence(q, qp, alpha: float, axis: int = -1):
    """(1 - sum q^alpha q'^(1-alpha)) / (1 - alpha) for 0 <= alpha < 1."""
    if not 0.0 <= alpha < 1.0:
        raise AlphaOutOfRange(f"need 0 <= alpha < 1, got {alpha}")
    return (1.0 - power_overlap(q, qp, alpha, axis=axis)) / (1.0 - alpha)


def kl_divergence(q, qp, base: float = 2.0, axis: int = -1):
    """sum q log(q/q'); +inf when q puts mass where q' has none."""
    q = np.asarray(q, dtype=np.float64)
    qp = np.asarray(qp, dtype=np.float64)
    on = q > ZERO_CUTOFF
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.log(np.where(on, q, 1.0)) - np.log(np.where(qp > 0, qp, 0.0))
        terms = np.where(on, q * logs, 0.0)
    return terms.sum(axis=axis) / np.log(base)


# ---------------------------------------------------------------------------
# quantum divergences


def _trace_distance(rho1, rho2):
    diff = rho1.matrix - rho2.matrix
    return 0.5 * float(np.abs(np.linalg.eigvalsh(diff)).sum())


def _sandwiched_renyi(rho1, rho2, alpha, base):
    c = (1.0 - alpha) / (2.0 * alpha)
    half = rho2.power(c)
    core = half @ rho1.matrix @ half
    lam = np.clip(np.linalg.eigvalsh((core + core.conj().T) / 2.0), 0.0, None)
    lam = lam * (lam > lam.max() * RANK_TOL)
    total = float((lam**alpha).sum())
    if total <= ZERO_CUTOFF:
        return math.inf
    return math.log(total) / (math.log(base) * (alpha - 1.0))


def _tsallis_quantum(rho1, rho2, alpha):
    cross = float(np.real(np.trace(rho1.power(alpha) @ rho2.power(1.0 - alpha))))
    return (1.0 - cross) / (1.0 - alpha)


def _relative_entropy(rho1, rho2, base):
    lam1 = rho1.eigenvalues
    lam2 = rho2.eigenvalues
    # mass of rho1 on the kernel of rho2
    weights = np.real(
        np.einsum("ij,ik,jk->k", rho1.matrix, rho2.eigenvectors.conj(), rho2.eigenvectors)
    )
    weights = np.clip(weights, 0.0, None)
    kernel = lam2 <= ZERO_CUTOFF
    if float(weights[kernel].sum()) > SUPPORT_LEAK_TOL:
        return math.inf
    on1 = lam1 > ZERO_CUTOFF
    term1 = float((lam1[on1] * np.log(lam1[on1])).sum())
    on2 = ~kernel
    term2 = float((weights[on2] * np.log(lam2[on2])).sum())
    return (term1 - term2) / math.log(base)


def qdiv(spec: DivergenceSpec, rho1: DensityMatrix, rho2: DensityMatrix,
         base: float = 2.0) -> float:
    """Divergence between two states; entropic kinds use the given log base."""
    _check_dims(rho1, rho2)
    if spec.kind == "trace":
        return _trace_distance(rho1, rho2)
    if spec.kind == "infidelity":
        f = fidelity(rho1, rho2)
        return float(np.sqrt(max(1.0 - f * f, 0.0)))
    if spec.kind == "renyi_sandwiched":
        return _sandwiched_renyi(rho1, rho2, spec.alpha, base)
    if spec.kind == "tsallis":
        return _tsallis_quantum(rho1, rho2, spec.alpha)
    if spec.kind == "relative_entropy":
        return _relative_entropy(rho1, rho2, base)
    return float(np.linalg.norm(rho1.matrix - rho2.matrix))


def cdiv(spec: DivergenceSpec, q: ProbDist, qp: ProbDist, base: float = 2.0) -> float:
    """Classical counterpart of `qdiv` on outcome distributions."""
    _check_dims(q, qp)
    a, b = q.probs, qp.probs
    if spec.kind == "trace":
        return float(l1_distance(a, b))
    if spec.kind == "infidelity":
        return float(classical_infidelity(a, b))
    if spec.kind == "renyi_sandwiched":
        return float(renyi_divergence(a, b, spec.alpha, base=base))
    if spec.kind == "tsallis":
        return float(tsallis_divergence(a, b, spec.alpha))
    if spec.kind == "relative_entropy":
        return float(kl_divergence(a, b, base=base))
    return float(euclidean_distance(a, b))


def gauge_inverse(spec: DivergenceSpec, value: float, base: float = 2.0) -> float:
    """Map a divergence value back to the common [0, 1] distance scale.

    trace and infidelity are already on that scale (identity gauge). For
    renyi_sandwiched the gauge is G(x) = (alpha/(alpha-1)) log(1 - x^2), so
    G^{-1}(y) = sqrt(1 - base^((alpha-1) y / alpha)); for tsallis
    G(x) = x^2 / (1 - alpha), so G^{-1}(y) = sqrt((1 - alpha) y). Infinite
    input maps to 1.
    """
    if spec.kind not in GAUGEABLE_KINDS:
        raise NotGaugeable(f"{spec.kind} has no distance gauge")
    if value < 0:
        raise ValueError(f"gauge input must be >= 0, got {value}")
    if spec.kind in ("trace", "infidelity"):
        return float(min(value, 1.0))
    if spec.kind == "renyi_sandwiched":
        if math.isinf(value):
            return 1.0
        inner = 1.0 - base ** ((spec.alpha - 1.0) * value / spec.alpha)
        return float(np.sqrt(min(max(inner, 0.0), 1.0)))
    if math.isinf(value):
        return 1.0
    return float(np.sqrt(min((1.0 - spec.alpha) * value, 1.0)))
