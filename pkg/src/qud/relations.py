"""The trade-off catalog: relations, duals, the universal bound, DPI margins,
and counterexample search.

Each relation compares an uncertainty functional of the first measurement's
statistics p against a disturbance functional of (q, q'), where q is the
second observable's intrinsic distribution and q' its post-measurement one.
Entropic relations additionally come in a `printed` variant reproducing
forms that carry a known prefactor/orientation defect; `canonical` is the
derivation-consistent default.
"""

import math
from dataclasses import dataclass

import numpy as np

from .divergence import (
    DEFAULT_ALPHA_GRID,
    classical_infidelity,
    l1_distance,
    euclidean_distance,
    power_overlap,
    renyi_divergence,
    kl_divergence,
    cdiv,
    qdiv,
    DivergenceSpec,
)
from .errors import (
    AlphaOutOfRange,
    DimensionMismatch,
    InconsistentTriple,
    MissingOverlap,
    ValidationError,
)
from .qstate import (
    DensityMatrix,
    OrthonormalBasis,
    OverlapMatrix,
    ProbDist,
    _haar_kets,
    _haar_unitaries,
    dephase,
    make_basis,
    make_density,
    outcome_dist,
    overlap_matrix,
    sequential_dist,
)
from .rng import stream
from .uncertainty import (
    delta_measure,
    half_norm_measure,
    renyi_entropy,
    shannon_entropy,
)

RELATION_IDS = (
    "U_tr",
    "U_tr_prime",
    "U_rd",
    "U_if",
    "U_ts",
    "U_re",
    "U_hs",
    "THM1_UNIVERSAL",
    "EUR_TS",
    "EUR_MU",
)

# ids whose printed form differs from the canonical one
PRINTED_DIFFERS = frozenset({"U_if", "U_ts", "EUR_TS"})

VERDICT_RTOL = 1e-9
SEARCH_MARGIN = -1e-6
SEARCH_CHUNK = 4096
TRIPLE_TOL = 1e-9


@dataclass(frozen=True)
class RelationId:
    """A relation from the catalog plus its variant and order parameters."""

    id: str
    variant: str = "canonical"
    alpha: float | None = None
    beta: float | None = None

    def __post_init__(self):
        if self.id not in RELATION_IDS:
            raise ValidationError(f"unknown relation id {self.id!r}")
        if self.variant not in ("canonical", "printed"):
            raise ValidationError(f"unknown variant {self.variant!r}")
        if self.variant == "printed" and self.id not in PRINTED_DIFFERS:
            raise ValidationError(f"{self.id} has no distinct printed form")
        a, b = self.alpha, self.beta
        if self.id == "U_rd":
            if a is None or not 0.5 <= a < 1.0:
                raise AlphaOutOfRange("U_rd needs 0.5 <= alpha < 1")
        elif self.id in ("U_ts", "EUR_TS"):
            if a is None or not 0.0 <= a < 1.0:
                raise AlphaOutOfRange(f"{self.id} needs 0 <= alpha < 1")
        elif self.id == "EUR_MU":
            if a is None or b is None or a < 0.5 or b < 0.5:
                raise AlphaOutOfRange("EUR_MU needs alpha, beta >= 1/2")
            if abs(1.0 / a + 1.0 / b - 2.0) > 1e-9:
                raise AlphaOutOfRange("EUR_MU needs conjugate orders 1/alpha + 1/beta = 2")
        elif a is not None:
            raise AlphaOutOfRange(f"{self.id} takes no alpha")
        if self.id != "EUR_MU" and b is not None:
            raise AlphaOutOfRange(f"{self.id} takes no beta")

    def label(self) -> str:
        """Compact single-cell form used in CSV report columns."""
        parts = []
        if self.alpha is not None:
            parts.append(f"alpha={self.alpha:g}")
        if self.beta is not None:
            parts.append(f"beta={self.beta:g}")
        if self.variant != "canonical":
            parts.append(self.variant)
        return self.id if not parts else f"{self.id}[{','.join(parts)}]"

    def to_dict(self) -> dict:
        out = {"id": self.id, "variant": self.variant}
        if self.alpha is not None:
            out["alpha"] = self.alpha
        if self.beta is not None:
            out["beta"] = self.beta
        return out


@dataclass(frozen=True)
class RelationVerdict:
    lhs: float
    rhs: float
    margin: float
    satisfied: bool


@dataclass(frozen=True)
class Counterexample:
    state: DensityMatrix
    basis_a: OrthonormalBasis
    basis_b: OrthonormalBasis
    verdict: RelationVerdict
    sample_index: int


def table2_relations() -> tuple[RelationId, ...]:
    """The seven relations whose feasible-region volumes are tabulated."""
    return (
        RelationId("U_tr"),
        RelationId("U_tr_prime"),
        RelationId("U_rd", alpha=0.5),
        RelationId("U_re"),
        RelationId("U_ts", alpha=0.5),
        RelationId("U_hs"),
        RelationId("EUR_MU", alpha=1.0, beta=1.0),
    )


def relation_sides(rel: RelationId, p, q, qp, cmax=None, base: float = 2.0,
                   alpha_grid=DEFAULT_ALPHA_GRID):
    """Vectorized (lhs, rhs) arrays for batches of distributions.

    p, q, qp reduce over the last axis; cmax (same leading shape) is needed
    only by the EUR_* relations.
    """
    rid, var, a = rel.id, rel.variant, rel.alpha
    if rid == "U_tr":
        return delta_measure(p), l1_distance(q, qp)
    if rid == "U_tr_prime":
        return half_norm_measure(p), l1_distance(q, qp)
    if rid == "U_rd":
        return renyi_entropy(p, 1.0 / a, base=base), renyi_divergence(q, qp, a, base=base)
    if rid == "U_if":
        if var == "printed":
            return renyi_entropy(p, 0.5, base=base), renyi_divergence(q, qp, 2.0, base=base)
        return renyi_entropy(p, 2.0, base=base), renyi_divergence(q, qp, 0.5, base=base)
    if rid == "U_ts":
        lhs = renyi_entropy(p, 2.0 - a, base=base)
        if var == "printed":
            lhs = lhs / (2.0 - a)
        return lhs, renyi_divergence(q, qp, a, base=base)
    if rid == "U_re":
        return shannon_entropy(p, base=base), kl_divergence(q, qp, base=base)
    if rid == "U_hs":
        return delta_measure(p), euclidean_distance(q, qp)
    if rid == "THM1_UNIVERSAL":
        return delta_measure(p), _universal_bound_array(q, qp, alpha_grid)
    if cmax is None:
        raise MissingOverlap(f"{rid} needs the overlap matrix (cmax)")
    rhs = -np.log(np.asarray(cmax, dtype=np.float64)) / np.log(base)
    if rid == "EUR_TS":
        if var == "printed":
            lhs = renyi_entropy(q, 2.0 - a, base=base) / (2.0 - a) + renyi_entropy(
                p, a, base=base
            )
        else:
            lhs = renyi_entropy(p, 2.0 - a, base=base) + renyi_entropy(q, a, base=base)
        return lhs, rhs
    lhs = renyi_entropy(p, a, base=base) + renyi_entropy(q, rel.beta, base=base)
    return lhs, rhs


def satisfied_mask(lhs, rhs):
    """Vectorized verdicts: margin >= -1e-9 * max(1, |lhs|, |rhs|), inf-aware."""
    lhs = np.asarray(lhs, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    lf = np.where(np.isfinite(lhs), lhs, 0.0)
    rf = np.where(np.isfinite(rhs), rhs, 0.0)
    scale = np.maximum(1.0, np.maximum(np.abs(lf), np.abs(rf)))
    with np.errstate(invalid="ignore"):
        ok = (lhs - rhs) >= -VERDICT_RTOL * scale
    ok = np.where(np.isposinf(rhs), np.isposinf(lhs), ok)
    ok = np.where(np.isposinf(lhs), True, ok)
    return ok


def _verdict(lhs: float, rhs: float) -> RelationVerdict:
    lhs, rhs = float(lhs), float(rhs)
    if math.isinf(lhs) and lhs > 0:
        return RelationVerdict(lhs, rhs, math.inf, True)
    if math.isinf(rhs) and rhs > 0:
        return RelationVerdict(lhs, rhs, -math.inf, False)
    margin = lhs - rhs
    scale = max(1.0, abs(lhs), abs(rhs))
    return RelationVerdict(lhs, rhs, margin, margin >= -VERDICT_RTOL * scale)


def eval_relation(rel: RelationId, p: ProbDist, q: ProbDist, qp: ProbDist,
                  c: OverlapMatrix | None = None, base: float = 2.0) -> RelationVerdict:
    """Evaluate one relation on the statistics triple (p, q, q').

    When the overlap matrix is supplied, q' is checked against the
    sequential map C^T p to 1e-9; EUR_* relations require it for cmax.
    """
    if not p.dim == q.dim == qp.dim:
        raise DimensionMismatch(
            f"dimensions differ: p {p.dim}, q {q.dim}, qp {qp.dim}"
        )
    if c is not None:
        if c.dim != p.dim:
            raise DimensionMismatch(f"overlap dim {c.dim} != {p.dim}")
        expected = sequential_dist(p, c, "forward")
        drift = float(np.max(np.abs(expected.probs - qp.probs)))
        if drift > TRIPLE_TOL:
            raise InconsistentTriple(f"qp deviates from C^T p by {drift:.3g}")
    cmax = None
    if rel.id in ("EUR_TS", "EUR_MU"):
        if c is None:
            raise MissingOverlap(f"{rel.id} needs the overlap matrix")
        cmax = np.array([c.cmax])
    lhs, rhs = relation_sides(
        rel, p.probs[None, :], q.probs[None, :], qp.probs[None, :], cmax, base
    )
    return _verdict(float(np.asarray(lhs).ravel()[0]), float(np.asarray(rhs).ravel()[0]))


def eval_with_dual(rel: RelationId, p: ProbDist, q: ProbDist, c: OverlapMatrix,
                   base: float = 2.0) -> tuple[RelationVerdict, RelationVerdict]:
    """Forward verdict on (p, q, C^T p) and dual on (q, p, C q).

    EUR_MU is self-dual under the order swap, so the same verdict is
    returned twice.
    """
    qp = sequential_dist(p, c, "forward")
    forward = eval_relation(rel, p, q, qp, c, base=base)
    if rel.id == "EUR_MU":
        return forward, forward
    pp = sequential_dist(q, c, "dual")
    dual = eval_relation(rel, q, p, pp, c.transpose(), base=base)
    return forward, dual


def _universal_bound_array(q, qp, alpha_grid=DEFAULT_ALPHA_GRID):
    best = np.maximum(l1_distance(q, qp), classical_infidelity(q, qp))
    for a in alpha_grid:
        s = np.clip(power_overlap(q, qp, a), 0.0, 1.0)
        best = np.maximum(best, np.sqrt(np.clip(1.0 - s ** (1.0 / a), 0.0, None)))
        best = np.maximum(best, np.sqrt(1.0 - s))
    return np.clip(best, 0.0, 1.0)


def universal_bound(q: ProbDist, qp: ProbDist, alpha_grid=DEFAULT_ALPHA_GRID) -> float:
    """Largest gauged disturbance over trace, infidelity, and the alpha grids.

    Maximum of 1/2 sum|q-q'|, sqrt(1-(sum sqrt(qq'))^2), and for each grid
    alpha both sqrt(1 - S^(1/alpha)) and sqrt(1 - S) with
    S = sum q^alpha q'^(1-alpha).
    """
    if q.dim != qp.dim:
        raise DimensionMismatch(f"dimensions differ: {q.dim} vs {qp.dim}")
    return float(_universal_bound_array(q.probs, qp.probs, alpha_grid))


def dpi_margin(spec: DivergenceSpec, rho: DensityMatrix, a: OrthonormalBasis,
               b: OrthonormalBasis, base: float = 2.0) -> float:
    """qdiv(rho, dephased rho) minus its classical counterpart after B.

    Data processing makes this nonnegative (to 1e-8) for every supported
    divergence; Hilbert-Schmidt is only monotone under the dephasing step
    checked here, not under general channels.
    """
    rho_a = dephase(rho, a)
    quantum = qdiv(spec, rho, rho_a, base=base)
    classical = cdiv(spec, outcome_dist(rho, b), outcome_dist(rho_a, b), base=base)
    if math.isinf(quantum):
        return math.inf if not math.isinf(classical) else 0.0
    return quantum - classical


def search_counterexample(rel: RelationId, dim: int, budget: int, seed: int,
                          base: float = 2.0) -> Counterexample | None:
    """Scan Haar-random pure states and basis pairs for a violation.

    Returns the first instance with margin < -1e-6 (absolute), scanning
    fixed-size chunks with per-chunk derived streams; deterministic in seed
    and independent of chunk scheduling.
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    remaining = budget
    chunk_index = 0
    offset = 0
    while remaining > 0:
        count = min(SEARCH_CHUNK, remaining)
        rng = stream(seed, chunk_index)
        kets = _haar_kets(rng, count, dim)
        ua = _haar_unitaries(rng, count, dim)
        ub = _haar_unitaries(rng, count, dim)
        amp_a = np.einsum("nik,ni->nk", ua.conj(), kets)
        amp_b = np.einsum("nik,ni->nk", ub.conj(), kets)
        p = np.abs(amp_a) ** 2
        q = np.abs(amp_b) ** 2
        c = np.abs(np.einsum("nki,nkj->nij", ua.conj(), ub)) ** 2
        qp = np.einsum("ni,nij->nj", p, c)
        cmax = c.max(axis=(1, 2))
        lhs, rhs = relation_sides(rel, p, q, qp, cmax, base)
        with np.errstate(invalid="ignore"):
            bad = np.nonzero((lhs - rhs) < SEARCH_MARGIN)[0]
        if bad.size:
            i = int(bad[0])
            state = make_density(np.outer(kets[i], kets[i].conj()))
            basis_a = make_basis(ua[i])
            basis_b = make_basis(ub[i])
            overlap = overlap_matrix(basis_a, basis_b)
            pd = outcome_dist(state, basis_a)
            verdict = eval_relation(
                rel,
                pd,
                outcome_dist(state, basis_b),
                sequential_dist(pd, overlap, "forward"),
                overlap,
                base=base,
            )
            return Counterexample(state, basis_a, basis_b, verdict, offset + i)
        offset += count
        remaining -= count
        chunk_index += 1
    return None
