"""Feasible-region volumes, region grids, coherence bounds, and shot protocols.

Monte-Carlo loops run over fixed-size chunks with per-chunk derived RNG
streams and integer-count accumulation, so a result depends only on
(relation, dim, samples, seed) — never on worker count or scheduling.
"""

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .divergence import kl_divergence
from .errors import DimensionMismatch, EmptyCounts, KindMismatch, UnsupportedDim
from .qstate import (
    DensityMatrix,
    OrthonormalBasis,
    _frozen,
    _haar_unitaries,
    outcome_dist,
    overlap_matrix,
    sequential_dist,
    von_neumann_entropy,
)
from .relations import RelationId, relation_sides, satisfied_mask, table2_relations
from .rng import stream
from .uncertainty import shannon_entropy

VOLUME_CHUNK = 1 << 16

SHOT_KINDS = ("direct_B", "sequential_AB")


@dataclass(frozen=True)
class VolumeEstimate:
    relation: RelationId
    dim: int
    samples: int
    accepted: int
    volume: float
    std_error: float
    seed: int


@dataclass(frozen=True)
class CoherenceBounds:
    upper: float
    exact: float
    lower: float
    base: float


@dataclass(frozen=True, eq=False)
class ShotCounts:
    kind: str
    dim: int
    counts: np.ndarray
    total: int
    seed: int


def _accept_mask(rel: RelationId, p, q, c):
    """Admissibility of batched (p, q, C): relation AND dual (EUR_MU once)."""
    qp = np.einsum("ni,nij->nj", p, c)
    cmax = c.max(axis=(1, 2))
    ok = satisfied_mask(*relation_sides(rel, p, q, qp, cmax))
    if rel.id != "EUR_MU":
        pp = np.einsum("nij,nj->ni", c, q)
        ok = ok & satisfied_mask(*relation_sides(rel, q, p, pp, cmax))
    return ok


def _draw_parameters(rng, dim: int, count: int):
    """One chunk of the data-parameter measure: (p, q, C) arrays."""
    if dim == 2:
        u = rng.random((count, 3))
        p = np.stack([u[:, 0], 1.0 - u[:, 0]], axis=1)
        q = np.stack([u[:, 1], 1.0 - u[:, 1]], axis=1)
        c00 = u[:, 2]
        c = np.empty((count, 2, 2))
        c[:, 0, 0] = c00
        c[:, 0, 1] = 1.0 - c00
        c[:, 1, 0] = 1.0 - c00
        c[:, 1, 1] = c00
        return p, q, c
    p = rng.dirichlet(np.ones(3), count)
    q = rng.dirichlet(np.ones(3), count)
    c = np.abs(_haar_unitaries(rng, count, 3)) ** 2
    return p, q, c


def _chunk_sizes(samples: int):
    full, rest = divmod(samples, VOLUME_CHUNK)
    sizes = [VOLUME_CHUNK] * full
    if rest:
        sizes.append(rest)
    return sizes


def _volume_from_mask(mask_fn, dim: int, samples: int, seed: int, workers: int = 1):
    """Shared Monte-Carlo driver; mask_fn(p, q, c) -> boolean accept array."""

    def one_chunk(item):
        index, count = item
        p, q, c = _draw_parameters(stream(seed, index), dim, count)
        return int(np.count_nonzero(mask_fn(p, q, c)))

    jobs = list(enumerate(_chunk_sizes(samples)))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            accepted = sum(pool.map(one_chunk, jobs))
    else:
        accepted = sum(map(one_chunk, jobs))
    return accepted


def estimate_volume(rel: RelationId, dim: int, samples: int, seed: int,
                    workers: int = 1) -> VolumeEstimate:
    """Fraction of the data-parameter space admitted by relation + dual.

    d=2 draws (p0, q0, c00) uniform on the cube; d=3 draws p, q from the
    flat simplex measure and C from a Haar-random unitary.
    """
    if dim not in (2, 3):
        raise UnsupportedDim(f"volume estimation supports dim 2 and 3, got {dim}")
    if samples < 1000:
        raise ValueError(f"samples must be >= 1000, got {samples}")
    accepted = _volume_from_mask(
        lambda p, q, c: _accept_mask(rel, p, q, c), dim, samples, seed, workers
    )
    volume = accepted / samples
    std_error = math.sqrt(volume * (1.0 - volume) / samples)
    return VolumeEstimate(rel, dim, samples, accepted, volume, std_error, seed)


def region_grid(rel: RelationId, c00: float, resolution: int):
    """Admissibility over the (p0, q0) square at fixed qubit overlap c00.

    Cell (i, j) covers p0 = i/(resolution-1), q0 = j/(resolution-1).
    """
    if not 0.0 <= c00 <= 1.0:
        raise ValueError(f"c00 must lie in [0, 1], got {c00}")
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    axis = np.linspace(0.0, 1.0, resolution)
    p0, q0 = np.meshgrid(axis, axis, indexing="ij")
    p = np.stack([p0.ravel(), 1.0 - p0.ravel()], axis=1)
    q = np.stack([q0.ravel(), 1.0 - q0.ravel()], axis=1)
    count = p.shape[0]
    c = np.empty((count, 2, 2))
    c[:, 0, 0] = c00
    c[:, 0, 1] = 1.0 - c00
    c[:, 1, 0] = 1.0 - c00
    c[:, 1, 1] = c00
    return _accept_mask(rel, p, q, c).reshape(resolution, resolution)


def coherence_bounds(rho: DensityMatrix, a: OrthonormalBasis, b: OrthonormalBasis,
                     base: float = 2.0) -> CoherenceBounds:
    """Operational sandwich around the relative entropy of coherence.

    upper = H(p), exact = H(p) - S(rho), lower = KL(q || q') with q' the
    post-dephasing statistics of the second basis.
    """
    p = outcome_dist(rho, a)
    q = outcome_dist(rho, b)
    qp = sequential_dist(p, overlap_matrix(a, b), "forward")
    upper = float(shannon_entropy(p.probs, base=base))
    exact = max(upper - von_neumann_entropy(rho, base=base), 0.0)
    lower = float(kl_divergence(q.probs, qp.probs, base=base))
    return CoherenceBounds(upper, exact, lower, base)


def simulate_shots(rho: DensityMatrix, a: OrthonormalBasis | None,
                   b: OrthonormalBasis, n: int, seed: int) -> ShotCounts:
    """Multinomial shot counts for measuring B directly (a=None) or A then B."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    rng = stream(seed)
    if a is None:
        q = outcome_dist(rho, b).probs
        counts = rng.multinomial(n, q / q.sum())
        return ShotCounts("direct_B", rho.dim, _frozen(counts), n, seed)
    p = outcome_dist(rho, a).probs
    c = overlap_matrix(a, b).entries
    joint = (p[:, None] * c).ravel()
    counts = rng.multinomial(n, joint / joint.sum()).reshape(rho.dim, rho.dim)
    return ShotCounts("sequential_AB", rho.dim, _frozen(counts), n, seed)


def estimate_coherence(direct: ShotCounts, sequential: ShotCounts,
                       smoothing: float = 0.5, base: float = 2.0):
    """Plug-in coherence bounds (lower, upper) from finite counts.

    Adds `smoothing` pseudo-counts per cell before normalizing; smoothing 0
    keeps the support-violation semantics (lower may be +inf).
    """
    if direct.kind != "direct_B":
        raise KindMismatch(f"first record must be direct_B, got {direct.kind}")
    if sequential.kind != "sequential_AB":
        raise KindMismatch(f"second record must be sequential_AB, got {sequential.kind}")
    if direct.dim != sequential.dim:
        raise DimensionMismatch(f"dimensions differ: {direct.dim} vs {sequential.dim}")
    if direct.total == 0 or sequential.total == 0:
        raise EmptyCounts("need at least one shot in each record")
    if smoothing < 0:
        raise ValueError(f"smoothing must be >= 0, got {smoothing}")
    d = direct.dim
    q_hat = (direct.counts + smoothing) / (direct.total + d * smoothing)
    p_hat = (sequential.counts.sum(axis=1) + smoothing) / (sequential.total + d * smoothing)
    qp_hat = (sequential.counts.sum(axis=0) + smoothing) / (sequential.total + d * smoothing)
    lower = float(kl_divergence(q_hat, qp_hat, base=base))
    upper = float(shannon_entropy(p_hat, base=base))
    return lower, upper


# ---------------------------------------------------------------------------
# CSV report writers (schemas shared with the CLI)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".12g")
    return str(value)


def write_volume_csv(fh, estimates) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(
        ["relation", "variant", "alpha", "dim", "samples", "seed", "volume", "std_error"]
    )
    for est in estimates:
        rel = est.relation
        writer.writerow(
            [
                rel.id,
                rel.variant,
                _cell(rel.alpha),
                est.dim,
                est.samples,
                est.seed,
                _cell(est.volume),
                _cell(est.std_error),
            ]
        )


def write_region_csv(fh, rel: RelationId, c00: float, grid) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["relation", "c00", "p0", "q0", "admissible"])
    resolution = grid.shape[0]
    axis = np.linspace(0.0, 1.0, resolution)
    label = rel.label()
    for i in range(resolution):
        for j in range(resolution):
            writer.writerow(
                [label, _cell(c00), _cell(float(axis[i])), _cell(float(axis[j])),
                 _cell(bool(grid[i, j]))]
            )


def write_coherence_csv(fh, bounds: CoherenceBounds) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["upper", "exact", "lower", "base"])
    writer.writerow(
        [_cell(bounds.upper), _cell(bounds.exact), _cell(bounds.lower), _cell(bounds.base)]
    )


# Reference feasible-region volumes used by the regression suite and the
# table2 --compare report.
TABLE2_REFERENCE = {
    2: {
        "U_tr": 0.930,
        "U_tr_prime": 0.705,
        "U_rd[alpha=0.5]": 0.787,
        "U_re": 0.770,
        "U_ts[alpha=0.5]": 0.814,
        "U_hs": 0.705,
        "EUR_MU[alpha=1,beta=1]": 0.974,
    },
    3: {
        "U_tr": 0.94675,
        "U_tr_prime": 0.94682,
        "U_rd[alpha=0.5]": 0.917,
        "U_re": 0.905,
        "U_ts[alpha=0.5]": 0.937,
        "U_hs": 0.887,
        "EUR_MU[alpha=1,beta=1]": 0.999,
    },
}
