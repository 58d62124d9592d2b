"""Uncertainty measures over outcome distributions, plus majorization.

The array kernels accept any batch shape and reduce over the last axis;
`umeasure` is the scalar front end working on ProbDist values. Probabilities
below 1e-15 are treated as exact zeros before any log or power, so the
0 log 0 = 0 and 0^alpha = 0 conventions hold for every order.
"""

from dataclasses import dataclass

import numpy as np

from .errors import AlphaOutOfRange, DimensionMismatch
from .qstate import ProbDist

UMEASURE_KINDS = ("delta", "renyi", "shannon", "half_norm")

ZERO_CUTOFF = 1e-15


@dataclass(frozen=True)
class UncertaintySpec:
    """Choice of uncertainty measure; `alpha` only applies to `renyi`."""

    kind: str
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in UMEASURE_KINDS:
            raise ValueError(f"unknown uncertainty kind {self.kind!r}")
        if self.kind == "renyi":
            if self.alpha is None or self.alpha <= 0 or self.alpha == 1.0:
                raise AlphaOutOfRange("renyi needs alpha > 0, alpha != 1")
        elif self.alpha is not None:
            raise AlphaOutOfRange(f"{self.kind} takes no alpha")


def delta_measure(p, axis: int = -1):
    """sqrt(1 - sum p^2): purity deficit of the dephased state."""
    p = np.asarray(p, dtype=np.float64)
    return np.sqrt(np.clip(1.0 - (p**2).sum(axis=axis), 0.0, None))


def shannon_entropy(p, base: float = 2.0, axis: int = -1):
    p = np.asarray(p, dtype=np.float64)
    safe = np.maximum(p, ZERO_CUTOFF)
    terms = np.where(p > ZERO_CUTOFF, p * np.log(safe), 0.0)
    return -terms.sum(axis=axis) / np.log(base)


def renyi_entropy(p, alpha: float, base: float = 2.0, axis: int = -1):
    """Order-alpha entropy log(sum p^alpha) / (1 - alpha); alpha=1 is Shannon.

    alpha=0 counts the support, per the zero-probability convention.
    """
    if alpha < 0:
        raise AlphaOutOfRange(f"alpha must be >= 0, got {alpha}")
    if alpha == 1.0:
        return shannon_entropy(p, base=base, axis=axis)
    p = np.asarray(p, dtype=np.float64)
    safe = np.maximum(p, ZERO_CUTOFF)
    powered = np.where(p > ZERO_CUTOFF, safe**alpha, 0.0)
    return np.log(powered.sum(axis=axis)) / (np.log(base) * (1.0 - alpha))


def half_norm_measure(p, axis: int = -1):
    """Half of ((sum sqrt(p))^2 - 1), the 1/2-quasinorm overshoot."""
    p = np.asarray(p, dtype=np.float64)
    root_sum = np.sqrt(np.clip(p, 0.0, None)).sum(axis=axis)
    return 0.5 * (root_sum**2 - 1.0)


def umeasure(spec: UncertaintySpec, p: ProbDist, base: float = 2.0) -> float:
    """Evaluate the chosen measure on one distribution.

    delta and half_norm are base-free; entropies are reported in the given
    log base (bits by default).
    """
    probs = p.probs
    if spec.kind == "delta":
        return float(delta_measure(probs))
    if spec.kind == "shannon":
        return float(shannon_entropy(probs, base=base))
    if spec.kind == "renyi":
        return float(renyi_entropy(probs, spec.alpha, base=base))
    return float(half_norm_measure(probs))


def majorizes(p1: ProbDist, p2: ProbDist) -> bool:
    """True when every partial sum of p1 (sorted down) weakly dominates p2's."""
    if p1.dim != p2.dim:
        raise DimensionMismatch(f"dimensions differ: {p1.dim} vs {p2.dim}")
    a = np.cumsum(np.sort(p1.probs)[::-1])
    b = np.cumsum(np.sort(p2.probs)[::-1])
    return bool(np.all(a - b >= -1e-10))
