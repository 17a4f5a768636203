"""Convergence/divergence classification for truncation sweeps.

One policy is shared by every sweep in the package (arg variation, Dini
integrals, principal values) so verdicts are consistent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CONVERGED = "CONVERGED"
BOUNDED = "BOUNDED"
DIVERGENT = "DIVERGENT"

__all__ = ["TrendPolicy", "TrendResult", "classify", "dyadic_schedule",
           "CONVERGED", "BOUNDED", "DIVERGENT", "DEFAULT_POLICY"]


@dataclass(frozen=True)
class TrendPolicy:
    """Thresholds for sweep classification.

    Attributes
    ----------
    atol, rtol : float
        An increment below ``atol + rtol * |value|`` counts as settled.
    tail : int
        Number of trailing increments inspected for divergence.
    max_decay : float
        Increments decaying no faster than ``m**-max_decay`` (``m`` the
        dyadic level ``log2(1/delta)``) are read as divergent growth.
    """

    atol: float = 1e-3
    rtol: float = 1e-4
    tail: int = 3
    max_decay: float = 1.5
    geometric_ratio: float = 0.75


DEFAULT_POLICY = TrendPolicy()


@dataclass
class TrendResult:
    status: str
    value: float
    deltas: np.ndarray
    values: np.ndarray
    increments: np.ndarray = field(default_factory=lambda: np.empty(0))
    decay_exponent: float = float("nan")

    @property
    def converged(self):
        return self.status == CONVERGED

    @property
    def divergent(self):
        return self.status == DIVERGENT

    @property
    def finite(self):
        return self.status != DIVERGENT

    def to_dict(self):
        return {"status": self.status, "value": float(self.value),
                "decay_exponent": float(self.decay_exponent),
                "trace": [[float(d), float(v)] for d, v in zip(self.deltas, self.values)]}


def _levels(deltas):
    d = np.asarray(deltas, dtype=float)
    top = max(1.0, 2.0 * float(d.max()))
    return np.log2(top / d)


def classify(deltas, values, policy: TrendPolicy = DEFAULT_POLICY):
    """Classify a sweep of partial values against decreasing ``deltas``.

    CONVERGED when the last increment is within tolerance, or when the
    last increments shrink geometrically and their summed geometric tail
    is within tolerance; DIVERGENT when
    each of the last ``tail`` increments exceeds tolerance and they decay
    no faster than a power ``max_decay`` of the dyadic level; BOUNDED
    otherwise.
    """
    deltas = np.asarray(deltas, dtype=float)
    values = np.asarray(values, dtype=float)
    if deltas.size < 2:
        raise ValueError("a sweep needs at least two truncation levels")
    if np.any(np.diff(deltas) >= 0):
        raise ValueError("truncation levels must be strictly decreasing")
    inc = np.abs(np.diff(values))
    tol = policy.atol + policy.rtol * np.abs(values[1:])
    m = _levels(deltas)[1:]
    expo = float("nan")
    k = min(policy.tail, inc.size)
    tail_inc, tail_m = inc[-k:], m[-k:]
    if k >= 2 and np.all(tail_inc > 0):
        expo = -float(np.polyfit(np.log(tail_m), np.log(tail_inc), 1)[0])
    geo_tail = np.inf
    if inc.size >= 2 and inc[-2] > 0:
        rho = inc[-1] / inc[-2]
        if rho < policy.geometric_ratio:
            geo_tail = inc[-1] * rho / (1 - rho)
    if inc[-1] <= tol[-1] or (geo_tail <= tol[-1] and inc[-1] <= 10 * tol[-1]):
        status = CONVERGED
    elif inc.size >= policy.tail and np.all(tail_inc > tol[-k:]) and expo < policy.max_decay:
        status = DIVERGENT
    else:
        status = BOUNDED
    return TrendResult(status, float(values[-1]), deltas, values, inc, expo)


def dyadic_schedule(delta0, count, floor=0.0):
    """``delta0 * 2**-k`` for ``k < count``, stopping at ``floor``."""
    d = float(delta0) * 2.0 ** -np.arange(int(count))
    if floor > 0:
        d = d[d >= floor * (1 - 1e-12)]
    return d
