"""Local bounds by deterministic-strategy enumeration.

Linearity in each party's outcomes means the local maximum is always attained
with every outcome at an extreme value +-1/2, so only sign strategies matter:
Bob's 2^m sign vectors are enumerated and Alice's best response is analytic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .inequalities import BellInequality, MeasurementSettings, quantum_value

MAX_SETTINGS_BOUND = 26     # 2^m Bob strategies enumerated
MAX_SETTINGS_VERTICES = 13  # 2^(2m) vertices materialized
_CHUNK = 1 << 16


@dataclass(frozen=True)
class DeterministicStrategy:
    """Local deterministic assignment; entries are the extreme outcomes +-1/2."""

    a: tuple
    b: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", tuple(float(x) for x in self.a))
        object.__setattr__(self, "b", tuple(float(x) for x in self.b))
        if any(abs(x) != 0.5 for x in self.a + self.b):
            raise ValueError("strategy outcomes must be +-1/2")


def _sign_block(m: int, start: int, stop: int) -> np.ndarray:
    """Rows of +-1/2; bit j of the strategy index gives b_j (0 -> +1/2)."""
    idx = np.arange(start, stop, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(m)) & 1
    return 0.5 - bits.astype(float)


def local_bound(ineq: BellInequality) -> tuple[float, DeterministicStrategy]:
    """Exact local bound and one maximizing strategy.

    Ties in Alice's response break toward +1/2; among Bob strategies the
    lowest index wins, so the result is deterministic.
    """
    m = ineq.m
    if m > MAX_SETTINGS_BOUND:
        raise ValueError(f"m={m} exceeds the enumeration limit {MAX_SETTINGS_BOUND}")
    best_val = -np.inf
    best_idx = -1
    for start in range(0, 1 << m, _CHUNK):
        stop = min(start + _CHUNK, 1 << m)
        B = _sign_block(m, start, stop)
        coef = ineq.va[None, :] + B @ ineq.w.T          # Alice's per-setting payoff
        vals = 0.5 * np.abs(coef).sum(axis=1) + B @ ineq.vb
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_val = float(vals[k])
            best_idx = start + k
    b = _sign_block(m, best_idx, best_idx + 1)[0]
    coef = ineq.va + ineq.w @ b
    a = np.where(coef >= 0.0, 0.5, -0.5)
    return best_val, DeterministicStrategy(tuple(a), tuple(b))


def enumerate_vertices(m: int) -> np.ndarray:
    """All 2^(2m) local-polytope vertices as rows (<a_i>, <b_j>, <a_i b_j>)."""
    if m > MAX_SETTINGS_VERTICES:
        raise ValueError(f"m={m} exceeds the vertex enumeration limit {MAX_SETTINGS_VERTICES}")
    side = _sign_block(m, 0, 1 << m)
    A = np.repeat(side, 1 << m, axis=0)
    B = np.tile(side, (1 << m, 1))
    prods = np.einsum("ki,kj->kij", A, B).reshape(len(A), m * m)
    return np.hstack([A, B, prods])


def violation_gap(ineq: BellInequality, settings: MeasurementSettings, N: int) -> float:
    """quantum_value minus the local bound; positive certifies a violation."""
    return quantum_value(ineq, settings, N) - local_bound(ineq)[0]
