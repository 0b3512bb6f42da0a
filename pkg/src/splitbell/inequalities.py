"""Normalized bipartite Bell inequalities and their collective-spin Bell operators.

Outcomes are normalized to [-1/2, 1/2]: a party measuring N spins along a
direction reports J/N, so the inequality coefficients and the local bound do
not change with N.  The Bell operator acts on a pair of total-spin sectors
and is expressed through the scaled projections s = S/N.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .spin_algebra import Direction, SpinSector, max_eigenvalue, spin_components


@dataclass(frozen=True)
class BellInequality:
    """Coefficients (w, va, vb) of a bipartite correlator inequality with m settings.

    w[i, j] weights <a_i b_j>, va[i] weights <a_i>, vb[j] weights <b_j>.
    local_bound, when present, caches the maximum over local deterministic
    strategies with outcomes +-1/2.
    """

    w: np.ndarray
    va: np.ndarray
    vb: np.ndarray
    local_bound: Optional[float] = None

    def __post_init__(self) -> None:
        w = np.array(self.w, dtype=float)
        va = np.array(self.va, dtype=float)
        vb = np.array(self.vb, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"w must be square, got shape {w.shape}")
        m = w.shape[0]
        if m < 1:
            raise ValueError("need at least one setting per party")
        if va.shape != (m,) or vb.shape != (m,):
            raise ValueError("va and vb must have one entry per setting")
        if not (np.isfinite(w).all() and np.isfinite(va).all() and np.isfinite(vb).all()):
            raise ValueError("coefficients must be finite")
        for a in (w, va, vb):
            a.flags.writeable = False
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "va", va)
        object.__setattr__(self, "vb", vb)

    @property
    def m(self) -> int:
        return self.w.shape[0]

    def scaled(self, c: float) -> "BellInequality":
        lb = None if self.local_bound is None else c * self.local_bound
        return BellInequality(c * self.w, c * self.va, c * self.vb, lb)

    def to_dict(self) -> dict:
        d = {
            "m": self.m,
            "w": [float(x) for x in self.w.ravel()],
            "va": [float(x) for x in self.va],
            "vb": [float(x) for x in self.vb],
        }
        if self.local_bound is not None:
            d["local_bound"] = float(self.local_bound)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "BellInequality":
        m = int(d["m"])
        w = np.array(d["w"], dtype=float).reshape(m, m)
        return cls(w, np.array(d["va"], dtype=float), np.array(d["vb"], dtype=float),
                   d.get("local_bound"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> "BellInequality":
        return cls.from_dict(json.loads(s))


def chsh() -> BellInequality:
    """Normalized CHSH: w = [[1,1],[1,-1]], no marginals, local bound 1/2."""
    return BellInequality(np.array([[1.0, 1.0], [1.0, -1.0]]),
                          np.zeros(2), np.zeros(2), local_bound=0.5)


def chsh_optimal_settings() -> "MeasurementSettings":
    """The qubit-optimal CHSH directions: A along x, z; B along (x +- z)/sqrt(2)."""
    return MeasurementSettings(
        alpha=(Direction(np.pi / 2, 0.0), Direction(0.0, 0.0)),
        beta=(Direction(np.pi / 4, 0.0), Direction(3 * np.pi / 4, 0.0)),
    )


@dataclass(frozen=True)
class MeasurementSettings:
    """One measurement direction per setting for each party."""

    alpha: tuple
    beta: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", tuple(self.alpha))
        object.__setattr__(self, "beta", tuple(self.beta))
        for d in self.alpha + self.beta:
            if not isinstance(d, Direction):
                raise TypeError("settings must be Direction instances")

    @property
    def m(self) -> int:
        return len(self.alpha)


@dataclass(frozen=True)
class WVDecomposition:
    """Direction-summed coefficients: W[x,y] couples s_A^x s_B^y, VA/VB the marginals."""

    W: np.ndarray
    VA: np.ndarray
    VB: np.ndarray

    def __post_init__(self) -> None:
        W = np.array(self.W, dtype=float)
        VA = np.array(self.VA, dtype=float)
        VB = np.array(self.VB, dtype=float)
        if W.shape != (3, 3) or VA.shape != (3,) or VB.shape != (3,):
            raise ValueError("W must be 3x3 and VA, VB 3-vectors")
        for a in (W, VA, VB):
            a.flags.writeable = False
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "VA", VA)
        object.__setattr__(self, "VB", VB)


def assemble_wv(ineq: BellInequality, settings: MeasurementSettings) -> WVDecomposition:
    """Contract the inequality coefficients with the setting directions."""
    if settings.m != ineq.m or len(settings.beta) != ineq.m:
        raise ValueError(f"settings count {settings.m} does not match m={ineq.m}")
    A = np.array([d.unit_vector() for d in settings.alpha])  # (m, 3)
    B = np.array([d.unit_vector() for d in settings.beta])
    return WVDecomposition(A.T @ ineq.w @ B, A.T @ ineq.va, B.T @ ineq.vb)


def sector_pairs(N: int):
    """All (jA, jB) sector pairs available to N spins per side, as two_j labels."""
    if N < 1:
        raise ValueError("N must be >= 1")
    labels = list(range(N, -1, -2))
    return [(a, b) for a in labels for b in labels]


def _check_sector(two_j: int, N: int) -> None:
    if two_j < 0 or two_j > N or (N - two_j) % 2 != 0:
        raise ValueError(f"sector two_j={two_j} is not reachable with N={N} spins")


def bell_operator(wv: WVDecomposition, jA: SpinSector, jB: SpinSector, N: int) -> np.ndarray:
    """Bell operator on the product of two total-spin sectors, using s = S/N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    _check_sector(jA.two_j, N)
    _check_sector(jB.two_j, N)
    sa = spin_components(jA)
    sb = spin_components(jB)
    da, db = jA.dim, jB.dim
    op = np.zeros((da * db, da * db), dtype=complex)
    eye_a = np.eye(da)
    eye_b = np.eye(db)
    for x in range(3):
        for y in range(3):
            if wv.W[x, y] != 0.0:
                op += (wv.W[x, y] / N**2) * np.kron(sa[x], sb[y])
    for x in range(3):
        if wv.VA[x] != 0.0:
            op += (wv.VA[x] / N) * np.kron(sa[x], eye_b)
        if wv.VB[x] != 0.0:
            op += (wv.VB[x] / N) * np.kron(eye_a, sb[x])
    return op


def quantum_value(ineq: BellInequality, settings: MeasurementSettings, N: int) -> float:
    """Maximum of the Bell expression over all states of N+N spins at fixed settings.

    Collective operators are block diagonal over total-spin sectors and their
    block spectra do not depend on the multiplicity space, so the maximum over
    the full (2^N)x(2^N) product space equals the maximum over sector pairs.
    """
    wv = assemble_wv(ineq, settings)
    best = -np.inf
    for tja, tjb in sector_pairs(N):
        op = bell_operator(wv, SpinSector(tja), SpinSector(tjb), N)
        best = max(best, max_eigenvalue(op))
    return best


def witness_value(state_expectation: float, ineq: BellInequality) -> float:
    """Bell-correlation witness: expectation minus the local bound; > 0 certifies."""
    if ineq.local_bound is None:
        raise ValueError("inequality carries no local bound; compute it first")
    return float(state_expectation) - float(ineq.local_bound)
