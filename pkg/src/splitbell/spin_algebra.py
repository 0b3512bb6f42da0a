"""Collective spin algebra on total-spin sectors.

All matrices use the |j, m> basis ordered by descending Sz eigenvalue
(m = j, j-1, ..., -j).  A sector is labelled by two_j = 2j so that
half-integer spins stay in integer arithmetic; its dimension is two_j + 1.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SpinSector:
    """Total-spin-j sector, labelled by two_j = 2j >= 0."""

    two_j: int

    def __post_init__(self) -> None:
        if self.two_j < 0 or self.two_j != int(self.two_j):
            raise ValueError(f"two_j must be a non-negative integer, got {self.two_j}")

    @property
    def j(self) -> float:
        return self.two_j / 2.0

    @property
    def dim(self) -> int:
        return self.two_j + 1

    def sz_values(self) -> np.ndarray:
        """Sz eigenvalues in basis order: j, j-1, ..., -j."""
        return self.j - np.arange(self.dim)


@dataclass(frozen=True)
class Direction:
    """Measurement direction on the Bloch sphere, theta in [0, pi], phi in [0, 2*pi)."""

    theta: float
    phi: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.theta <= np.pi):
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not (0.0 <= self.phi < 2.0 * np.pi):
            raise ValueError(f"phi must lie in [0, 2*pi), got {self.phi}")

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "Direction":
        """Canonicalize arbitrary real angles onto the standard ranges."""
        v = np.array([
            np.sin(theta) * np.cos(phi),
            np.sin(theta) * np.sin(phi),
            np.cos(theta),
        ])
        return cls.from_vector(v)

    @classmethod
    def from_vector(cls, v) -> "Direction":
        v = np.asarray(v, dtype=float)
        n = np.linalg.norm(v)
        if n == 0:
            raise ValueError("zero vector has no direction")
        v = v / n
        theta = float(np.arccos(np.clip(v[2], -1.0, 1.0)))
        phi = float(np.mod(np.arctan2(v[1], v[0]), 2.0 * np.pi))
        if phi >= 2.0 * np.pi:  # guard the mod-boundary rounding case
            phi = 0.0
        return cls(theta, phi)

    def unit_vector(self) -> np.ndarray:
        return np.array([
            np.sin(self.theta) * np.cos(self.phi),
            np.sin(self.theta) * np.sin(self.phi),
            np.cos(self.theta),
        ])


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@functools.lru_cache(maxsize=None)
def _spin_components_cached(two_j: int):
    j = two_j / 2.0
    dim = two_j + 1
    m = j - np.arange(dim)
    sz = np.zeros((dim, dim), dtype=complex)
    sz[np.diag_indices(dim)] = m
    # raising operator: <m+1| S+ |m> = sqrt(j(j+1) - m(m+1)); column i+1 holds m = j-i-1
    sp = np.zeros((dim, dim), dtype=complex)
    for i in range(dim - 1):
        mm = m[i + 1]
        sp[i, i + 1] = np.sqrt(j * (j + 1) - mm * (mm + 1))
    sm = sp.conj().T
    sx = (sp + sm) / 2.0
    sy = (sp - sm) / 2.0j
    return tuple(_readonly(a) for a in (sx, sy, sz))


def spin_components(sector: SpinSector):
    """Angular-momentum matrices (Sx, Sy, Sz) for one sector.

    Returned arrays are cached and read-only; copy before mutating.
    """
    return _spin_components_cached(sector.two_j)


def direction_operator(sector: SpinSector, d: Direction) -> np.ndarray:
    """Spin projection d . (Sx, Sy, Sz); spectrum is {j, j-1, ..., -j}."""
    sx, sy, sz = spin_components(sector)
    ux, uy, uz = d.unit_vector()
    return ux * sx + uy * sy + uz * sz


@functools.lru_cache(maxsize=None)
def _jy_eigensystem(n: int):
    """Eigenbasis of Sy in the two_j = n sector; eigenvalues snapped to j..-j."""
    _, sy, _ = _spin_components_cached(n)
    lam, v = np.linalg.eigh(sy)
    j = n / 2.0
    exact = np.round(lam + j) - j
    if np.abs(lam - exact).max() > 1e-9:
        raise RuntimeError(f"Sy spectrum in sector two_j={n} off the exact ladder")
    return _readonly(exact), _readonly(v)


def wigner_rotation(n: int, d: Direction) -> np.ndarray:
    """Rotation matrix e^{-i phi Sz} e^{-i theta Sy} in the two_j = n sector.

    Entry [a, b] is e^{-i phi k_a} <k_a| e^{-i theta Sy} |k_b> with row/column
    Sz eigenvalues k = n/2, n/2 - 1, ..., -n/2.  Built spectrally from the
    cached Sy eigenbasis, so it is unitary to machine precision at any n.
    """
    return _rotation_matrix(n, d.theta, d.phi)


def _rotation_matrix(n: int, theta: float, phi: float) -> np.ndarray:
    if n < 0:
        raise ValueError("sector label n must be >= 0")
    lam, v = _jy_eigensystem(n)
    d_small = (v * np.exp(-1j * theta * lam)) @ v.conj().T
    if phi == 0.0:
        return d_small
    k = n / 2.0 - np.arange(n + 1)
    return np.exp(-1j * phi * k)[:, None] * d_small


def is_hermitian(h: np.ndarray, tol: float = 1e-10) -> bool:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        return False
    scale = max(1.0, float(np.abs(h).max()) if h.size else 0.0)
    return float(np.abs(h - h.conj().T).max()) <= tol * scale


def max_eigenvalue(h: np.ndarray, tol: float = 1e-10) -> float:
    """Largest eigenvalue of a Hermitian matrix.

    Raises ValueError when the input deviates from Hermiticity by more than
    tol (relative to the largest entry magnitude).
    """
    h = np.asarray(h)
    if not is_hermitian(h, tol):
        raise ValueError("matrix is not Hermitian within tolerance")
    return float(np.linalg.eigvalsh(h)[-1])
