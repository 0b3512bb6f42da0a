"""One-axis-twisted spin-squeezed states and their beam-splitter bipartition.

States of N two-level atoms are stored over the symmetric (Dicke) basis,
indexed by the number m of atoms in internal state 1, with Jz eigenvalue
m - N/2.  Amplitudes are handled in log-magnitude + phase so binomial
weights stay finite up to N in the several hundreds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .spin_algebra import SpinSector, spin_components

NORM_TOL = 1e-12


def _ln_binom(n, k):
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


@dataclass(frozen=True)
class DickeState:
    """Symmetric N-atom state; c[m] is the amplitude of m atoms in state 1."""

    N: int
    c: np.ndarray
    chi_t: Optional[float] = None   # twist used to prepare it, when known

    def __post_init__(self) -> None:
        c = np.array(self.c, dtype=complex)
        if c.shape != (self.N + 1,):
            raise ValueError(f"need N+1 amplitudes, got shape {c.shape}")
        norm = np.linalg.norm(c)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm} is not 1")
        c.flags.writeable = False
        object.__setattr__(self, "c", c)

    def vector_sz_descending(self) -> np.ndarray:
        """Amplitudes reordered to the descending-Sz convention of spin_algebra."""
        return self.c[::-1].copy()


def one_axis_twisted(N: int, chi_t: float) -> DickeState:
    """Coherent state along +x twisted by exp(-i chi_t Jz^2).

    c_m ~ sqrt(C(N, m)) * exp(-i chi_t (m - N/2)^2), normalized; chi_t = 0
    gives the x-polarized coherent spin state.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    m = np.arange(N + 1)
    ln_mag = 0.5 * _ln_binom(N, m)
    c = np.exp(ln_mag - ln_mag.max()) * np.exp(-1j * chi_t * (m - N / 2.0) ** 2)
    return DickeState(N, c / np.linalg.norm(c), chi_t=float(chi_t))


@dataclass(frozen=True)
class SplitState:
    """Bipartite state after routing each atom to Alice or Bob.

    blocks[m] has shape (m+1, N-m+1); entry (k, l) is the amplitude for
    Alice holding (k atoms of state 1, l of state 2) and Bob the remaining
    (m-k, N-m-l), where m counts state-1 atoms overall.
    """

    N: int
    blocks: tuple
    chi_t: Optional[float] = None
    transmission: float = 0.5

    def __post_init__(self) -> None:
        if len(self.blocks) != self.N + 1:
            raise ValueError("need one block per state-1 count m = 0..N")
        blocks = []
        for m, b in enumerate(self.blocks):
            b = np.array(b, dtype=complex)
            if b.shape != (m + 1, self.N - m + 1):
                raise ValueError(f"block m={m} has shape {b.shape}")
            b.flags.writeable = False
            blocks.append(b)
        total = sum(float(np.sum(np.abs(b) ** 2)) for b in blocks)
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"split-state norm^2 {total} is not 1")
        object.__setattr__(self, "blocks", tuple(blocks))

    def norm_squared(self) -> float:
        return sum(float(np.sum(np.abs(b) ** 2)) for b in self.blocks)

    def atom_number_distribution(self) -> np.ndarray:
        """P(n_a): probability that Alice holds n_a atoms."""
        p = np.zeros(self.N + 1)
        for m, b in enumerate(self.blocks):
            k = np.arange(m + 1)[:, None]
            l = np.arange(self.N - m + 1)[None, :]
            np.add.at(p, (k + l).ravel(), (np.abs(b) ** 2).ravel())
        return p

    def measurement_blocks(self) -> tuple:
        """Amplitudes regrouped by Alice's atom number.

        Block n_a has shape (n_a+1, N-n_a+1); entry (i, j) is the amplitude
        with Alice at Sz = n_a/2 - i and Bob at Sz = (N-n_a)/2 - j, i.e. i and
        j are the local state-2 (excitation) counts.
        """
        N = self.N
        out = []
        for na in range(N + 1):
            nb = N - na
            phi = np.empty((na + 1, nb + 1), dtype=complex)
            for i in range(na + 1):
                # m = N - i - j stays in range for every (i, j) of this block
                phi[i, :] = [self.blocks[N - i - j][na - i, i] for j in range(nb + 1)]
            out.append(phi)
        return tuple(out)

    def save(self, path) -> None:
        """Versioned npz dump for caching across sweeps."""
        header = {"format": "splitbell-split-state", "version": 1, "N": self.N,
                  "chi_t": self.chi_t, "transmission": self.transmission}
        arrays = {f"block_{m}": np.asarray(b) for m, b in enumerate(self.blocks)}
        np.savez(path, header=np.frombuffer(json.dumps(header).encode(), dtype=np.uint8),
                 **arrays)

    @classmethod
    def load(cls, path) -> "SplitState":
        with np.load(path) as data:
            header = json.loads(bytes(data["header"]).decode())
            if header.get("format") != "splitbell-split-state" or header.get("version") != 1:
                raise ValueError("not a version-1 split-state dump")
            N = int(header["N"])
            blocks = [data[f"block_{m}"] for m in range(N + 1)]
        chi = header.get("chi_t")
        return cls(N, tuple(blocks), chi_t=None if chi is None else float(chi),
                   transmission=float(header["transmission"]))


def split_state(psi: DickeState, transmission: float = 0.5) -> SplitState:
    """Send each atom through a beam splitter: a_i^dag -> sqrt(t) a_i^dag + sqrt(1-t) b_i^dag.

    The amplitude for (m, k, l) is c_m sqrt(C(m,k) C(N-m,l)) t^((k+l)/2)
    (1-t)^((N-k-l)/2); at t = 1/2 the split weights reduce to the pure
    binomial form.
    """
    if not (0.0 < transmission < 1.0):
        raise ValueError(f"transmission must lie strictly in (0, 1), got {transmission}")
    N = psi.N
    t = float(transmission)
    lnt, lnu = np.log(t), np.log1p(-t)
    blocks = []
    for m in range(N + 1):
        k = np.arange(m + 1)[:, None]
        l = np.arange(N - m + 1)[None, :]
        ln_mag = (0.5 * (_ln_binom(m, k) + _ln_binom(N - m, l))
                  + 0.5 * (k + l) * lnt + 0.5 * (N - k - l) * lnu)
        blocks.append(psi.c[m] * np.exp(ln_mag))
    return SplitState(N, tuple(blocks), chi_t=psi.chi_t, transmission=t)


def ghz_overlap(psi: DickeState) -> float:
    """Best overlap with (|+x>^N + e^{i phi}|-x>^N)/sqrt(2) over the phase phi."""
    N = psi.N
    m = np.arange(N + 1)
    lnb = 0.5 * _ln_binom(N, m) - 0.5 * N * np.log(2.0)
    plus = np.exp(lnb)
    minus = plus * (-1.0) ** (N - m)
    a = np.vdot(plus, psi.c)
    b = np.vdot(minus, psi.c)
    # <+x|-x> = 0, so the normalization is 1/sqrt(2) for every N
    return float((abs(a) + abs(b)) / np.sqrt(2.0))


def wineland_xi2(N: int, chi_t: float) -> float:
    """Wineland squeezing parameter of the pre-split twisted state.

    xi^2 = N * min_theta Var(cos(theta) Jy + sin(theta) Jz) / <Jx>^2, the
    minimum running over directions perpendicular to the mean spin (+x).
    Undefined (raises) when <Jx> vanishes, e.g. at chi_t = pi/2.
    """
    psi = one_axis_twisted(N, chi_t)
    vec = psi.vector_sz_descending()
    sx, sy, sz = spin_components(SpinSector(N))

    def ev(op):
        return float(np.real(np.vdot(vec, op @ vec)))

    jx = ev(sx)
    if abs(jx) < 1e-12 * N:
        raise ValueError(f"<Jx> vanishes at chi_t={chi_t}; xi^2 is undefined")
    vy = ev(sy @ sy) - ev(sy) ** 2
    vz = ev(sz @ sz) - ev(sz) ** 2
    cyz = ev((sy @ sz + sz @ sy) / 2.0) - ev(sy) * ev(sz)
    min_var = (vy + vz) / 2.0 - np.sqrt(((vy - vz) / 2.0) ** 2 + cyz**2)
    return float(N * min_var / jx**2)
