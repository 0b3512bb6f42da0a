"""Parity-binned collective measurements on the split state, and CHSH sweeps.

Binning a collective outcome by the parity of the local excitation count
turns the measurement into a product of single-atom +-1 measurements along
the setting direction, so CHSH applies directly.  The joint outcome
distribution is computed per local-atom-number block by rotating the split
amplitudes with sector Wigner matrices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .parallel import parallel_map
from .search import SearchConfig, _seed_for, maximize_with_restarts
from .spin_algebra import Direction, _rotation_matrix
from .squeezing import SplitState, one_axis_twisted, split_state

TSIRELSON = 2.0 * np.sqrt(2.0)


@dataclass(frozen=True)
class JointDistribution:
    """P(n_a, k_a, k_b) for one settings pair, stored per n_a block.

    Block n_a has shape (n_a+1, N-n_a+1); indices (i, j) are the local
    excitation counts in the measured bases, so the outcomes are
    k_a = n_a/2 - i and k_b = (N-n_a)/2 - j.
    """

    N: int
    alice: Direction
    bob: Direction
    blocks: tuple

    def __post_init__(self) -> None:
        total = 0.0
        blocks = []
        for na, b in enumerate(self.blocks):
            b = np.asarray(b, dtype=float)
            if b.shape != (na + 1, self.N - na + 1):
                raise ValueError(f"block n_a={na} has shape {b.shape}")
            if b.min() < -1e-14:
                raise ValueError("negative probability beyond tolerance")
            b = np.clip(b, 0.0, None)
            b.flags.writeable = False
            blocks.append(b)
            total += float(b.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"distribution sums to {total}, not 1")
        object.__setattr__(self, "blocks", tuple(blocks))

    def total(self) -> float:
        return sum(float(b.sum()) for b in self.blocks)


@dataclass(frozen=True)
class ChshResult:
    value: float
    settings: tuple       # (a1, a2, b1, b2) Directions
    chi_t: float
    N: int
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if abs(self.value) > TSIRELSON + 1e-9:
            raise ValueError(f"CHSH value {self.value} breaches the quantum ceiling")
        if len(self.settings) != 4 or not all(isinstance(d, Direction) for d in self.settings):
            raise ValueError("need four Direction settings (a1, a2, b1, b2)")
        object.__setattr__(self, "settings", tuple(self.settings))

    def to_dict(self) -> dict:
        return {
            "N": self.N, "chi_t": self.chi_t, "chsh_value": self.value,
            "seed": self.seed,
            "settings": [[d.theta, d.phi] for d in self.settings],
        }


def _distribution_blocks(mblocks, N: int, dA, dB) -> list:
    """|amplitude|^2 blocks for measurement directions given as (theta, phi)."""
    out = []
    for na in range(N + 1):
        da = _rotation_matrix(na, dA[0], dA[1])
        db = _rotation_matrix(N - na, dB[0], dB[1])
        g = da.conj().T @ mblocks[na] @ db.conj()
        out.append(np.abs(g) ** 2)
    return out


def joint_distribution(phi: SplitState, alice: Direction, bob: Direction) -> JointDistribution:
    """Outcome distribution when Alice measures along `alice` and Bob along `bob`."""
    blocks = _distribution_blocks(phi.measurement_blocks(), phi.N,
                                  (alice.theta, alice.phi), (bob.theta, bob.phi))
    return JointDistribution(phi.N, alice, bob, tuple(blocks))


def parity_correlator(jd: JointDistribution) -> float:
    """E = <(-1)^(m_a) (-1)^(m_b)> over the local excitation counts; E in [-1, 1]."""
    e = 0.0
    for b in jd.blocks:
        sa = (-1.0) ** np.arange(b.shape[0])
        sb = (-1.0) ** np.arange(b.shape[1])
        e += sa @ b @ sb
    return float(e)


class _ChshEngine:
    """Evaluates CHSH for one split state, reusing per-party rotation stacks."""

    def __init__(self, phi: SplitState):
        self.N = phi.N
        self.mblocks = phi.measurement_blocks()
        self.sa = [(-1.0) ** np.arange(na + 1) for na in range(self.N + 1)]
        self.sb = [(-1.0) ** np.arange(self.N - na + 1) for na in range(self.N + 1)]

    def correlator(self, stack_a, stack_b) -> float:
        e = 0.0
        for na in range(self.N + 1):
            g = stack_a[na] @ self.mblocks[na] @ stack_b[self.N - na]
            e += self.sa[na] @ (g.real**2 + g.imag**2) @ self.sb[na]
        return e

    def chsh(self, x: np.ndarray) -> float:
        # x = [th_a1, ph_a1, th_a2, ph_a2, th_b1, ph_b1, th_b2, ph_b2]
        stacks = []
        for s in range(4):
            th, ph = x[2 * s], x[2 * s + 1]
            conj = [_rotation_matrix(n, th, ph).conj() for n in range(self.N + 1)]
            # Alice stacks enter as D^dagger on the left, Bob as conj on the right
            stacks.append([m.T for m in conj] if s < 2 else conj)
        a1, a2, b1, b2 = stacks
        return (self.correlator(a1, b1) + self.correlator(a2, b1)
                + self.correlator(a1, b2) - self.correlator(a2, b2))


def chsh_value(phi: SplitState, a1: Direction, a2: Direction,
               b1: Direction, b2: Direction) -> float:
    """E(a1,b1) + E(a2,b1) + E(a1,b2) - E(a2,b2) with parity binning."""
    x = np.array([a1.theta, a1.phi, a2.theta, a2.phi,
                  b1.theta, b1.phi, b2.theta, b2.phi])
    return float(_ChshEngine(phi).chsh(x))


def _pattern_starts(N: int) -> list:
    """Deterministic starts in the y-z plane.

    Settings there see the state's coherent branches through a phase that
    winds N times faster than the polar angle, so near-coincident polar
    angles spaced by pi/N realize the CHSH-optimal phase pattern; one start
    per phase quadrant covers the unknown branch phase.
    """
    starts = []
    for q in range(8):
        t0 = (5 * np.pi / 4 + q * np.pi / 2) / N
        x = np.empty(8)
        x[0::2] = (t0, t0 + np.pi / N, t0, t0 + np.pi / N)
        x[1::2] = np.pi / 2
        starts.append(x)
    return starts


def _chsh_sampler(N: int):
    """Random starts biased toward the +x polarization of the prepared state."""
    scales = (0.5 / np.sqrt(N), 1.5 / np.sqrt(N), 3.0 / np.sqrt(N))

    def sample(rng: np.random.Generator, r: int) -> np.ndarray:
        kind = r % 4
        x = np.empty(8)
        if kind < 3:  # near the x axis, at a few angular scales
            s = scales[kind]
            x[0::2] = np.pi / 2 + rng.normal(0.0, s, 4)
            x[1::2] = rng.normal(0.0, s, 4)
        else:         # fully random
            x[0::2] = rng.uniform(0.0, np.pi, 4)
            x[1::2] = rng.uniform(0.0, 2 * np.pi, 4)
        return x

    return sample


def _optimize_engine(engine: _ChshEngine, chi_t: float, cfg: SearchConfig,
                     extra_starts: Sequence[np.ndarray] = (), threads=1) -> ChshResult:
    starts = list(extra_starts) + _pattern_starts(engine.N)
    # screen the start pool: pattern starts matter only in the strong-twist
    # regime and alignment scales are redundant otherwise
    keep = max(4, cfg.restarts, len(extra_starts) + 1)
    val, x = maximize_with_restarts(engine.chsh, 8, cfg,
                                    sampler=_chsh_sampler(engine.N),
                                    extra_starts=starts, threads=threads,
                                    screen=keep)
    dirs = tuple(Direction.from_angles(x[2 * s], x[2 * s + 1]) for s in range(4))
    xs = np.array([v for d in dirs for v in (d.theta, d.phi)])
    return ChshResult(value=float(engine.chsh(xs)), settings=dirs,
                      chi_t=chi_t, N=engine.N, seed=cfg.seed)


def optimize_chsh(N: int, chi_t: float, cfg: SearchConfig, threads=1) -> ChshResult:
    """Maximize the parity CHSH value over all 8 setting angles."""
    phi = split_state(one_axis_twisted(N, chi_t))
    return _optimize_engine(_ChshEngine(phi), chi_t, cfg, threads=threads)


def sweep_chi(N: int, chi_grid: Sequence[float], cfg: SearchConfig,
              threads=None) -> list:
    """optimize_chsh per grid point, warm-starting from the previous point's settings.

    The warm start chains sequentially; restarts within a point are still
    independently seeded per (seed, point index).
    """
    if len(chi_grid) == 0:
        raise ValueError("chi grid must be non-empty")
    results = []
    prev = None
    for idx, chi in enumerate(chi_grid):
        engine = _ChshEngine(split_state(one_axis_twisted(N, chi)))
        item_cfg = replace(cfg, seed=_seed_for(cfg.seed, 3, idx))
        extra = [prev] if prev is not None else []
        res = _optimize_engine(engine, float(chi), item_cfg, extra_starts=extra,
                               threads=threads)
        prev = np.array([v for d in res.settings for v in (d.theta, d.phi)])
        results.append(res)
    return results


def sweep_n(chi_t: float, n_list: Sequence[int], cfg: SearchConfig,
            threads=None) -> list:
    """optimize_chsh per atom number, warm-starting from the previous N's settings."""
    if len(n_list) == 0:
        raise ValueError("n_list must be non-empty")
    results = []
    prev = None
    for idx, N in enumerate(n_list):
        engine = _ChshEngine(split_state(one_axis_twisted(int(N), chi_t)))
        item_cfg = replace(cfg, seed=_seed_for(cfg.seed, 4, idx))
        extra = [prev] if prev is not None else []
        res = _optimize_engine(engine, chi_t, item_cfg, extra_starts=extra,
                               threads=threads)
        prev = np.array([v for d in res.settings for v in (d.theta, d.phi)])
        results.append(res)
    return results


def results_to_csv_rows(results: Sequence[ChshResult]) -> list:
    header = ["N", "chi_t", "chsh_value",
              "theta_a1", "phi_a1", "theta_a2", "phi_a2",
              "theta_b1", "phi_b1", "theta_b2", "phi_b2", "seed"]
    rows = [header]
    for r in results:
        angles = [v for d in r.settings for v in (d.theta, d.phi)]
        rows.append([r.N, r.chi_t, r.value, *angles, r.seed])
    return rows
