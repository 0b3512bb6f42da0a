"""Derivative-free settings optimization and randomized inequality scans.

The max-eigenvalue objective is continuous but not smooth at level
crossings, so the search uses Nelder-Mead restarts over unconstrained
angle vectors; any real (theta, phi) pair maps to a unit vector, which
keeps the landscape free of box-boundary artifacts.  Every random draw
comes from a seed substream derived from (seed, item index), so results
are reproducible and independent of execution order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .inequalities import BellInequality, MeasurementSettings, assemble_wv, quantum_value
from .parallel import parallel_map
from .polytope import local_bound
from .spin_algebra import Direction

VIOLATION_THRESHOLD = 1e-6  # gaps below this count as "no violation"


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 20
    max_iterations: int = 400
    tol: float = 1e-9
    seed: int = 0

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")


def _rng_for(seed, *key) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


def _seed_for(seed, *key) -> int:
    return int(_rng_for(seed, *key).integers(0, 2**63 - 1))


def maximize_with_restarts(
    objective: Callable[[np.ndarray], float],
    n_params: int,
    cfg: SearchConfig,
    sampler: Optional[Callable[[np.random.Generator, int], np.ndarray]] = None,
    extra_starts: Sequence[np.ndarray] = (),
    threads=1,
    screen: Optional[int] = None,
) -> tuple[float, np.ndarray]:
    """Best (value, x) over Nelder-Mead runs from seeded random starts.

    Each restart draws its start from substream (cfg.seed, restart index) and
    is polished by a second Nelder-Mead run from the first run's endpoint,
    which rebuilds the simplex and escapes premature collapse.  Runs are
    independent; the reduction keeps the earliest start on ties, so the
    result does not depend on the worker count.

    With `screen` set, every start is evaluated once and only the `screen`
    most promising get a full run.  Since Nelder-Mead never returns below
    its starting value, the result still dominates every tested point.
    """
    if sampler is None:
        def sampler(rng, _):
            x = rng.uniform(0.0, np.pi, size=n_params)
            x[1::2] *= 2.0
            return x

    def run(x0):
        neg = lambda x: -objective(x)
        opts = {"maxiter": cfg.max_iterations, "xatol": 1e-8, "fatol": cfg.tol / 10.0}
        res = minimize(neg, x0, method="Nelder-Mead", options=opts)
        res = minimize(neg, res.x, method="Nelder-Mead", options=opts)
        return -res.fun, res.x

    starts = [np.asarray(x0, dtype=float) for x0 in extra_starts]
    starts += [sampler(_rng_for(cfg.seed, r), r) for r in range(cfg.restarts)]
    if screen is not None and screen < len(starts):
        scores = parallel_map(objective, starts, threads)
        order = sorted(range(len(starts)), key=lambda i: (-scores[i], i))
        starts = [starts[i] for i in order[:max(1, screen)]]
    results = parallel_map(run, starts, threads)
    best_val, best_x = -np.inf, starts[0]
    for val, x in results:
        if val > best_val:
            best_val, best_x = val, x
    return best_val, best_x


def _angles_to_settings(x: np.ndarray, m: int) -> MeasurementSettings:
    alpha = tuple(Direction.from_angles(x[2 * i], x[2 * i + 1]) for i in range(m))
    beta = tuple(Direction.from_angles(x[2 * (m + i)], x[2 * (m + i) + 1]) for i in range(m))
    return MeasurementSettings(alpha, beta)


def settings_to_angles(settings: MeasurementSettings) -> np.ndarray:
    out = []
    for d in settings.alpha + settings.beta:
        out += [d.theta, d.phi]
    return np.array(out)


def optimize_settings(
    ineq: BellInequality,
    N: int,
    cfg: SearchConfig,
    extra_starts: Sequence[np.ndarray] = (),
) -> tuple[float, MeasurementSettings]:
    """Maximize quantum_value over the 4m measurement angles.

    Heuristic (like any local search): the returned value is a certified
    lower bound on the true settings-optimized quantum value, re-evaluated
    exactly at the returned settings.
    """
    m = ineq.m

    def objective(x):
        return quantum_value(ineq, _angles_to_settings(x, m), N)

    _, best_x = maximize_with_restarts(objective, 4 * m, cfg, extra_starts=extra_starts)
    settings = _angles_to_settings(best_x, m)
    return quantum_value(ineq, settings, N), settings


def random_inequality(m: int, seed) -> BellInequality:
    """Coefficients drawn uniformly: w in [-1/4, 1/4], va/vb in [-1/2, 1/2].

    The ranges equalize the maximal contribution of every term, since
    |<ab>| <= 1/4 and |<a>| <= 1/2 with +-1/2 outcomes.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    rng = np.random.default_rng(seed)
    w = rng.uniform(-0.25, 0.25, size=(m, m))
    va = rng.uniform(-0.5, 0.5, size=m)
    vb = rng.uniform(-0.5, 0.5, size=m)
    return BellInequality(w, va, vb)


@dataclass(frozen=True)
class ScanRow:
    index: int
    local: float
    quantum: float

    @property
    def gap(self) -> float:
        return self.quantum - self.local


@dataclass(frozen=True)
class ScanReport:
    m: int
    N: int
    count: int
    seed: int
    rows: tuple
    best_index: Optional[int]
    best_inequality: Optional[BellInequality]
    best_settings: Optional[MeasurementSettings]

    @property
    def best_gap(self) -> Optional[float]:
        if self.best_index is None:
            return None
        return self.rows[self.best_index].gap

    @property
    def gap_deciles(self) -> Optional[list]:
        """Gap distribution summary: 0%, 10%, ..., 100% quantiles."""
        if not self.rows:
            return None
        gaps = np.array([r.gap for r in self.rows])
        return [float(q) for q in np.quantile(gaps, np.linspace(0, 1, 11))]

    @property
    def any_violation(self) -> bool:
        return self.best_gap is not None and self.best_gap > VIOLATION_THRESHOLD

    def to_dict(self) -> dict:
        d = {
            "m": self.m, "N": self.N, "count": self.count, "seed": self.seed,
            "best_gap": self.best_gap, "best_index": self.best_index,
            "gap_deciles": self.gap_deciles, "any_violation": self.any_violation,
            "rows": [{"id": r.index, "local": r.local, "quantum": r.quantum, "gap": r.gap}
                     for r in self.rows],
        }
        if self.best_inequality is not None:
            d["best_inequality"] = self.best_inequality.to_dict()
        if self.best_settings is not None:
            d["best_settings"] = {
                "alpha": [[s.theta, s.phi] for s in self.best_settings.alpha],
                "beta": [[s.theta, s.phi] for s in self.best_settings.beta],
            }
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def scan_random(m: int, count: int, N: int, cfg: SearchConfig, threads=None) -> ScanReport:
    """Sample random inequalities; compare optimized quantum value to the local bound."""

    def one(i: int):
        ineq = random_inequality(m, np.random.SeedSequence(entropy=cfg.seed, spawn_key=(0, i)))
        lb, _ = local_bound(ineq)
        item_cfg = replace(cfg, seed=_seed_for(cfg.seed, 1, i))
        qv, settings = optimize_settings(ineq, N, item_cfg)
        return ineq, ScanRow(i, lb, qv), settings

    results = parallel_map(one, range(count), threads)
    rows = tuple(r for _, r, _ in results)
    if rows:
        best = max(range(len(rows)), key=lambda i: (rows[i].gap, -i))
        best_ineq, _, best_settings = results[best]
    else:
        best, best_ineq, best_settings = None, None, None
    return ScanReport(m=m, N=N, count=count, seed=cfg.seed, rows=rows,
                      best_index=best, best_inequality=best_ineq,
                      best_settings=best_settings)


@dataclass(frozen=True)
class MonotonicityReport:
    n_list: tuple
    values: tuple
    noise_tol: float

    @property
    def increases(self) -> list:
        """Indices i where value[i+1] exceeds value[i] beyond the noise tolerance."""
        return [i for i in range(len(self.values) - 1)
                if self.values[i + 1] > self.values[i] + self.noise_tol]

    @property
    def non_increasing(self) -> bool:
        return not self.increases


def monotonicity_check(ineq: BellInequality, n_list: Sequence[int], cfg: SearchConfig,
                       noise_tol: float = 1e-4) -> MonotonicityReport:
    """Optimized values per N, flagging any increase beyond optimizer noise.

    Ascending n_list required.  Each N also warm-starts from the previous
    N's best settings, which only sharpens the comparison.
    """
    n_list = list(n_list)
    if sorted(n_list) != n_list:
        raise ValueError("n_list must be ascending")
    values = []
    prev_angles = None
    for idx, N in enumerate(n_list):
        item_cfg = replace(cfg, seed=_seed_for(cfg.seed, 2, idx))
        extra = [prev_angles] if prev_angles is not None else []
        val, settings = optimize_settings(ineq, N, item_cfg, extra_starts=extra)
        values.append(val)
        prev_angles = settings_to_angles(settings)
    return MonotonicityReport(tuple(n_list), tuple(values), noise_tol)
