"""Facet-style inequality tables: parsing, validation, conversion, sweeping.

An entry is the (m+1) x (m+1) table of a Bell expression in the +-1 outcome
convention, written so the whole expression is nonnegative on local models:

    B = delta + sum_i alpha_i <a_i> + sum_j beta_j <b_j>
              + sum_ij gamma_ij <a_i b_j>  >=  0.

File format (whitespace separated, `#` comments allowed):

    # <name> <m>
    delta   beta_1 ... beta_m
    alpha_1 gamma_11 ... gamma_1m
    ...
    alpha_m gamma_m1 ... gamma_mm
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .inequalities import BellInequality, MeasurementSettings
from .polytope import local_bound
from .search import SearchConfig, _seed_for, optimize_settings
from .parallel import parallel_map

MAX_VERIFY_SETTINGS = 13
_TIGHT_TOL = 1e-12


class CatalogFormatError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    m: int
    delta: float
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    source: str = ""

    def __post_init__(self) -> None:
        alpha = np.array(self.alpha, dtype=float)
        beta = np.array(self.beta, dtype=float)
        gamma = np.array(self.gamma, dtype=float)
        if alpha.shape != (self.m,) or beta.shape != (self.m,) or gamma.shape != (self.m, self.m):
            raise ValueError(f"table dimensions do not match m={self.m}")
        for a in (alpha, beta, gamma):
            a.flags.writeable = False
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "gamma", gamma)

    def to_text(self) -> str:
        lines = [f"# {self.name} {self.m}"]
        lines.append(" ".join(repr(float(x)) for x in [self.delta, *self.beta]))
        for i in range(self.m):
            lines.append(" ".join(repr(float(x)) for x in [self.alpha[i], *self.gamma[i]]))
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "name": self.name, "m": self.m, "delta": self.delta,
            "alpha": list(self.alpha), "beta": list(self.beta),
            "gamma": [list(r) for r in self.gamma], "source": self.source,
        }


def serialize_catalog(entries: Sequence[CatalogEntry]) -> str:
    return "\n".join(e.to_text() for e in entries)


def _is_header(tokens: list) -> bool:
    if len(tokens) != 2:
        return False
    try:
        return int(tokens[1]) >= 1
    except ValueError:
        return False


def parse_catalog(text: str, source: str = "") -> list:
    """Parse entries from the documented table format.

    A `#` line with exactly two fields, the second a positive integer, opens
    an entry; every other `#` line is a comment.  Values are parsed with
    full decimal fidelity, so serialize -> parse round-trips exactly.
    """
    entries = []
    pending: Optional[dict] = None
    rows: list = []

    def finish(line_no: int) -> None:
        nonlocal pending, rows
        if pending is None:
            return
        m = pending["m"]
        if len(rows) != m + 1:
            raise CatalogFormatError(line_no, f"entry '{pending['name']}' has {len(rows)} "
                                              f"table rows, expected {m + 1}")
        table = np.array(rows)
        entries.append(CatalogEntry(
            name=pending["name"], m=m, delta=float(table[0, 0]),
            beta=table[0, 1:], alpha=table[1:, 0], gamma=table[1:, 1:],
            source=source or f"line {pending['line']}",
        ))
        pending, rows = None, []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            tokens = line[1:].split()
            if _is_header(tokens):
                finish(line_no)
                pending = {"name": tokens[0], "m": int(tokens[1]), "line": line_no}
            continue
        if pending is None:
            raise CatalogFormatError(line_no, "table row outside any entry header")
        tokens = line.split()
        if len(tokens) != pending["m"] + 1:
            raise CatalogFormatError(line_no, f"expected {pending['m'] + 1} values, "
                                              f"got {len(tokens)}")
        try:
            rows.append([float(t) for t in tokens])
        except ValueError as exc:
            raise CatalogFormatError(line_no, f"bad number: {exc}") from None
        if len(rows) == pending["m"] + 1:
            finish(line_no)
    finish(line_no if text.strip() else 0)
    return entries


def load_catalog_file(path) -> list:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_catalog(fh.read(), source=str(path))


def bundled_chsh_path():
    """Path of the CHSH table shipped with the package."""
    return importlib.resources.files("splitbell").joinpath("data/chsh_catalog.txt")


def load_bundled_chsh() -> list:
    return parse_catalog(bundled_chsh_path().read_text(encoding="utf-8"), source="bundled")


@dataclass(frozen=True)
class VerifyResult:
    valid_nonnegative: bool
    tight: bool
    min_value: float


def verify_entry(e: CatalogEntry) -> VerifyResult:
    """Exact minimum of B over all 2^(2m) deterministic +-1 strategies."""
    if e.m > MAX_VERIFY_SETTINGS:
        raise ValueError(f"m={e.m} exceeds the verification limit {MAX_VERIFY_SETTINGS}")
    m = e.m
    idx = np.arange(1 << m, dtype=np.int64)
    signs = 1.0 - 2.0 * ((idx[:, None] >> np.arange(m)) & 1)   # all +-1 rows
    a_part = e.delta + signs @ e.alpha                          # (2^m,)
    best = np.inf
    chunk = 512
    ga = signs @ e.gamma                                        # (2^m, m) rows a^T gamma
    for start in range(0, 1 << m, chunk):
        b = signs[start:start + chunk]
        vals = a_part[:, None] + (b @ e.beta)[None, :] + ga @ b.T
        best = min(best, float(vals.min()))
    return VerifyResult(valid_nonnegative=best >= -_TIGHT_TOL,
                        tight=best <= _TIGHT_TOL, min_value=best)


def to_normalized(e: CatalogEntry) -> BellInequality:
    """Convert a table to the +-1/2 outcome convention.

    Flipping signs turns B >= 0 into a maximization bounded by delta; halving
    the outcomes scales correlator terms by 1/4 and marginal terms by 1/2, so
    w = -gamma, va = -alpha/2, vb = -beta/2 bound the expression by delta/4.
    The cached local bound is recomputed exactly and equals delta/4 whenever
    the entry is tight.
    """
    ineq = BellInequality(-e.gamma, -e.alpha / 2.0, -e.beta / 2.0)
    lb, _ = local_bound(ineq)
    return BellInequality(ineq.w, ineq.va, ineq.vb, local_bound=lb)


@dataclass(frozen=True)
class SweepRow:
    name: str
    m: int
    local: float
    quantum: float
    settings: MeasurementSettings

    @property
    def gap(self) -> float:
        return self.quantum - self.local


def catalog_sweep(entries: Sequence[CatalogEntry], N: int, cfg: SearchConfig,
                  threads=None) -> list:
    """Optimized quantum value vs local bound for each entry; report only."""

    def one(item):
        idx, entry = item
        ineq = to_normalized(entry)
        item_cfg = replace(cfg, seed=_seed_for(cfg.seed, 5, idx))
        qv, settings = optimize_settings(ineq, N, item_cfg)
        return SweepRow(entry.name, entry.m, ineq.local_bound, qv, settings)

    return parallel_map(one, list(enumerate(entries)), threads)


def random_tight_entry(m: int, seed, name: Optional[str] = None) -> CatalogEntry:
    """A random valid tight entry: draw a direction, set delta by vertex enumeration."""
    rng = np.random.default_rng(seed)
    gamma = rng.uniform(-1.0, 1.0, size=(m, m))
    alpha = rng.uniform(-1.0, 1.0, size=m)
    beta = rng.uniform(-1.0, 1.0, size=m)
    probe = CatalogEntry(name or "random", m, 0.0, alpha, beta, gamma, source="generated")
    delta = -verify_entry(probe).min_value
    return replace(probe, delta=delta)
