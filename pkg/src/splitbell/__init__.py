"""Bell nonlocality of split spin ensembles under collective measurements.

Two toolchains share one spin-algebra core:

* first-order-moment Bell expressions: exact local bounds by sign-strategy
  enumeration, quantum bounds by sector-wise eigenvalue maximization, and
  randomized scans over inequality coefficients;
* parity-binned CHSH on a one-axis-twisted state split between two parties
  by a beam splitter, with sweeps over the twist strength and atom number.
"""

__version__ = "0.1.0"

from .inequalities import (
    BellInequality,
    MeasurementSettings,
    WVDecomposition,
    assemble_wv,
    bell_operator,
    chsh,
    chsh_optimal_settings,
    quantum_value,
    witness_value,
)
from .polytope import DeterministicStrategy, enumerate_vertices, local_bound, violation_gap
from .search import (
    MonotonicityReport,
    ScanReport,
    SearchConfig,
    monotonicity_check,
    optimize_settings,
    random_inequality,
    scan_random,
)
from .spin_algebra import (
    Direction,
    SpinSector,
    direction_operator,
    max_eigenvalue,
    spin_components,
    wigner_rotation,
)
from .squeezing import DickeState, SplitState, ghz_overlap, one_axis_twisted, split_state, wineland_xi2
from .parity import (
    ChshResult,
    JointDistribution,
    chsh_value,
    joint_distribution,
    optimize_chsh,
    parity_correlator,
    sweep_chi,
    sweep_n,
)
from .catalog import CatalogEntry, catalog_sweep, parse_catalog, to_normalized, verify_entry
