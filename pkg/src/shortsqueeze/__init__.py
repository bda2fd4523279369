"""Clearing prices and squeeze thresholds for shorted assets under margin calls.

The public surface re-exports the domain types, the closed-form clearing
results, the independent numeric solver, and the scenario/reporting layer.
"""

from .analytic import (
    NoEquilibriumError,
    call_price,
    capital_threshold,
    no_call_price,
    realized_clearing_price,
    squeeze_limits,
    squeeze_size,
    squeeze_threshold,
)
from .model import (
    Branch,
    ClearingOutcome,
    DomainError,
    MarketParams,
    PhysicalSnapshot,
    SqueezeReport,
    cash_topup,
    inverse_demand,
    require_valid,
    shares_to_return,
    to_adv_units,
    to_physical_units,
    validate,
)
from .oracle import (
    DEFAULT_CONFIG,
    EquilibriumSet,
    SolverConfig,
    SolverError,
    clearing_residual,
    enumerate_equilibria,
    fictitious_margin_call_solve,
    solve_branch,
)
from .scenario import (
    CaseStudyReport,
    FormatError,
    GridKind,
    SweepRow,
    SweepSpec,
    SweepTable,
    case_study,
    emit,
    load_snapshots,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "CaseStudyReport",
    "ClearingOutcome",
    "DEFAULT_CONFIG",
    "DomainError",
    "EquilibriumSet",
    "FormatError",
    "GridKind",
    "MarketParams",
    "NoEquilibriumError",
    "PhysicalSnapshot",
    "SolverConfig",
    "SolverError",
    "SqueezeReport",
    "SweepRow",
    "SweepSpec",
    "SweepTable",
    "call_price",
    "capital_threshold",
    "case_study",
    "cash_topup",
    "clearing_residual",
    "emit",
    "enumerate_equilibria",
    "fictitious_margin_call_solve",
    "inverse_demand",
    "load_snapshots",
    "no_call_price",
    "realized_clearing_price",
    "require_valid",
    "shares_to_return",
    "solve_branch",
    "squeeze_limits",
    "squeeze_size",
    "squeeze_threshold",
    "sweep",
    "to_adv_units",
    "to_physical_units",
    "validate",
    "__version__",
]
