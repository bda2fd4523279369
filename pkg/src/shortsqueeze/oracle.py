"""Independent numerical solution of the clearing equation.

Everything here works directly on the fixed-point equation

    p = 1 + beta * (c / p + shares_to_return(p))

by sign-change scanning and bisection, never the quadratic formula, so it
can serve as ground truth for the closed forms. Bisection is the deliberate
choice: the clearing map has a kink where the margin call starts binding,
and a bracketing method is immune to it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    Branch,
    ClearingOutcome,
    DomainError,
    MarketParams,
    require_valid,
    shares_to_return,
)


class SolverError(RuntimeError):
    """The numerical solver could not produce a solution."""


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and grid sizes for the bracketing solver."""

    abs_tol: float = 1e-12
    max_iter: int = 200
    scan_points: int = 4096

    def __post_init__(self) -> None:
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")
        if self.max_iter < 1:
            raise DomainError(f"max_iter must be at least 1, got {self.max_iter}")
        if self.scan_points < 2:
            raise DomainError(
                f"scan_points must be at least 2, got {self.scan_points}"
            )


DEFAULT_CONFIG = SolverConfig()


@dataclass(frozen=True)
class EquilibriumSet:
    """All fixed points of the clearing equation on the existence bracket.

    ``prices`` ascend strictly; ``realized_index`` points at the one the
    fictitious-margin-call construction selects.
    """

    prices: tuple[float, ...]
    realized_index: int


def clearing_residual(p: float, c: float, params: MarketParams) -> float:
    """Signed defect of the clearing equation at price p.

    Zero exactly at a clearing price; continuous in p (the buy-back term has
    a kink but no jump).
    """
    if p <= 0:
        raise DomainError(f"price must be positive, got {p}")
    return p - 1.0 - params.beta * (c / p + shares_to_return(p, params))


def _bisect(f, lo: float, hi: float, flo: float, fhi: float, config: SolverConfig) -> float:
    """Bisect a sign change down to |f| <= abs_tol. Deterministic."""
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    for _ in range(config.max_iter):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if abs(fmid) <= config.abs_tol:
            return mid
        if mid == lo or mid == hi:
            # bracket collapsed to adjacent floats without meeting tolerance
            break
        if (fmid > 0.0) == (fhi > 0.0):
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    raise SolverError(
        f"bisection stalled on [{lo}, {hi}] with residual above {config.abs_tol}"
    )


def _branch_equation(c: float, params: MarketParams, branch: Branch):
    """Residual of the branch-specific fixed-point equation (no kink).

    Returns (f, lo, hi, landmarks): the residual callable (works on scalars
    and arrays), the proven bracket for that branch's roots, and any
    analytically known interior points worth pinning to a scan grid.
    """
    beta, s, mu = params.beta, params.s, params.mu
    hi = 1.0 + beta * (c + s)
    if branch is Branch.NO_CALL or s == 0:

        def f(p):
            return p - 1.0 - beta * c / p

        lo = 1.0
        landmarks: tuple[float, ...] = ()
    else:
        shortfall = c - params.m / (1.0 + mu)

        def f(p):
            return p - 1.0 - beta * s - beta * shortfall / p

        # prices below the maintenance kink cannot involve a call
        lo = (1.0 + params.alpha) / (1.0 + mu)
        # p * f(p) is an upward parabola; its vertex sits between the two
        # roots whenever both exist, so pinning it to the grid guarantees
        # the scan sees the dip even when the roots nearly coincide
        landmarks = (0.5 * (1.0 + beta * s),)
    return f, lo, max(hi, lo), landmarks


def solve_branch(
    c: float,
    params: MarketParams,
    branch: Branch,
    config: SolverConfig = DEFAULT_CONFIG,
) -> float:
    """Solve one branch's fixed-point equation by bracketing bisection.

    When the bracket endpoints do not straddle a root, the bracket is
    scanned geometrically; the largest root found is returned (the call
    branch can hold two, and only the upper one survives consistency
    checks). Raises :class:`SolverError` when no sign change exists.
    """
    require_valid(params)
    if c < 0:
        raise DomainError(f"capital must be nonnegative, got {c}")
    f, lo, hi, landmarks = _branch_equation(c, params, branch)
    flo, fhi = f(lo), f(hi)
    if (
        abs(flo) > config.abs_tol
        and abs(fhi) > config.abs_tol
        and (flo > 0.0) != (fhi > 0.0)
    ):
        return _bisect(f, lo, hi, flo, fhi, config)
    # endpoints agree in sign (two roots or none inside) or one endpoint is
    # already a root at tolerance; scan and take the largest root, since the
    # call equation can hold two and only the upper one survives the
    # consistency check
    candidates = _scan_roots(f, lo, hi, config, landmarks)
    if not candidates:
        raise SolverError(
            f"no root of the {branch.value} equation on [{lo}, {hi}];"
            " the branch is inconsistent for these inputs"
        )
    return candidates[-1]


def _scan_roots(
    f,
    lo: float,
    hi: float,
    config: SolverConfig,
    landmarks: tuple[float, ...] = (),
) -> list[float]:
    """All roots of f on [lo, hi] found by geometric scan, ascending.

    A grid node already within the residual tolerance counts as a root (the
    bracket can be degenerate, e.g. capital so small that the upper bound
    rounds onto the lower); sign changes are refined by bisection. Callers
    pass analytically known landmarks (the margin kink, the call parabola's
    vertex) because a pair of roots can pinch around such a point more
    tightly than any fixed grid spacing resolves.
    """
    grid = np.geomspace(lo, hi, config.scan_points)
    inside = [x for x in landmarks if lo < x < hi]
    if inside:
        grid = np.unique(np.concatenate([grid, np.asarray(inside)]))
    vals = f(grid)
    roots = [float(grid[i]) for i in np.flatnonzero(np.abs(vals) <= config.abs_tol)]
    crossings = np.flatnonzero(vals[:-1] * vals[1:] < 0.0)
    for i in crossings:
        roots.append(
            _bisect(
                f,
                float(grid[i]),
                float(grid[i + 1]),
                float(vals[i]),
                float(vals[i + 1]),
                config,
            )
        )
    roots.sort()
    return _dedupe(roots, 10.0 * config.abs_tol)


def _dedupe(sorted_values: list[float], tol: float) -> list[float]:
    out: list[float] = []
    for v in sorted_values:
        if not out or v - out[-1] > tol:
            out.append(v)
    return out


def fictitious_margin_call_solve(
    c: float,
    params: MarketParams,
    config: SolverConfig = DEFAULT_CONFIG,
) -> ClearingOutcome:
    """Numerical fictitious-margin-call construction of the realized price.

    Solve pretending no call happens; keep that price if it respects the
    maintenance margin, otherwise re-solve on the call branch. Purely
    numeric, so it cross-checks the analytic realized price.
    """
    require_valid(params)
    if c < 0:
        raise DomainError(f"capital must be nonnegative, got {c}")
    p_no_call = solve_branch(c, params, Branch.NO_CALL, config)
    if (1.0 + params.mu) * params.s * p_no_call <= params.m:
        price, branch, margin_called = p_no_call, Branch.NO_CALL, False
        gamma = 0.0
    else:
        price = solve_branch(c, params, Branch.CALL, config)
        branch, margin_called = Branch.CALL, True
        gamma = shares_to_return(price, params)
    return ClearingOutcome(
        price=price,
        branch=branch,
        shares_repurchased=gamma,
        margin_called=margin_called,
        residual=abs(clearing_residual(price, c, params)),
    )


def enumerate_equilibria(
    c: float,
    params: MarketParams,
    config: SolverConfig = DEFAULT_CONFIG,
) -> EquilibriumSet:
    """Every clearing price on the existence bracket [1, 1 + beta*(c+s)].

    Scans the full (kinked) residual on a geometric grid, refines each sign
    change by bisection, and deduplicates. At most three equilibria can
    exist: one on the no-call side of the kink and two on the call side.
    """
    require_valid(params)
    if c < 0:
        raise DomainError(f"capital must be nonnegative, got {c}")
    beta, s, mu, m = params.beta, params.s, params.mu, params.m
    hi = 1.0 + beta * (c + s)

    def f(p):
        if s == 0:
            gamma = 0.0
        else:
            gamma = np.maximum(0.0, s - m / ((1.0 + mu) * p))
        return p - 1.0 - beta * (c / p + gamma)

    # near the capital threshold the no-call root and the lower call root
    # pinch around the margin kink, and near tangency the two call roots
    # pinch around the call parabola's vertex; pin both points to the grid
    if s > 0:
        landmarks = (m / ((1.0 + mu) * s), 0.5 * (1.0 + beta * s))
    else:
        landmarks = ()
    prices = _scan_roots(f, 1.0, hi, config, landmarks)
    if not prices:
        raise SolverError(
            "no equilibrium located by the sign scan; the grid is too coarse"
        )
    if len(prices) > 3:
        raise SolverError(
            f"scan produced {len(prices)} distinct equilibria; at most 3 can exist"
        )
    # the fictitious construction always selects the smallest equilibrium:
    # below the threshold that is the no-call price, above it the set is a
    # singleton; verify rather than assume
    realized = fictitious_margin_call_solve(c, params, config).price
    if abs(prices[0] - realized) > max(10.0 * config.abs_tol, 1e-9 * realized):
        raise SolverError(
            f"realized price {realized} is not the smallest enumerated"
            f" equilibrium {prices[0]}"
        )
    return EquilibriumSet(prices=tuple(prices), realized_index=0)
