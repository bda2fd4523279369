"""Closed-form clearing prices, margin-call threshold, and squeeze size.

Market clearing requires the price p to absorb both the outside purchases
c/p and any forced short-seller buy-ins, so p solves

    p = 1 + beta * (c / p + shares_to_return(p)).

Both consistency regimes reduce to quadratics with explicit roots:

* no call:  p^2 - p - beta*c = 0
* call:     p^2 - (1 + beta*s)*p - beta*(c - m/(1+mu)) = 0

The no-call root stays consistent exactly while c <= c_star; above that the
realized price jumps to the upper call root. The jump height delta is
positive iff the short interest ratio exceeds s_star.
"""

from __future__ import annotations

import math
import sys

from .model import (
    Branch,
    ClearingOutcome,
    DomainError,
    MarketParams,
    SqueezeReport,
    require_valid,
    shares_to_return,
)


class NoEquilibriumError(RuntimeError):
    """The requested branch has no real solution for these inputs."""


def no_call_price(c: float, params: MarketParams) -> float:
    """Clearing price assuming the short seller faces no margin call.

    Positive root of p^2 - p - beta*c = 0, evaluated additively (no
    cancellation), so the result is always >= 1.
    """
    require_valid(params)
    if c < 0:
        raise DomainError(f"capital must be nonnegative, got {c}")
    return 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * params.beta * c))


def call_price(c: float, params: MarketParams) -> float:
    """Upper root of the margin-call branch quadratic.

    This equals the realized clearing price whenever c > c_star; it is also
    defined below the threshold (where it is the self-sustaining squeeze
    fixed point rather than the realized price) as long as the discriminant
    stays nonnegative.
    """
    require_valid(params)
    bs = params.beta * params.s
    shortfall = 4.0 * params.beta * (c - params.m / (1.0 + params.mu))
    disc = (1.0 + bs) ** 2 + shortfall
    if disc < 0:
        # at the threshold the true discriminant is a perfect square; roundoff
        # can push the float value a few ulps below zero, which must not be
        # mistaken for a genuinely missing equilibrium
        noise = 16.0 * sys.float_info.epsilon * ((1.0 + bs) ** 2 + abs(shortfall))
        if disc < -noise:
            raise NoEquilibriumError(
                f"margin-call branch has no real equilibrium at c={c}"
                f" (discriminant {disc})"
            )
        disc = 0.0
    return 0.5 * (1.0 + bs + math.sqrt(disc))


def capital_threshold(params: MarketParams) -> float:
    """Largest outside capital injection that triggers no margin call.

    Independent of the size of the short position; zero exactly when the
    margin account sits right at maintenance (alpha == mu).
    """
    require_valid(params)
    return (
        (1.0 / params.beta)
        * ((1.0 + params.alpha) / (1.0 + params.mu))
        * ((params.alpha - params.mu) / (1.0 + params.mu))
    )


def squeeze_threshold(params: MarketParams) -> float:
    """Short interest ratio above which the clearing price jumps at c_star."""
    require_valid(params)
    return (1.0 - params.mu + 2.0 * params.alpha) / (
        params.beta * (1.0 + params.mu)
    )


def squeeze_size(params: MarketParams) -> float:
    """Height of the price jump across the margin-call threshold.

    [beta*s - (1 - mu + 2*alpha)/(1 + mu)]^+, strictly positive iff
    s > squeeze_threshold(params).
    """
    require_valid(params)
    return max(
        0.0,
        params.beta * params.s
        - (1.0 - params.mu + 2.0 * params.alpha) / (1.0 + params.mu),
    )


def realized_clearing_price(c: float, params: MarketParams) -> ClearingOutcome:
    """Clearing price realized when no purchase happens that is not forced.

    Fictitious-call construction: price the market as if no call occurs;
    keep that price while it is consistent with the maintenance margin
    (equivalently while c <= c_star), otherwise re-solve on the call branch.
    The threshold case c == c_star takes the no-call value, making the
    price-capital map left-continuous at the jump.
    """
    require_valid(params)
    if c < 0:
        raise DomainError(f"capital must be nonnegative, got {c}")
    # s == 0 can never be margin-called; the threshold formula still returns
    # a finite value there, so guard explicitly.
    if params.s > 0 and c > capital_threshold(params):
        price = call_price(c, params)
        branch = Branch.CALL
        gamma = shares_to_return(price, params)
        margin_called = True
    else:
        price = no_call_price(c, params)
        branch = Branch.NO_CALL
        gamma = 0.0
        margin_called = False
    residual = abs(
        price - 1.0 - params.beta * (c / price + shares_to_return(price, params))
    )
    return ClearingOutcome(
        price=price,
        branch=branch,
        shares_repurchased=gamma,
        margin_called=margin_called,
        residual=residual,
    )


def squeeze_limits(params: MarketParams) -> SqueezeReport:
    """One-sided price limits at the margin-call threshold, plus the gap.

    ``delta`` comes from the closed form (identical to what the one-sided
    limits give, since both branch discriminants collapse to perfect squares
    at c_star), so it matches :func:`squeeze_size` bit for bit.
    """
    c_star = capital_threshold(params)
    delta = squeeze_size(params)
    return SqueezeReport(
        c_star=c_star,
        s_star=squeeze_threshold(params),
        delta=delta,
        p_left=no_call_price(c_star, params),
        p_right=call_price(c_star, params),
        continuous=delta == 0.0,
    )
