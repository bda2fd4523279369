"""Core market model: parameters, margin mechanics, and unit conversions.

All internal computation runs in units proportional to the asset's average
daily volume (ADV), with the pre-event price normalized to 1:

* ``s``     short interest ratio (shares short / ADV, "days to cover")
* ``beta``  price impact per unit of ADV traded
* ``alpha`` margin-account surplus ratio at the pre-event price, so the
  margin account holds ``m = (1 + alpha) * s`` in ADV-value units
* ``mu``    maintenance margin ratio; a call fires once the account falls
  below ``(1 + mu) * s * p``
* ``c``     externally injected purchase capital as a fraction of ADV value

Physical quantities (shares, dollars) exist only at the ingestion and
reporting boundary, via :class:`PhysicalSnapshot` and the two conversion
functions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class DomainError(ValueError):
    """An input lies outside the function's mathematical domain."""


class Branch(str, enum.Enum):
    """Which consistency regime the clearing price was solved in."""

    NO_CALL = "no_call"
    CALL = "call"

    def __str__(self) -> str:  # so f-strings print the wire value
        return self.value


@dataclass(frozen=True)
class MarketParams:
    """Normalized scenario parameters (ADV-proportional units).

    ``m`` is always derived from ``alpha``; storing both would invite the
    two to drift apart.
    """

    beta: float
    s: float
    alpha: float
    mu: float

    @property
    def m(self) -> float:
        """Margin account in ADV-value units at the pre-event price."""
        return (1.0 + self.alpha) * self.s


@dataclass(frozen=True)
class PhysicalSnapshot:
    """Raw market data for one name, in shares and dollars.

    The margin position may be given either as ``alpha`` directly or as the
    account balance ``margin_account`` (valued at the pre-event price, in
    the same units as ``short_shares``); exactly one of the two is required.
    ``shares_outstanding`` and ``float_shares`` are carried as metadata only.
    """

    short_shares: float
    adv_shares: float
    impact_per_share: float
    price_usd: float
    mu: float
    alpha: float | None = None
    margin_account: float | None = None
    ticker: str | None = None
    date: str | None = None
    shares_outstanding: float | None = None
    float_shares: float | None = None


@dataclass(frozen=True)
class ClearingOutcome:
    """A realized clearing price together with how it was reached.

    ``price`` is normalized (pre-event price = 1), ``shares_repurchased`` is
    the forced buy-in in ADV units, and ``residual`` is the absolute defect
    of the market clearing equation at the reported price.
    """

    price: float
    branch: Branch
    shares_repurchased: float
    margin_called: bool
    residual: float


@dataclass(frozen=True)
class SqueezeReport:
    """Thresholds and one-sided price limits at the margin-call boundary.

    ``p_left``/``p_right`` are the limits of the realized clearing price as
    outside capital approaches ``c_star`` from below/above; their gap
    ``delta`` is the squeeze size, positive exactly when ``s > s_star``.
    """

    c_star: float
    s_star: float
    delta: float
    p_left: float
    p_right: float
    continuous: bool


def validate(params: MarketParams) -> list[str]:
    """Return every violated parameter invariant; empty when valid.

    Total function: never raises, reports all problems at once.
    """
    violations = []
    if not params.beta > 0:
        violations.append(f"beta must be positive, got {params.beta}")
    if not params.s >= 0:
        violations.append(f"s must be nonnegative, got {params.s}")
    if not params.mu > 0:
        violations.append(f"mu must be positive, got {params.mu}")
    if not params.mu <= params.alpha:
        violations.append(
            f"mu must not exceed alpha, got mu={params.mu} alpha={params.alpha}"
        )
    if not violations and not (1.0 + params.mu) * params.s <= params.m:
        # unreachable once mu <= alpha holds; kept as a tripwire
        violations.append(
            f"margin account {params.m} below maintenance requirement at the"
            f" pre-event price"
        )
    return violations


def require_valid(params: MarketParams) -> None:
    """Raise :class:`DomainError` listing all violations, if any."""
    violations = validate(params)
    if violations:
        raise DomainError("; ".join(violations))


def inverse_demand(x: float, params: MarketParams) -> float:
    """Price resulting from purchasing ``x`` (fraction of ADV) on the market.

    Linear impact: price 1 + beta * x, strictly increasing in x.
    """
    if x < 0:
        raise DomainError(f"purchased quantity must be nonnegative, got {x}")
    return 1.0 + params.beta * x


def shares_to_return(p: float, params: MarketParams) -> float:
    """Minimal shares (ADV fraction) the short seller must buy back at price p.

    Zero while the margin account covers maintenance, i.e. while
    p <= m / ((1 + mu) * s); then s - m / ((1 + mu) * p), approaching the
    full short position as p grows.
    """
    if p <= 0:
        raise DomainError(f"price must be positive, got {p}")
    if params.s == 0:
        return 0.0
    return max(0.0, params.s - params.m / ((1.0 + params.mu) * p))


def cash_topup(p: float, params: MarketParams) -> float:
    """Cash (ADV-value units) that would restore the maintenance margin at p.

    The alternative to returning shares. Always at least as expensive:
    shares_to_return(p) * p <= cash_topup(p).
    """
    if p <= 0:
        raise DomainError(f"price must be positive, got {p}")
    return max(0.0, (1.0 + params.mu) * params.s * p - params.m)


def to_adv_units(snapshot: PhysicalSnapshot) -> MarketParams:
    """Convert a physical snapshot to normalized ADV-proportional parameters.

    s = S/V, beta = b*V, and alpha either passed through or recovered from
    the margin account as M/S - 1.
    """
    if snapshot.adv_shares <= 0:
        raise DomainError(
            f"average daily volume must be positive, got {snapshot.adv_shares}"
        )
    if snapshot.short_shares < 0:
        raise DomainError(
            f"short shares must be nonnegative, got {snapshot.short_shares}"
        )
    if snapshot.impact_per_share <= 0:
        raise DomainError(
            f"per-share impact must be positive, got {snapshot.impact_per_share}"
        )
    if snapshot.price_usd <= 0:
        raise DomainError(f"price must be positive, got {snapshot.price_usd}")
    if (snapshot.alpha is None) == (snapshot.margin_account is None):
        raise DomainError(
            "exactly one of alpha or margin_account must be provided"
        )
    if snapshot.alpha is not None:
        alpha = snapshot.alpha
    else:
        if snapshot.short_shares == 0:
            raise DomainError(
                "cannot recover alpha from a margin account with no shares short"
            )
        alpha = snapshot.margin_account / snapshot.short_shares - 1.0
    params = MarketParams(
        beta=snapshot.impact_per_share * snapshot.adv_shares,
        s=snapshot.short_shares / snapshot.adv_shares,
        alpha=alpha,
        mu=snapshot.mu,
    )
    require_valid(params)
    return params


def to_physical_units(
    params: MarketParams, adv_shares: float, price_usd: float
) -> PhysicalSnapshot:
    """Inverse of :func:`to_adv_units` for a given ADV and pre-event price."""
    if adv_shares <= 0:
        raise DomainError(f"average daily volume must be positive, got {adv_shares}")
    if price_usd <= 0:
        raise DomainError(f"price must be positive, got {price_usd}")
    require_valid(params)
    return PhysicalSnapshot(
        short_shares=params.s * adv_shares,
        adv_shares=adv_shares,
        impact_per_share=params.beta / adv_shares,
        price_usd=price_usd,
        mu=params.mu,
        alpha=params.alpha,
    )
