"""Capital sweeps, snapshot ingestion, case studies, and serialization.

Everything upstream works in ADV-proportional units with the pre-event
price normalized to 1; this module is the boundary where tabular market
data (shares, dollars) enters and report files leave.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from .analytic import realized_clearing_price, squeeze_limits
from .model import (
    Branch,
    ClearingOutcome,
    DomainError,
    MarketParams,
    PhysicalSnapshot,
    SqueezeReport,
    require_valid,
    to_adv_units,
)
from .oracle import EquilibriumSet


class FormatError(ValueError):
    """Tabular input does not conform to the expected layout."""


class GridKind(enum.Enum):
    """How sweep grid points are placed over [c_min, c_max]."""

    UNIFORM = "uniform"
    # uniform grid plus points at c*-eps, c*, c*+eps so a discontinuity
    # shows up as one adjacent-row gap instead of being smeared
    UNIFORM_PLUS_THRESHOLD = "uniform_plus_threshold"


@dataclass(frozen=True)
class SweepSpec:
    """Range and resolution of a capital sweep (ADV-value fractions)."""

    c_min: float
    c_max: float
    n_points: int
    grid: GridKind = GridKind.UNIFORM_PLUS_THRESHOLD

    def __post_init__(self) -> None:
        if not 0 <= self.c_min < self.c_max:
            raise DomainError(
                f"need 0 <= c_min < c_max, got [{self.c_min}, {self.c_max}]"
            )
        if self.n_points < 2:
            raise DomainError(f"n_points must be at least 2, got {self.n_points}")


@dataclass(frozen=True)
class SweepRow:
    c: float
    price: float
    branch: Branch
    shares_repurchased: float


@dataclass(frozen=True)
class SweepTable:
    """Realized clearing prices over a capital grid.

    ``c_star``/``delta`` are set together, only when the price jumps inside
    the swept range; rows ascend in c and prices never decrease.
    """

    rows: tuple[SweepRow, ...]
    c_star: float | None = None
    delta: float | None = None

    def __post_init__(self) -> None:
        for a, b in zip(self.rows, self.rows[1:]):
            if not a.c < b.c:
                raise DomainError(f"rows not strictly ascending in c at {b.c}")
            if not a.price <= b.price:
                raise DomainError(f"price decreases at c={b.c}")
        if (self.c_star is None) != (self.delta is None):
            raise DomainError("c_star and delta must be set together")


@dataclass(frozen=True)
class CaseStudyReport:
    """Squeeze assessment for one market snapshot, in dollar terms.

    ``post_price_usd`` is the dollar price just above the capital threshold,
    p0 * (p_left + delta); it equals ``pre_price_usd`` scaled by the no-call
    limit when there is no squeeze.
    """

    ticker: str | None
    date: str | None
    s: float
    s_star: float
    c_star: float
    delta: float
    pre_price_usd: float
    post_price_usd: float
    squeeze: bool


def sweep(spec: SweepSpec, params: MarketParams) -> SweepTable:
    """Evaluate the realized clearing price over a capital grid.

    The discontinuity annotation is attached whenever the jump point falls
    inside the swept range, regardless of grid kind.
    """
    require_valid(params)
    limits = squeeze_limits(params)
    grid = np.linspace(spec.c_min, spec.c_max, spec.n_points)
    if spec.grid is GridKind.UNIFORM_PLUS_THRESHOLD:
        eps = 1e-8 * max(1.0, limits.c_star)
        near = [limits.c_star - eps, limits.c_star, limits.c_star + eps]
        keep = [x for x in near if spec.c_min <= x <= spec.c_max]
        grid = np.unique(np.concatenate([grid, keep]))
    rows = []
    for c in grid:
        out = realized_clearing_price(float(c), params)
        rows.append(
            SweepRow(
                c=float(c),
                price=out.price,
                branch=out.branch,
                shares_repurchased=out.shares_repurchased,
            )
        )
    annotated = limits.delta > 0 and spec.c_min <= limits.c_star <= spec.c_max
    return SweepTable(
        rows=tuple(rows),
        c_star=limits.c_star if annotated else None,
        delta=limits.delta if annotated else None,
    )


def case_study(snapshot: PhysicalSnapshot) -> CaseStudyReport:
    """Squeeze thresholds and dollar price levels for one snapshot.

    The squeeze flag is delta > 0, which holds exactly when the short
    interest ratio exceeds its threshold.
    """
    params = to_adv_units(snapshot)
    limits = squeeze_limits(params)
    return CaseStudyReport(
        ticker=snapshot.ticker,
        date=snapshot.date,
        s=params.s,
        s_star=limits.s_star,
        c_star=limits.c_star,
        delta=limits.delta,
        pre_price_usd=snapshot.price_usd,
        post_price_usd=snapshot.price_usd * (limits.p_left + limits.delta),
        squeeze=limits.delta > 0,
    )


_REQUIRED_COLUMNS = ("ticker", "date", "short_shares", "adv_shares", "price_usd")
_PARAM_COLUMNS = ("alpha", "mu", "beta")
_OPTIONAL_COLUMNS = ("shares_outstanding", "float_shares")


def load_snapshots(
    source: str | Path | IO[str],
    *,
    default_alpha: float | None = None,
    default_mu: float | None = None,
    default_beta: float | None = None,
) -> tuple[list[PhysicalSnapshot], list[str]]:
    """Read market snapshots from CSV, validating row by row.

    Per-row parameters fall back to the ``default_*`` arguments when the
    cell is empty or the column absent; a parameter missing from both is a
    row error. Returns (valid snapshots, error strings); a bad row never
    hides the good ones. A missing required column raises
    :class:`FormatError` instead, since then no row can be trusted.
    """
    if isinstance(source, (str, Path)):
        with open(source, newline="", encoding="utf-8") as handle:
            return load_snapshots(
                handle,
                default_alpha=default_alpha,
                default_mu=default_mu,
                default_beta=default_beta,
            )
    reader = csv.DictReader(source)
    header = reader.fieldnames
    if header is None:
        raise FormatError("input has no header row")
    missing = [col for col in _REQUIRED_COLUMNS if col not in header]
    if missing:
        raise FormatError(f"missing required columns: {', '.join(missing)}")
    defaults = {"alpha": default_alpha, "mu": default_mu, "beta": default_beta}
    snapshots: list[PhysicalSnapshot] = []
    errors: list[str] = []
    for line, row in enumerate(reader, start=2):
        try:
            snapshots.append(_parse_row(row, defaults))
        except (DomainError, FormatError, ValueError, ZeroDivisionError) as exc:
            errors.append(f"row {line}: {exc}")
    return snapshots, errors


def _parse_row(
    row: dict[str, str | None], defaults: dict[str, float | None]
) -> PhysicalSnapshot:
    def cell(name: str) -> str:
        value = row.get(name)
        return value.strip() if value is not None else ""

    def number(name: str) -> float:
        text = cell(name)
        if not text:
            raise FormatError(f"missing value for {name}")
        try:
            return float(text)
        except ValueError:
            raise FormatError(f"unparsable number for {name}: {text!r}") from None

    def parameter(name: str) -> float:
        text = cell(name)
        if text:
            try:
                return float(text)
            except ValueError:
                raise FormatError(f"unparsable number for {name}: {text!r}") from None
        if defaults[name] is None:
            raise FormatError(f"no {name} in row and no default given")
        return defaults[name]

    def optional(name: str) -> float | None:
        text = cell(name)
        return float(text) if text else None

    short_shares = number("short_shares")
    adv_shares = number("adv_shares")
    price_usd = number("price_usd")
    beta = parameter("beta")
    if adv_shares <= 0:
        raise DomainError(f"average daily volume must be positive, got {adv_shares}")
    snapshot = PhysicalSnapshot(
        short_shares=short_shares,
        adv_shares=adv_shares,
        impact_per_share=beta / adv_shares,
        price_usd=price_usd,
        mu=parameter("mu"),
        alpha=parameter("alpha"),
        ticker=cell("ticker") or None,
        date=cell("date") or None,
        shares_outstanding=optional("shares_outstanding"),
        float_shares=optional("float_shares"),
    )
    to_adv_units(snapshot)  # validation only; raises DomainError on bad rows
    return snapshot


def _sig12(x: float) -> str:
    return format(x, ".12g")


def _bool_text(flag: bool) -> str:
    return "true" if flag else "false"


def _snapshot_beta(snapshot: PhysicalSnapshot) -> float:
    return snapshot.impact_per_share * snapshot.adv_shares


def _csv_text(header: Iterable[str], rows: Iterable[Iterable[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow(list(row))
    return buffer.getvalue()


def _case_study_rows(reports: list[CaseStudyReport]) -> str:
    header = (
        "ticker",
        "date",
        "s",
        "s_star",
        "c_star",
        "delta",
        "pre_price_usd",
        "post_price_usd",
        "squeeze",
    )
    rows = [
        (
            report.ticker or "",
            report.date or "",
            _sig12(report.s),
            _sig12(report.s_star),
            _sig12(report.c_star),
            _sig12(report.delta),
            _sig12(report.pre_price_usd),
            _sig12(report.post_price_usd),
            _bool_text(report.squeeze),
        )
        for report in reports
    ]
    return _csv_text(header, rows)


def _case_study_json(report: CaseStudyReport) -> dict:
    return {
        "ticker": report.ticker,
        "date": report.date,
        "s": report.s,
        "s_star": report.s_star,
        "c_star": report.c_star,
        "delta": report.delta,
        "pre_price_usd": report.pre_price_usd,
        "post_price_usd": report.post_price_usd,
        "squeeze": report.squeeze,
    }


def _snapshot_rows(snapshots: list[PhysicalSnapshot]) -> str:
    header = _REQUIRED_COLUMNS + _PARAM_COLUMNS + _OPTIONAL_COLUMNS
    rows = []
    for snap in snapshots:
        rows.append(
            (
                snap.ticker or "",
                snap.date or "",
                _sig12(snap.short_shares),
                _sig12(snap.adv_shares),
                _sig12(snap.price_usd),
                _sig12(snap.alpha) if snap.alpha is not None else "",
                _sig12(snap.mu),
                _sig12(_snapshot_beta(snap)),
                _sig12(snap.shares_outstanding)
                if snap.shares_outstanding is not None
                else "",
                _sig12(snap.float_shares) if snap.float_shares is not None else "",
            )
        )
    return _csv_text(header, rows)


def _snapshot_json(snap: PhysicalSnapshot) -> dict:
    return {
        "ticker": snap.ticker,
        "date": snap.date,
        "short_shares": snap.short_shares,
        "adv_shares": snap.adv_shares,
        "price_usd": snap.price_usd,
        "alpha": snap.alpha,
        "mu": snap.mu,
        "beta": _snapshot_beta(snap),
        "shares_outstanding": snap.shares_outstanding,
        "float_shares": snap.float_shares,
    }


def emit(obj, fmt: str = "csv") -> str:
    """Serialize a result object deterministically.

    CSV uses fixed column order, 12 significant digits, and LF line ends;
    JSON carries the same field names with native numbers. Accepts
    SweepTable, CaseStudyReport (or a list of them), ClearingOutcome,
    EquilibriumSet, SqueezeReport-shaped squeeze limits, and
    PhysicalSnapshot lists.
    """
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    payload = _to_payload(obj)
    if fmt == "json":
        return json.dumps(payload.json, indent=2) + "\n"
    return payload.csv


@dataclass(frozen=True)
class _Payload:
    csv: str
    json: object


def _to_payload(obj) -> _Payload:
    if isinstance(obj, SweepTable):
        header = ("c", "price", "branch", "gamma")
        rows = [
            (_sig12(r.c), _sig12(r.price), str(r.branch), _sig12(r.shares_repurchased))
            for r in obj.rows
        ]
        return _Payload(
            csv=_csv_text(header, rows),
            json={
                "rows": [
                    {
                        "c": r.c,
                        "price": r.price,
                        "branch": str(r.branch),
                        "gamma": r.shares_repurchased,
                    }
                    for r in obj.rows
                ],
                "c_star": obj.c_star,
                "delta": obj.delta,
            },
        )
    if isinstance(obj, CaseStudyReport):
        return _Payload(csv=_case_study_rows([obj]), json=_case_study_json(obj))
    if isinstance(obj, ClearingOutcome):
        header = ("price", "branch", "gamma", "margin_called", "residual")
        row = (
            _sig12(obj.price),
            str(obj.branch),
            _sig12(obj.shares_repurchased),
            _bool_text(obj.margin_called),
            _sig12(obj.residual),
        )
        return _Payload(
            csv=_csv_text(header, [row]),
            json={
                "price": obj.price,
                "branch": str(obj.branch),
                "gamma": obj.shares_repurchased,
                "margin_called": obj.margin_called,
                "residual": obj.residual,
            },
        )
    if isinstance(obj, EquilibriumSet):
        header = ("price", "realized")
        rows = [
            (_sig12(p), _bool_text(i == obj.realized_index))
            for i, p in enumerate(obj.prices)
        ]
        return _Payload(
            csv=_csv_text(header, rows),
            json={"prices": list(obj.prices), "realized_index": obj.realized_index},
        )
    if isinstance(obj, SqueezeReport):
        header = ("c_star", "s_star", "delta", "p_left", "p_right", "continuous")
        row = (
            _sig12(obj.c_star),
            _sig12(obj.s_star),
            _sig12(obj.delta),
            _sig12(obj.p_left),
            _sig12(obj.p_right),
            _bool_text(obj.continuous),
        )
        return _Payload(
            csv=_csv_text(header, [row]),
            json={
                "c_star": obj.c_star,
                "s_star": obj.s_star,
                "delta": obj.delta,
                "p_left": obj.p_left,
                "p_right": obj.p_right,
                "continuous": obj.continuous,
            },
        )
    if isinstance(obj, list):
        if all(isinstance(item, CaseStudyReport) for item in obj):
            return _Payload(
                csv=_case_study_rows(obj),
                json=[_case_study_json(item) for item in obj],
            )
        if all(isinstance(item, PhysicalSnapshot) for item in obj):
            return _Payload(
                csv=_snapshot_rows(obj),
                json=[_snapshot_json(item) for item in obj],
            )
        raise TypeError("lists must be homogeneous CaseStudyReport or PhysicalSnapshot")
    raise TypeError(f"cannot serialize {type(obj).__name__}")
