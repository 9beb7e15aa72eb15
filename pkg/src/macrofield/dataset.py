"""National economic time series: ingestion, validation, derived indicators.

A series is an annual table of eight aggregates per year (capital stock,
lending, GDP, state debt, savings rate, population, CPI).  The module
bundles the 1950-2012 West German/German series and computes every
indicator that is defined directly on such data: stock ratios, marginal
coefficients, the lending share, two net-business-rate estimators, and
the resource-relative debt ratio.  Threshold-crossing detection for the
phase analysis lives here as well.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import GapError, SchemaError, ValidationError

# Guard for divisions by near-zero annual differences; the marginal
# coefficients are singular wherever the denominator year-over-year
# change vanishes.
EPS_DIV = 1e-9

COLUMNS = (
    "year",
    "assets",
    "loans",
    "gdp",
    "state_debt",
    "savings_rate",
    "population",
    "cpi",
)

# sha256 of the bundled annual table, frozen so provenance is auditable.
FRG_TABLE_SHA256 = "d34b74a15db1a458378285fb62a8a365652ed9e8ce5df6e4a003bf790fe61e99"

_FRG_FILENAME = "frg_table.tsv"

# Header spellings accepted on input, mapped to canonical column names.
# The first eight are the canonical names themselves; the rest match the
# bundled table's original header.
_HEADER_ALIASES = {
    "year": "year",
    "assets": "assets",
    "loans": "loans",
    "gdp": "gdp",
    "state_debt": "state_debt",
    "savings_rate": "savings_rate",
    "population": "population",
    "cpi": "cpi",
    "assets (bn.€)": "assets",
    "loans (bn.€)": "loans",
    "gdp (bn.€)": "gdp",
    "states debt (bn.€)": "state_debt",
    "savings natural [1]": "savings_rate",
    "population in 1000": "population",
    "cpi in % consumer": "cpi",
}


@dataclass(frozen=True)
class EconRecord:
    """One year of national aggregates.

    Units: ``assets`` (total bank balance-sheet capital K), ``loans``
    (lending to non-banks L), ``gdp`` (Y), and ``state_debt`` are in
    billions of currency; ``savings_rate`` is a fraction per year,
    ``population`` is in thousands, ``cpi`` is a fraction per year
    (0.023, never 2.3).
    """

    year: int
    assets: float
    loans: float
    gdp: float
    state_debt: float
    savings_rate: float
    population: float
    cpi: float

    def check(self, row: int | None = None) -> None:
        at = f" (row {row})" if row is not None else ""
        if not self.assets > 0:
            raise ValidationError(f"assets must be > 0, got {self.assets}{at}")
        if not self.gdp > 0:
            raise ValidationError(f"gdp must be > 0, got {self.gdp}{at}")
        if self.loans < 0:
            raise ValidationError(f"loans must be >= 0, got {self.loans}{at}")
        if self.loans > self.assets:
            raise ValidationError(
                f"loans {self.loans} exceed assets {self.assets}; the "
                f"interbank remainder assets - loans must stay >= 0{at}"
            )
        if not 0 < self.savings_rate < 1:
            raise ValidationError(
                f"savings_rate must lie in (0, 1), got {self.savings_rate}{at}"
            )


@dataclass(frozen=True)
class EconSeries:
    """A contiguous run of annual records for one country."""

    country: str
    records: tuple[EconRecord, ...]
    currency_unit: str = "bn €"

    def __post_init__(self) -> None:
        if not self.records:
            raise ValidationError("no records")
        for i, rec in enumerate(self.records, start=1):
            rec.check(row=i)
        years = [r.year for r in self.records]
        for prev, cur in zip(years, years[1:]):
            if cur != prev + 1:
                raise GapError(f"years not contiguous between {prev} and {cur}")

    def __len__(self) -> int:
        return len(self.records)

    @property
    def start_year(self) -> int:
        return self.records[0].year

    @property
    def end_year(self) -> int:
        return self.records[-1].year

    def years(self) -> tuple[int, ...]:
        return tuple(r.year for r in self.records)

    def column(self, name: str) -> tuple[float, ...]:
        if name not in COLUMNS:
            raise SchemaError(f"unknown column {name!r}")
        return tuple(getattr(r, name) for r in self.records)

    def record_for(self, year: int) -> EconRecord:
        idx = year - self.start_year
        if not 0 <= idx < len(self.records):
            raise ValidationError(
                f"year {year} outside series range "
                f"{self.start_year}-{self.end_year}"
            )
        return self.records[idx]

    def window(self, from_year: int | None = None, to_year: int | None = None) -> "EconSeries":
        """Sub-series restricted to [from_year, to_year], inclusive."""
        lo = self.start_year if from_year is None else from_year
        hi = self.end_year if to_year is None else to_year
        picked = tuple(r for r in self.records if lo <= r.year <= hi)
        if not picked:
            raise ValidationError(f"window {lo}-{hi} selects no records")
        return EconSeries(self.country, picked, self.currency_unit)


# Derived indicator columns, in emission order.  Cells that a formula
# does not define (last year for the marginal quantities, vanishing
# denominators) are None, never NaN.
DERIVED_COLUMNS = (
    "k_t",          # K/Y, total capital coefficient
    "y_t",          # Y/K
    "k_c",          # L/Y, lending share of GDP
    "m_m",          # K - L, interbank/own-business capital
    "k_m",          # (K - L)/Y
    "k_i",          # dY/dK, marginal GDP per unit of added capital
    "y_i",          # dK/dY, marginal capital per unit of added GDP
    "p_rel",        # L/K, direct-lending share of capital
    "p_v",          # dK/K, average growth rate of capital
    "p_n_via_prel",     # p_v * (1 - 2*p_rel)
    "p_n_residual",     # (dK - p_s*Y)/K
    "debt_ratio",   # state debt over the dominant resource (Y or K)
)


@dataclass(frozen=True)
class DerivedSeries:
    """Per-year indicator values derived from one EconSeries."""

    years: tuple[int, ...]
    k_t: tuple[Optional[float], ...]
    y_t: tuple[Optional[float], ...]
    k_c: tuple[Optional[float], ...]
    m_m: tuple[Optional[float], ...]
    k_m: tuple[Optional[float], ...]
    k_i: tuple[Optional[float], ...]
    y_i: tuple[Optional[float], ...]
    p_rel: tuple[Optional[float], ...]
    p_v: tuple[Optional[float], ...]
    p_n_via_prel: tuple[Optional[float], ...]
    p_n_residual: tuple[Optional[float], ...]
    debt_ratio: tuple[Optional[float], ...]

    def column(self, name: str) -> tuple[Optional[float], ...]:
        if name not in DERIVED_COLUMNS:
            raise SchemaError(f"unknown derived column {name!r}")
        return getattr(self, name)

    def value(self, name: str, year: int) -> Optional[float]:
        return self.column(name)[self.years.index(year)]


def _detect_delimiter(header: str) -> str:
    if "\t" in header:
        return "\t"
    if ";" in header:
        return ";"
    return ","


def _to_float(cell: str, *, decimal_comma: bool, row: int, col: str) -> float:
    text = cell.strip()
    if decimal_comma:
        text = text.replace(",", ".")
    try:
        return float(text)
    except ValueError:
        raise ValidationError(
            f"cannot parse {cell!r} as a number in column {col!r} (row {row})"
        ) from None


def parse_series(
    text: str,
    *,
    decimal_comma: bool = False,
    percent_columns: Iterable[str] = (),
    country: str = "",
    currency_unit: str = "bn €",
) -> EconSeries:
    """Parse a delimited annual table into a validated EconSeries.

    The delimiter (tab, semicolon, or comma) is detected from the header
    row, which must name exactly the eight columns (canonical names or
    the bundled table's original spellings).  With ``decimal_comma``,
    numerals like ``19,966`` are read as 19.966; columns listed in
    ``percent_columns`` are divided by 100 after parsing.
    """
    percent = set(percent_columns)
    unknown_pct = percent - set(COLUMNS)
    if unknown_pct:
        raise SchemaError(f"percent_columns not in schema: {sorted(unknown_pct)}")

    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValidationError("no records")
    delim = _detect_delimiter(lines[0])
    if decimal_comma and delim == ",":
        raise ValidationError(
            "decimal_comma input cannot be comma-delimited; use ';' or tabs"
        )

    header = [h.strip().casefold() for h in lines[0].split(delim)]
    mapped = []
    for name in header:
        canon = _HEADER_ALIASES.get(name)
        if canon is None:
            raise SchemaError(f"unexpected column {name!r}")
        mapped.append(canon)
    missing = [c for c in COLUMNS if c not in mapped]
    if missing:
        raise SchemaError(f"missing column {missing[0]!r}")
    if len(mapped) != len(set(mapped)):
        dupes = sorted({c for c in mapped if mapped.count(c) > 1})
        raise SchemaError(f"duplicated column {dupes[0]!r}")

    records = []
    for row_no, line in enumerate(lines[1:], start=1):
        cells = line.split(delim)
        if len(cells) != len(mapped):
            raise ValidationError(
                f"expected {len(mapped)} fields, got {len(cells)} (row {row_no})"
            )
        values: dict[str, float] = {}
        for col, cell in zip(mapped, cells):
            val = _to_float(cell, decimal_comma=decimal_comma, row=row_no, col=col)
            if col in percent:
                val /= 100.0
            values[col] = val
        year = values.pop("year")
        if year != int(year):
            raise ValidationError(f"year {year} is not an integer (row {row_no})")
        rec = EconRecord(year=int(year), **values)
        rec.check(row=row_no)
        records.append(rec)
    if not records:
        raise ValidationError("no records")
    return EconSeries(country=country, records=tuple(records), currency_unit=currency_unit)


def serialize_series(series: EconSeries) -> str:
    """Emit a series as point-decimal CSV that parse_series round-trips."""
    out = [",".join(COLUMNS)]
    for rec in series.records:
        cells = [str(rec.year)]
        for name in COLUMNS[1:]:
            cells.append(repr(getattr(rec, name)))
        out.append(",".join(cells))
    return "\n".join(out) + "\n"


def _data_dir() -> Path:
    override = os.environ.get("MACROFIELD_DATA_DIR")
    if override:
        return Path(override)
    return Path(str(resources.files("macrofield") / "data"))


def frg_table_path() -> Path:
    """Location of the bundled (or overridden) annual table."""
    return _data_dir() / _FRG_FILENAME


def frg_table_checksum() -> str:
    """sha256 hex digest of the table file as stored on disk."""
    return hashlib.sha256(frg_table_path().read_bytes()).hexdigest()


@lru_cache(maxsize=8)
def _load_series(path_str: str) -> EconSeries:
    text = Path(path_str).read_text(encoding="utf-8")
    return parse_series(
        text,
        decimal_comma=True,
        percent_columns=("cpi",),
        country="FRG",
        currency_unit="bn €",
    )


def frg_dataset() -> EconSeries:
    """The bundled German annual series, 1950-2012 (63 records).

    Capital and lending are bank balance-sheet totals, GDP and state
    debt are nominal, the savings rate is a natural fraction, and CPI
    is converted from the stored percent column to a fraction.  Set
    MACROFIELD_DATA_DIR to load a like-named table from elsewhere.
    """
    return _load_series(str(frg_table_path()))


def _forward_diff(vals: Sequence[float]) -> list[Optional[float]]:
    out: list[Optional[float]] = [vals[i + 1] - vals[i] for i in range(len(vals) - 1)]
    out.append(None)
    return out


def _ratio(num: Optional[float], den: Optional[float]) -> Optional[float]:
    if num is None or den is None or abs(den) < EPS_DIV:
        return None
    return num / den


def derive_indicators(series: EconSeries) -> DerivedSeries:
    """Compute all per-year indicators on a series.

    Marginal quantities use forward differences df = f(t+1) - f(t) and
    are absent for the last year; they are also absent wherever the
    denominator difference is below EPS_DIV, since the marginal
    coefficients are singular there.
    """
    K = series.column("assets")
    L = series.column("loans")
    Y = series.column("gdp")
    S = series.column("state_debt")
    p_s = series.column("savings_rate")
    n = len(series)

    dK = _forward_diff(K)
    dY = _forward_diff(Y)

    k_t = [K[i] / Y[i] for i in range(n)]
    y_t = [Y[i] / K[i] for i in range(n)]
    k_c = [L[i] / Y[i] for i in range(n)]
    m_m = [K[i] - L[i] for i in range(n)]
    k_m = [m_m[i] / Y[i] for i in range(n)]
    p_rel = [L[i] / K[i] for i in range(n)]
    k_i = [_ratio(dY[i], dK[i]) for i in range(n)]
    y_i = [_ratio(dK[i], dY[i]) for i in range(n)]
    p_v = [_ratio(dK[i], K[i]) for i in range(n)]
    p_n_via_prel = [
        None if p_v[i] is None else p_v[i] * (1.0 - 2.0 * p_rel[i]) for i in range(n)
    ]
    p_n_residual = [
        None if dK[i] is None else (dK[i] - p_s[i] * Y[i]) / K[i] for i in range(n)
    ]
    debt_ratio = [S[i] / Y[i] if k_t[i] < 1.0 else S[i] / K[i] for i in range(n)]

    return DerivedSeries(
        years=series.years(),
        k_t=tuple(k_t),
        y_t=tuple(y_t),
        k_c=tuple(k_c),
        m_m=tuple(m_m),
        k_m=tuple(k_m),
        k_i=tuple(k_i),
        y_i=tuple(y_i),
        p_rel=tuple(p_rel),
        p_v=tuple(p_v),
        p_n_via_prel=tuple(p_n_via_prel),
        p_n_residual=tuple(p_n_residual),
        debt_ratio=tuple(debt_ratio),
    )


def derive_p_n(series: EconSeries, estimator: str = "via_p_rel") -> tuple[Optional[float], ...]:
    """Two data estimators of the net business rate.

    ``via_p_rel`` returns p_v * (1 - 2*p_rel) with p_v = dK/K; the
    ``capital_residual`` estimator rearranges the capital balance to
    (dK - p_s*Y)/K.  Both use forward differences, so the last year is
    absent.  The two do not agree on historical data -- the residual
    carries everything the simple balance omits -- which is why both
    are exposed and neither is canonical.
    """
    derived = derive_indicators(series)
    if estimator == "via_p_rel":
        return derived.p_n_via_prel
    if estimator == "capital_residual":
        return derived.p_n_residual
    raise ValidationError(
        f"unknown estimator {estimator!r}; use 'via_p_rel' or 'capital_residual'"
    )


def find_crossing(
    values: Sequence[Optional[float]],
    threshold: float,
    direction: str = "up",
    *,
    years: Sequence[int] | None = None,
) -> Optional[int]:
    """First year (or index) where a series crosses a threshold.

    ``up`` reports the first position whose predecessor is strictly
    below the threshold while the position itself is at or above it;
    ``down`` mirrors that.  Pairs with an absent member cannot cross.
    Returns None when the series never crosses.
    """
    if direction not in ("up", "down"):
        raise ValidationError(f"direction must be 'up' or 'down', got {direction!r}")
    if years is not None and len(years) != len(values):
        raise ValidationError("years and values must have equal length")
    for i in range(1, len(values)):
        prev, cur = values[i - 1], values[i]
        if prev is None or cur is None:
            continue
        if direction == "up" and prev < threshold <= cur:
            return years[i] if years is not None else i
        if direction == "down" and prev > threshold >= cur:
            return years[i] if years is not None else i
    return None
