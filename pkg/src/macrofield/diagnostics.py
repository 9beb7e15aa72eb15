"""Monetary and fiscal diagnostics on data series and model runs.

Quantity-equation conformity, velocity, price level, inflation
analytics, the public-debt model, the resource-relative debt ratio,
crisis-phase classification, product substitution, systemic importance,
the savings identity, and two interest-rate estimators.

Convention: diagnostics computed on an annual data series use backward
differences dX(T) = X(T) - X(T-1), labeled at T, so a year's value
reflects the year that just ended; the first year has no value.  (The
indicator derivation in the dataset module uses forward differences by
contract; the two conventions are deliberate and documented.)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .dataset import EconSeries, derive_indicators, find_crossing
from .errors import DomainError, SingularityError, ValidationError
from .model import ModelParams, Trajectory, net_business_rate

# One purchase per person per day: the default estimate for the annual
# purchase count when only population data is available.
PURCHASES_PER_PERSON_YEAR = 365.0

_INFLATION_METHODS = (
    "structural",
    "core",
    "core_simplified",
    "house_number",
    "data_cpi",
)


def quantity_check(Y: float, dK_dt: float, p_s: float) -> float:
    """Turnover ratio ((1-p_s)*Y + (1+p_s)*dK/dt) / Y.

    The numerator is the money current through the economy: consumption
    spending plus the savings-augmented capital growth.  The ratio is 1
    exactly when capital growth is fully funded by domestic savings out
    of GDP; on historical data the residual measures external sources.
    """
    if not Y > 0:
        raise DomainError(f"Y must be > 0, got {Y}")
    return ((1.0 - p_s) * Y + (1.0 + p_s) * dK_dt) / Y


def quantity_check_series(series: EconSeries) -> list[tuple[int, float]]:
    """Per-year turnover ratios with backward capital differences."""
    K = series.column("assets")
    Y = series.column("gdp")
    p_s = series.column("savings_rate")
    years = series.years()
    return [
        (years[i], quantity_check(Y[i], K[i] - K[i - 1], p_s[i]))
        for i in range(1, len(years))
    ]


def velocity(Y: float, K: float, dK_dt: float, p_s: float, c: float = 1.0) -> float:
    """Monetary velocity V = c * ((1-p_s)*Y + (1+p_s)*dK/dt) / K, 1/year."""
    if not K > 0:
        raise DomainError(f"K must be > 0, got {K}")
    return c * ((1.0 - p_s) * Y + (1.0 + p_s) * dK_dt) / K


def naive_velocity(Y: float, K: float) -> float:
    """The bare quantity-equation estimate V = Y/K."""
    if not K > 0:
        raise DomainError(f"K must be > 0, got {K}")
    return Y / K


def price_level(K: float, V: float, H: float) -> float:
    """Average price per purchase, P = K*V/H.

    K in billions of currency, V in 1/year, H in billions of purchases
    per year.
    """
    if not H > 0:
        raise DomainError(f"H must be > 0, got {H}")
    return K * V / H


@dataclass(frozen=True)
class QEState:
    """One year's quantity-equation state: K*V and H*P both equal the
    currency flow Y when the balance holds; the residuals report how
    far the data sits from it."""

    K: float
    V: float
    H: float
    P: float
    Y: float

    @property
    def capital_flow(self) -> float:
        return self.K * self.V

    @property
    def trade_flow(self) -> float:
        return self.H * self.P

    def residuals(self) -> tuple[float, float]:
        """(K*V - Y, H*P - Y)."""
        return self.capital_flow - self.Y, self.trade_flow - self.Y


@dataclass(frozen=True)
class BalanceRow:
    """One year of the capital-burden balance.

    debt_burden is the year's capital growth dK, compensation the
    (savings + population-growth) share of GDP, and a0_required =
    p_s*Y - dK the external capital term that would close the balance:
    negative means the year needed that much inflow beyond savings
    (an outflow of claims), positive means savings exceeded the burden.
    """

    year: int
    debt_burden: float
    compensation: float
    a0_required: float
    flow: str
    burden_to_savings: Optional[float]


def balance_report(obj: Union[EconSeries, Trajectory]) -> list[BalanceRow]:
    """Per-year balance between capital growth and savings."""
    if isinstance(obj, EconSeries):
        years = obj.years()
        K = obj.column("assets")
        Y = obj.column("gdp")
        p_s = obj.column("savings_rate")
        pop = obj.column("population")
        p_B = [None] + [
            (pop[i] - pop[i - 1]) / pop[i - 1] for i in range(1, len(pop))
        ]
    else:
        years = [int(y) for y in obj.years]
        K, Y, p_s = obj.K, obj.Y, obj.p_s
        p_B = [None] + [float(b) for b in obj.p_B[1:]]

    rows = []
    for i in range(1, len(years)):
        dK = K[i] - K[i - 1]
        savings = p_s[i] * Y[i]
        a0_req = savings - dK
        if a0_req < 0:
            flow = "outflow"
        elif a0_req > 0:
            flow = "inflow"
        else:
            flow = "balanced"
        rows.append(
            BalanceRow(
                year=int(years[i]),
                debt_burden=float(dK),
                compensation=float((p_s[i] + (p_B[i] or 0.0)) * Y[i]),
                a0_required=float(a0_req),
                flow=flow,
                burden_to_savings=float(dK / savings) if savings != 0 else None,
            )
        )
    return rows


def core_inflation_simplified(p_w: float) -> float:
    """I_c ~ p_w * (1 + p_w): core inflation from the GDP rate alone."""
    return p_w * (1.0 + p_w)


def house_number_inflation(p_w: float, p_va: float) -> float:
    """The rough mean (p_w + p_va)/2 of the GDP rate and the asset rate."""
    return 0.5 * (p_w + p_va)


def _core_inflation(p_w, p_v, Y, K):
    den = Y + p_v * K
    if abs(den) < 1e-12:
        return None
    return p_w**2 + (p_w * Y + p_v**2 * K) / den


def inflation_series(
    obj: Union[EconSeries, Trajectory],
    method: str = "core",
    *,
    p_va: Optional[Sequence[float]] = None,
    h_mode: str = "quasi_stable",
) -> list[tuple[int, float]]:
    """Per-year inflation fractions by one of five methods.

    core evaluates I_c = p_w^2 + (p_w*Y + p_v^2*K)/(Y + p_v*K) with
    p_w = (dY/dt)/Y and p_v = (dK/dt)/K; core_simplified uses
    p_w*(1 + p_w); house_number averages p_w with the asset rate
    (default: p_v, overridable via p_va); structural evaluates
    I = (V/Y) * (dK/dt - K*(Hdot/H + Vdot/V)) with the trade count H
    either quasi-stable (Hdot/H = p_w, the pre-crisis closure) or from
    population data (h_mode='population'); data_cpi returns the series'
    official CPI column.

    On a Trajectory the rates are the recorded instantaneous
    derivatives (this is the replica of the long-horizon inflation
    charts); on an EconSeries they are backward annual differences.
    Years beyond a GDP collapse are undefined and omitted.
    """
    if method not in _INFLATION_METHODS:
        raise ValidationError(
            f"method must be one of {_INFLATION_METHODS}, got {method!r}"
        )

    if isinstance(obj, Trajectory):
        if method == "data_cpi":
            raise ValidationError("data_cpi needs a data series, not a trajectory")
        mask = (obj.Y > 0) & (obj.K > 0)
        years = obj.years[mask].astype(int)
        Y, K = obj.Y[mask], obj.K[mask]
        p_w = obj.dY[mask] / Y
        p_v = obj.dK[mask] / K
        first = 0
    else:
        years_t = obj.years()
        Yc = obj.column("gdp")
        Kc = obj.column("assets")
        years = np.array(years_t[1:], dtype=int)
        Y = np.array(Yc[1:])
        K = np.array(Kc[1:])
        p_w = np.array([(Yc[i] - Yc[i - 1]) / Yc[i - 1] for i in range(1, len(Yc))])
        p_v = np.array([(Kc[i] - Kc[i - 1]) / Kc[i - 1] for i in range(1, len(Kc))])
        first = 0
        if method == "data_cpi":
            cpi = obj.column("cpi")
            return [(y, float(c)) for y, c in zip(years_t, cpi)]

    if p_va is not None:
        p_va_arr = np.asarray(p_va, dtype=float)
        if p_va_arr.shape != p_w.shape:
            raise ValidationError("p_va must match the defined-years length")
    else:
        p_va_arr = p_v

    out: list[tuple[int, float]] = []
    if method == "core":
        for i in range(first, len(years)):
            val = _core_inflation(p_w[i], p_v[i], Y[i], K[i])
            if val is not None:
                out.append((int(years[i]), float(val)))
    elif method == "core_simplified":
        out = [
            (int(years[i]), core_inflation_simplified(float(p_w[i])))
            for i in range(first, len(years))
        ]
    elif method == "house_number":
        out = [
            (int(years[i]), house_number_inflation(float(p_w[i]), float(p_va_arr[i])))
            for i in range(first, len(years))
        ]
    else:  # structural
        if h_mode not in ("quasi_stable", "population"):
            raise ValidationError("h_mode must be 'quasi_stable' or 'population'")
        if isinstance(obj, Trajectory):
            p_s = obj.p_s[(obj.Y > 0) & (obj.K > 0)]
            dK = p_v * K
            V = ((1.0 - p_s) * Y + (1.0 + p_s) * dK) / K
            h_rate = p_w  # quasi-stable closure; no population on a trajectory
            if h_mode == "population":
                raise ValidationError("population h_mode needs a data series")
        else:
            p_s = np.array(obj.column("savings_rate")[1:])
            dK = p_v * K
            V = ((1.0 - p_s) * Y + (1.0 + p_s) * dK) / K
            if h_mode == "population":
                pop = np.array(obj.column("population")[1:])
                h_rate = np.empty_like(V)
                h_rate[0] = np.nan
                h_rate[1:] = (pop[1:] - pop[:-1]) / pop[:-1]
            else:
                h_rate = p_w
        for i in range(1, len(years)):
            if V[i - 1] == 0 or not np.isfinite(h_rate[i]):
                continue
            v_rate = (V[i] - V[i - 1]) / V[i - 1]
            val = (V[i] / Y[i]) * (dK[i] - K[i] * (h_rate[i] + v_rate))
            out.append((int(years[i]), float(val)))
    return out


def crisis_trade_volume(Y: float, P_dot: float, t_since_Tk: float) -> float:
    """Trade-count change dH = (Y/Pdot) / t' in the post-peak regime.

    Deflation (falling prices) shrinks trade; the effect fades as 1/t'
    with distance from the peak year.
    """
    if t_since_Tk == 0:
        raise SingularityError("t_since_Tk must be nonzero")
    if not t_since_Tk > 0:
        raise ValidationError(f"t_since_Tk must be > 0, got {t_since_Tk}")
    if P_dot == 0:
        raise SingularityError("P_dot must be nonzero")
    return (Y / P_dot) / t_since_Tk


def debt_path(
    series: EconSeries,
    p_A: float,
    S0: float,
    *,
    tranche: str = "gdp_savings",
    compounding: str = "origin",
) -> list[tuple[int, float]]:
    """Modeled state debt from accumulated, interest-bearing savings.

    Each year contributes a tranche: with tranche='gdp_savings' (the
    literal accumulation law) the year's savings share of GDP,
    p_s(tau)*Y(tau), summed from the first year through the evaluation
    year; with 'capital_increment' the savings share of the year's
    capital growth, p_s(tau)*dK(tau) (forward difference), summed over
    years strictly before the evaluation year.

    compounding='origin' multiplies each tranche by (1+p_A)^(tau-T0)
    and leaves S0 flat, exactly the literal law (p_A = 0 reduces to a
    plain cumulative sum plus S0).  'to_date' compounds every tranche
    and S0 forward to the evaluation year, (1+p_A)^(T-tau) -- the
    variant that tracks the official German debt within +-30%.
    """
    if p_A < 0:
        raise ValidationError(f"p_A must be >= 0, got {p_A}")
    if tranche not in ("gdp_savings", "capital_increment"):
        raise ValidationError(f"unknown tranche {tranche!r}")
    if compounding not in ("origin", "to_date"):
        raise ValidationError(f"unknown compounding {compounding!r}")

    years = np.array(series.years())
    Y = np.array(series.column("gdp"))
    K = np.array(series.column("assets"))
    p_s = np.array(series.column("savings_rate"))
    T0 = years[0]
    n = len(years)

    if tranche == "gdp_savings":
        tranche_years = years
        tranches = p_s * Y
        inclusive = True
    else:
        tranche_years = years[:-1]
        tranches = p_s[:-1] * (K[1:] - K[:-1])
        inclusive = False

    out = []
    for j in range(n):
        T = years[j]
        if compounding == "origin":
            base = S0
            weights = (1.0 + p_A) ** (tranche_years - T0)
        else:
            base = S0 * (1.0 + p_A) ** (T - T0)
            weights = (1.0 + p_A) ** (T - tranche_years)
        cutoff = tranche_years <= T if inclusive else tranche_years < T
        out.append((int(T), float(base + np.sum(tranches[cutoff] * weights[cutoff]))))
    return out


@dataclass(frozen=True)
class DebtRatioRow:
    year: int
    ratio: float
    base: str


def debt_ratio(series: EconSeries) -> list[DebtRatioRow]:
    """State debt over the dominant resource: GDP while K/Y < 1,
    capital from the year K/Y reaches 1 (the tie goes to capital)."""
    rows = []
    for rec in series.records:
        if rec.assets / rec.gdp < 1.0:
            rows.append(DebtRatioRow(rec.year, rec.state_debt / rec.gdp, "gdp"))
        else:
            rows.append(DebtRatioRow(rec.year, rec.state_debt / rec.assets, "capital"))
    return rows


@dataclass(frozen=True)
class PhaseReport:
    """Crisis-phase classification of a series.

    crossings holds the first year each threshold is reached (None if
    never): capital coefficient over 1 and over 3, lending share of
    GDP over 1, direct-lending share under 1/2, state debt over GDP,
    and state debt over the quota of loans.  The per-year phase id is
    1 plus the number of core thresholds (the first four) already
    crossed -- thresholds are detected independently and may coincide.
    """

    years: tuple[int, ...]
    phase: tuple[int, ...]
    crossings: dict
    quota: float


_CORE_THRESHOLDS = ("kt_ge_1", "loans_gdp_ge_1", "p_rel_le_half", "kt_ge_3")


def phase_classify(series: EconSeries, quota: float = 0.5) -> PhaseReport:
    derived = derive_indicators(series)
    years = series.years()
    S = series.column("state_debt")
    L = series.column("loans")
    Y = series.column("gdp")

    debt_gdp = [S[i] / Y[i] for i in range(len(years))]
    debt_loans = [S[i] / L[i] if L[i] > 0 else None for i in range(len(years))]

    crossings = {
        "kt_ge_1": find_crossing(derived.k_t, 1.0, "up", years=years),
        "loans_gdp_ge_1": find_crossing(derived.k_c, 1.0, "up", years=years),
        "p_rel_le_half": find_crossing(derived.p_rel, 0.5, "down", years=years),
        "kt_ge_3": find_crossing(derived.k_t, 3.0, "up", years=years),
        "debt_gdp_ge_1": find_crossing(debt_gdp, 1.0, "up", years=years),
        "debt_loans_ge_quota": find_crossing(debt_loans, quota, "up", years=years),
    }
    phase = []
    for y in years:
        crossed = sum(
            1
            for key in _CORE_THRESHOLDS
            if crossings[key] is not None and y >= crossings[key]
        )
        phase.append(1 + crossed)
    return PhaseReport(
        years=years, phase=tuple(phase), crossings=crossings, quota=quota
    )


def substitution_trajectory(
    H0x: float,
    P0x: float,
    H0y: float,
    P0y: float,
    *,
    h_min: float,
    t0: float,
    t_sh: float,
    t,
):
    """Trading-volume transfer from product x to its substitute y.

    x's volume decays from H0x*P0x toward the floor h_min*H0x*P0x on
    the switching scale t_sh, starting at t0; whatever x loses, y
    gains, so the combined volume is conserved exactly and the two
    rates are antisymmetric.  Returns {'hp_x', 'hp_y', 'rate_x',
    'rate_y'} (scalars or arrays, matching t).
    """
    if not 0.0 <= h_min <= 1.0:
        raise ValidationError(f"h_min must lie in [0, 1], got {h_min}")
    if not t_sh > 0:
        raise ValidationError(f"t_sh must be > 0, got {t_sh}")
    t_arr = np.asarray(t, dtype=float)
    elapsed = np.maximum(t_arr - t0, 0.0)
    decay = np.exp(-elapsed / t_sh)
    s = 1.0 - (1.0 - h_min) * (1.0 - decay)
    vol_x = H0x * P0x
    hp_x = vol_x * s
    hp_y = H0y * P0y + vol_x * (1.0 - s)
    rate_x = np.where(
        t_arr > t0, -vol_x * (1.0 - h_min) / t_sh * decay, 0.0
    )
    rate_y = -rate_x
    if t_arr.ndim == 0:
        return {
            "hp_x": float(hp_x),
            "hp_y": float(hp_y),
            "rate_x": float(rate_x),
            "rate_y": float(rate_y),
        }
    return {"hp_x": hp_x, "hp_y": hp_y, "rate_x": rate_x, "rate_y": rate_y}


def systemic_importance(residual: float, dY_dt: float) -> bool:
    """A producer is systemically important when the economy-wide
    residual of removing it reaches the GDP trend, R >= dY/dt
    (boundary inclusive; any R qualifies once growth turns negative)."""
    return residual >= dY_dt


@dataclass(frozen=True)
class SavingsIdentity:
    """Split of total savings into the classical and interest parts."""

    S_total: float
    classical_part: float
    interest_part: float
    gap: float


def savings_identity(
    Y: float,
    K: float,
    dK_dt: float,
    p_s: float,
    p_n: float,
    a0: float = 0.0,
) -> SavingsIdentity:
    """Total savings S = p_s*Y + p_n*K and its gap against dK/dt.

    The interest part p_n*K is negligible while K/Y is small and
    dominates once the capital coefficient is large; the gap reports
    what external inflows (a0) or unmodeled flows must cover.
    """
    classical = p_s * Y
    interest = p_n * K
    total = classical + interest
    return SavingsIdentity(
        S_total=total,
        classical_part=classical,
        interest_part=interest,
        gap=dK_dt - total - a0,
    )


@dataclass(frozen=True)
class InterestEstimates:
    supply_demand: float
    commutator: float


def interest_estimators(
    Y: float, K: float, dY_dt: float, c: float = 0.125
) -> InterestEstimates:
    """Two average-interest estimators.

    supply_demand = c*Y/K prices capital by scarcity relative to GDP
    (c = 1/8 matches the long-run German average); commutator =
    (dY/dt)*Y/K^2 reads the rate off the growth the capital actually
    produces.  Both vanish as K grows without bound.
    """
    if not K > 0:
        raise DomainError(f"K must be > 0, got {K}")
    return InterestEstimates(
        supply_demand=c * Y / K,
        commutator=dY_dt * Y / (K * K),
    )


@dataclass(frozen=True)
class LotkaVolterraMap:
    alpha: float
    beta: float


def lotka_volterra_map(
    params: ModelParams, Y: float, K: float, t: float = 0.0
) -> LotkaVolterraMap:
    """Predator-prey coefficients equivalent to the flow system at one
    state: alpha = p_n/Y and beta = p_s/K make alpha*Y*K and beta*Y*K
    reproduce the p_n*K and p_s*Y terms exactly at (Y, K)."""
    if not (Y > 0 and K > 0):
        raise DomainError(f"Y and K must be > 0, got Y={Y}, K={K}")
    return LotkaVolterraMap(
        alpha=net_business_rate(params, t) / Y,
        beta=params.p_s(t) / K,
    )
