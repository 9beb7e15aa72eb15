"""Calibration: point-to-currency chaining, rate fits, Y(K) regression.

The flow model runs in normalized points (start GDP = 1).  The chain
correction converts a points trajectory to nominal currency with one
linear factor applied to Y and K alike, pinned to the data at a start
and an end year; K/Y survives the conversion untouched.  The module
also fits the decaying lending-share law to data, fits the quadratic
GDP-capital characteristic with its extremes, and bundles the standard
calibration of the German series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .dataset import EconSeries, derive_indicators, frg_dataset
from .errors import DegenerateError, FitError, NoMaximumError, ParameterError, ValidationError
from .model import ModelParams, RateFn, Trajectory, integrate

# Reference calibration constants for the bundled German series: the
# long-run average nominal rate over all assets, the lending-share
# decay scale (virtual start at p_rel0 = 1), and the average savings
# rate used by the baseline runs.
FRG_P_V0 = 0.055
FRG_T_H = 80.0
FRG_PREL0 = 1.0
FRG_P_S = 0.1


@dataclass(frozen=True)
class ChainCorrection:
    """Linear points-to-currency conversion pinned at two years.

    V_i and V_e are the currency-per-point ratios at t_i and t_e;
    intermediate years interpolate linearly, outer years extrapolate
    on the same line.
    """

    V_i: float
    V_e: float
    t_i: int
    t_e: int

    def __post_init__(self) -> None:
        if not self.t_e > self.t_i:
            raise ValidationError(f"t_e must exceed t_i, got {self.t_i}..{self.t_e}")
        if not (self.V_i > 0 and self.V_e > 0):
            raise ValidationError("chain ratios must be positive")

    @property
    def slope(self) -> float:
        return (self.V_e - self.V_i) / (self.t_e - self.t_i)

    def factor(self, t) -> np.ndarray:
        """Conversion factor at calendar time t (scalar or array)."""
        t = np.asarray(t, dtype=float)
        out = self.V_i + self.slope * (t - self.t_i)
        return float(out) if out.ndim == 0 else out


def chain_correction(
    model: Trajectory,
    data: EconSeries,
    t_i: Optional[int] = None,
    t_e: Optional[int] = None,
) -> ChainCorrection:
    """Pin the conversion to the data at two overlap years.

    V = (Y_data + K_data) / (Y_points + K_points), evaluated at t_i and
    t_e (defaults: the first and last years where model and data
    overlap).  A vanishing point sum at either endpoint is degenerate.
    """
    lo = int(max(model.years[0], data.start_year))
    hi = int(min(model.years[-1], data.end_year))
    t_i = lo if t_i is None else t_i
    t_e = hi if t_e is None else t_e
    if not (lo <= t_i <= hi and lo <= t_e <= hi):
        raise ValidationError(
            f"chain endpoints {t_i}, {t_e} outside the overlap {lo}-{hi}"
        )

    ratios = []
    for year in (t_i, t_e):
        pts = model.value_at(year, "Y") + model.value_at(year, "K")
        if abs(pts) < 1e-12:
            raise DegenerateError(f"point sum Y+K vanishes at {year}")
        rec = data.record_for(year)
        ratios.append((rec.gdp + rec.assets) / pts)
    return ChainCorrection(V_i=ratios[0], V_e=ratios[1], t_i=t_i, t_e=t_e)


def apply_chain(
    corr: ChainCorrection,
    trajectory: Trajectory,
    *,
    allow_extrapolation: bool = False,
) -> Trajectory:
    """Convert a points trajectory to currency.

    Y and K are multiplied by the same interpolated factor, so K/Y is
    preserved pointwise.  The recorded derivatives pick up the product
    rule's extra X * dV/dt term.  Years outside [t_i, t_e] require
    allow_extrapolation.
    """
    years = trajectory.years
    if not allow_extrapolation and (
        years[0] < corr.t_i - 1e-9 or years[-1] > corr.t_e + 1e-9
    ):
        raise ValidationError(
            f"trajectory {int(years[0])}-{int(years[-1])} leaves the chain span "
            f"{corr.t_i}-{corr.t_e}; pass allow_extrapolation=True"
        )
    V = corr.factor(years)
    return replace(
        trajectory,
        Y=trajectory.Y * V,
        K=trajectory.K * V,
        dY=trajectory.dY * V + trajectory.Y * corr.slope,
        dK=trajectory.dK * V + trajectory.K * corr.slope,
    )


def normalized_start(data: EconSeries) -> tuple[float, float]:
    """Points initial state (1, K/Y) at the series' first year.

    Normalizing GDP to exactly one point makes the start chain ratio
    equal the first year's nominal GDP identically.
    """
    first = data.records[0]
    return 1.0, first.assets / first.gdp


@dataclass(frozen=True)
class PrelFit:
    """Result of fitting the decaying lending-share law."""

    p_rel0: float
    T_h: float
    rms: float
    iterations: int
    target: str
    constrained: bool


def _prel_model(t: np.ndarray, p_rel0: float, T_h: float) -> np.ndarray:
    # (p_rel0/e) * exp(-(t - T_h)/T_h) collapses to p_rel0 * exp(-t/T_h).
    return p_rel0 * np.exp(-t / T_h)


def fit_prel_exponential(
    series: EconSeries,
    *,
    constrain_prel0: bool = False,
    target: str = "p_rel",
    p_v0: float = FRG_P_V0,
    max_iter: int = 200,
    tol: float = 1e-10,
) -> PrelFit:
    """Least-squares fit of the lending-share decay to a data series.

    target 'p_rel' fits p_rel(t) = (p_rel0/e)*exp(-(t-T_h)/T_h) to the
    observed L/K values; target 'p_n' instead fits the net business
    rate p_v0*(1 - 2*p_rel(t)) implied by the decay to the data-derived
    p_n series (forward differences), which weights the fit by what the
    flow system actually consumes.  With constrain_prel0 the virtual
    start is pinned to p_rel0 = 1.

    The initial guess comes from an ordinary regression in the log
    domain (exact on noiseless decay data); refinement is damped
    Gauss-Newton with a 1e-10 update tolerance and at most 200
    iterations.
    """
    if len(series) < 10:
        raise ValidationError(f"need >= 10 years of data, got {len(series)}")
    if target not in ("p_rel", "p_n"):
        raise ValidationError(f"target must be 'p_rel' or 'p_n', got {target!r}")

    derived = derive_indicators(series)
    t_all = np.array(series.years(), dtype=float) - series.start_year
    prel = np.array(derived.p_rel, dtype=float)

    if target == "p_rel":
        t_obs, obs = t_all, prel
    else:
        pairs = [
            (t, v)
            for t, v in zip(t_all, derived.p_n_via_prel)
            if v is not None
        ]
        t_obs = np.array([p[0] for p in pairs])
        obs = np.array([p[1] for p in pairs])

    # Log-domain initialization on the lending share itself.
    pos = prel > 0
    if pos.sum() < 2:
        raise FitError("not enough positive lending-share values to linearize")
    slope, intercept = np.polyfit(t_all[pos], np.log(prel[pos]), 1)
    if slope >= 0:
        raise FitError(
            f"initial linearization gives no decay (log-slope {slope:.3g} >= 0)"
        )
    T_h = -1.0 / slope
    p_rel0 = 1.0 if constrain_prel0 else min(float(np.exp(intercept)), 1.0)

    def residuals(p0: float, th: float) -> np.ndarray:
        m = _prel_model(t_obs, p0, th)
        if target == "p_rel":
            return m - obs
        return p_v0 * (1.0 - 2.0 * m) - obs

    def jacobian(p0: float, th: float) -> np.ndarray:
        m = _prel_model(t_obs, p0, th)
        dm_dp0 = m / p0
        dm_dth = m * t_obs / th**2
        cols = [dm_dth] if constrain_prel0 else [dm_dp0, dm_dth]
        J = np.column_stack(cols)
        return -2.0 * p_v0 * J if target == "p_n" else J

    theta = np.array([T_h] if constrain_prel0 else [p_rel0, T_h])

    def unpack(th_vec: np.ndarray) -> tuple[float, float]:
        return (1.0, float(th_vec[0])) if constrain_prel0 else (float(th_vec[0]), float(th_vec[1]))

    cost = float(np.sum(residuals(*unpack(theta)) ** 2))
    for iteration in range(1, max_iter + 1):
        J = jacobian(*unpack(theta))
        r = residuals(*unpack(theta))
        delta, *_ = np.linalg.lstsq(J, -r, rcond=None)
        lam = 1.0
        for _ in range(40):
            trial = theta + lam * delta
            p0_t, th_t = unpack(trial)
            if th_t > 0 and p0_t > 0:
                trial_cost = float(np.sum(residuals(p0_t, th_t) ** 2))
                if trial_cost <= cost:
                    break
            lam *= 0.5
        else:
            raise FitError(
                f"no descent step after 40 halvings at iteration {iteration} "
                f"(rms {math.sqrt(cost / len(r)):.3g})"
            )
        theta = theta + lam * delta
        cost = float(np.sum(residuals(*unpack(theta)) ** 2))
        if np.max(np.abs(lam * delta)) <= tol * (1.0 + np.max(np.abs(theta))):
            p0, th = unpack(theta)
            return PrelFit(
                p_rel0=p0,
                T_h=th,
                rms=math.sqrt(cost / len(r)),
                iterations=iteration,
                target=target,
                constrained=constrain_prel0,
            )
    raise FitError(
        f"no convergence in {max_iter} iterations (last rms "
        f"{math.sqrt(cost / len(residuals(*unpack(theta)))):.3g})"
    )


@dataclass(frozen=True)
class QuadraticFit:
    """Coefficients of Y = -a_K*K^2 + b_K*K + c_K.

    b_K is the average capital efficiency (1/year), a_K the repression
    coefficient damping GDP at high capital, c_K the GDP offset.
    """

    a_K: float
    b_K: float
    c_K: float
    residual_rms: float
    n_points: int
    year_range: Optional[tuple[int, int]] = None

    def predict(self, K) -> np.ndarray:
        K = np.asarray(K, dtype=float)
        return -self.a_K * K**2 + self.b_K * K + self.c_K


def fit_quadratic_yk(
    series: Optional[EconSeries] = None,
    *,
    capital: Optional[Sequence[float]] = None,
    gdp: Optional[Sequence[float]] = None,
    year_range: Optional[tuple[int, int]] = None,
) -> QuadraticFit:
    """Ordinary least squares of GDP on (-K^2, K, 1).

    Fit either an EconSeries or explicit capital/gdp arrays (the model
    pipeline fits its own chained arc).  A design matrix without full
    rank (e.g. constant capital) is degenerate.
    """
    if series is not None:
        K = np.array(series.column("assets"), dtype=float)
        Y = np.array(series.column("gdp"), dtype=float)
        year_range = (series.start_year, series.end_year)
    else:
        if capital is None or gdp is None:
            raise ValidationError("pass a series or both capital and gdp arrays")
        K = np.asarray(capital, dtype=float)
        Y = np.asarray(gdp, dtype=float)
    if K.shape != Y.shape or K.ndim != 1:
        raise ValidationError("capital and gdp must be equal-length 1-d arrays")
    if len(K) < 3:
        raise ValidationError(f"need >= 3 points, got {len(K)}")

    design = np.column_stack([-(K**2), K, np.ones_like(K)])
    if np.linalg.matrix_rank(design) < 3:
        raise DegenerateError("design matrix is rank-deficient (constant capital?)")
    coef, *_ = np.linalg.lstsq(design, Y, rcond=None)
    resid = design @ coef - Y
    return QuadraticFit(
        a_K=float(coef[0]),
        b_K=float(coef[1]),
        c_K=float(coef[2]),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        n_points=len(K),
        year_range=year_range,
    )


@dataclass(frozen=True)
class CapitalExtremes:
    """Extremes of the fitted GDP-capital parabola.

    K_max is where GDP peaks, Y_at_K_max the peak GDP; K_E_low/high are
    the capital values where the parabola crosses zero (None when it
    never does).
    """

    K_max: float
    Y_at_K_max: float
    K_E_low: Optional[float]
    K_E_high: Optional[float]


def capital_extremes(fit: QuadraticFit) -> CapitalExtremes:
    a, b, c = fit.a_K, fit.b_K, fit.c_K
    if a <= 0:
        raise NoMaximumError(f"a_K = {a} is not positive; the parabola has no maximum")
    K_max = b / (2.0 * a)
    disc = b * b + 4.0 * a * c
    if disc >= 0:
        half_width = math.sqrt(disc) / (2.0 * a)
        lo, hi = K_max - half_width, K_max + half_width
    else:
        lo = hi = None
    return CapitalExtremes(
        K_max=K_max,
        Y_at_K_max=float(fit.predict(K_max)),
        K_E_low=lo,
        K_E_high=hi,
    )


def basket_price(h: Sequence[float], a: Sequence[float], prices: Sequence[float]) -> float:
    """Weighted basket price: sum over products of h_j * a_j * P_j.

    a values are proportions in [0, 1]; h are the extra summation
    weights that need not be unity.
    """
    h = np.asarray(h, dtype=float)
    a = np.asarray(a, dtype=float)
    p = np.asarray(prices, dtype=float)
    if not (h.shape == a.shape == p.shape):
        raise ValidationError("h, a, and prices must have equal shapes")
    if np.any(a < 0) or np.any(a > 1):
        raise ValidationError("proportions a must lie in [0, 1]")
    return float(np.sum(h * a * p))


def basket_inflation(
    h: Sequence[float],
    a: Sequence[float],
    price_rows: Sequence[Sequence[float]],
) -> list[float]:
    """Year-over-year basket inflation fractions for a price history."""
    levels = [basket_price(h, a, row) for row in price_rows]
    out = []
    for prev, cur in zip(levels, levels[1:]):
        if prev <= 0:
            raise ValidationError("basket price must stay positive")
        out.append(cur / prev - 1.0)
    return out


def population_growth_table(series: EconSeries, t0: Optional[int] = None) -> RateFn:
    """Population growth rates as a per-year table, from the data.

    Forward differences: the rate keyed to offset y covers the year
    [y, y+1).  Useful for injecting observed population steps (e.g. a
    reunification) into the flow system's p_B.
    """
    t0 = series.start_year if t0 is None else t0
    pop = series.column("population")
    years = series.years()
    table = {
        years[i] - t0: (pop[i + 1] - pop[i]) / pop[i] for i in range(len(pop) - 1)
    }
    return RateFn.table(table)


def frg_baseline_params() -> ModelParams:
    """Reference calibration in currency units, starting 1950."""
    first = frg_dataset().records[0]
    return ModelParams(
        Y0=first.gdp,
        K0=first.assets,
        p_v0=FRG_P_V0,
        prel_fn=RateFn.exponential_prel(FRG_PREL0, FRG_T_H),
        p_s=RateFn.constant(FRG_P_S),
        t0=first.year,
    )


def frg_points_params() -> ModelParams:
    """Reference calibration in normalized points (Y0 = 1)."""
    data = frg_dataset()
    Y0, K0 = normalized_start(data)
    return ModelParams(
        Y0=Y0,
        K0=K0,
        p_v0=FRG_P_V0,
        prel_fn=RateFn.exponential_prel(FRG_PREL0, FRG_T_H),
        p_s=RateFn.constant(FRG_P_S),
        t0=data.start_year,
    )


def frg_chained_trajectory(
    *,
    horizon: float = 85.0,
    step: float = 0.25,
    t_e: int = 2010,
    method: str = "rk4",
) -> Trajectory:
    """The standard currency-scaled model arc for the German series.

    Integrates the points calibration, pins the chain at 1950 and t_e,
    and converts the whole recorded arc (the model keeps running past
    t_e on the extrapolated line, to its collapse).
    """
    data = frg_dataset()
    traj = integrate(frg_points_params(), horizon=horizon, step=step, method=method)
    corr = chain_correction(traj, data, t_i=data.start_year, t_e=t_e)
    return apply_chain(corr, traj, allow_extrapolation=True)


def frg_quadratic_fit(
    *,
    data_only: bool = False,
    year_range: Optional[tuple[int, int]] = None,
) -> QuadraticFit:
    """GDP-capital quadratic for the German series.

    By default the fit runs on the chained model arc's yearly samples
    while GDP stays positive, which is what the coefficients' canonical
    values describe; data_only fits the raw table instead (optionally
    restricted to year_range).
    """
    if data_only:
        series = frg_dataset()
        if year_range is not None:
            series = series.window(*year_range)
        return fit_quadratic_yk(series)
    arc = frg_chained_trajectory()
    mask = arc.Y > 0
    fit = fit_quadratic_yk(capital=arc.K[mask], gdp=arc.Y[mask])
    years = arc.years[mask]
    return replace(fit, year_range=(int(years[0]), int(years[-1])))
