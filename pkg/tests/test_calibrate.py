"""Chaining, lending-share decay fits, and the GDP-capital quadratic."""

import math

import numpy as np
import pytest

import macrofield as mf
from macrofield.model import Trajectory

APPROX = pytest.approx


def synth_series(years, loans_fn, assets=100.0):
    recs = tuple(
        mf.EconRecord(
            year=y,
            assets=assets,
            loans=loans_fn(i),
            gdp=50.0 + i,
            state_debt=10.0,
            savings_rate=0.1,
            population=1000.0,
            cpi=0.02,
        )
        for i, y in enumerate(years)
    )
    return mf.EconSeries("X", recs)


# ------------------------------------------------------------------- chain


def test_chain_correction_validation():
    with pytest.raises(mf.ValidationError):
        mf.ChainCorrection(V_i=1.0, V_e=2.0, t_i=2010, t_e=2000)
    with pytest.raises(mf.ValidationError):
        mf.ChainCorrection(V_i=-1.0, V_e=2.0, t_i=2000, t_e=2010)


def test_chain_correction_factor_interpolates():
    corr = mf.ChainCorrection(V_i=10.0, V_e=20.0, t_i=2000, t_e=2010)
    assert corr.slope == APPROX(1.0)
    assert corr.factor(2000) == 10.0
    assert corr.factor(2005) == APPROX(15.0)
    assert corr.factor(2015) == APPROX(25.0)     # extrapolates the line
    out = corr.factor(np.array([2000.0, 2010.0]))
    assert out.tolist() == [10.0, 20.0]


def test_chain_correction_reference_ratios(points_traj, frg):
    corr = mf.chain_correction(points_traj, frg, t_i=1950, t_e=2010)
    # normalized start GDP of one point makes V_i the 1950 nominal GDP
    assert corr.V_i == APPROX(52.582, rel=1e-12)
    assert corr.V_e == APPROX(620.1781, abs=1e-3)
    assert corr.slope == APPROX(9.4599, abs=1e-3)


def test_chain_correction_endpoint_window(points_traj, frg):
    with pytest.raises(mf.ValidationError, match="overlap"):
        mf.chain_correction(points_traj, frg, t_i=1950, t_e=2040)


def test_chain_correction_degenerate_point_sum():
    traj = Trajectory(
        years=np.array([2000.0, 2001.0]),
        Y=np.array([1.0, 1.0]),
        K=np.array([-1.0, 0.5]),
        p_n=np.zeros(2),
        p_s=np.zeros(2),
        p_B=np.zeros(2),
        dY=np.zeros(2),
        dK=np.zeros(2),
        stop_reason="horizon",
        t0=2000,
        step=1.0,
        method="rk4",
    )
    data = synth_series((2000, 2001), lambda i: 50.0)
    with pytest.raises(mf.DegenerateError, match="vanishes"):
        mf.chain_correction(traj, data, t_i=2000, t_e=2001)


def test_apply_chain_preserves_capital_coefficient(points_traj, frg):
    corr = mf.chain_correction(points_traj, frg, t_i=1950, t_e=2010)
    chained = mf.apply_chain(corr, points_traj, allow_extrapolation=True)
    ratio_pts = points_traj.K / points_traj.Y
    ratio_cur = chained.K / chained.Y
    mask = points_traj.Y > 0
    assert np.allclose(ratio_cur[mask], ratio_pts[mask], rtol=1e-12)


def test_apply_chain_pins_data_at_endpoints(points_traj, frg):
    corr = mf.chain_correction(points_traj, frg, t_i=1950, t_e=2010)
    chained = mf.apply_chain(corr, points_traj, allow_extrapolation=True)
    assert chained.value_at(1950, "Y") == APPROX(52.582, rel=1e-12)
    rec = frg.record_for(2010)
    total = chained.value_at(2010, "Y") + chained.value_at(2010, "K")
    assert total == APPROX(rec.gdp + rec.assets, rel=1e-12)


def test_apply_chain_derivatives_pick_up_slope(points_traj, frg):
    corr = mf.chain_correction(points_traj, frg, t_i=1950, t_e=2010)
    chained = mf.apply_chain(corr, points_traj, allow_extrapolation=True)
    i = 20
    V = corr.factor(points_traj.years[i])
    assert chained.dY[i] == APPROX(points_traj.dY[i] * V + points_traj.Y[i] * corr.slope, rel=1e-12)


def test_apply_chain_extrapolation_guard(points_traj, frg):
    corr = mf.chain_correction(points_traj, frg, t_i=1950, t_e=2010)
    with pytest.raises(mf.ValidationError, match="allow_extrapolation"):
        mf.apply_chain(corr, points_traj)


def test_normalized_start(frg):
    Y0, K0 = mf.normalized_start(frg)
    assert Y0 == 1.0
    assert K0 == APPROX(19.966 / 52.582, rel=1e-12)


def test_frg_param_helpers(frg):
    base = mf.frg_baseline_params()
    assert (base.Y0, base.K0, base.t0) == (52.582, 19.966, 1950)
    assert base.p_v0 == 0.055
    assert base.p_s(0.0) == 0.1
    pts = mf.frg_points_params()
    assert pts.Y0 == 1.0
    assert pts.K0 == APPROX(0.3797116884104827, rel=1e-12)


def test_frg_chained_trajectory(chained_traj, frg):
    assert chained_traj.value_at(1950, "Y") == APPROX(52.582, rel=1e-12)
    rec = frg.record_for(2010)
    total = chained_traj.value_at(2010, "Y") + chained_traj.value_at(2010, "K")
    assert total == APPROX(rec.gdp + rec.assets, rel=1e-9)
    assert chained_traj.years[-1] == 2032.0


# --------------------------------------------------------------- prel fit


def test_prel_fit_recovers_noiseless_decay():
    series = synth_series(range(1980, 1996), lambda i: 80.0 * math.exp(-i / 50.0))
    fit = mf.fit_prel_exponential(series)
    assert fit.p_rel0 == APPROX(0.8, rel=1e-8)
    assert fit.T_h == APPROX(50.0, rel=1e-8)
    assert fit.rms < 1e-10
    assert fit.target == "p_rel"
    assert not fit.constrained


def test_prel_fit_free_reference(frg):
    fit = mf.fit_prel_exponential(frg)
    assert fit.p_rel0 == APPROX(0.7364, abs=1e-3)
    assert fit.T_h == APPROX(129.241, abs=0.05)


def test_prel_fit_constrained_reference(frg):
    fit = mf.fit_prel_exponential(frg, constrain_prel0=True)
    assert fit.constrained
    assert fit.p_rel0 == 1.0
    assert fit.T_h == APPROX(61.053, abs=0.05)


def test_prel_fit_rate_target_reference(frg):
    fit = mf.fit_prel_exponential(frg, constrain_prel0=True, target="p_n")
    assert fit.target == "p_n"
    assert fit.T_h == APPROX(82.140, abs=0.05)
    # weighting by the consumed rate moves the scale into the 80-year band
    assert 70.0 < fit.T_h < 90.0


def test_prel_fit_rejects_rising_share():
    series = synth_series(range(1980, 1996), lambda i: 50.0 + i)
    with pytest.raises(mf.FitError, match="no decay"):
        mf.fit_prel_exponential(series)


def test_prel_fit_validation(frg):
    with pytest.raises(mf.ValidationError, match="10 years"):
        mf.fit_prel_exponential(frg.window(1950, 1955))
    with pytest.raises(mf.ValidationError, match="target"):
        mf.fit_prel_exponential(frg, target="loans")


# -------------------------------------------------------------- quadratic


def test_quadratic_fit_exact_recovery():
    K = np.linspace(1.0, 10.0, 20)
    Y = -0.5 * K**2 + 3.0 * K + 7.0
    fit = mf.fit_quadratic_yk(capital=K, gdp=Y)
    assert fit.a_K == APPROX(0.5, rel=1e-9)
    assert fit.b_K == APPROX(3.0, rel=1e-9)
    assert fit.c_K == APPROX(7.0, rel=1e-9)
    assert fit.residual_rms < 1e-9
    assert fit.n_points == 20
    assert np.allclose(fit.predict(K), Y)


def test_quadratic_fit_series_path(frg):
    fit = mf.fit_quadratic_yk(frg)
    assert fit.year_range == (1950, 2012)
    assert fit.n_points == 63


def test_quadratic_fit_validation():
    with pytest.raises(mf.DegenerateError, match="rank"):
        mf.fit_quadratic_yk(capital=[5.0] * 6, gdp=[1, 2, 3, 4, 5, 6])
    with pytest.raises(mf.ValidationError, match="3 points"):
        mf.fit_quadratic_yk(capital=[1.0, 2.0], gdp=[1.0, 2.0])
    with pytest.raises(mf.ValidationError, match="equal-length"):
        mf.fit_quadratic_yk(capital=[1.0, 2.0, 3.0], gdp=[1.0, 2.0])
    with pytest.raises(mf.ValidationError, match="series or both"):
        mf.fit_quadratic_yk()


def test_frg_quadratic_fit_model_arc():
    fit = mf.frg_quadratic_fit()
    assert fit.a_K == APPROX(2.77549e-5, rel=1e-4)
    assert fit.b_K == APPROX(0.517901, rel=1e-4)
    assert fit.c_K == APPROX(200.574, rel=1e-4)
    assert fit.n_points == 82
    assert fit.year_range == (1950, 2031)


def test_frg_quadratic_fit_data_only(frg):
    fit = mf.frg_quadratic_fit(data_only=True, year_range=(1960, 2000))
    assert fit.year_range == (1960, 2000)
    assert fit.n_points == 41


def test_capital_extremes_reference_parabola():
    fit = mf.QuadraticFit(a_K=2.852e-5, b_K=0.5174, c_K=197.9, residual_rms=0.0, n_points=0)
    ext = mf.capital_extremes(fit)
    assert ext.K_max == APPROX(9070.8, abs=1.0)
    assert ext.K_E_high == APPROX(18516.4, abs=1.0)
    assert ext.K_E_low < 0
    assert ext.Y_at_K_max == APPROX(fit.predict(ext.K_max))


def test_capital_extremes_requires_maximum():
    fit = mf.QuadraticFit(a_K=-1.0, b_K=1.0, c_K=0.0, residual_rms=0.0, n_points=0)
    with pytest.raises(mf.NoMaximumError):
        mf.capital_extremes(fit)


def test_capital_extremes_no_zero_crossing():
    fit = mf.QuadraticFit(a_K=1.0, b_K=0.0, c_K=-1.0, residual_rms=0.0, n_points=0)
    ext = mf.capital_extremes(fit)
    assert ext.K_E_low is None and ext.K_E_high is None
    assert ext.Y_at_K_max == APPROX(-1.0)


# ---------------------------------------------------------------- baskets


def test_basket_price():
    assert mf.basket_price([1.0, 2.0], [0.5, 0.5], [10.0, 20.0]) == APPROX(25.0)


def test_basket_price_validation():
    with pytest.raises(mf.ValidationError, match="equal shapes"):
        mf.basket_price([1.0], [0.5, 0.5], [10.0, 20.0])
    with pytest.raises(mf.ValidationError, match="proportions"):
        mf.basket_price([1.0], [1.5], [10.0])


def test_basket_inflation():
    rows = [[10.0, 20.0], [11.0, 22.0]]
    out = mf.basket_inflation([1.0, 2.0], [0.5, 0.5], rows)
    assert out == [APPROX(0.1)]


def test_basket_inflation_needs_positive_levels():
    with pytest.raises(mf.ValidationError, match="positive"):
        mf.basket_inflation([1.0], [0.0], [[10.0], [20.0]])
