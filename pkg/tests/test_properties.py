"""Randomized invariants of the closed form, the integrator, and the
diagnostics, driven by hypothesis."""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import macrofield as mf

finite = dict(allow_nan=False, allow_infinity=False)

rates = st.floats(min_value=-0.5, max_value=0.5, **finite)
savings = st.floats(min_value=0.001, max_value=0.5, **finite)
levels = st.floats(min_value=0.01, max_value=10.0, **finite)


@given(p_n=rates, p_s=savings, Y0=levels, K0=levels)
def test_basis_reproduces_initial_conditions(p_n, p_s, Y0, K0):
    b = mf.AnalyticBranch.from_rates(p_n, p_s, Y0, K0)
    Y, K = mf.basis_solution(b, 0.0)
    assert Y == pytest.approx(Y0, rel=1e-12)
    assert K == pytest.approx(K0, rel=1e-12)


@given(
    p_n=rates,
    p_s=savings,
    Y0=levels,
    K0=levels,
    t=st.floats(min_value=0.0, max_value=20.0, **finite),
)
def test_capital_coefficient_matches_ratio(p_n, p_s, Y0, K0, t):
    b = mf.AnalyticBranch.from_rates(p_n, p_s, Y0, K0)
    Y, K = mf.basis_solution(b, t)
    try:
        ratio = mf.capital_coefficient_closed(b, t)
    except mf.PoleError:
        assume(False)
    assert ratio == pytest.approx(K / Y, rel=1e-9)


@given(
    T_h=st.floats(min_value=0.1, max_value=500.0, **finite),
    a=st.floats(min_value=0.1, max_value=10.0, **finite),
)
def test_growth_stop_scales_linearly(T_h, a):
    assert mf.t_max(T_h) == pytest.approx(T_h * math.log(2.0), rel=1e-12)
    assert mf.t_max(a * T_h) == pytest.approx(a * mf.t_max(T_h), rel=1e-12)


@given(
    Y=st.floats(min_value=0.1, max_value=1e4, **finite),
    K=st.floats(min_value=0.1, max_value=1e4, **finite),
    dK=st.floats(min_value=-1e3, max_value=1e3, **finite),
    p_s=savings,
    c=st.floats(min_value=0.05, max_value=1.0, **finite),
)
def test_velocity_consistent_with_turnover_ratio(Y, K, dK, p_s, c):
    lhs = mf.velocity(Y, K, dK, p_s, c) * K
    rhs = c * mf.quantity_check(Y, dK, p_s) * Y
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


@given(
    H0x=levels,
    P0x=levels,
    H0y=levels,
    P0y=levels,
    h_min=st.floats(min_value=0.0, max_value=1.0, **finite),
    t0=st.floats(min_value=0.0, max_value=50.0, **finite),
    t_sh=st.floats(min_value=0.1, max_value=30.0, **finite),
    t=st.floats(min_value=0.0, max_value=200.0, **finite),
)
def test_substitution_conserves_volume(H0x, P0x, H0y, P0y, h_min, t0, t_sh, t):
    out = mf.substitution_trajectory(
        H0x, P0x, H0y, P0y, h_min=h_min, t0=t0, t_sh=t_sh, t=t
    )
    total = H0x * P0x + H0y * P0y
    assert out["hp_x"] + out["hp_y"] == pytest.approx(total, rel=1e-12)
    assert out["rate_x"] + out["rate_y"] == pytest.approx(0.0, abs=1e-15)


@given(
    B=st.floats(min_value=1e-6, max_value=1e6, **finite),
    flip=st.booleans(),
)
def test_amplification_factors(B, flip):
    A = -B if flip else B
    rep = mf.derivative_sales_amplification(B, A)
    assert rep.nominal_dY == -3.0 * B
    assert rep.nominal_dK == 3.0 * A
    assert rep.retarded_dY == -2.0 * B
    assert rep.retarded_dK == 2.0 * A
    assert rep.retarded_dY / rep.nominal_dY == pytest.approx(2.0 / 3.0, rel=1e-12)


@given(
    values=st.lists(
        st.floats(min_value=-5.0, max_value=5.0, **finite), min_size=1, max_size=8
    ),
    t=st.floats(min_value=-5.0, max_value=15.0, **finite),
)
def test_table_rate_floors_and_clamps(values, t):
    fn = mf.RateFn.table({i: v for i, v in enumerate(values)})
    idx = min(max(math.floor(t), 0), len(values) - 1)
    assert fn(t) == values[idx]


@settings(max_examples=20, deadline=None)
@given(
    Y0=levels,
    K0=levels,
    p_v0=st.floats(min_value=0.0, max_value=0.2, **finite),
    p_s=savings,
    f=st.floats(min_value=0.1, max_value=1.0, **finite),
)
def test_trajectories_scale_linearly_without_inflows(Y0, K0, p_v0, p_s, f):
    params = mf.ModelParams(Y0=Y0, K0=K0, p_v0=p_v0, p_s=p_s)
    base = mf.integrate(params, horizon=30.0, allow_negative=True)
    scaled = mf.integrate(params.scaled(f), horizon=30.0, allow_negative=True)
    assert np.allclose(scaled.Y, f * base.Y, rtol=1e-12, atol=1e-300)
    assert np.allclose(scaled.K, f * base.K, rtol=1e-12, atol=1e-300)
