"""Parsing, validation, indicator derivation, and crossing detection."""

import math

import pytest

import macrofield as mf
from macrofield.dataset import EPS_DIV, FRG_TABLE_SHA256

APPROX = lambda x, **kw: pytest.approx(x, **kw)  # noqa: E731


# ------------------------------------------------------------- bundled table


def test_bundled_table_checksum():
    assert mf.frg_table_checksum() == FRG_TABLE_SHA256


def test_bundled_table_shape(frg):
    assert len(frg) == 63
    assert frg.start_year == 1950
    assert frg.end_year == 2012
    assert frg.country == "FRG"


def test_first_record_values(frg):
    r = frg.records[0]
    assert (r.year, r.assets, r.loans, r.gdp) == (1950, 19.966, 14.418, 52.582)
    assert r.state_debt == 10.53
    assert r.savings_rate == 0.042
    assert r.population == 50958
    assert r.cpi == APPROX(-0.064)  # stored as a fraction


def test_last_record_values(frg):
    r = frg.records[-1]
    assert r.year == 2012
    assert r.gdp == 2645.0
    assert r.assets == 8314.596
    assert r.loans == 3220.356
    assert r.state_debt == 2067.0
    assert r.cpi == APPROX(0.02)


def test_data_dir_override(tmp_path, monkeypatch, frg):
    src = mf.frg_table_path().read_text(encoding="utf-8")
    lines = src.splitlines()
    (tmp_path / mf.frg_table_path().name).write_text(
        "\n".join(lines[:11]) + "\n", encoding="utf-8"
    )
    monkeypatch.setenv("MACROFIELD_DATA_DIR", str(tmp_path))
    short = mf.frg_dataset()
    assert len(short) == 10
    assert short.records[0] == frg.records[0]


# ------------------------------------------------------------------ parsing


VALID_HEADER = "year,assets,loans,gdp,state_debt,savings_rate,population,cpi"


def _csv(*rows):
    return "\n".join((VALID_HEADER,) + rows) + "\n"


def test_parse_minimal_series():
    s = mf.parse_series(_csv("1950,100,50,80,10,0.1,1000,2.0"))
    assert len(s) == 1
    assert s.records[0].assets == 100.0


def test_parse_detects_semicolon_and_decimal_comma():
    text = VALID_HEADER.replace(",", ";") + "\n1950;19,966;14,418;52,582;10,53;0,042;50958;-6,4\n"
    s = mf.parse_series(text, decimal_comma=True, percent_columns=("cpi",))
    assert s.records[0].assets == 19.966
    assert s.records[0].cpi == APPROX(-0.064)


def test_parse_rejects_decimal_comma_with_comma_delimiter():
    with pytest.raises(mf.ValidationError, match="comma-delimited"):
        mf.parse_series(_csv("1950,1,1,1,1,0.1,1,1"), decimal_comma=True)


def test_parse_missing_column_names_it():
    text = VALID_HEADER.replace(",loans", "") + "\n1950,1,1,1,0.1,1,1\n"
    with pytest.raises(mf.SchemaError, match="loans"):
        mf.parse_series(text)


def test_parse_unexpected_column_names_it():
    text = VALID_HEADER + ",extra\n1950,1,1,1,1,0.1,1,1,9\n"
    with pytest.raises(mf.SchemaError, match="extra"):
        mf.parse_series(text)


def test_parse_bad_cell_names_row_and_column():
    with pytest.raises(mf.ValidationError) as err:
        mf.parse_series(_csv("1950,100,50,80,10,0.1,1000,2.0",
                             "1951,abc,50,80,10,0.1,1000,2.0"))
    assert "assets" in str(err.value)
    assert "row 2" in str(err.value)


def test_parse_gap_names_years():
    with pytest.raises(mf.GapError, match="1950 and 1952"):
        mf.parse_series(_csv("1950,100,50,80,10,0.1,1000,2.0",
                             "1952,100,50,80,10,0.1,1000,2.0"))


def test_parse_empty_input():
    with pytest.raises(mf.ValidationError, match="no records"):
        mf.parse_series("")
    with pytest.raises(mf.ValidationError, match="no records"):
        mf.parse_series(VALID_HEADER + "\n")


def test_parse_non_integer_year():
    with pytest.raises(mf.ValidationError, match="not an integer"):
        mf.parse_series(_csv("1950.5,100,50,80,10,0.1,1000,2.0"))


def test_parse_validates_records():
    with pytest.raises(mf.ValidationError, match="interbank"):
        mf.parse_series(_csv("1950,100,150,80,10,0.1,1000,2.0"))
    with pytest.raises(mf.ValidationError):
        mf.parse_series(_csv("1950,100,50,80,10,1.5,1000,2.0"))
    with pytest.raises(mf.ValidationError):
        mf.parse_series(_csv("1950,-1,0,80,10,0.1,1000,2.0"))


def test_parse_accepts_original_table_spellings():
    header = (
        "YEAR\tASSETS (bn.€)\tLOANS (bn.€)\tGDP (bn.€)\tStates Debt (bn.€)\t"
        "Savings natural [1]\tPopulation in 1000\tCPI in % consumer"
    )
    s = mf.parse_series(header + "\n1950\t19,966\t14,418\t52,582\t10,53\t0,042\t50958\t-6,4\n",
                        decimal_comma=True, percent_columns=("cpi",))
    assert s.records[0].gdp == 52.582


def test_serialize_round_trip(frg):
    text = mf.serialize_series(frg)
    back = mf.parse_series(text, country=frg.country)
    assert back.records == frg.records


def test_percent_columns_must_exist():
    with pytest.raises(mf.SchemaError, match="percent_columns"):
        mf.parse_series(_csv("1950,1,1,1,1,0.1,1,1"), percent_columns=("velocity",))


# ------------------------------------------------------------------- series


def test_series_window(frg):
    w = frg.window(1960, 1969)
    assert w.years() == tuple(range(1960, 1970))
    with pytest.raises(mf.ValidationError):
        frg.window(1800, 1849)


def test_series_record_for_out_of_range(frg):
    with pytest.raises(mf.ValidationError, match="2013"):
        frg.record_for(2013)


def test_series_unknown_column(frg):
    with pytest.raises(mf.SchemaError):
        frg.column("velocity")


# -------------------------------------------------------- derived indicators


def test_capital_coefficient_anchors(derived):
    assert derived.value("k_t", 1950) == APPROX(0.3797, abs=5e-5)
    assert derived.value("k_t", 2010) == APPROX(3.346, abs=5e-4)
    assert derived.value("y_t", 1950) == APPROX(1 / 0.3797, rel=1e-3)


def test_marginal_coefficient_worked_example(derived):
    # (64.528 - 52.582) / (25.688 - 19.966)
    assert derived.value("k_i", 1950) == APPROX(2.088, abs=5e-4)
    assert derived.value("y_i", 1950) == APPROX(1 / 2.088, rel=1e-3)


def test_marginals_absent_on_last_year(derived, frg):
    for col in ("k_i", "y_i", "p_v", "p_n_via_prel", "p_n_residual"):
        assert derived.value(col, frg.end_year) is None
        assert derived.value(col, 1980) is not None


def test_forward_difference_convention(derived, frg):
    Y = frg.column("gdp")
    K = frg.column("assets")
    i = 1970 - frg.start_year
    assert derived.value("k_i", 1970) == APPROX(
        (Y[i + 1] - Y[i]) / (K[i + 1] - K[i]), rel=1e-12
    )


def test_lending_and_money_indicators(derived, frg):
    r = frg.records[0]
    assert derived.value("p_rel", 1950) == APPROX(r.loans / r.assets, rel=1e-12)
    assert derived.value("p_rel", 1950) == APPROX(0.7221, abs=5e-5)
    assert derived.value("k_c", 1950) == APPROX(r.loans / r.gdp, rel=1e-12)
    assert derived.value("m_m", 1950) == APPROX(r.assets - r.loans, rel=1e-12)
    assert derived.value("k_m", 1950) == APPROX((r.assets - r.loans) / r.gdp, rel=1e-12)


def test_capital_growth_and_net_rate_estimators(derived):
    assert derived.value("p_v", 1950) == APPROX(0.2866, abs=5e-5)
    assert derived.value("p_n_via_prel", 1950) == APPROX(-0.1273, abs=5e-5)
    assert derived.value("p_n_residual", 1950) == APPROX(0.1760, abs=5e-5)


def test_derive_p_n_estimators(frg, derived):
    via = mf.derive_p_n(frg, "via_p_rel")
    res = mf.derive_p_n(frg, "capital_residual")
    assert via == derived.p_n_via_prel
    assert res == derived.p_n_residual
    with pytest.raises(mf.ValidationError):
        mf.derive_p_n(frg, "nonsense")


def test_debt_ratio_switches_base(derived, frg):
    # GDP base while K/Y < 1, capital base from the 1966 crossing on.
    r50 = frg.record_for(1950)
    assert derived.value("debt_ratio", 1950) == APPROX(r50.state_debt / r50.gdp, rel=1e-12)
    r10 = frg.record_for(2010)
    assert derived.value("debt_ratio", 2010) == APPROX(r10.state_debt / r10.assets, rel=1e-12)
    assert derived.value("debt_ratio", 2010) == APPROX(0.2053, abs=5e-5)


def test_unbounded_marginal_flagged_absent():
    s = mf.parse_series(_csv(
        "1950,100,50,80,10,0.1,1000,2.0",
        "1951,110,50,80,10,0.1,1000,2.0",   # dY = 0 -> y_i unbounded
        "1952,120,50,90,10,0.1,1000,2.0",
    ))
    d = mf.derive_indicators(s)
    assert d.value("y_i", 1950) is None
    assert d.value("k_i", 1950) == 0.0
    assert abs(80.0 - 80.0) < EPS_DIV


def test_derived_series_value_and_column(derived):
    assert derived.value("k_t", 1950) == derived.column("k_t")[0]
    with pytest.raises(mf.SchemaError):
        derived.column("gdp")


# ----------------------------------------------------------------- crossing


def test_find_crossing_up_semantics():
    vals = [0.5, 0.9, 1.0, 1.2]
    assert mf.find_crossing(vals, 1.0, "up") == 2
    assert mf.find_crossing(vals, 1.0, "up", years=(1960, 1961, 1962, 1963)) == 1962


def test_find_crossing_down_semantics():
    vals = [0.9, 0.6, 0.5, 0.4]
    assert mf.find_crossing(vals, 0.5, "down") == 2


def test_find_crossing_requires_strict_previous_side():
    # Starting exactly on the threshold is not a crossing.
    assert mf.find_crossing([1.0, 1.2, 1.4], 1.0, "up") is None
    assert mf.find_crossing([0.5, 0.4], 0.5, "down") is None


def test_find_crossing_skips_absent_cells():
    assert mf.find_crossing([0.5, None, 1.2], 1.0, "up") is None
    assert mf.find_crossing([0.5, None, 0.9, 1.2], 1.0, "up") == 3


def test_find_crossing_none_when_never():
    assert mf.find_crossing([0.1, 0.2], 1.0, "up") is None
    with pytest.raises(mf.ValidationError):
        mf.find_crossing([0.1], 1.0, "sideways")


def test_phase_threshold_years(derived, frg):
    years = frg.years()
    assert mf.find_crossing(derived.k_t, 1.0, "up", years=years) == 1966
    assert mf.find_crossing(derived.k_c, 1.0, "up", years=years) == 1982
    assert mf.find_crossing(derived.p_rel, 0.5, "down", years=years) == 2000
    assert mf.find_crossing(derived.k_t, 3.0, "up", years=years) == 2000


def test_contiguity_required():
    recs = mf.frg_dataset().records
    with pytest.raises(mf.GapError):
        mf.EconSeries(country="x", records=(recs[0], recs[2]))


def test_no_records_rejected():
    with pytest.raises(mf.ValidationError, match="no records"):
        mf.EconSeries(country="x", records=())


def test_year_math_is_exact(frg):
    years = frg.years()
    assert years == tuple(range(1950, 2013))
    assert math.isclose(sum(years) / len(years), 1981.0)
