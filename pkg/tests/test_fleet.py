import math

import pytest
from hypothesis import given, strategies as st

from curbscan.fleet import (
    CruisingParams,
    FleetParams,
    cruising_cost,
    estimate,
    road_length,
    units_curve,
    units_needed,
)

NU = 20 / 3.6


def test_road_length_worked_example():
    assert road_length(19.26e6, 0.10, 10) == pytest.approx(1.926e5, rel=1e-12)


def test_road_length_small_ratio_and_hand_value():
    assert road_length(19.26e6, 1e-9, 10) == pytest.approx(0.001926, rel=1e-9)
    assert road_length(1e6, 0.2, 8) == 25000


def test_params_reject_zero_ratio():
    with pytest.raises(ValueError):
        FleetParams(19.26e6, 0.0, 10, 1 / 120, 0.879, NU)
    with pytest.raises(ValueError):
        FleetParams(19.26e6, 0.1, 10, 1 / 120, 1.2, NU)


def test_units_worked_example():
    est = units_needed(1.926e5, NU, 1 / 120, 0.879)
    assert est.exact == pytest.approx(1.926e5 * (1 / 120) / (NU * 0.879), rel=1e-12)
    assert est.exact == pytest.approx(328.7, abs=0.05)
    assert est.units == 329
    assert abs(est.units - 328) <= 1


def test_one_rolling_window_needs_one_unit():
    L = NU * 120 * 0.879
    est = units_needed(L, NU, 1 / 120, 0.879)
    assert est.exact == pytest.approx(1.0) and est.units == 1


def test_doubling_update_frequency_doubles_units():
    a = units_needed(1.926e5, NU, 1 / 120, 0.879).exact
    b = units_needed(1.926e5, NU, 2 / 120, 0.879).exact
    assert b / a == pytest.approx(2.0, rel=1e-9)


pos = st.floats(1e-3, 1e6)
frac = st.floats(1e-3, 1.0)


@given(pos, pos, pos, frac, st.floats(1.01, 10))
def test_units_monotone(L, nu, tau, gamma, k):
    base = units_needed(L, nu, tau, gamma).exact
    assert units_needed(L * k, nu, tau, gamma).exact > base
    assert units_needed(L, nu, tau * k, gamma).exact > base
    assert units_needed(L, nu * k, tau, gamma).exact < base
    assert units_needed(L, nu, tau, gamma / k).exact > base


@given(st.floats(1, 1e8), st.floats(1e-3, 1), st.floats(0.5, 100), st.floats(1.1, 10))
def test_road_length_linearity(s, p, w, k):
    assert road_length(s * k, p, w) == pytest.approx(k * road_length(s, p, w))
    assert road_length(s, p, w * k) == pytest.approx(road_length(s, p, w) / k)


def test_curve_single_point_equals_units_needed():
    rows = units_curve(1.926e5, [NU], [0.879], [120])
    assert len(rows) == 1
    assert rows[0].exact == units_needed(1.926e5, NU, 1 / 120, 0.879).exact


def test_curve_inverse_proportionality():
    rows = {r.update_seconds: r for r in units_curve(1.926e5, [NU], [0.879], [60, 120])}
    assert rows[60].exact == pytest.approx(2 * rows[120].exact, rel=1e-12)


def test_curve_contains_operating_point_and_is_consistent():
    speeds = [10 / 3.6, NU, 30 / 3.6]
    gammas = [0.8, 0.879, 1.0]
    rows = units_curve(1.926e5, speeds, gammas, range(30, 301, 30))
    assert len(rows) == 3 * 3 * 10
    op = [r for r in rows if r.update_seconds == 120 and r.nu == NU and r.gamma == 0.879]
    assert op[0].units == 329
    for r in rows:
        assert r.exact == units_needed(1.926e5, r.nu, 1 / r.update_seconds, r.gamma).exact


def test_params_file_layout():
    p = FleetParams.from_dict({"area_km2": 19.26, "road_ratio": 0.1, "road_width_m": 10,
                               "update_s": 120, "accuracy": 0.879, "speed_kmh": 20})
    out = estimate(p)
    assert out["road_length_m"] == pytest.approx(1.926e5)
    assert out["units"] == 329


def test_cruising_cost_published_example():
    out = cruising_cost(CruisingParams(6.75, 10, 15, 10))
    assert out == {"min_per_day": 67.5, "min_per_year": 24637.5, "km_per_day": 16.87,
                   "km_per_year": 6157.55, "litres_per_year": 615.755}


def test_cruising_cost_untruncated_variant():
    out = cruising_cost(CruisingParams(6.75, 10, 15, 10), truncate_daily_km=False)
    assert out["km_per_day"] == 16.875 and out["km_per_year"] == 6159.375


def test_cruising_cost_zero_turnover():
    assert set(cruising_cost(CruisingParams(6.75, 0, 15, 10)).values()) == {0.0}


def test_cruising_cost_hand_example():
    out = cruising_cost(CruisingParams(6, 10, 15, 10))
    assert out == {"min_per_day": 60, "min_per_year": 21900, "km_per_day": 15.0,
                   "km_per_year": 5475, "litres_per_year": 547.5}


@given(st.integers(1, 60), st.integers(1, 50), st.integers(2, 5))
def test_cruising_cost_linear_in_turnover(minutes, turnover, k):
    # integer minutes at 12 km/h keep daily km on the 0.01 grid, so truncation is exact
    a = cruising_cost(CruisingParams(minutes, turnover, 12, 8))
    b = cruising_cost(CruisingParams(minutes, turnover * k, 12, 8))
    for key in a:
        assert b[key] == pytest.approx(k * a[key])


def test_cruising_params_reject_negative():
    with pytest.raises(ValueError):
        CruisingParams(-1, 10, 15, 10)
