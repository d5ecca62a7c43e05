import math

import pytest
from hypothesis import given, strategies as st

from curbscan.classifier import ClassifierConfig
from curbscan.contour import (
    edge_angle,
    extract_candidates,
    longitudinal_position,
    sample_std,
    window_indices,
)
from curbscan.errors import NonPositiveRise, TooFewSamples, ZeroSpeed
from curbscan.simgen import generate_trace, NoiseModel
from curbscan.trace import Trace, TracePoint

from conftest import make_trace

CFG = ClassifierConfig()


def count_in_window(period_ms, speed_kmh, length_m):
    """Oracle: number of sample timestamps in [0, length / speed]."""
    duration_ms = length_m / (speed_kmh / 3.6) * 1000
    return sum(1 for k in range(10_000) if k * period_ms <= duration_ms + 1e-9)


@pytest.mark.parametrize("length, expected", [(2.1, 8), (9.0, 33)])
def test_window_indices_match_oracle(length, expected):
    assert count_in_window(50, 20, length) == expected
    t = make_trace([500] * 100)
    w = window_indices(t, 0, length)
    assert len(w) == expected and w.start == 0


def test_window_indices_zero_speed():
    t = make_trace([500] * 10, speed=0.0)
    with pytest.raises(ZeroSpeed):
        window_indices(t, 0, 2.1)


@pytest.mark.parametrize("values, expected", [
    ([150, 150, 150], 0.0),
    ([200, 210, 220], 10.0),
    ([100, 300], math.sqrt(2 * 100 ** 2)),
])
def test_sample_std(values, expected):
    assert sample_std(values) == pytest.approx(expected, abs=0.01)


def test_sample_std_too_few():
    with pytest.raises(TooFewSamples):
        sample_std([1.0])


@given(st.lists(st.floats(0, 600), min_size=2, max_size=40), st.floats(-1000, 1000))
def test_sample_std_translation_invariant(values, c):
    assert sample_std([v + c for v in values]) == pytest.approx(sample_std(values), abs=1e-6)


def test_longitudinal_position():
    t = make_trace([500] * 40)
    assert longitudinal_position(t, 0) == 0
    assert longitudinal_position(t, 20) == pytest.approx(20 / 3.6 * 1.0, abs=0.001)
    t2 = make_trace([500] * 3, speed=24.85)
    assert longitudinal_position(t2, 1) == pytest.approx(24.85 / 3.6 * 0.05, abs=0.001)
    assert longitudinal_position(t2, 1) == pytest.approx(0.345, abs=0.001)


def atan_oracle(rise, run):
    return 90.0 - math.degrees(math.atan(run / rise))


@pytest.mark.parametrize("rise, run, expected, tol", [
    (1.8, 0.0, 90.0, 0.0),
    (1.8, 0.0638, 87.97, 0.05),
    (1.5, 1.024, 55.7, 0.1),
])
def test_edge_angle(rise, run, expected, tol):
    assert atan_oracle(rise, run) == pytest.approx(expected, abs=max(tol, 1e-12))
    assert edge_angle(rise, run) == pytest.approx(atan_oracle(rise, run), abs=1e-9)
    assert edge_angle(rise, run) == pytest.approx(expected, abs=max(tol, 1e-12))


def test_edge_angle_backward_lean():
    assert edge_angle(1.8, -0.0638) == pytest.approx(180 - 87.97, abs=0.05)


def test_edge_angle_rejects_non_positive_rise():
    with pytest.raises(NonPositiveRise):
        edge_angle(0.0, 1.0)


@given(st.floats(0.01, 10), st.floats(-10, 10), st.floats(0.001, 5))
def test_edge_angle_monotone_in_run(rise, run, delta):
    assert edge_angle(rise, 0) == 90.0
    assert edge_angle(rise, run + delta) <= edge_angle(rise, run)


def test_featureless_trace_has_no_candidates():
    assert extract_candidates(make_trace([532] * 200), CFG) == []


def test_single_car_candidate(car_scene):
    trace, _ = generate_trace(car_scene, 20.0, noise=NoiseModel.none())
    cands = extract_candidates(trace, CFG)
    assert len(cands) == 1
    c = cands[0]
    assert c.length == pytest.approx(4.5, abs=0.28)
    assert c.bottom_distance == 150
    assert c.bottom_std == 0
    assert c.context_std > CFG.sigma_big
    assert 80 <= c.lead_angle <= 130 and 80 <= c.trail_angle <= 130


def test_car_and_pole_candidates(car_pole_scene):
    trace, _ = generate_trace(car_pole_scene, 20.0, noise=NoiseModel.none())
    cands = extract_candidates(trace, CFG)
    assert len(cands) == 2
    pole = cands[1]
    assert pole.length < 2.1 or min(pole.lead_angle, pole.trail_angle) < 80


def test_candidates_disjoint_and_deterministic(car_pole_scene):
    trace, _ = generate_trace(car_pole_scene, 20.0, seed=3)
    a = extract_candidates(trace, CFG)
    assert a == extract_candidates(trace, CFG)
    for x, y in zip(a, a[1:]):
        assert x.end_index < y.start_index


def test_plateau_touching_trace_end_is_dropped():
    t = make_trace([150] * 20 + [500] * 40)
    assert extract_candidates(t, CFG) == []


def test_stationary_plateau_is_skipped():
    points = [TracePoint(k * 50, 150.0 if 20 <= k < 40 else 500.0, 51.0, -1.0, 0.0) for k in range(60)]
    skipped = []
    assert extract_candidates(Trace("r", "v", tuple(points)), CFG, skipped) == []
    assert skipped


def test_speed_time_scaling_keeps_lengths(car_scene):
    trace, _ = generate_trace(car_scene, 20.0, noise=NoiseModel.none())
    scaled = Trace("r", "v", tuple(
        TracePoint(p.timestamp // 2, p.distance, p.latitude, p.longitude, p.speed * 2) for p in trace.points
    ), 25)
    a = extract_candidates(trace, CFG)
    b = extract_candidates(scaled, CFG)
    assert len(a) == len(b) == 1
    assert b[0].length == pytest.approx(a[0].length, abs=0.28)
