import json
import random

import pytest

from curbscan import geo
from curbscan.aggregate import detection_metrics
from curbscan.classifier import Detection, classify
from curbscan.simgen import (
    GroundTruth,
    NoiseModel,
    SceneObject,
    StreetScene,
    crowd_runs,
    derive_seed,
    evaluate,
    format_table,
    generate_trace,
    load_schedule,
    random_scene,
    save_scene,
    load_scene,
    straight_kerb,
    zone_street,
)

from conftest import ORIGIN, scene_with
from table_a import CAPACITIES, TABLE_A, schedule


def test_empty_scene_ten_seconds():
    scene = StreetScene(straight_kerb(20 / 3.6 * 10), 532.0)
    trace, truth = generate_trace(scene, 20.0, noise=NoiseModel.none())
    assert len(trace) == 200
    assert set(trace.distances) == {532.0}
    assert truth.cars == []


def test_one_car_bottom_sample_count(car_scene):
    expected = 4.5 / (20 / 3.6 * 0.05)
    assert expected == pytest.approx(16.2, abs=0.01)
    trace, truth = generate_trace(car_scene, 20.0, noise=NoiseModel.none())
    assert abs((trace.distances == 150).sum() - expected) <= 1
    assert len(truth.cars) == 1


def test_same_seed_bit_identical(car_scene):
    a, _ = generate_trace(car_scene, 20.0, seed=11)
    b, _ = generate_trace(car_scene, 20.0, seed=11)
    c, _ = generate_trace(car_scene, 20.0, seed=12)
    assert a == b
    assert [p.distance for p in a.points] == [p.distance for p in b.points]
    assert a != c


def test_scene_invariants():
    with pytest.raises(ValueError):
        scene_with([("car", 10.0, 4.5, 150.0), ("car", 12.0, 4.0, 150.0)])
    with pytest.raises(ValueError):
        scene_with([("car", 10.0, 4.5, 600.0)], background=500.0)
    with pytest.raises(ValueError):
        NoiseModel(dropout=1.0)


def test_dropout_and_drift_modes(car_scene):
    trace, _ = generate_trace(car_scene, 20.0, noise=NoiseModel(dropout=0.3), seed=1)
    full, _ = generate_trace(car_scene, 20.0, noise=NoiseModel.none())
    assert len(trace) < len(full)
    walk, _ = generate_trace(car_scene, 20.0, noise=NoiseModel(0, "random_walk", 5.0), seed=1)
    shifts = [geo.haversine(walk.coords(i), full.coords(i)) for i in range(len(full))]
    assert max(shifts) > 0


def test_evaluate_perfect():
    trace, truth = generate_trace(random_scene(4), 20.0, noise=NoiseModel.none())
    dets = [Detection("parked_vehicle", c.latitude, c.longitude, 0, "r") for c in truth.cars]
    r = evaluate(dets, truth)
    assert (r.tp, r.fp, r.fn, r.detection_rate) == (len(truth.cars), 0, 0, 1.0)


def test_table_totals_replayed():
    m = detection_metrics(123, 124, 16)
    assert round(m.detection_rate * 100, 1) == 99.2
    assert round(m.paper_accuracy * 100, 1) == 87.9


def test_out_of_radius_detection_is_false_positive():
    _, truth = generate_trace(random_scene(5), 20.0, noise=NoiseModel.none())
    far = geo.offset(truth.cars[0].anchor, 0, 20)
    r = evaluate([Detection("parked_vehicle", *far, 0, "r")], truth, matching_radius=5)
    assert r.fp == 1 and r.tp == 0


@pytest.mark.parametrize("seed", range(5))
def test_evaluate_bookkeeping_and_permutation(seed):
    trace, truth = generate_trace(random_scene(seed), 20.0, noise=NoiseModel(), seed=seed)
    dets = classify(trace).parked
    dets.append(Detection("parked_vehicle", *geo.offset(ORIGIN, 0, 50), 0, "r"))
    r = evaluate(dets, truth)
    assert r.tp + r.fn == len(truth.cars)
    assert r.tp + r.fp == len(dets)
    shuffled = dets[:]
    random.Random(seed).shuffle(shuffled)
    r2 = evaluate(shuffled, truth)
    assert (r2.tp, r2.fp, r2.fn) == (r.tp, r.fp, r.fn)


def test_crowd_runs_follow_schedule():
    runs = crowd_runs(schedule(), noise=NoiseModel.none())
    assert len(runs) == 6
    for n, run in enumerate(runs, 1):
        for zone_id, (_, truth, capacity) in TABLE_A[n].items():
            assert run.truth.cars_in(zone_id) == truth
    assert runs[3].truth.cars_in("park1") == 2


def test_single_entry_schedule_matches_generate_trace(car_scene):
    [run] = crowd_runs([(car_scene, "2026-01-01T00:00:00Z")], seed=9)
    trace, _ = generate_trace(car_scene, 20.0, seed=derive_seed(9, 0), run_id="run1")
    assert run.trace == trace


def test_permuted_schedule_permutes_outputs():
    sched = schedule()[:3]
    order = [2, 0, 1]
    a = crowd_runs(sched, noise=NoiseModel.none())
    b = crowd_runs([sched[k] for k in order], noise=NoiseModel.none())
    for pos, k in enumerate(order):
        assert b[pos].trace.points == a[k].trace.points
        assert b[pos].wall_clock == a[k].wall_clock


def test_scene_and_schedule_files(tmp_path, car_scene):
    scene = zone_street(CAPACITIES[:2], {"park1": 3}, seed=1)
    save_scene(scene, tmp_path / "s.json")
    assert load_scene(tmp_path / "s.json") == scene
    (tmp_path / "sched.json").write_text(json.dumps([{"scene": "s.json", "wall_clock": "2026-01-01T00:00:00Z"}]))
    [(loaded, clock)] = load_schedule(tmp_path / "sched.json")
    assert loaded == scene and clock == "2026-01-01T00:00:00Z"


def test_scene_zones_by_position():
    data = {"kerb": [list(v) for v in straight_kerb(60.0, ORIGIN)],
            "objects": [{"kind": "car", "start_m": 20, "length_m": 4, "lateral_cm": 150}],
            "zones": [{"zone_id": "z", "start_m": 10, "end_m": 40, "capacity": 5}]}
    from curbscan.simgen import scene_from_dict
    scene = scene_from_dict(data)
    assert scene.zones[0].length == pytest.approx(30.0, abs=0.01)


def test_truth_round_trip_and_table(tmp_path):
    trace, truth = generate_trace(zone_street(CAPACITIES, {"park1": 2, "park4": 7}), 20.0,
                                  noise=NoiseModel.none(), run_id="run1")
    truth.save(tmp_path / "t.json")
    assert GroundTruth.load(tmp_path / "t.json") == truth
    report = evaluate(classify(trace).parked, truth)
    table = format_table([report])
    assert "2/2/6" in table and "7/7/11" in table and "0/0/1" in table
