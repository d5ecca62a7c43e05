"""curbscan command line: detect, simulate, evaluate, calibrate, map, estimate, cruise-cost.

Exit status: 0 success, 1 processing error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Callable, Sequence

from . import fleet
from .aggregate import MapStore, RunRecord, dumps_geojson, export_geojson, summarize_run
from .calibrate import calibrate, load_signatures, save_signatures
from .classifier import ClassifierConfig, classify, read_detections, write_detections
from .errors import CurbscanError
from .simgen import (
    GroundTruth,
    NoiseModel,
    crowd_runs,
    evaluate,
    format_table,
    load_scene,
    load_schedule,
)
from .spacemap import label_zones, load_zones, save_zones, spaces_by_capacity
from .trace import read_trace, write_trace

CONFIG_ENV = "CURBSCAN_CONFIG"


class ProcessingError(Exception):
    pass


def _guard(path, fn: Callable, *args, **kwargs):
    """Run a file-level step, naming the file in any error."""
    try:
        return fn(path, *args, **kwargs)
    except FileNotFoundError:
        raise ProcessingError(f"{path}: no such file") from None
    except (CurbscanError, ValueError, KeyError, TypeError, OSError) as exc:
        raise ProcessingError(f"{path}: {exc}") from exc


def _config(args) -> ClassifierConfig:
    path = args.config or os.environ.get(CONFIG_ENV)
    if not path:
        return ClassifierConfig()
    return _guard(path, ClassifierConfig.load)


def _emit(args, payload: dict, human: str, out: str | None = None) -> None:
    if out:
        Path(out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(human)


def cmd_detect(args) -> int:
    config = _config(args)
    trace = _guard(args.trace, read_trace, run_id=args.run_id, vehicle_id=args.vehicle_id,
                   format=args.format)
    zones = _guard(args.zones, load_zones) if args.zones else []
    result = classify(trace, config)
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    detections = label_zones(result.parked + result.empty, zones) if zones else result.parked + result.empty
    write_detections(detections, args.out)

    record = summarize_run(trace, detections, zones, args.wall_clock, config, args.min_space)
    if args.report:
        Path(args.report).write_text(json.dumps(record.to_dict(), indent=2, sort_keys=True) + "\n",
                                     encoding="utf-8")
    lines = [f"{trace.run_id}: {len(result.parked)} parked, {len(result.empty)} empty regions"]
    zone_rows = {}
    for zone in zones:
        obs = record.zones.get(zone.zone_id)
        if obs is None:
            lines.append(f"  {zone.zone_id}: not observed")
            continue
        free = spaces_by_capacity(zone, obs.parked)
        lengths = [round(s.length, 2) for s in obs.variable_spaces]
        zone_rows[zone.zone_id] = {"parked": obs.parked, "capacity": zone.capacity,
                                   "spaces_by_capacity": free, "variable_spaces_m": lengths}
        shown = ",".join(f"{v:.2f}m" for v in lengths) or "-"
        lines.append(f"  {zone.zone_id}: {obs.parked}/{zone.capacity} parked, "
                     f"{free} free by capacity, spaces {shown}")
    illegal = [d for d in detections if d.illegal]
    if zones:
        lines.append(f"  illegal: {len(illegal)}")
    payload = {"run_id": trace.run_id, "parked": len(result.parked), "empty": len(result.empty),
               "illegal": len(illegal), "zones": zone_rows, "warnings": result.warnings}
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_simulate(args) -> int:
    if args.scene:
        schedule = [(_guard(args.scene, load_scene), args.wall_clock)]
    else:
        schedule = _guard(args.schedule, load_schedule)
    noise = NoiseModel(args.noise_sigma, args.drift_mode, args.drift_m, args.drift_bearing, args.dropout)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    runs = crowd_runs(schedule, args.speed, noise, args.seed, args.sample_period)
    manifest = []
    for run in runs:
        rid = run.trace.run_id
        write_trace(run.trace, out / f"{rid}.csv")
        run.truth.save(out / f"{rid}.truth.json")
        manifest.append({"run_id": rid, "trace": f"{rid}.csv", "truth": f"{rid}.truth.json",
                         "wall_clock": run.wall_clock})
    save_zones(schedule[0][0].zones, out / "zones.geojson")
    if schedule[0][0].signatures:
        save_signatures(schedule[0][0].signatures, out / "signatures.json")
    (out / "runs.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    human = "\n".join(f"{m['run_id']}: {len(r.trace)} samples, {len(r.truth.cars)} cars -> {out / m['trace']}"
                      for m, r in zip(manifest, runs))
    _emit(args, {"runs": manifest}, human)
    return 0


def cmd_evaluate(args) -> int:
    if len(args.detections) != len(args.truth):
        print("evaluate: --detections and --truth need the same number of files", file=sys.stderr)
        return 2
    reports = []
    for det_path, truth_path in zip(args.detections, args.truth):
        detections = _guard(det_path, read_detections)
        truth = _guard(truth_path, GroundTruth.load)
        reports.append(evaluate(detections, truth, args.radius))
    payload = {"runs": [r.to_dict() for r in reports],
               "tp": sum(r.tp for r in reports), "fp": sum(r.fp for r in reports),
               "fn": sum(r.fn for r in reports)}
    _emit(args, payload, format_table(reports), args.out)
    return 0


def cmd_calibrate(args) -> int:
    config = _config(args)
    trace = _guard(args.trace, read_trace, run_id=args.run_id, format=args.format)
    signatures = _guard(args.signatures, load_signatures)
    fixed, report = calibrate(trace, signatures, config)
    write_trace(fixed, args.out)
    payload = {"matched": [m.signature_id for m in report.matches],
               "ambiguous": report.ambiguous, "missing": report.missing}
    human = (f"{len(report.matches)} signatures matched, {len(report.ambiguous)} ambiguous, "
             f"{len(report.missing)} missing -> {args.out}")
    _emit(args, payload, human)
    return 0


def cmd_map(args) -> int:
    zones = _guard(args.zones, load_zones)
    store = MapStore(zones, args.log, args.out)
    stale = []
    for path in args.runs:
        record = _guard(path, lambda p: RunRecord.from_dict(json.loads(Path(p).read_text(encoding="utf-8"))))
        result = store.ingest(record)
        stale += [f"{e.zone_id} ({record.run_id})" for e in result.stale]
    if not args.runs:
        Path(args.out).write_text(dumps_geojson(export_geojson(store.map)), encoding="utf-8")
    for s in stale:
        print(f"warning: stale run for zone {s}", file=sys.stderr)
    states = {zid: st.to_dict() for zid, st in sorted(store.map.states.items())}
    human = "\n".join(f"{zid}: {st['parked']}/{st['capacity']} parked, last update {st['last_update']}"
                      for zid, st in states.items()) or "no zone observed"
    _emit(args, {"zones": states, "stale": stale}, human)
    return 0


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _range(text: str) -> list[float]:
    start, stop, step = (float(v) for v in text.split(":"))
    out, x = [], start
    while x <= stop + 1e-9:
        out.append(round(x, 9))
        x += step
    return out


def cmd_estimate(args) -> int:
    params = _guard(args.params, fleet.FleetParams.load)
    result = fleet.estimate(params)
    human = (f"road length {result['road_length_m']:.1f} m, "
             f"{result['exact']:.2f} units -> {result['units']} vehicles")
    if args.update_range:
        L = result["road_length_m"]
        speeds = [fleet.kmh_to_ms(v) for v in _floats(args.speeds)] if args.speeds else [params.nu]
        gammas = _floats(args.accuracies) if args.accuracies else [params.gamma]
        rows = fleet.units_curve(L, speeds, gammas, _range(args.update_range))
        result["curve"] = [r._asdict() for r in rows]
        human += "\n" + "\n".join(
            f"{r.update_seconds:7.1f} s  {r.nu * 3.6:5.1f} km/h  gamma {r.gamma:.3f}  {r.units}"
            for r in rows
        )
    _emit(args, result, human, args.out)
    return 0


def cmd_cruise_cost(args) -> int:
    params = _guard(args.params, fleet.CruisingParams.load)
    result = fleet.cruising_cost(params, truncate_daily_km=not args.no_truncate)
    human = (f"{result['min_per_day']} min/day, {result['min_per_year']} min/year, "
             f"{result['km_per_day']} km/day, {result['km_per_year']} km/year, "
             f"{result['litres_per_year']} litres/year")
    _emit(args, result, human, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="curbscan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        p.add_argument("--json", action="store_true", help="machine-readable report on stdout")
        return p

    p = add("detect", cmd_detect, "classify a trace into parked vehicles and spaces")
    p.add_argument("--trace", required=True)
    p.add_argument("--format", choices=("csv", "paper"), default="csv")
    p.add_argument("--run-id")
    p.add_argument("--vehicle-id", default="unknown")
    p.add_argument("--zones")
    p.add_argument("--config", help=f"classifier config JSON (default ${CONFIG_ENV})")
    p.add_argument("--out", required=True, help="detections JSONL")
    p.add_argument("--report", help="ingest event JSON for `curbscan map`")
    p.add_argument("--wall-clock", default="1970-01-01T00:00:00Z")
    p.add_argument("--min-space", type=float)

    p = add("simulate", cmd_simulate, "generate synthetic traces with ground truth")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--scene")
    src.add_argument("--schedule")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--speed", type=float, default=20.0, help="km/h")
    p.add_argument("--sample-period", type=int, default=50, help="ms")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-sigma", type=float, default=5.0, help="cm")
    p.add_argument("--drift-mode", choices=("none", "constant", "linear", "random_walk"), default="none")
    p.add_argument("--drift-m", type=float, default=0.0)
    p.add_argument("--drift-bearing", type=float, default=90.0)
    p.add_argument("--dropout", type=float, default=0.0)
    p.add_argument("--wall-clock", default="1970-01-01T00:00:00Z")

    p = add("evaluate", cmd_evaluate, "score detections against ground truth")
    p.add_argument("--detections", nargs="+", required=True)
    p.add_argument("--truth", nargs="+", required=True)
    p.add_argument("--radius", type=float, default=5.0, help="matching radius, m")
    p.add_argument("--out", help="EvalReport JSON")

    p = add("calibrate", cmd_calibrate, "correct GPS drift using environment signatures")
    p.add_argument("--trace", required=True)
    p.add_argument("--format", choices=("csv", "paper"), default="csv")
    p.add_argument("--run-id")
    p.add_argument("--signatures", required=True)
    p.add_argument("--config")
    p.add_argument("--out", required=True, help="corrected trace CSV")

    p = add("map", cmd_map, "ingest run reports into the occupancy map")
    p.add_argument("--zones", required=True)
    p.add_argument("--runs", nargs="*", default=[], help="run reports from `detect --report`")
    p.add_argument("--log", required=True, help="append-only run log (JSONL)")
    p.add_argument("--out", required=True, help="GeoJSON snapshot")

    p = add("estimate", cmd_estimate, "sensing fleet size for a city")
    p.add_argument("--params", required=True)
    p.add_argument("--update-range", help="start:stop:step seconds for a unit curve")
    p.add_argument("--speeds", help="comma-separated km/h for the curve")
    p.add_argument("--accuracies", help="comma-separated detection accuracies for the curve")
    p.add_argument("--out")

    p = add("cruise-cost", cmd_cruise_cost, "time, distance and fuel wasted cruising for a spot")
    p.add_argument("--params", required=True)
    p.add_argument("--no-truncate", action="store_true", help="keep unrounded daily km")
    p.add_argument("--out")
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ProcessingError as exc:
        print(f"curbscan {args.command}: {exc}", file=sys.stderr)
        return 1
    except (CurbscanError, ValueError, OSError) as exc:
        print(f"curbscan {args.command}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
