"""Synthetic kerbside scenes, drive-by traces with ground truth, and scoring.

The simulated vehicle drives along the kerb polyline at constant speed; the
sonar reads the lateral distance of whatever object is abeam, otherwise the
street background.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from . import geo
from .aggregate.metrics import detection_metrics
from .calibrate import EnvironmentSignature
from .classifier import Detection
from .spacemap import ParkingZone, assign_zone, zones_document
from .trace import Trace, TracePoint

ObjectKind = Literal["car", "pole", "furniture"]
DriftMode = Literal["none", "constant", "linear", "random_walk"]

WHEATLEY = (51.748295, -1.14049621)


@dataclass(frozen=True)
class SceneObject:
    kind: ObjectKind
    start: float  # m along the street
    length: float  # m
    lateral: float  # cm from the sensor

    @property
    def end(self) -> float:
        return self.start + self.length


@dataclass(frozen=True)
class StreetScene:
    kerb: tuple[tuple[float, float], ...]
    background: float = 550.0  # cm
    objects: tuple[SceneObject, ...] = ()
    zones: tuple[ParkingZone, ...] = ()
    signatures: tuple[EnvironmentSignature, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kerb", tuple(tuple(map(float, v)) for v in self.kerb))
        objs = tuple(sorted(self.objects, key=lambda o: o.start))
        object.__setattr__(self, "objects", objs)
        object.__setattr__(self, "zones", tuple(self.zones))
        object.__setattr__(self, "signatures", tuple(self.signatures))
        if len(self.kerb) < 2:
            raise ValueError("kerb needs at least 2 vertices")
        for a, b in zip(objs, objs[1:]):
            if b.start < a.end:
                raise ValueError(f"objects overlap at {b.start:.2f} m")
        for o in objs:
            if not o.lateral < self.background:
                raise ValueError(f"object at {o.start:.2f} m is not closer than the background")
            if o.length <= 0 or o.start < 0 or o.end > self.length:
                raise ValueError(f"object at {o.start:.2f} m lies outside the street")

    @property
    def length(self) -> float:
        return geo.polyline_length(self.kerb)

    def point_at(self, along: float) -> tuple[float, float]:
        return geo.interpolate(self.kerb, along)

    def zone(self, zone_id: str, start: float, end: float, capacity: int, buffer: float = 3.0) -> ParkingZone:
        """A ParkingZone covering the kerb between two along-street positions."""
        return ParkingZone(zone_id, tuple(geo.sub_polyline(self.kerb, start, end)), capacity, buffer)


def straight_kerb(length: float, origin: tuple[float, float] = WHEATLEY,
                  bearing_deg: float = 90.0) -> tuple[tuple[float, float], ...]:
    b = math.radians(bearing_deg)
    end = geo.offset(origin, length * math.sin(b), length * math.cos(b))
    return (tuple(origin), end)


@dataclass(frozen=True)
class NoiseModel:
    distance_sigma: float = 5.0  # cm; engineering guess, not measured
    drift_mode: DriftMode = "none"
    drift_magnitude: float = 0.0  # m
    drift_bearing: float = 90.0  # degrees clockwise from north
    dropout: float = 0.0

    def __post_init__(self):
        if self.distance_sigma < 0 or self.drift_magnitude < 0 or self.dropout < 0:
            raise ValueError("noise parameters must be >= 0")
        if not self.dropout < 1:
            raise ValueError("dropout must be < 1")

    @classmethod
    def none(cls) -> "NoiseModel":
        return cls(distance_sigma=0.0)


@dataclass(frozen=True)
class TruthObject:
    kind: str
    start: float
    length: float
    lateral: float
    latitude: float
    longitude: float
    zone_id: str | None

    @property
    def anchor(self) -> tuple[float, float]:
        return self.latitude, self.longitude


@dataclass(frozen=True)
class TruthSpace:
    zone_id: str
    start: float
    length: float


@dataclass
class GroundTruth:
    run_id: str
    speed_kmh: float
    objects: list[TruthObject]
    zones: list[ParkingZone]
    spaces: list[TruthSpace] = field(default_factory=list)

    @property
    def cars(self) -> list[TruthObject]:
        return [o for o in self.objects if o.kind == "car"]

    def cars_in(self, zone_id: str) -> int:
        return sum(1 for o in self.cars if o.zone_id == zone_id)

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "speed_kmh": self.speed_kmh,
            "objects": [o.__dict__ for o in self.objects],
            "zones": zones_document(self.zones),
            "spaces": [s.__dict__ for s in self.spaces],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GroundTruth":
        return cls(
            run_id=data["run_id"],
            speed_kmh=float(data["speed_kmh"]),
            objects=[TruthObject(**o) for o in data["objects"]],
            zones=[ParkingZone.from_feature(f) for f in data["zones"]["features"]],
            spaces=[TruthSpace(**s) for s in data.get("spaces", [])],
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "GroundTruth":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _zone_extent(scene: StreetScene, zone: ParkingZone) -> tuple[float, float]:
    """Along-street positions of a zone's two ends (nearest kerb point search)."""
    grid = np.linspace(0.0, scene.length, max(2, int(scene.length * 10) + 1))
    out = []
    for end in (zone.kerb_line[0], zone.kerb_line[-1]):
        d = [geo.haversine(end, scene.point_at(x)) for x in grid]
        out.append(float(grid[int(np.argmin(d))]))
    return min(out), max(out)


def _truth(scene: StreetScene, run_id: str, speed_kmh: float) -> GroundTruth:
    objects = []
    for o in scene.objects:
        lat, lon = scene.point_at(o.start)
        zone_id = assign_zone((lat, lon), scene.zones) if o.kind == "car" else None
        objects.append(TruthObject(o.kind, o.start, o.length, o.lateral, lat, lon, zone_id))
    spaces = []
    for zone in scene.zones:
        lo, hi = _zone_extent(scene, zone)
        cursor = lo
        for o in objects:
            if o.kind != "car" or o.zone_id != zone.zone_id:
                continue
            if o.start > cursor:
                spaces.append(TruthSpace(zone.zone_id, cursor, o.start - cursor))
            cursor = max(cursor, o.start + o.length)
        if hi > cursor:
            spaces.append(TruthSpace(zone.zone_id, cursor, hi - cursor))
    return GroundTruth(run_id, speed_kmh, objects, list(scene.zones), spaces)


def _drift(noise: NoiseModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """East/north drift in meters for each of n samples."""
    b = math.radians(noise.drift_bearing)
    unit = np.array([math.sin(b), math.cos(b)])
    if noise.drift_mode == "none" or noise.drift_magnitude == 0:
        return np.zeros((n, 2))
    if noise.drift_mode == "constant":
        return np.tile(unit * noise.drift_magnitude, (n, 1))
    if noise.drift_mode == "linear":
        ramp = np.linspace(0.0, 1.0, n) if n > 1 else np.zeros(1)
        return ramp[:, None] * unit * noise.drift_magnitude
    if noise.drift_mode == "random_walk":
        steps = rng.normal(0.0, noise.drift_magnitude / math.sqrt(max(n, 1)), size=(n, 2))
        return np.cumsum(steps, axis=0)
    raise ValueError(f"unknown drift mode {noise.drift_mode!r}")


def generate_trace(
    scene: StreetScene,
    speed: float = 20.0,
    sample_period: int = 50,
    noise: NoiseModel | None = None,
    seed: int = 0,
    run_id: str = "sim",
    vehicle_id: str = "sim",
) -> tuple[Trace, GroundTruth]:
    """One constant-speed pass along the whole kerb; speed in km/h."""
    if not speed > 0:
        raise ValueError("speed must be > 0")
    noise = noise if noise is not None else NoiseModel()
    rng = np.random.default_rng(seed)
    v = speed / 3.6
    step = v * sample_period / 1000.0
    n = int(math.floor(scene.length / step + 1e-6))
    x = np.arange(n) * step

    distance = np.full(n, scene.background, dtype=float)
    for o in scene.objects:
        distance[(x >= o.start) & (x < o.end)] = o.lateral
    if noise.distance_sigma > 0:
        distance = np.clip(distance + rng.normal(0.0, noise.distance_sigma, n), 0.0, None)
    distance = np.round(distance, 2)

    drift = _drift(noise, n, rng)
    keep = np.ones(n, dtype=bool)
    if noise.dropout > 0 and n > 2:
        keep[1:-1] = rng.random(n - 2) >= noise.dropout

    points = []
    for k in np.flatnonzero(keep):
        lat, lon = geo.offset(scene.point_at(float(x[k])), drift[k, 0], drift[k, 1])
        points.append(TracePoint(int(k * sample_period), float(distance[k]), lat, lon, float(speed)))
    trace = Trace(run_id, vehicle_id, tuple(points), sample_period)
    return trace, _truth(scene, run_id, speed)


@dataclass
class EvalReport:
    tp: int
    fp: int
    fn: int
    detection_rate: float
    paper_accuracy: float
    precision: float
    per_zone: dict[str, tuple[int, int, int]]  # detected / ground truth / capacity
    matches: list[tuple[int, int, float]] = field(default_factory=list)  # det, truth, meters
    run_id: str = ""

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "detection_rate": self.detection_rate,
            "paper_accuracy": self.paper_accuracy,
            "precision": self.precision,
            "per_zone": {k: list(v) for k, v in sorted(self.per_zone.items())},
        }


def greedy_match(
    detections: Sequence[tuple[float, float]],
    truth: Sequence[tuple[float, float]],
    radius: float,
) -> list[tuple[int, int, float]]:
    """One-to-one pairs by ascending distance, each within ``radius`` meters."""
    pairs = []
    for i, d in enumerate(detections):
        for j, t in enumerate(truth):
            dist = geo.haversine(d, t)
            if dist <= radius:
                # tie-break on coordinates, not on list position
                pairs.append((dist, d, t, i, j))
    pairs.sort(key=lambda p: p[:3])
    used_d, used_t, out = set(), set(), []
    for dist, _, _, i, j in pairs:
        if i in used_d or j in used_t:
            continue
        used_d.add(i)
        used_t.add(j)
        out.append((i, j, dist))
    return out


def evaluate(detections: Sequence[Detection], truth: GroundTruth, matching_radius: float = 5.0) -> EvalReport:
    parked = [d for d in detections if d.kind == "parked_vehicle"]
    cars = truth.cars
    matches = greedy_match([d.anchor for d in parked], [c.anchor for c in cars], matching_radius)
    tp = len(matches)
    fp = len(parked) - tp
    fn = len(cars) - tp
    if cars:
        m = detection_metrics(tp, len(cars), fp)
        rates = (m.detection_rate, m.paper_accuracy, m.precision)
    else:
        rates = (1.0 if not parked else 0.0, 1.0 if not parked else 0.0, 0.0 if parked else 1.0)
    per_zone = {}
    for zone in truth.zones:
        detected = sum(
            1 for d in parked
            if (d.zone_id if d.zone_id is not None else assign_zone(d.anchor, truth.zones)) == zone.zone_id
        )
        per_zone[zone.zone_id] = (detected, truth.cars_in(zone.zone_id), zone.capacity)
    return EvalReport(tp, fp, fn, *rates, per_zone=per_zone, matches=matches, run_id=truth.run_id)


def format_table(reports: Sequence[EvalReport]) -> str:
    """Runs as rows, zones as x/y/z columns, false positives last."""
    zone_ids = sorted({z for r in reports for z in r.per_zone})
    header = ["Run no."] + zone_ids + ["false positives"]
    rows = []
    for n, r in enumerate(reports, 1):
        cells = ["/".join(map(str, r.per_zone[z])) if z in r.per_zone else "-" for z in zone_ids]
        rows.append([r.run_id or str(n)] + cells + [str(r.fp)])
    widths = [max(len(row[k]) for row in [header] + rows) for k in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in [header] + rows]
    tp = sum(r.tp for r in reports)
    gt = sum(r.tp + r.fn for r in reports)
    fp = sum(r.fp for r in reports)
    if gt:
        m = detection_metrics(tp, gt, fp)
        lines.append(f"detection rate {tp}/{gt} = {m.detection_rate:.1%}, "
                     f"accuracy {tp}/{gt + fp} = {m.paper_accuracy:.1%}")
    return "\n".join(lines)


def derive_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


@dataclass
class SimRun:
    trace: Trace
    truth: GroundTruth
    wall_clock: str


def crowd_runs(
    schedule: Sequence[tuple[StreetScene, str]],
    speed: float = 20.0,
    noise: NoiseModel | None = None,
    seed: int = 0,
    sample_period: int = 50,
) -> list[SimRun]:
    """One simulated pass per schedule entry; run ids are run1, run2, ..."""
    if not schedule:
        raise ValueError("schedule is empty")
    out = []
    for k, (scene, wall_clock) in enumerate(schedule):
        run_id = f"run{k + 1}"
        trace, truth = generate_trace(scene, speed, sample_period, noise, derive_seed(seed, k),
                                      run_id=run_id)
        out.append(SimRun(trace, truth, wall_clock))
    return out


# -- scene builders ---------------------------------------------------------

def random_scene(
    seed: int,
    cars: tuple[int, int] = (2, 12),
    poles: tuple[int, int] = (0, 3),
    car_length: tuple[float, float] = (2.5, 8.0),
    lateral: tuple[float, float] = (90.0, 230.0),
    gap: tuple[float, float] = (1.0, 6.0),
    background: tuple[float, float] = (480.0, 580.0),
    margin: float = 12.0,
) -> StreetScene:
    """A straight street with randomly sized cars and thin poles, one zone over all of it."""
    rng = np.random.default_rng(seed)
    kinds = ["car"] * int(rng.integers(cars[0], cars[1] + 1))
    kinds += ["pole"] * int(rng.integers(poles[0], poles[1] + 1))
    rng.shuffle(kinds)
    objects, x = [], margin
    for kind in kinds:
        x += rng.uniform(*gap)
        length = rng.uniform(*car_length) if kind == "car" else rng.uniform(0.2, 0.4)
        objects.append(SceneObject(kind, x, length, rng.uniform(*lateral)))
        x += length
    total = x + margin
    kerb = straight_kerb(total)
    scene = StreetScene(kerb, float(rng.uniform(*background)), tuple(objects))
    n_cars = kinds.count("car")
    zone = scene.zone("zone1", margin / 2, total - margin / 2, n_cars + 2)
    return StreetScene(kerb, scene.background, scene.objects, (zone,))


def zone_street(
    capacities: Sequence[tuple[str, int]],
    occupancy: dict[str, int],
    seed: int = 0,
    slot: float = 6.0,
    separation: float = 20.0,
    poles: int = 2,
    background: float = 550.0,
) -> StreetScene:
    """Consecutive parking zones of ``capacity * slot`` meters each.

    ``occupancy`` maps zone id to the number of parked cars, placed in the
    first slots with a random length and lateral offset; ``poles`` thin
    objects go in the stretches between zones.
    """
    rng = np.random.default_rng(seed)
    x = separation
    spans, objects = [], []
    for zone_id, capacity in capacities:
        spans.append((zone_id, x, x + capacity * slot, capacity))
        for k in range(occupancy.get(zone_id, 0)):
            if k >= capacity:
                raise ValueError(f"{zone_id}: more cars than capacity")
            length = rng.uniform(3.6, 5.0)
            start = x + k * slot + rng.uniform(0.3, slot - length - 0.3)
            objects.append(SceneObject("car", start, length, rng.uniform(90.0, 230.0)))
        x += capacity * slot + separation
    gaps = [(a[2], b[1]) for a, b in zip(spans, spans[1:])] or [(0.0, separation)]
    for k in range(poles):
        lo, hi = gaps[k % len(gaps)]
        objects.append(SceneObject("pole", (lo + hi) / 2 + 0.5 * (k // len(gaps)), 0.3, 150.0))
    kerb = straight_kerb(x)
    base = StreetScene(kerb, background, tuple(objects))
    zones = tuple(base.zone(zid, lo, hi, cap) for zid, lo, hi, cap in spans)
    return StreetScene(kerb, background, base.objects, zones)


# -- file formats -----------------------------------------------------------

def scene_to_dict(scene: StreetScene) -> dict:
    return {
        "kerb": [list(v) for v in scene.kerb],
        "background_cm": scene.background,
        "objects": [
            {"kind": o.kind, "start_m": o.start, "length_m": o.length, "lateral_cm": o.lateral}
            for o in scene.objects
        ],
        "zones": [
            {"zone_id": z.zone_id, "capacity": z.capacity, "buffer_m": z.buffer,
             "kerb_line": [list(v) for v in z.kerb_line]}
            for z in scene.zones
        ],
        "signatures": [s.to_dict() for s in scene.signatures],
    }


def scene_from_dict(data: dict) -> StreetScene:
    """Zones may give ``kerb_line`` or ``start_m``/``end_m`` along the street."""
    kerb = tuple(tuple(v) for v in data["kerb"])
    objects = tuple(
        SceneObject(o["kind"], float(o["start_m"]), float(o["length_m"]), float(o["lateral_cm"]))
        for o in data.get("objects", [])
    )
    base = StreetScene(kerb, float(data.get("background_cm", 550.0)), objects)
    zones = []
    for z in data.get("zones", []):
        if "kerb_line" in z:
            zones.append(ParkingZone(str(z["zone_id"]), tuple(tuple(v) for v in z["kerb_line"]),
                                     int(z["capacity"]), float(z.get("buffer_m", 3.0))))
        else:
            zones.append(base.zone(str(z["zone_id"]), float(z["start_m"]), float(z["end_m"]),
                                   int(z["capacity"]), float(z.get("buffer_m", 3.0))))
    signatures = tuple(EnvironmentSignature.from_dict(s) for s in data.get("signatures", []))
    return StreetScene(kerb, base.background, objects, tuple(zones), signatures)


def load_scene(path: str | Path) -> StreetScene:
    return scene_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def save_scene(scene: StreetScene, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scene_to_dict(scene), indent=2) + "\n", encoding="utf-8")


def load_schedule(path: str | Path) -> list[tuple[StreetScene, str]]:
    """JSON array of ``{"scene": path, "wall_clock": iso}``; paths are file-relative."""
    path = Path(path)
    entries = json.loads(path.read_text(encoding="utf-8"))
    return [(load_scene(path.parent / e["scene"]), e["wall_clock"]) for e in entries]
