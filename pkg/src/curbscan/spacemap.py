"""Parking zones, illegal-parking flags and the two space presentations.

Spaces are reported two ways and never reconciled: capacity minus detected
cars, and measured gaps between neighbouring obstacles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import geo
from .classifier import ClassifierConfig, Detection
from .trace import Trace


@dataclass(frozen=True)
class ParkingZone:
    zone_id: str
    kerb_line: tuple[tuple[float, float], ...]  # (lat, lon) vertices along the kerb
    capacity: int
    buffer: float = 3.0  # m

    def __post_init__(self):
        object.__setattr__(self, "kerb_line", tuple(tuple(map(float, v)) for v in self.kerb_line))
        if len(self.kerb_line) < 2:
            raise ValueError(f"zone {self.zone_id!r}: kerb_line needs at least 2 vertices")
        if self.capacity < 0:
            raise ValueError(f"zone {self.zone_id!r}: negative capacity")
        if not self.buffer > 0:
            raise ValueError(f"zone {self.zone_id!r}: buffer must be positive")

    def distance_to(self, point: tuple[float, float]) -> float:
        return geo.point_polyline_distance(point, self.kerb_line)

    @property
    def length(self) -> float:
        return geo.polyline_length(self.kerb_line)

    def to_feature(self) -> dict:
        return {
            "type": "Feature",
            "geometry": {
                "type": "LineString",
                "coordinates": [[lon, lat] for lat, lon in self.kerb_line],
            },
            "properties": {"zone_id": self.zone_id, "capacity": self.capacity, "buffer_m": self.buffer},
        }

    @classmethod
    def from_feature(cls, feature: dict) -> "ParkingZone":
        geom = feature["geometry"]
        if geom["type"] != "LineString":
            raise ValueError(f"zone geometry must be LineString, got {geom['type']}")
        props = feature["properties"]
        return cls(
            zone_id=str(props["zone_id"]),
            kerb_line=tuple((lat, lon) for lon, lat, *_ in geom["coordinates"]),
            capacity=int(props["capacity"]),
            buffer=float(props.get("buffer_m", 3.0)),
        )


@dataclass(frozen=True)
class Space:
    anchor: tuple[float, float]
    length: float  # m
    zone_id: str | None = None
    timestamp: int | None = None  # ms at the gap start

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError("space length must be positive")


def load_zones(path: str | Path) -> list[ParkingZone]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("type") != "FeatureCollection":
        raise ValueError(f"{path}: not a GeoJSON FeatureCollection")
    return [ParkingZone.from_feature(f) for f in doc["features"]]


def zones_document(zones: Iterable[ParkingZone]) -> dict:
    return {"type": "FeatureCollection", "features": [z.to_feature() for z in zones]}


def save_zones(zones: Iterable[ParkingZone], path: str | Path) -> None:
    Path(path).write_text(json.dumps(zones_document(zones), indent=2) + "\n", encoding="utf-8")


def assign_zone(point: tuple[float, float], zones: Iterable[ParkingZone]) -> str | None:
    """Zone whose kerb line lies within its buffer of the point; nearest wins."""
    best = None
    for zone in zones:
        d = zone.distance_to(point)
        if d <= zone.buffer:
            key = (d, zone.zone_id)
            if best is None or key < best[0]:
                best = (key, zone.zone_id)
    return best[1] if best else None


def label_zones(detections: Iterable[Detection], zones: Sequence[ParkingZone]) -> list[Detection]:
    """Attach zone ids, marking parked detections outside every zone as illegal."""
    out = []
    for d in detections:
        zone_id = assign_zone(d.anchor, zones)
        illegal = d.kind == "parked_vehicle" and zone_id is None
        out.append(replace(d, zone_id=zone_id, illegal=illegal))
    return out


def flag_illegal(detections: Iterable[Detection], zones: Sequence[ParkingZone]) -> list[Detection]:
    return [d for d in label_zones(detections, zones) if d.illegal]


def spaces_by_capacity(zone: ParkingZone, parked_in_zone: int) -> int:
    if parked_in_zone < 0:
        raise ValueError("parked_in_zone must be >= 0")
    return max(0, zone.capacity - parked_in_zone)


def time_at_position(trace: Trace, along_m: float) -> float:
    """Timestamp (ms, fractional) at which the vehicle reached ``along_m``."""
    return float(np.interp(along_m, trace.positions, trace.timestamps))


def position_at_time(trace: Trace, t_ms: float) -> float:
    return float(np.interp(t_ms, trace.timestamps, trace.positions))


def measure_gap(trace: Trace, t_from: float, t_to: float) -> float:
    """Gap length in meters: elapsed time times the mean speed over it."""
    if t_to <= t_from:
        return 0.0
    return position_at_time(trace, t_to) - position_at_time(trace, t_from)


def _edges(trace: Trace, detection: Detection) -> tuple[float, float]:
    """Lead and trail edge times of an obstacle, halfway to the neighbouring samples."""
    ts = trace.timestamps
    i = trace.index_of(detection.timestamp)
    j = trace.index_of(detection.end_timestamp if detection.end_timestamp is not None
                       else detection.timestamp)
    lead = (ts[i] + ts[i - 1]) / 2 if i > 0 else float(ts[i])
    trail = (ts[j] + ts[j + 1]) / 2 if j < len(ts) - 1 else float(ts[j])
    return float(lead), float(trail)


def zone_span(trace: Trace, zone: ParkingZone) -> tuple[float, float] | None:
    """Times (ms) at which the trace passes the two ends of the zone's kerb line.

    None when the trace never comes within the zone buffer of both ends.
    """
    times = []
    for end in (zone.kerb_line[0], zone.kerb_line[-1]):
        d = np.array([geo.haversine(end, trace.coords(i)) for i in range(len(trace))])
        i = int(d.argmin())
        if d[i] > zone.buffer + trace.positions[-1] / max(len(trace) - 1, 1):
            return None
        times.append(float(trace.timestamps[i]))
    return min(times), max(times)


def gap_spaces(
    trace: Trace,
    intervals: Sequence[tuple[float, float]],
    min_space: float,
    bounds: tuple[float, float] | None = None,
    zone_id: str | None = None,
) -> list[Space]:
    """Spaces between consecutive obstacle intervals given as (lead, trail) times.

    ``bounds`` adds the stretch from the zone start to the first obstacle and
    from the last obstacle to the zone end.
    """
    ordered = sorted(intervals)
    gaps = [(a[1], b[0]) for a, b in zip(ordered, ordered[1:])]
    if bounds is not None:
        lo, hi = bounds
        inside = [iv for iv in ordered if iv[1] > lo and iv[0] < hi]
        if inside:
            gaps = [(lo, inside[0][0])] + [(a[1], b[0]) for a, b in zip(inside, inside[1:])] + [
                (inside[-1][1], hi)
            ]
        else:
            gaps = [(lo, hi)]
    out = []
    for t0, t1 in gaps:
        length = measure_gap(trace, t0, t1)
        if length + 1e-9 >= min_space:
            i = min(int(np.searchsorted(trace.timestamps, t0)), len(trace) - 1)
            out.append(Space(trace.coords(i), length, zone_id, int(round(t0))))
    return out


def variable_length_spaces(
    trace: Trace,
    parked: Sequence[Detection],
    config: ClassifierConfig | None = None,
    min_space: float | None = None,
    zone: ParkingZone | None = None,
) -> list[Space]:
    """Gaps between neighbouring parked vehicles at least ``min_space`` long.

    With a zone, only obstacles inside it count and the zone ends bound the
    first and last gaps.
    """
    config = config or ClassifierConfig()
    if min_space is None:
        min_space = config.length_min
    if not min_space > 0:
        raise ValueError("min_space must be positive")
    intervals = [_edges(trace, d) for d in parked]
    bounds = None
    zone_id = None
    if zone is not None:
        bounds = zone_span(trace, zone)
        zone_id = zone.zone_id
        if bounds is None:
            return []
    return gap_spaces(trace, intervals, min_space, bounds, zone_id)
