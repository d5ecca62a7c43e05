"""Drive-test trace model: one sonar + GPS sample every sample period.

Two text layouts are understood:

* ``csv``   -- canonical, ``timestamp_ms,distance_cm,lat,lon,speed_kmh``
* ``paper`` -- human layout, ``93777 ms/532 cm/51.748295/-1.14049621/24.85 km/h``

Coordinates are assumed to be already interpolated onto every sonar sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Literal

import numpy as np

from .errors import EmptyTrace, MalformedRecord, NonMonotoneTimestamp, OutOfRange, TraceError

CSV_HEADER = "timestamp_ms,distance_cm,lat,lon,speed_kmh"
FIELDS = ("timestamp", "distance", "latitude", "longitude", "speed")
DEFAULT_MAX_RANGE_CM = 600.0
NOMINAL_SAMPLE_PERIOD_MS = 50

Format = Literal["paper", "csv"]


@dataclass(frozen=True)
class TracePoint:
    timestamp: int  # ms since run start
    distance: float  # cm, sensor to nearest obstacle
    latitude: float
    longitude: float
    speed: float  # km/h
    # set when a reading above the sensor range was saturated to it
    clamped: bool = field(default=False, compare=False)


def _fmt(value: float) -> str:
    if float(value).is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


def _number(text: str, name: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise MalformedRecord(f"{name}: not a number: {text!r}", field=name) from None
    if not math.isfinite(value):
        raise MalformedRecord(f"{name}: not finite: {text!r}", field=name)
    return value


def _integer(text: str, name: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise MalformedRecord(f"{name}: not an integer: {text!r}", field=name) from None


def _strip_unit(text: str, unit: str, name: str) -> str:
    text = text.strip()
    if not text.endswith(unit):
        raise MalformedRecord(f"{name}: missing unit {unit!r} in {text!r}", field=name)
    return text[: -len(unit)].strip()


def _split(text: str, format: Format) -> list[str]:
    if format == "csv":
        parts = [p.strip() for p in text.strip().split(",")]
        if len(parts) != 5:
            raise MalformedRecord(f"expected 5 comma-separated fields, got {len(parts)}")
        return parts
    if format == "paper":
        body = text.strip()
        if not body.endswith("km/h"):
            raise MalformedRecord("speed: missing unit 'km/h'", field="speed")
        parts = body[: -len("km/h")].split("/")
        if len(parts) != 5:
            raise MalformedRecord(f"expected 5 '/'-separated fields, got {len(parts)}")
        parts[0] = _strip_unit(parts[0], "ms", "timestamp")
        parts[1] = _strip_unit(parts[1], "cm", "distance")
        return [p.strip() for p in parts]
    raise ValueError(f"unknown trace format {format!r}")


def make_point(
    timestamp: int,
    distance: float,
    latitude: float,
    longitude: float,
    speed: float,
    max_range: float = DEFAULT_MAX_RANGE_CM,
) -> TracePoint:
    """Validate raw values and build a point, saturating over-range distances."""
    if timestamp < 0:
        raise OutOfRange(f"timestamp: {timestamp} < 0", field="timestamp")
    if distance < 0:
        raise OutOfRange(f"distance: {distance} < 0", field="distance")
    if not -90.0 <= latitude <= 90.0:
        raise OutOfRange(f"latitude: {latitude} outside [-90, 90]", field="latitude")
    if not -180.0 <= longitude <= 180.0:
        raise OutOfRange(f"longitude: {longitude} outside [-180, 180]", field="longitude")
    if speed < 0:
        raise OutOfRange(f"speed: {speed} < 0", field="speed")
    clamped = distance > max_range
    if clamped:
        distance = max_range
    return TracePoint(timestamp, distance, latitude, longitude, speed, clamped)


def parse_trace_line(
    text: str, format: Format = "csv", max_range: float = DEFAULT_MAX_RANGE_CM
) -> TracePoint:
    """Parse one record. Raises MalformedRecord or OutOfRange naming the field."""
    ts, dist, lat, lon, speed = _split(text, format)
    return make_point(
        _integer(ts, "timestamp"),
        _number(dist, "distance"),
        _number(lat, "latitude"),
        _number(lon, "longitude"),
        _number(speed, "speed"),
        max_range=max_range,
    )


def format_trace_line(point: TracePoint, format: Format = "csv") -> str:
    values = (
        str(point.timestamp),
        _fmt(point.distance),
        repr(float(point.latitude)),
        repr(float(point.longitude)),
        repr(float(point.speed)),
    )
    if format == "csv":
        return ",".join(values)
    if format == "paper":
        return "{} ms/{} cm/{}/{}/{} km/h".format(*values)
    raise ValueError(f"unknown trace format {format!r}")


@dataclass(frozen=True)
class Trace:
    run_id: str
    vehicle_id: str
    points: tuple[TracePoint, ...]
    sample_period: int = NOMINAL_SAMPLE_PERIOD_MS

    def __post_init__(self):
        if not self.run_id:
            raise ValueError("run_id must be non-empty")
        object.__setattr__(self, "points", tuple(self.points))
        for i in range(1, len(self.points)):
            if self.points[i].timestamp <= self.points[i - 1].timestamp:
                raise NonMonotoneTimestamp(
                    f"timestamp {self.points[i].timestamp} does not increase", "timestamp", i
                )

    def __len__(self) -> int:
        return len(self.points)

    @cached_property
    def timestamps(self) -> np.ndarray:
        return np.array([p.timestamp for p in self.points], dtype=np.int64)

    @cached_property
    def distances(self) -> np.ndarray:
        return np.array([p.distance for p in self.points], dtype=float)

    @cached_property
    def speeds(self) -> np.ndarray:
        """Speeds in m/s."""
        return np.array([p.speed for p in self.points], dtype=float) / 3.6

    @cached_property
    def positions(self) -> np.ndarray:
        """Cumulative longitudinal position in meters at every sample."""
        if not self.points:
            return np.zeros(0)
        dt = np.diff(self.timestamps) / 1000.0
        return np.concatenate(([0.0], np.cumsum(self.speeds[:-1] * dt)))

    def coords(self, i: int) -> tuple[float, float]:
        p = self.points[i]
        return p.latitude, p.longitude

    def index_of(self, timestamp: int) -> int:
        """Index of the sample with this exact timestamp."""
        i = int(np.searchsorted(self.timestamps, timestamp))
        if i >= len(self.points) or self.points[i].timestamp != timestamp:
            raise KeyError(timestamp)
        return i

    def with_points(self, points: Iterable[TracePoint]) -> "Trace":
        return Trace(self.run_id, self.vehicle_id, tuple(points), self.sample_period)


def _infer_period(points: list[TracePoint]) -> int:
    if len(points) < 2:
        return NOMINAL_SAMPLE_PERIOD_MS
    gaps = np.diff([p.timestamp for p in points])
    return int(np.median(gaps))


def load_trace(
    stream: Iterable[str | TracePoint],
    run_id: str,
    vehicle_id: str = "unknown",
    format: Format = "csv",
    max_range: float = DEFAULT_MAX_RANGE_CM,
) -> Trace:
    """Build a validated Trace from text records (or ready-made points).

    Blank lines and the CSV header are skipped. Errors carry the 0-based
    index of the offending record.
    """
    points: list[TracePoint] = []
    for n, record in enumerate(stream):
        if isinstance(record, TracePoint):
            point = record
        else:
            if not record.strip() or record.strip() == CSV_HEADER:
                continue
            try:
                point = parse_trace_line(record, format, max_range)
            except TraceError as exc:
                exc.index = n
                raise
        if points and point.timestamp <= points[-1].timestamp:
            raise NonMonotoneTimestamp(
                f"timestamp {point.timestamp} does not increase", "timestamp", len(points)
            )
        points.append(point)
    if not points:
        raise EmptyTrace("trace has no records")
    return Trace(run_id, vehicle_id, tuple(points), _infer_period(points))


def read_trace(path: str | Path, run_id: str | None = None, vehicle_id: str = "unknown",
               format: Format = "csv", max_range: float = DEFAULT_MAX_RANGE_CM) -> Trace:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        return load_trace(fh, run_id or path.stem, vehicle_id, format, max_range)


def write_trace(trace: Trace, path: str | Path) -> None:
    lines = [CSV_HEADER] + [format_trace_line(p) for p in trace.points]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
