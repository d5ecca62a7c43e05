"""Four-feature parked-vehicle classifier and empty-space detector."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Literal

import numpy as np

from .contour import ContourCandidate, extract_candidates
from .trace import Trace

Kind = Literal["parked_vehicle", "empty_space"]


@dataclass(frozen=True)
class ClassifierConfig:
    distance_min: float = 70.0  # cm
    distance_max: float = 250.0  # cm
    sigma_small: float = 10.9  # cm
    sigma_big: float = 51.3  # cm
    length_min: float = 2.1  # m
    length_max: float = 9.0  # m
    angle_min: float = 80.0  # degrees
    angle_max: float = 130.0  # degrees
    background_gap: float = 100.0  # cm below background that opens a plateau

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"{f.name} must be positive")
        for lo, hi in (("distance_min", "distance_max"), ("length_min", "length_max"),
                       ("angle_min", "angle_max")):
            if not getattr(self, lo) < getattr(self, hi):
                raise ValueError(f"{lo} must be < {hi}")

    @classmethod
    def from_dict(cls, data: dict) -> "ClassifierConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in data.items()})

    @classmethod
    def load(cls, path: str | Path) -> "ClassifierConfig":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class Detection:
    kind: Kind
    latitude: float
    longitude: float
    timestamp: int  # ms, first index of the object or region
    run_id: str
    length: float | None = None  # m, empty spaces only
    end_timestamp: int | None = None  # ms, last index of the object or region
    zone_id: str | None = None
    illegal: bool = False

    def __post_init__(self):
        if self.length is not None and self.kind != "empty_space":
            raise ValueError("only empty_space detections carry a length")

    @property
    def anchor(self) -> tuple[float, float]:
        return self.latitude, self.longitude

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "Detection":
        return cls(**data)


@dataclass
class Classification:
    parked: list[Detection] = field(default_factory=list)
    empty: list[Detection] = field(default_factory=list)
    candidates: list[ContourCandidate] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def _in(value: float, lo: float, hi: float) -> bool:
    return lo <= value <= hi


def is_parked_vehicle(candidate: ContourCandidate, config: ClassifierConfig) -> bool:
    c = candidate
    return (
        c.bottom_std < config.sigma_small
        and c.context_std > config.sigma_big
        and _in(c.bottom_distance, config.distance_min, config.distance_max)
        and _in(c.lead_angle, config.angle_min, config.angle_max)
        and _in(c.trail_angle, config.angle_min, config.angle_max)
        and _in(c.length, config.length_min, config.length_max)
    )


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    padded = np.concatenate(([False], mask, [False]))
    change = np.flatnonzero(np.diff(padded.astype(np.int8)))
    return [(int(a), int(b) - 1) for a, b in zip(change[::2], change[1::2])]


def empty_regions(trace: Trace, config: ClassifierConfig, exclude: np.ndarray | None = None):
    """Maximal far-distance runs lasting at least length_max of travel.

    Yields (first, last, length_m). Length is measured between the edge
    midpoints, like vehicle lengths.
    """
    far = trace.distances > config.distance_max
    if exclude is not None:
        far &= ~exclude
    pos = trace.positions
    n = len(trace)
    for first, last in _runs(far):
        lo = (pos[first] + pos[first - 1]) / 2 if first > 0 else pos[first]
        hi = (pos[last] + pos[last + 1]) / 2 if last < n - 1 else pos[last]
        if hi - lo + 1e-9 >= config.length_max:
            yield first, last, float(hi - lo)


def classify(trace: Trace, config: ClassifierConfig | None = None) -> Classification:
    """Emit one parked Detection per accepted candidate and one empty per far region."""
    config = config or ClassifierConfig()
    result = Classification()
    if not trace.points:
        return result
    stationary = int(np.count_nonzero(trace.speeds <= 0))
    if stationary:
        result.warnings.append(f"{stationary} stationary samples contribute no travel distance")
    result.candidates = extract_candidates(trace, config, result.warnings)
    used = np.zeros(len(trace), dtype=bool)
    for c in result.candidates:
        if not is_parked_vehicle(c, config):
            continue
        used[c.start_index : c.end_index + 1] = True
        result.parked.append(Detection(
            kind="parked_vehicle",
            latitude=c.anchor[0],
            longitude=c.anchor[1],
            timestamp=trace.points[c.start_index].timestamp,
            end_timestamp=trace.points[c.end_index].timestamp,
            run_id=trace.run_id,
        ))
    for first, last, length in empty_regions(trace, config, exclude=used):
        lat, lon = trace.coords(first)
        result.empty.append(Detection(
            kind="empty_space",
            latitude=lat,
            longitude=lon,
            timestamp=trace.points[first].timestamp,
            end_timestamp=trace.points[last].timestamp,
            run_id=trace.run_id,
            length=length,
        ))
    return result


def write_detections(detections: Iterable[Detection], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for d in detections:
            fh.write(d.to_json() + "\n")


def read_detections(path: str | Path) -> list[Detection]:
    out = []
    with Path(path).open(encoding="utf-8") as fh:
        for n, line in enumerate(fh):
            if not line.strip():
                continue
            try:
                out.append(Detection.from_dict(json.loads(line)))
            except (ValueError, TypeError) as exc:
                raise ValueError(f"{path}: record {n}: {exc}") from exc
    return out
