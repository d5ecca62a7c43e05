"""GPS drift correction against surveyed roadside landmarks."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, replace
from itertools import groupby
from pathlib import Path
from typing import Sequence

import numpy as np

from . import geo
from .classifier import ClassifierConfig
from .contour import ContourCandidate, extract_candidates
from .trace import Trace

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EnvironmentSignature:
    signature_id: str
    surveyed: tuple[float, float]  # lat, lon
    length_range: tuple[float, float]  # m
    distance_range: tuple[float, float]  # cm
    angle_range: tuple[float, float] = (0.0, 180.0)  # degrees, both edges
    search_radius: float = 30.0  # m

    def __post_init__(self):
        for name in ("length_range", "distance_range", "angle_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"signature {self.signature_id!r}: empty {name}")
        if not self.search_radius > 0:
            raise ValueError(f"signature {self.signature_id!r}: search_radius must be positive")

    def fits(self, c: ContourCandidate) -> bool:
        return (
            self.length_range[0] <= c.length <= self.length_range[1]
            and self.distance_range[0] <= c.bottom_distance <= self.distance_range[1]
            and self.angle_range[0] <= c.lead_angle <= self.angle_range[1]
            and self.angle_range[0] <= c.trail_angle <= self.angle_range[1]
        )

    def to_dict(self) -> dict:
        return {
            "signature_id": self.signature_id,
            "surveyed": list(self.surveyed),
            "length_range": list(self.length_range),
            "distance_range": list(self.distance_range),
            "angle_range": list(self.angle_range),
            "search_radius": self.search_radius,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EnvironmentSignature":
        return cls(
            signature_id=str(data["signature_id"]),
            surveyed=tuple(data["surveyed"]),
            length_range=tuple(data["length_range"]),
            distance_range=tuple(data["distance_range"]),
            angle_range=tuple(data.get("angle_range", (0.0, 180.0))),
            search_radius=float(data.get("search_radius", 30.0)),
        )


def load_signatures(path: str | Path) -> list[EnvironmentSignature]:
    return [EnvironmentSignature.from_dict(d) for d in json.loads(Path(path).read_text(encoding="utf-8"))]


def save_signatures(signatures: Sequence[EnvironmentSignature], path: str | Path) -> None:
    Path(path).write_text(json.dumps([s.to_dict() for s in signatures], indent=2) + "\n",
                          encoding="utf-8")


@dataclass(frozen=True)
class SignatureMatch:
    signature_id: str
    candidate_index: int
    observed: tuple[float, float]
    surveyed: tuple[float, float]
    timestamp: int  # ms of the candidate's bottom start


@dataclass
class MatchReport:
    matches: list[SignatureMatch]
    ambiguous: list[str]
    missing: list[str]


def match_signatures(
    candidates: Sequence[ContourCandidate],
    signatures: Sequence[EnvironmentSignature],
    trace: Trace | None = None,
) -> MatchReport:
    """Pair each signature with the single fitting candidate near it.

    Ambiguous (two or more fits) and absent signatures are skipped and
    listed in the report. Without a trace, match timestamps are the
    candidate start indices.
    """
    report = MatchReport([], [], [])
    for sig in signatures:
        hits = [
            k for k, c in enumerate(candidates)
            if geo.haversine(c.anchor, sig.surveyed) <= sig.search_radius and sig.fits(c)
        ]
        if len(hits) > 1:
            log.warning("signature %s ambiguous: %d candidates", sig.signature_id, len(hits))
            report.ambiguous.append(sig.signature_id)
            continue
        if not hits:
            report.missing.append(sig.signature_id)
            continue
        c = candidates[hits[0]]
        ts = trace.points[c.start_index].timestamp if trace is not None else c.start_index
        report.matches.append(SignatureMatch(sig.signature_id, hits[0], c.anchor, sig.surveyed, ts))
    report.matches.sort(key=lambda m: m.timestamp)
    return report


class OffsetFunction:
    """Correction (east, north) meters as a function of timestamp.

    Linear between matches, constant outside them, zero without matches.
    """

    def __init__(self, times: Sequence[float], east: Sequence[float], north: Sequence[float]):
        self.times = np.asarray(times, dtype=float)
        self.east = np.asarray(east, dtype=float)
        self.north = np.asarray(north, dtype=float)

    def __call__(self, timestamp: float) -> tuple[float, float]:
        if self.times.size == 0:
            return 0.0, 0.0
        return (float(np.interp(timestamp, self.times, self.east)),
                float(np.interp(timestamp, self.times, self.north)))

    @property
    def is_zero(self) -> bool:
        return not (np.any(self.east) or np.any(self.north))


def compute_offsets(matches: Sequence[SignatureMatch]) -> OffsetFunction:
    ordered = sorted(matches, key=lambda m: m.timestamp)
    times, east, north = [], [], []
    # np.interp needs distinct abscissae; coincident matches are averaged
    for ts, group in groupby(ordered, key=lambda m: m.timestamp):
        shifts = np.array([geo.displacement(m.observed, m.surveyed) for m in group])
        times.append(ts)
        east.append(shifts[:, 0].mean())
        north.append(shifts[:, 1].mean())
    return OffsetFunction(times, east, north)


def apply_offsets(trace: Trace, offsets: OffsetFunction) -> Trace:
    if offsets.is_zero:
        return trace
    points = []
    for p in trace.points:
        e, n = offsets(p.timestamp)
        lat, lon = geo.offset((p.latitude, p.longitude), e, n)
        points.append(replace(p, latitude=lat, longitude=lon))
    return trace.with_points(points)


def calibrate(trace: Trace, signatures: Sequence[EnvironmentSignature],
              config: ClassifierConfig | None = None) -> tuple[Trace, MatchReport]:
    """Extract candidates, match signatures and return (corrected trace, report)."""
    config = config or ClassifierConfig()
    candidates = extract_candidates(trace, config)
    report = match_signatures(candidates, signatures, trace)
    return apply_offsets(trace, compute_offsets(report.matches)), report
