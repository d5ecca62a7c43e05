"""Crowdsourced occupancy map: latest-wins zone state across runs."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Iterable, Mapping, Sequence

from ..classifier import ClassifierConfig, Detection
from ..errors import StaleRun
from ..spacemap import ParkingZone, Space, label_zones, spaces_by_capacity, variable_length_spaces, zone_span
from ..trace import Trace

log = logging.getLogger(__name__)


def parse_time(value) -> datetime:
    """Accept ISO-8601 (``Z`` allowed) or epoch seconds; return aware UTC."""
    if isinstance(value, datetime):
        dt = value
    elif isinstance(value, (int, float)):
        dt = datetime.fromtimestamp(value, timezone.utc)
    else:
        text = str(value).strip()
        if text.endswith("Z"):
            text = text[:-1] + "+00:00"
        dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_time(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def _space_to_dict(s: Space) -> dict:
    return {"coordinates": [s.anchor[1], s.anchor[0]], "length_m": s.length, "timestamp": s.timestamp}


def _space_from_dict(d: dict, zone_id: str | None) -> Space:
    lon, lat = d["coordinates"]
    return Space((lat, lon), float(d["length_m"]), zone_id, d.get("timestamp"))


@dataclass(frozen=True)
class ZoneObservation:
    """What one run saw in one zone."""

    parked: int
    variable_spaces: tuple[Space, ...] = ()


@dataclass(frozen=True)
class RunRecord:
    """One ingest event: everything a run contributes to the map."""

    run_id: str
    wall_clock: datetime
    zones: Mapping[str, ZoneObservation]
    illegal: tuple[Detection, ...] = ()

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "wall_clock": format_time(self.wall_clock),
            "zones": {
                zid: {"parked": obs.parked,
                      "variable_spaces": [_space_to_dict(s) for s in obs.variable_spaces]}
                for zid, obs in sorted(self.zones.items())
            },
            "illegal": [json.loads(d.to_json()) for d in self.illegal],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunRecord":
        return cls(
            run_id=str(data["run_id"]),
            wall_clock=parse_time(data["wall_clock"]),
            zones={
                zid: ZoneObservation(
                    int(obs["parked"]),
                    tuple(_space_from_dict(s, zid) for s in obs.get("variable_spaces", [])),
                )
                for zid, obs in data["zones"].items()
            },
            illegal=tuple(Detection.from_dict(d) for d in data.get("illegal", [])),
        )


@dataclass(frozen=True)
class ZoneState:
    zone_id: str
    capacity: int
    parked: int
    spaces_by_capacity: int
    variable_spaces: tuple[Space, ...]
    last_update: datetime
    source_run_id: str

    def to_dict(self) -> dict:
        return {
            "zone_id": self.zone_id,
            "capacity": self.capacity,
            "parked": self.parked,
            "spaces_by_capacity": self.spaces_by_capacity,
            "variable_spaces": [_space_to_dict(s) for s in self.variable_spaces],
            "last_update": format_time(self.last_update),
            "source_run_id": self.source_run_id,
        }


@dataclass(frozen=True)
class OccupancyMap:
    """Immutable snapshot; :func:`ingest_run` returns a new map."""

    zones: Mapping[str, ParkingZone] = field(default_factory=dict)
    states: Mapping[str, ZoneState] = field(default_factory=dict)
    illegal: Mapping[str, tuple[Detection, ...]] = field(default_factory=dict)  # by run_id

    @classmethod
    def empty(cls, zones: Iterable[ParkingZone] = ()) -> "OccupancyMap":
        return cls({z.zone_id: z for z in zones}, {}, {})


@dataclass
class IngestResult:
    map: OccupancyMap
    stale: list[StaleRun]
    unknown_zones: list[str]


def ingest_run(occupancy: OccupancyMap, run: RunRecord) -> IngestResult:
    """Replace the state of every zone the run observed, unless it is older.

    Runs are ordered by (wall clock, run id); ties on the clock fall back to
    the run id so the outcome never depends on arrival order.
    """
    states = dict(occupancy.states)
    stale, unknown = [], []
    key = (run.wall_clock, run.run_id)
    for zone_id, obs in run.zones.items():
        zone = occupancy.zones.get(zone_id)
        if zone is None:
            unknown.append(zone_id)
            continue
        current = states.get(zone_id)
        if current is not None and key < (current.last_update, current.source_run_id):
            err = StaleRun(zone_id, run.run_id, run.wall_clock, current.last_update)
            log.info("%s", err)
            stale.append(err)
            continue
        states[zone_id] = ZoneState(
            zone_id=zone_id,
            capacity=zone.capacity,
            parked=obs.parked,
            spaces_by_capacity=spaces_by_capacity(zone, obs.parked),
            variable_spaces=tuple(replace(s, zone_id=zone_id) for s in obs.variable_spaces),
            last_update=run.wall_clock,
            source_run_id=run.run_id,
        )
    illegal = dict(occupancy.illegal)
    if run.illegal:
        illegal[run.run_id] = tuple(run.illegal)
    return IngestResult(OccupancyMap(occupancy.zones, states, illegal), stale, unknown)


def query_zone(occupancy: OccupancyMap, zone_id: str) -> ZoneState | None:
    return occupancy.states.get(zone_id)


def summarize_run(
    trace: Trace,
    detections: Sequence[Detection],
    zones: Sequence[ParkingZone],
    wall_clock,
    config: ClassifierConfig | None = None,
    min_space: float | None = None,
) -> RunRecord:
    """Turn one run's detections into an ingest event.

    A zone counts as observed when the trace passes both ends of its kerb
    line; observed zones with no cars are reported as empty.
    """
    labelled = label_zones([d for d in detections if d.kind == "parked_vehicle"], zones)
    observed = {}
    for zone in zones:
        if zone_span(trace, zone) is None:
            continue
        in_zone = [d for d in labelled if d.zone_id == zone.zone_id]
        observed[zone.zone_id] = ZoneObservation(
            parked=len(in_zone),
            variable_spaces=tuple(variable_length_spaces(trace, in_zone, config, min_space, zone)),
        )
    return RunRecord(
        run_id=trace.run_id,
        wall_clock=parse_time(wall_clock),
        zones=observed,
        illegal=tuple(d for d in labelled if d.illegal),
    )


def record_from_detections(
    detections: Sequence[Detection],
    zones: Sequence[ParkingZone],
    run_id: str,
    wall_clock,
    observed_zones: Iterable[str] | None = None,
) -> RunRecord:
    """Ingest event built from detections alone (no trace available).

    Observed zones default to those containing at least one detection;
    empty-space detections with a length become variable-length spaces.
    """
    labelled = label_zones(detections, zones)
    seen = set(observed_zones or ()) | {d.zone_id for d in labelled if d.zone_id is not None}
    observed = {}
    for zone_id in sorted(seen):
        parked = sum(1 for d in labelled if d.kind == "parked_vehicle" and d.zone_id == zone_id)
        spaces = tuple(
            Space(d.anchor, d.length, zone_id, d.timestamp)
            for d in labelled
            if d.kind == "empty_space" and d.zone_id == zone_id and d.length
        )
        observed[zone_id] = ZoneObservation(parked, spaces)
    return RunRecord(
        run_id=run_id,
        wall_clock=parse_time(wall_clock),
        zones=observed,
        illegal=tuple(d for d in labelled if d.illegal),
    )


def export_geojson(occupancy: OccupancyMap) -> dict:
    """FeatureCollection: a LineString per zone and a Point per illegal car."""
    features = []
    for zone_id in sorted(occupancy.zones):
        feature = occupancy.zones[zone_id].to_feature()
        state = occupancy.states.get(zone_id)
        props = feature["properties"]
        if state is None:
            props.update(parked=None, spaces_by_capacity=None, variable_spaces=[],
                         last_update=None, source_run_id=None)
        else:
            props.update(parked=state.parked, spaces_by_capacity=state.spaces_by_capacity,
                         variable_spaces=[_space_to_dict(s) for s in state.variable_spaces],
                         last_update=format_time(state.last_update),
                         source_run_id=state.source_run_id)
        features.append(feature)
    for run_id in sorted(occupancy.illegal):
        for d in sorted(occupancy.illegal[run_id], key=lambda d: (d.timestamp, d.latitude, d.longitude)):
            features.append({
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [d.longitude, d.latitude]},
                "properties": {
                    "feature": "illegal_parking",
                    "run_id": d.run_id,
                    "timestamp": d.timestamp,
                    "end_timestamp": d.end_timestamp,
                },
            })
    return {"type": "FeatureCollection", "features": features}


def dumps_geojson(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def import_geojson(doc: dict) -> OccupancyMap:
    """Rebuild a map from :func:`export_geojson` output."""
    zones, states, illegal = {}, {}, {}
    for f in doc["features"]:
        props = f["properties"]
        if f["geometry"]["type"] == "LineString":
            zone = ParkingZone.from_feature(f)
            zones[zone.zone_id] = zone
            if props.get("last_update") is not None:
                states[zone.zone_id] = ZoneState(
                    zone_id=zone.zone_id,
                    capacity=zone.capacity,
                    parked=int(props["parked"]),
                    spaces_by_capacity=int(props["spaces_by_capacity"]),
                    variable_spaces=tuple(_space_from_dict(s, zone.zone_id)
                                          for s in props["variable_spaces"]),
                    last_update=parse_time(props["last_update"]),
                    source_run_id=props["source_run_id"],
                )
        elif props.get("feature") == "illegal_parking":
            lon, lat = f["geometry"]["coordinates"]
            d = Detection("parked_vehicle", lat, lon, props["timestamp"], props["run_id"],
                          end_timestamp=props.get("end_timestamp"), illegal=True)
            illegal.setdefault(d.run_id, []).append(d)
    return OccupancyMap(zones, states, {k: tuple(v) for k, v in illegal.items()})
