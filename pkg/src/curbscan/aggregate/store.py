"""Persistence: append-only JSONL run log plus an atomically replaced snapshot."""

from __future__ import annotations

import json
import os
import tempfile
import threading
from pathlib import Path
from typing import Iterable

from ..spacemap import ParkingZone
from .occupancy import IngestResult, OccupancyMap, RunRecord, dumps_geojson, export_geojson, ingest_run


def write_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def replay(zones: Iterable[ParkingZone], log_path: str | Path) -> OccupancyMap:
    occupancy = OccupancyMap.empty(zones)
    path = Path(log_path)
    if not path.exists():
        return occupancy
    with path.open(encoding="utf-8") as fh:
        for n, line in enumerate(fh):
            if not line.strip():
                continue
            try:
                record = RunRecord.from_dict(json.loads(line))
            except (ValueError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}: record {n}: {exc}") from exc
            occupancy = ingest_run(occupancy, record).map
    return occupancy


class MapStore:
    """Single-writer map store; readers always see a fully applied snapshot."""

    def __init__(self, zones: Iterable[ParkingZone], log_path: str | Path,
                 snapshot_path: str | Path | None = None):
        self.log_path = Path(log_path)
        self.snapshot_path = Path(snapshot_path) if snapshot_path else None
        self._lock = threading.Lock()
        self._map = replay(zones, self.log_path)

    @property
    def map(self) -> OccupancyMap:
        return self._map

    def ingest(self, record: RunRecord) -> IngestResult:
        with self._lock:
            result = ingest_run(self._map, record)
            with self.log_path.open("a", encoding="utf-8", newline="\n") as fh:
                fh.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")
            if self.snapshot_path is not None:
                write_atomic(self.snapshot_path, dumps_geojson(export_geojson(result.map)))
            self._map = result.map
            return result
