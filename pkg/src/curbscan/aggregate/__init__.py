from .metrics import DetectionMetrics, detection_metrics
from .occupancy import (
    IngestResult,
    OccupancyMap,
    RunRecord,
    ZoneObservation,
    ZoneState,
    dumps_geojson,
    export_geojson,
    import_geojson,
    ingest_run,
    query_zone,
    record_from_detections,
    summarize_run,
)
from .store import MapStore, replay, write_atomic

__all__ = [
    "DetectionMetrics",
    "IngestResult",
    "MapStore",
    "OccupancyMap",
    "RunRecord",
    "ZoneObservation",
    "ZoneState",
    "detection_metrics",
    "dumps_geojson",
    "export_geojson",
    "import_geojson",
    "ingest_run",
    "query_zone",
    "record_from_detections",
    "replay",
    "summarize_run",
    "write_atomic",
]
