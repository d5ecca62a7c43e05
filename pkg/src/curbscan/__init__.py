"""Drive-by sonar parking detection, crowdsourced occupancy maps and fleet sizing."""

from .classifier import ClassifierConfig, Detection, classify, is_parked_vehicle
from .contour import ContourCandidate, extract_candidates
from .spacemap import ParkingZone, Space
from .trace import Trace, TracePoint, load_trace, parse_trace_line, read_trace, write_trace

__version__ = "0.1.0"

__all__ = [
    "ClassifierConfig",
    "ContourCandidate",
    "Detection",
    "ParkingZone",
    "Space",
    "Trace",
    "TracePoint",
    "classify",
    "extract_candidates",
    "is_parked_vehicle",
    "load_trace",
    "parse_trace_line",
    "read_trace",
    "write_trace",
]
