"""U-shaped contour segmentation and per-candidate statistics.

Everything is measured in a metric plane: x is longitudinal meters
(speed integrated over time), y is lateral meters (distance / 100).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence, TYPE_CHECKING

import numpy as np

from .errors import NonPositiveRise, TooFewSamples, ZeroSpeed
from .trace import Trace

if TYPE_CHECKING:
    from .classifier import ClassifierConfig

log = logging.getLogger(__name__)

_EPS_M = 1e-9
BACKGROUND_PERCENTILE = 95


@dataclass(frozen=True)
class ContourCandidate:
    start_index: int
    end_index: int
    bottom_distance: float  # cm, mean over the bottom
    bottom_std: float  # cm, over the min-length window
    context_std: float  # cm, over the max-length window
    lead_angle: float  # degrees
    trail_angle: float  # degrees
    length: float  # m
    anchor: tuple[float, float]  # lat, lon of the bottom start

    def __post_init__(self):
        if self.start_index > self.end_index:
            raise ValueError("start_index > end_index")
        if self.length < 0:
            raise ValueError("negative length")


def window_indices(trace: Trace, start: int, window_length: float) -> range:
    """Indices from ``start`` covering ``window_length`` meters of travel.

    Equivalent to the time window [t_start, t_start + length / speed] with
    speed taken as the mean over the window.
    """
    if trace.points[start].speed <= 0:
        raise ZeroSpeed(f"vehicle stationary at index {start}")
    pos = trace.positions
    stop = int(np.searchsorted(pos, pos[start] + window_length + _EPS_M, side="right"))
    return range(start, max(stop, start + 1))


def centered_window(trace: Trace, first: int, last: int, window_length: float) -> range:
    """Indices within ``window_length`` meters centred on the span first..last."""
    pos = trace.positions
    mid = (pos[first] + pos[last]) / 2
    lo = int(np.searchsorted(pos, mid - window_length / 2 - _EPS_M, side="left"))
    hi = int(np.searchsorted(pos, mid + window_length / 2 + _EPS_M, side="right"))
    return range(lo, hi)


def sample_std(values: Sequence[float]) -> float:
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise TooFewSamples(f"need at least 2 samples, got {values.size}")
    return float(np.std(values, ddof=1))


def longitudinal_position(trace: Trace, i: int) -> float:
    return float(trace.positions[i])


def edge_angle(rise: float, run: float) -> float:
    """Angle in degrees between the bottom direction and an edge vector."""
    if not rise > 0:
        raise NonPositiveRise(f"rise must be > 0, got {rise}")
    return math.degrees(math.atan2(rise, run))


def background_distance(trace: Trace) -> float:
    return float(np.percentile(trace.distances, BACKGROUND_PERCENTILE))


def plateaus(trace: Trace, threshold: float) -> list[tuple[int, int]]:
    """Maximal runs of samples closer than ``threshold``, as (first, last)."""
    below = np.concatenate(([False], trace.distances < threshold, [False]))
    change = np.flatnonzero(np.diff(below.astype(np.int8)))
    return [(int(a), int(b) - 1) for a, b in zip(change[::2], change[1::2])]


def _std_or_nan(values: np.ndarray) -> float:
    return float(np.std(values, ddof=1)) if values.size >= 2 else math.nan


def _candidate(trace: Trace, first: int, last: int, config: "ClassifierConfig") -> ContourCandidate:
    d = trace.distances
    pos = trace.positions
    bottom = d[first : last + 1]
    bottom_mean = float(bottom.mean())

    small = window_indices(trace, first, config.length_min)
    big = centered_window(trace, first, last, config.length_max)

    # edges sit halfway between the last background sample and the first
    # bottom sample, so a plateau of n samples spans n sample spacings
    lead_run = pos[first] - pos[first - 1]
    trail_run = pos[last + 1] - pos[last]
    lead_rise = (d[first - 1] - bottom_mean) / 100.0
    trail_rise = (d[last + 1] - bottom_mean) / 100.0
    length = (pos[last] - pos[first]) + lead_run / 2 + trail_run / 2

    return ContourCandidate(
        start_index=first,
        end_index=last,
        bottom_distance=bottom_mean,
        bottom_std=_std_or_nan(d[small.start : small.stop]),
        context_std=_std_or_nan(d[big.start : big.stop]),
        # the lead edge climbs backwards from the bottom start, the trail edge forwards
        lead_angle=edge_angle(lead_rise, -lead_run) if lead_rise > 0 else math.nan,
        trail_angle=edge_angle(trail_rise, trail_run) if trail_rise > 0 else math.nan,
        length=float(length),
        anchor=trace.coords(first),
    )


def extract_candidates(
    trace: Trace, config: "ClassifierConfig", skipped: list[str] | None = None
) -> list[ContourCandidate]:
    """Segment the trace into below-background plateaus.

    Plateaus touching either end of the trace are incomplete U-shapes and
    are dropped, as are plateaus where the vehicle was stationary. A
    description of each stationary skip is appended to ``skipped``.
    """
    if len(trace) < 3:
        return []
    threshold = background_distance(trace) - config.background_gap
    out = []
    for first, last in plateaus(trace, threshold):
        if first == 0 or last == len(trace) - 1:
            continue
        if trace.points[first].speed <= 0 or trace.positions[last + 1] == trace.positions[first - 1]:
            msg = f"stationary vehicle over indices {first}..{last}, candidate skipped"
            log.warning(msg)
            if skipped is not None:
                skipped.append(msg)
            continue
        out.append(_candidate(trace, first, last, config))
    return out
