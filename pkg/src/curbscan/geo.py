"""Small spherical-earth helpers (haversine, cross-track, local tangent plane)."""

from __future__ import annotations

import math
from typing import Sequence, Tuple

EARTH_RADIUS_M = 6_371_008.8

LatLon = Tuple[float, float]


def haversine(a: LatLon, b: LatLon) -> float:
    """Great-circle distance in meters between two (lat, lon) pairs."""
    lat1, lon1 = map(math.radians, a)
    lat2, lon2 = map(math.radians, b)
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    return 2 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def initial_bearing(a: LatLon, b: LatLon) -> float:
    """Initial bearing from a to b, radians clockwise from north."""
    lat1, lon1 = map(math.radians, a)
    lat2, lon2 = map(math.radians, b)
    dlon = lon2 - lon1
    y = math.sin(dlon) * math.cos(lat2)
    x = math.cos(lat1) * math.sin(lat2) - math.sin(lat1) * math.cos(lat2) * math.cos(dlon)
    return math.atan2(y, x)


def point_segment_distance(p: LatLon, a: LatLon, b: LatLon) -> float:
    """Great-circle distance in meters from p to the arc a-b.

    Uses the cross-track / along-track decomposition; falls back to the
    nearer endpoint when the foot of the perpendicular is off the arc.
    """
    d_ab = haversine(a, b)
    d_ap = haversine(a, p)
    if d_ab == 0.0 or d_ap == 0.0:
        return d_ap
    delta13 = d_ap / EARTH_RADIUS_M
    theta13 = initial_bearing(a, p)
    theta12 = initial_bearing(a, b)
    xt = math.asin(max(-1.0, min(1.0, math.sin(delta13) * math.sin(theta13 - theta12))))
    # behind the start of the arc
    if math.cos(theta13 - theta12) < 0:
        return d_ap
    cos_xt = math.cos(xt)
    along = math.acos(max(-1.0, min(1.0, math.cos(delta13) / cos_xt))) * EARTH_RADIUS_M
    if along > d_ab:
        return haversine(b, p)
    return abs(xt) * EARTH_RADIUS_M


def point_polyline_distance(p: LatLon, line: Sequence[LatLon]) -> float:
    return min(point_segment_distance(p, a, b) for a, b in zip(line, line[1:]))


def offset(point: LatLon, east_m: float, north_m: float) -> LatLon:
    """Shift a point by east/north meters in its local tangent plane."""
    lat, lon = point
    dlat = math.degrees(north_m / EARTH_RADIUS_M)
    dlon = math.degrees(east_m / (EARTH_RADIUS_M * math.cos(math.radians(lat))))
    return lat + dlat, lon + dlon


def displacement(origin: LatLon, target: LatLon) -> Tuple[float, float]:
    """East/north meters taking origin to target (inverse of :func:`offset`)."""
    lat, lon = origin
    north = math.radians(target[0] - lat) * EARTH_RADIUS_M
    east = math.radians(target[1] - lon) * EARTH_RADIUS_M * math.cos(math.radians(lat))
    return east, north


def polyline_length(line: Sequence[LatLon]) -> float:
    return sum(haversine(a, b) for a, b in zip(line, line[1:]))


def interpolate(line: Sequence[LatLon], along_m: float) -> LatLon:
    """Point at ``along_m`` meters along a polyline (clamped to its ends).

    Each segment is short enough for linear interpolation in degrees.
    """
    if along_m <= 0:
        return tuple(line[0])
    walked = 0.0
    for a, b in zip(line, line[1:]):
        seg = haversine(a, b)
        if seg > 0 and walked + seg >= along_m:
            f = (along_m - walked) / seg
            return a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])
        walked += seg
    return tuple(line[-1])


def sub_polyline(line: Sequence[LatLon], start_m: float, end_m: float) -> list[LatLon]:
    """Vertices of the stretch of ``line`` between two along-track distances."""
    pts = [interpolate(line, start_m)]
    walked = 0.0
    for a, b in zip(line, line[1:]):
        walked += haversine(a, b)
        if start_m < walked < end_m:
            pts.append(tuple(b))
    pts.append(interpolate(line, end_m))
    return pts
