import pytest

from curbscan.simgen import SceneObject, StreetScene, straight_kerb
from curbscan.trace import Trace, TracePoint

ORIGIN = (51.748295, -1.14049621)


def make_trace(distances, speed=20.0, period=50, run_id="t", lat=ORIGIN[0], lon=ORIGIN[1]):
    """Straight eastbound pass, one sample per period, coordinates advancing with speed."""
    from curbscan import geo

    step = speed / 3.6 * period / 1000.0
    points = []
    for k, d in enumerate(distances):
        la, lo = geo.offset((lat, lon), k * step, 0.0)
        points.append(TracePoint(k * period, float(d), la, lo, speed))
    return Trace(run_id, "v", tuple(points), period)


def scene_with(objects, length=60.0, background=500.0, zones=()):
    kerb = straight_kerb(length, ORIGIN)
    return StreetScene(kerb, background, tuple(SceneObject(*o) for o in objects), zones)


@pytest.fixture
def car_scene():
    """One 4.5 m car at 150 cm, background 500 cm."""
    return scene_with([("car", 20.0, 4.5, 150.0)])


@pytest.fixture
def car_pole_scene():
    # pole start sits on a sample (k=144 at 0.2778 m/sample)
    return scene_with([("car", 20.0, 4.5, 150.0), ("pole", 144 * 50 / 3600 * 20 - 0.05, 0.3, 150.0)])
