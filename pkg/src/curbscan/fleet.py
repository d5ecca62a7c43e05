"""How many sensing vehicles cover a city, and what cruising for parking costs."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from decimal import ROUND_DOWN, Decimal
from pathlib import Path
from typing import Iterable, NamedTuple


def kmh_to_ms(speed_kmh: float) -> float:
    return speed_kmh / 3.6


@dataclass(frozen=True)
class FleetParams:
    s: float  # city area, m^2
    p: float  # fraction of the area that is road
    w: float  # mean road width, m
    tau: float  # map update frequency, 1/s
    gamma: float  # vehicle detection accuracy
    nu: float  # mean cruising speed, m/s

    def __post_init__(self):
        for name in ("s", "p", "w", "tau", "gamma", "nu"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if self.p > 1 or self.gamma > 1:
            raise ValueError("p and gamma must be <= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "FleetParams":
        """Read the unit-suffixed parameter file layout."""
        return cls(
            s=float(data["area_km2"]) * 1e6,
            p=float(data["road_ratio"]),
            w=float(data["road_width_m"]),
            tau=1.0 / float(data["update_s"]),
            gamma=float(data["accuracy"]),
            nu=kmh_to_ms(float(data["speed_kmh"])),
        )

    @classmethod
    def load(cls, path: str | Path) -> "FleetParams":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def road_length(s: float, p: float, w: float) -> float:
    """Total road length (m) from area, road ratio and road width."""
    return s * p / w


class UnitEstimate(NamedTuple):
    exact: float
    units: int


def units_needed(L: float, nu: float, tau: float, gamma: float) -> UnitEstimate:
    """Vehicles needed so every road point is re-observed every 1/tau seconds.

    Each vehicle sweeps a rolling window of nu / tau meters per update
    period, discounted by the detection accuracy gamma.
    """
    for name, v in (("L", L), ("nu", nu), ("tau", tau), ("gamma", gamma)):
        if not v > 0:
            raise ValueError(f"{name} must be > 0")
    exact = L / (nu * (1.0 / tau) * gamma)
    # guard against 1.0000000000000002 style ceilings
    units = math.ceil(round(exact, 9))
    return UnitEstimate(exact, units)


def estimate(params: FleetParams) -> dict:
    L = road_length(params.s, params.p, params.w)
    est = units_needed(L, params.nu, params.tau, params.gamma)
    return {"road_length_m": L, "exact": est.exact, "units": est.units}


class CurveRow(NamedTuple):
    update_seconds: float
    nu: float
    gamma: float
    exact: float
    units: int


def units_curve(
    L: float,
    nu_list: Iterable[float],
    gamma_list: Iterable[float],
    update_seconds: Iterable[float],
) -> list[CurveRow]:
    """Grid of unit counts over update period, speed (m/s) and accuracy."""
    nu_list, gamma_list, update_seconds = list(nu_list), list(gamma_list), list(update_seconds)
    if not (nu_list and gamma_list and update_seconds):
        raise ValueError("every grid axis needs at least one value")
    rows = []
    for period, nu, gamma in itertools.product(update_seconds, nu_list, gamma_list):
        est = units_needed(L, nu, 1.0 / period, gamma)
        rows.append(CurveRow(period, nu, gamma, est.exact, est.units))
    return rows


@dataclass(frozen=True)
class CruisingParams:
    search_minutes: float
    turnover: float  # searches per spot per day
    speed: float  # km/h
    fuel_rate: float  # litres per 100 km

    def __post_init__(self):
        for name in ("search_minutes", "turnover", "speed", "fuel_rate"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @classmethod
    def from_dict(cls, data: dict) -> "CruisingParams":
        return cls(
            search_minutes=float(data["search_minutes"]),
            turnover=float(data["turnover"]),
            speed=float(data["speed_kmh"]),
            fuel_rate=float(data["fuel_l_per_100km"]),
        )

    @classmethod
    def load(cls, path: str | Path) -> "CruisingParams":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def cruising_cost(params: CruisingParams, truncate_daily_km: bool = True) -> dict:
    """Time, distance and fuel spent cruising for one parking spot.

    With ``truncate_daily_km`` the daily distance is cut to two decimals
    before annualising (16.875 km -> 16.87 km), which is how the published
    yearly figures were produced. Decimal arithmetic keeps results exact.
    """
    minutes = Decimal(str(params.search_minutes))
    turnover = Decimal(str(params.turnover))
    speed = Decimal(str(params.speed))
    fuel = Decimal(str(params.fuel_rate))

    min_per_day = minutes * turnover
    km_per_day = min_per_day / 60 * speed
    if truncate_daily_km:
        km_per_day = km_per_day.quantize(Decimal("0.01"), rounding=ROUND_DOWN)
    km_per_year = km_per_day * 365
    return {
        "min_per_day": float(min_per_day),
        "min_per_year": float(min_per_day * 365),
        "km_per_day": float(km_per_day),
        "km_per_year": float(km_per_year),
        "litres_per_year": float(km_per_year * fuel / 100),
    }
