"""Bundled demo scenario and synthetic wind-series generator.

The demo farm is a desk-scale two-UAV, seven-turbine layout.  Each UAV is
stationed at a turbine (B110 and A213) which it inspects from the ground, so
only the remaining five turbines enter the flight plans.  Under a 10 m/s east
wind, E105 falls outside UAV1's effective range and gets handed to UAV2.

The wind series is synthetic (mean-reverting speed with a diurnal swing and a
slowly meandering direction); no external measurement data is bundled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kinematics import UavSpec
from .wind import TurbineSpec, WindVector, wind_vector

# SG 8.0-167-class turbine, offshore air density.
ROTOR_AREA = 21900.0  # m^2
RATED_POWER = 8.0e6  # W
AIR_DENSITY = 1.065  # kg/m^3

TURBINE_POSITIONS: dict[str, tuple[float, float]] = {
    "B110": (0.0, 0.0),
    "C214": (-1440.0, 1440.0),
    "A106": (1920.0, 1440.0),
    "A411": (1920.0, -1200.0),
    "E105": (4400.0, 300.0),
    "A213": (3500.0, -1900.0),
    "D101": (4500.0, -1900.0),
}

#: Turbines inspected on foot because a UAV is stationed there.
BASE_TURBINES = ("B110", "A213")


@dataclass(frozen=True)
class DemoFarm:
    uavs: tuple[UavSpec, ...]
    turbines: tuple[TurbineSpec, ...]
    flyable: tuple[TurbineSpec, ...]
    assignment: dict[str, list[str]]
    wind: WindVector


def demo_turbine(name: str) -> TurbineSpec:
    return TurbineSpec(
        name,
        TURBINE_POSITIONS[name],
        rotor_area=ROTOR_AREA,
        rated_power=RATED_POWER,
        pitch=0.0,
        air_density=AIR_DENSITY,
    )


def demo_farm(wind_speed: float = 10.0, wind_dir_met: float = math.pi / 2) -> DemoFarm:
    """The bundled two-UAV inspection scenario under one frozen wind."""
    turbines = tuple(demo_turbine(name) for name in TURBINE_POSITIONS)
    flyable = tuple(t for t in turbines if t.id not in BASE_TURBINES)
    uavs = (
        UavSpec(
            "UAV1",
            TURBINE_POSITIONS["B110"],
            u_max=16.0,
            t_max=18.0 * 60.0,
            rho=13500.0,
            wind_resist=15.0,
            base_label="B110",
        ),
        UavSpec(
            "UAV2",
            TURBINE_POSITIONS["A213"],
            u_max=16.0,
            t_max=18.0 * 60.0,
            rho=13500.0,
            wind_resist=15.0,
            base_label="A213",
        ),
    )
    assignment = {
        "UAV1": ["C214", "A106", "A411", "E105"],
        "UAV2": ["D101"],
    }
    return DemoFarm(
        uavs=uavs,
        turbines=turbines,
        flyable=flyable,
        assignment=assignment,
        wind=wind_vector(wind_speed, wind_dir_met),
    )


def synthetic_wind(
    seed: int,
    n: int,
    resolution_s: int = 300,
    mean_speed: float = 8.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic synthetic (speed m/s, direction deg) arrays of length n.

    Both channels are mean-reverting AR(1) wiggles around slow profiles: the
    speed around a diurnal swing, the direction around a meandering base held
    away from the 0/360 seam (raw min-max normalization downstream would turn
    seam crossings into spurious jumps).
    """
    rng = np.random.default_rng(seed)
    t = np.arange(n) * resolution_s
    day = 86400.0
    diurnal = 0.6 * np.sin(2.0 * math.pi * t / day) + 0.3 * np.sin(4.0 * math.pi * t / day + 1.0)

    speed = np.empty(n)
    x = 0.0
    shocks = rng.normal(0.0, 0.45, size=n)
    for i in range(n):
        x = 0.9 * x + shocks[i]
        speed[i] = mean_speed + diurnal[i] + x
    np.clip(speed, 0.0, None, out=speed)

    base = 190.0 + 40.0 * np.sin(2.0 * math.pi * t / (1.5 * day)) + 18.0 * np.sin(
        2.0 * math.pi * t / (0.55 * day) + 0.7
    )
    direction = np.empty(n)
    y = 0.0
    dir_shocks = rng.normal(0.0, 7.0, size=n)
    for i in range(n):
        y = 0.9 * y + dir_shocks[i]
        direction[i] = (base[i] + y) % 360.0
    return speed, direction


def synthetic_csv_rows(seed: int, n: int, resolution_s: int = 300, start="2024-03-01T00:00:00Z"):
    """Rows (timestamp, speed, direction) for writing a sample CSV."""
    from datetime import datetime, timedelta, timezone

    speed, direction = synthetic_wind(seed, n, resolution_s)
    t0 = datetime.fromisoformat(start.replace("Z", "+00:00")).astimezone(timezone.utc)
    rows = []
    for i in range(n):
        ts = t0 + timedelta(seconds=i * resolution_s)
        rows.append((ts.strftime("%Y-%m-%dT%H:%M:%SZ"), f"{speed[i]:.3f}", f"{direction[i]:.2f}"))
    return rows
