"""Wind-affected UAV velocity triangle, flight times, and flying-range geometry.

The ground-speed model is deliberately piecewise.  With theta_sw the unsigned
angle between the ground track and the wind vector:

* theta_sw <= pi/2 (tail wind, boundary included): the ground speed is pinned
  at the airspeed limit u_max.
* theta_sw > pi/2 (head wind): the UAV crabs into the wind; the crab angle is
  theta_sv = arcsin(w_s * sin(pi - theta_sw) / u_max) and the ground speed is
  u_max * cos(theta_sv) - w_s * cos(pi - theta_sw).

Near-perpendicular tail winds therefore imply an airspeed above u_max (holding
u_max ground speed across a strong crosswind is super-physical); the source
model accepts that, and so do we.  In the head-wind branch the airspeed is
exactly u_max.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateLegError, InvalidInputError, LegInfeasibleError
from .wind import WindVector, angle_between, normalize_angle


@dataclass(frozen=True)
class UavSpec:
    """Static description of one UAV."""

    id: str
    pos: tuple[float, float]
    u_max: float  # airspeed limit, m/s
    t_max: float  # flight-time budget per route, s
    rho: float | None = None  # operator flying distance, m
    wind_resist: float | None = None  # max tolerable wind speed, m/s
    base_label: str | None = None  # printed name of the start point

    def __post_init__(self):
        if self.u_max <= 0.0 or self.t_max <= 0.0:
            raise InvalidInputError("u_max and t_max must be > 0")
        if self.rho is not None and self.rho <= 0.0:
            raise InvalidInputError("rho must be > 0")
        resist = self.wind_resist
        if resist is not None and not 0.0 <= resist < self.u_max:
            raise InvalidInputError("wind_resist must satisfy 0 <= wind_resist < u_max")

    @property
    def flying_distance(self) -> float:
        """Operator flying distance; defaults to the out-and-back reach."""
        if self.rho is not None:
            return self.rho
        return 0.5 * self.u_max * self.t_max

    @property
    def max_wind(self) -> float:
        if self.wind_resist is not None:
            return self.wind_resist
        return self.u_max  # exclusive bound: legs become infeasible at u_max

    @property
    def label(self) -> str:
        return self.base_label if self.base_label is not None else self.id


@dataclass(frozen=True)
class VelocityTriangle:
    """Solved v + w = s triangle for one leg."""

    air_velocity: tuple[float, float]
    ground_velocity: tuple[float, float]
    theta_sv: float  # crab angle between ground track and airframe heading
    theta_sw: float  # angle between ground track and wind vector

    @property
    def ground_speed(self) -> float:
        return math.hypot(*self.ground_velocity)

    @property
    def air_speed(self) -> float:
        return math.hypot(*self.air_velocity)


@dataclass(frozen=True)
class FlyingRange:
    """Disc reachability region."""

    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if self.radius < 0.0:
            raise InvalidInputError("radius must be >= 0")

    def contains(self, point: tuple[float, float]) -> bool:
        return math.dist(point, self.center) <= self.radius


def ground_velocity(
    frm: tuple[float, float],
    to: tuple[float, float],
    wind: WindVector,
    u_max: float,
) -> VelocityTriangle:
    """Solve the velocity triangle for a straight leg under uniform wind."""
    if u_max <= 0.0:
        raise InvalidInputError("u_max must be > 0")
    dx, dy = to[0] - frm[0], to[1] - frm[1]
    dist = math.hypot(dx, dy)
    if dist == 0.0:
        raise DegenerateLegError(f"coincident leg endpoints {frm}")
    theta_s = normalize_angle(math.atan2(dy, dx))
    w_s = wind.speed

    if w_s == 0.0:
        theta_sw = 0.0
    else:
        theta_sw = angle_between(theta_s, wind.theta_pol)

    if theta_sw <= 0.5 * math.pi:
        # Tail wind: ground-speed cap binds.
        ground_speed = u_max
        theta_sv = 0.0
    else:
        cross = w_s * math.sin(math.pi - theta_sw)
        if cross > u_max:
            raise LegInfeasibleError(
                f"crosswind component {cross:.3f} m/s exceeds airspeed limit {u_max:.3f} m/s"
            )
        theta_sv = math.asin(cross / u_max)
        ground_speed = u_max * math.cos(theta_sv) - w_s * math.cos(math.pi - theta_sw)
        if ground_speed <= 0.0:
            raise LegInfeasibleError(
                f"head wind {w_s:.3f} m/s leaves no forward progress (u_max {u_max:.3f} m/s)"
            )

    sx = ground_speed * math.cos(theta_s)
    sy = ground_speed * math.sin(theta_s)
    return VelocityTriangle(
        air_velocity=(sx - wind.wx, sy - wind.wy),
        ground_velocity=(sx, sy),
        theta_sv=theta_sv,
        theta_sw=theta_sw,
    )


def flight_time(
    frm: tuple[float, float],
    to: tuple[float, float],
    wind: WindVector,
    u_max: float,
) -> float:
    """Leg time: distance over ground speed.  Raises if the leg is infeasible."""
    tri = ground_velocity(frm, to, wind, u_max)
    return math.dist(frm, to) / tri.ground_speed


def drifted_center(uav: UavSpec, wind: WindVector) -> tuple[float, float]:
    """Launch point displaced by the wind over a full flight-time budget."""
    return (uav.pos[0] + wind.wx * uav.t_max, uav.pos[1] + wind.wy * uav.t_max)


def effective_range(uav: UavSpec, wind: WindVector) -> tuple[FlyingRange, FlyingRange]:
    """The pair of discs whose intersection is the wind-adjusted reachable set."""
    rho = uav.flying_distance
    return FlyingRange(uav.pos, rho), FlyingRange(drifted_center(uav, wind), rho)


def in_effective_range(point: tuple[float, float], uav: UavSpec, wind: WindVector) -> bool:
    """Membership in the intersection of the home disc and the drifted disc."""
    home, drifted = effective_range(uav, wind)
    return home.contains(point) and drifted.contains(point)
