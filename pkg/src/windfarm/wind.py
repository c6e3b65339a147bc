"""Wind representation, angle conventions, rotor-plane decomposition and turbine power.

Conventions: angles are radians in [0, 2*pi) everywhere inside the library.
Meteorological direction is where the wind blows FROM, clockwise from north;
polar direction is the mathematical heading of the wind vector,
counterclockwise from +x.  The two are related by
theta_pol = 3*pi/2 - theta_met (mod 2*pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidAngleError, InvalidInputError

TWO_PI = 2.0 * math.pi

#: Betz limit: upper bound on any power coefficient.
CP_MAX = 0.593


def normalize_angle(theta: float) -> float:
    """Map an angle into [0, 2*pi)."""
    if not math.isfinite(theta):
        raise InvalidAngleError(f"non-finite angle: {theta!r}")
    out = theta % TWO_PI
    # x % 2*pi rounds up to 2*pi itself for tiny negative x
    return 0.0 if out >= TWO_PI else out


def angle_between(a: float, b: float) -> float:
    """Smallest unsigned angle between two headings, in [0, pi]."""
    return abs((a - b + math.pi) % TWO_PI - math.pi)


def met_to_polar(theta_met: float) -> float:
    """Convert a meteorological direction to the wind vector's polar heading."""
    return normalize_angle(1.5 * math.pi - normalize_angle(theta_met))


def polar_to_met(theta_pol: float) -> float:
    """Inverse of :func:`met_to_polar` (the map is an involution mod 2*pi)."""
    return normalize_angle(1.5 * math.pi - normalize_angle(theta_pol))


@dataclass(frozen=True)
class WindVector:
    """Cartesian wind velocity, m/s."""

    wx: float
    wy: float

    def __post_init__(self):
        if not (math.isfinite(self.wx) and math.isfinite(self.wy)):
            raise InvalidInputError(f"non-finite wind vector: ({self.wx}, {self.wy})")

    @property
    def speed(self) -> float:
        return math.hypot(self.wx, self.wy)

    @property
    def theta_pol(self) -> float:
        """Polar heading of the wind vector; 0 for calm (undefined direction)."""
        if self.speed == 0.0:
            return 0.0
        return normalize_angle(math.atan2(self.wy, self.wx))

    @property
    def theta_met(self) -> float:
        return polar_to_met(self.theta_pol)


def wind_vector(speed: float, theta_met: float) -> WindVector:
    """Build the wind vector for a speed and meteorological direction."""
    if not math.isfinite(speed) or speed < 0.0:
        raise InvalidInputError(f"wind speed must be finite and >= 0, got {speed!r}")
    if speed == 0.0:
        return WindVector(0.0, 0.0)
    pol = met_to_polar(theta_met)
    return WindVector(speed * math.cos(pol), speed * math.sin(pol))


@dataclass(frozen=True)
class WindAngles:
    """Paired polar/meteorological representation of one wind direction."""

    theta_pol: float
    theta_met: float

    @classmethod
    def from_met(cls, theta_met: float) -> "WindAngles":
        met = normalize_angle(theta_met)
        return cls(met_to_polar(met), met)

    @classmethod
    def from_polar(cls, theta_pol: float) -> "WindAngles":
        pol = normalize_angle(theta_pol)
        return cls(pol, polar_to_met(pol))


@dataclass(frozen=True)
class WindDecomposition:
    """Wind split against a rotor plane: perpendicular (power-producing) and parallel parts."""

    eff_speed: float
    par_speed: float


def effective_wind(w: WindVector, yaw: float) -> WindDecomposition:
    """Decompose wind against a rotor facing ``yaw``.

    The effective speed is w_s * cos(delta) for misalignment delta, clamped at
    zero once the rotor faces more than 90 degrees away.  The parallel speed is
    chosen so that eff^2 + par^2 = w_s^2 always holds.
    """
    yaw_n = normalize_angle(yaw)
    speed = w.speed
    if speed == 0.0:
        return WindDecomposition(0.0, 0.0)
    delta = angle_between(w.theta_pol, yaw_n)
    eff = speed * math.cos(delta)
    if eff < 0.0:
        eff = 0.0
    par = math.sqrt(max(speed * speed - eff * eff, 0.0))
    return WindDecomposition(eff, par)


@dataclass(frozen=True)
class TurbineSpec:
    """Static description of one turbine."""

    id: str
    pos: tuple[float, float]
    rotor_area: float  # m^2
    rated_power: float  # W
    pitch: float = 0.0  # rad
    air_density: float = 1.225  # kg/m^3

    def __post_init__(self):
        if self.rotor_area <= 0.0:
            raise InvalidInputError("rotor_area must be > 0")
        if self.rated_power <= 0.0:
            raise InvalidInputError("rated_power must be > 0")
        if self.air_density <= 0.0:
            raise InvalidInputError("air_density must be > 0")


def turbine_power(spec: TurbineSpec, eff_speed: float, cp: float) -> float:
    """p = min(0.5 * rho * A * w_eff^3 * cp, rated).

    ``eff_speed`` is the rotor-perpendicular wind speed; output never exceeds
    the rated power.
    """
    if eff_speed < 0.0:
        raise InvalidInputError("effective wind speed must be >= 0")
    if not 0.0 <= cp <= 1.0:
        raise InvalidInputError(f"cp out of [0, 1]: {cp}")
    raw = 0.5 * spec.air_density * spec.rotor_area * eff_speed**3 * cp
    return min(raw, spec.rated_power)


class ConstantCp:
    """Power-coefficient model that ignores operating point."""

    def __init__(self, value: float = 0.45):
        if not 0.0 <= value <= CP_MAX:
            raise InvalidInputError(f"constant cp must lie in [0, {CP_MAX}]")
        self.value = value

    def __call__(self, tip_speed_ratio: float, pitch: float) -> float:
        if tip_speed_ratio <= 0.0:
            raise InvalidInputError("tip-speed ratio must be > 0")
        return self.value


class AnalyticCp:
    """Exponential power-coefficient approximation.

    cp = c1 * (c2/li - c3*beta - c4) * exp(-c5/li) + c6*lambda with
    li = lambda + 0.08*beta and beta in degrees; clamped to [0, Betz limit].
    This drops the small-pitch correction term of the textbook variant, which
    makes added pitch strictly shed power across the operating envelope
    (tip-speed ratio >= 6); below that the pitch trend is not guaranteed.
    Peak is cp ~= 0.50 near lambda ~= 11.6 at zero pitch.
    """

    COEFFS = (0.5176, 116.0, 0.4, 5.0, 21.0, 0.0068)

    def __call__(self, tip_speed_ratio: float, pitch: float) -> float:
        if tip_speed_ratio <= 0.0:
            raise InvalidInputError("tip-speed ratio must be > 0")
        c1, c2, c3, c4, c5, c6 = self.COEFFS
        beta = math.degrees(pitch)
        inv_li = 1.0 / (tip_speed_ratio + 0.08 * beta)
        cp = c1 * (c2 * inv_li - c3 * beta - c4) * math.exp(-c5 * inv_li) + c6 * tip_speed_ratio
        return min(max(cp, 0.0), CP_MAX)


def default_cp(tip_speed_ratio: float, pitch: float) -> float:
    """Default power-coefficient relation (see :class:`AnalyticCp`)."""
    return AnalyticCp()(tip_speed_ratio, pitch)
