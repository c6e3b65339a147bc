"""Yaw set-point selection and realized-power/energy accounting.

The set-point rule is deliberately simple: while the turbine is below rated
power it faces the forecast wind head-on; once rated power is reached the
nacelle stays put.  Energy bookkeeping then evaluates those set-points against
the wind that actually happened.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import InvalidInputError
from .wind import (
    ConstantCp,
    TurbineSpec,
    WindVector,
    effective_wind,
    normalize_angle,
    turbine_power,
)

CpModel = Callable[[float, float], float]

DEFAULT_TIP_SPEED_RATIO = 8.0


@dataclass(frozen=True)
class YawDecision:
    turbine_id: str
    yaw: float  # rad, [0, 2*pi)
    predicted_power: float  # W


def optimize_yaw(
    spec: TurbineSpec,
    forecast_wind: WindVector,
    current_yaw: float,
    cp_model: CpModel | None = None,
    tip_speed_ratio: float = DEFAULT_TIP_SPEED_RATIO,
) -> YawDecision:
    """Pick the yaw set-point for one turbine under a forecast wind.

    Below rated power the set-point is the forecast wind's polar heading;
    above rated (or in a calm, where the heading is undefined) the current yaw
    is retained.
    """
    cp_model = cp_model or ConstantCp()
    current = normalize_angle(current_yaw)
    speed = forecast_wind.speed
    if speed == 0.0:
        return YawDecision(spec.id, current, 0.0)

    cp = cp_model(tip_speed_ratio, spec.pitch)
    aligned_power = turbine_power(spec, speed, cp)
    raw = 0.5 * spec.air_density * spec.rotor_area * speed**3 * cp
    if raw <= spec.rated_power:
        yaw = forecast_wind.theta_pol
        predicted = aligned_power
    else:
        yaw = current
        predicted = turbine_power(spec, effective_wind(forecast_wind, yaw).eff_speed, cp)
    return YawDecision(spec.id, yaw, predicted)


def realized_power(
    spec: TurbineSpec,
    true_wind: WindVector,
    yaw: float,
    cp_model: CpModel | None = None,
    tip_speed_ratio: float = DEFAULT_TIP_SPEED_RATIO,
) -> float:
    """Power actually produced at a commanded yaw under the true wind."""
    cp_model = cp_model or ConstantCp()
    cp = cp_model(tip_speed_ratio, spec.pitch)
    eff = effective_wind(true_wind, yaw).eff_speed
    return turbine_power(spec, eff, cp)


def energy_over_horizon(
    spec: TurbineSpec,
    true_winds: Sequence[WindVector],
    step_s: float,
    forecast_winds: Sequence[WindVector] | None = None,
    cp_model: CpModel | None = None,
    tip_speed_ratio: float = DEFAULT_TIP_SPEED_RATIO,
    initial_yaw: float = 0.0,
) -> float:
    """Wh produced over a uniformly sampled horizon under a yaw policy.

    The controller re-aims each step from the forecast series (the true winds
    when no forecast is given), then the true wind pays out.  Yaw state
    carries across steps so calms and above-rated holds keep the last heading.
    """
    if len(true_winds) == 0:
        raise InvalidInputError("wind series is empty")
    if step_s <= 0.0:
        raise InvalidInputError("step_s must be > 0")
    if forecast_winds is not None and len(forecast_winds) != len(true_winds):
        raise InvalidInputError("forecast series length must match the true series")

    yaw = normalize_angle(initial_yaw)
    energy_wh = 0.0
    for k, actual in enumerate(true_winds):
        steering = actual if forecast_winds is None else forecast_winds[k]
        decision = optimize_yaw(spec, steering, yaw, cp_model, tip_speed_ratio)
        yaw = decision.yaw
        power = realized_power(spec, actual, yaw, cp_model, tip_speed_ratio)
        energy_wh += power * step_s / 3600.0
    return energy_wh
