from __future__ import annotations

import math

import numpy as np
import pytest

from windfarm import (
    AnalyticCp,
    ConstantCp,
    TurbineSpec,
    default_cp,
    effective_wind,
    met_to_polar,
    polar_to_met,
    turbine_power,
    wind_vector,
)
from windfarm.errors import InvalidAngleError, InvalidInputError

SG8 = TurbineSpec("SG8", (0.0, 0.0), rotor_area=21900.0, rated_power=8e6, air_density=1.065)


def test_met_to_polar_examples():
    assert met_to_polar(math.pi / 2) == pytest.approx(math.pi)
    assert met_to_polar(1.5 * math.pi) == pytest.approx(0.0)
    assert met_to_polar(0.0) == pytest.approx(1.5 * math.pi)


def test_polar_to_met_examples():
    assert polar_to_met(math.pi) == pytest.approx(math.pi / 2)
    assert polar_to_met(0.0) == pytest.approx(1.5 * math.pi)
    assert met_to_polar(polar_to_met(1.234)) == pytest.approx(1.234, abs=1e-12)


def test_angle_conversion_round_trip():
    rng = np.random.default_rng(42)
    for theta in rng.uniform(0.0, 2.0 * math.pi, size=1000):
        back = polar_to_met(met_to_polar(theta))
        assert abs((back - theta) % (2.0 * math.pi)) < 1e-12 or abs(
            (theta - back) % (2.0 * math.pi)
        ) < 1e-12


def test_non_finite_angle_rejected():
    with pytest.raises(InvalidAngleError):
        met_to_polar(math.nan)
    with pytest.raises(InvalidAngleError):
        polar_to_met(math.inf)


def test_wind_vector_east_wind_points_west():
    w = wind_vector(10.0, math.pi / 2)
    assert w.wx == pytest.approx(-10.0)
    assert w.wy == pytest.approx(0.0, abs=1e-12)


def test_wind_vector_zero_speed():
    w = wind_vector(0.0, 1.0)
    assert (w.wx, w.wy) == (0.0, 0.0)


def test_wind_vector_west_wind_points_east():
    w = wind_vector(5.0, 1.5 * math.pi)
    assert w.wx == pytest.approx(5.0)
    assert w.wy == pytest.approx(0.0, abs=1e-12)


def test_wind_vector_negative_speed_rejected():
    with pytest.raises(InvalidInputError):
        wind_vector(-1.0, 0.0)


def test_wind_vector_norm_and_angle():
    rng = np.random.default_rng(3)
    for _ in range(200):
        speed = rng.uniform(0.1, 30.0)
        theta = rng.uniform(0.0, 2.0 * math.pi)
        w = wind_vector(speed, theta)
        assert w.speed == pytest.approx(speed)
        assert w.theta_pol == pytest.approx(met_to_polar(theta), abs=1e-9)


def test_effective_wind_aligned():
    w = wind_vector(10.0, math.pi / 2)  # polar direction pi
    dec = effective_wind(w, math.pi)
    assert dec.eff_speed == pytest.approx(10.0)
    assert dec.par_speed == pytest.approx(0.0, abs=1e-6)


def test_effective_wind_60_degrees():
    w = wind_vector(10.0, math.pi / 2)
    dec = effective_wind(w, math.pi + math.pi / 3)
    assert dec.eff_speed == pytest.approx(5.0)


def test_effective_wind_opposed_clamped():
    w = wind_vector(10.0, math.pi / 2)
    dec = effective_wind(w, 0.0)  # rotor faces opposite the wind vector
    assert dec.eff_speed == 0.0
    assert dec.par_speed == pytest.approx(10.0)


def test_decomposition_pythagoras():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        speed = rng.uniform(0.01, 25.0)
        w = wind_vector(speed, rng.uniform(0.0, 2.0 * math.pi))
        dec = effective_wind(w, rng.uniform(0.0, 2.0 * math.pi))
        assert dec.eff_speed**2 + dec.par_speed**2 == pytest.approx(speed**2, rel=1e-9)
        assert 0.0 <= dec.eff_speed <= speed + 1e-12


def test_turbine_power_direct_evaluation():
    # 0.5 * 1.065 * 21900 * 10^3 * 0.45
    assert turbine_power(SG8, 10.0, 0.45) == pytest.approx(5_247_787.5)


def test_turbine_power_zero_wind():
    assert turbine_power(SG8, 0.0, 0.45) == 0.0


def test_turbine_power_capped_at_rated():
    # uncapped would be about 17.7 MW
    assert turbine_power(SG8, 15.0, 0.45) == pytest.approx(8e6)


def test_turbine_power_monotone_and_bounded():
    speeds = np.linspace(0.0, 30.0, 200)
    powers = [turbine_power(SG8, s, 0.45) for s in speeds]
    assert all(b >= a for a, b in zip(powers, powers[1:]))
    assert max(powers) <= SG8.rated_power


def test_turbine_spec_invariants():
    with pytest.raises(InvalidInputError):
        TurbineSpec("bad", (0, 0), rotor_area=-1.0, rated_power=1.0)
    with pytest.raises(InvalidInputError):
        TurbineSpec("bad", (0, 0), rotor_area=1.0, rated_power=0.0)


def test_default_cp_betz_bound():
    rng = np.random.default_rng(11)
    for _ in range(500):
        cp = default_cp(rng.uniform(0.5, 20.0), rng.uniform(0.0, math.radians(25.0)))
        assert 0.0 <= cp <= 0.593


def test_default_cp_interior_maximum():
    ratios = np.linspace(1.0, 15.0, 400)
    cps = [default_cp(r, 0.0) for r in ratios]
    k = int(np.argmax(cps))
    assert 0 < k < len(ratios) - 1
    assert cps[k] > cps[0] and cps[k] > cps[-1]


def test_default_cp_pitch_monotone_in_operating_envelope():
    for ratio in np.linspace(6.0, 16.0, 41):
        pitches = np.linspace(0.0, math.radians(22.0), 23)
        cps = [default_cp(ratio, p) for p in pitches]
        assert all(a >= b - 1e-12 for a, b in zip(cps, cps[1:]))


def test_default_cp_rejects_bad_ratio():
    with pytest.raises(InvalidInputError):
        default_cp(0.0, 0.0)


def test_constant_cp_model():
    model = ConstantCp(0.4)
    assert model(7.0, 0.0) == 0.4
    with pytest.raises(InvalidInputError):
        ConstantCp(0.7)
    with pytest.raises(InvalidInputError):
        model(0.0, 0.0)


def test_analytic_cp_matches_default():
    model = AnalyticCp()
    assert model(8.0, 0.0) == default_cp(8.0, 0.0)


def test_wind_angles_pairing():
    from windfarm import WindAngles

    for met in np.linspace(0.0, 2 * math.pi, 17, endpoint=False):
        pair = WindAngles.from_met(met)
        assert pair.theta_pol == pytest.approx(met_to_polar(met))
        back = WindAngles.from_polar(pair.theta_pol)
        assert back.theta_met == pytest.approx(pair.theta_met, abs=1e-12)
