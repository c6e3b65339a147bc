from __future__ import annotations

import hashlib
import json

import pytest

from windfarm import cli
from windfarm.errors import TrainingError
from windfarm.sampledata import TURBINE_POSITIONS, synthetic_csv_rows

FAST_FORECAST = {
    "hidden_size": 6,
    "epochs": 2,
    "learning_rate": 0.03,
    "batch_size": 32,
    "init_scale": 0.3,
    "train_fraction": 0.8,
    "bits": [4],
}


def demo_config(data_csv="wind.csv", **overrides):
    turbines = [
        {
            "id": name,
            "pos": list(pos),
            "rotor_area_m2": 21900.0,
            "rated_power_w": 8.0e6,
            "pitch_deg": 0.0,
            "air_density": 1.065,
        }
        for name, pos in TURBINE_POSITIONS.items()
    ]
    uavs = [
        {
            "id": "UAV1",
            "base_label": "B110",
            "pos": list(TURBINE_POSITIONS["B110"]),
            "u_max_ms": 16.0,
            "t_max_s": 1080.0,
            "rho_m": 13500.0,
            "wind_resist_ms": 15.0,
        },
        {
            "id": "UAV2",
            "base_label": "A213",
            "pos": list(TURBINE_POSITIONS["A213"]),
            "u_max_ms": 16.0,
            "t_max_s": 1080.0,
            "rho_m": 13500.0,
            "wind_resist_ms": 15.0,
        },
    ]
    config = {
        "seed": 7,
        "data_csv": data_csv,
        "out_dir": "out",
        "forecast": dict(FAST_FORECAST),
        "turbines": turbines,
        "uavs": uavs,
        "assignment": {"UAV1": ["C214", "A106", "A411", "E105"], "UAV2": ["D101"]},
        "routing_wind": {"speed_ms": 10.0, "direction_met_deg": 90.0},
        "yaw": {"turbine": "B110", "cp": 0.45, "tip_speed_ratio": 8.0, "max_steps": 24},
        "simulate": {"steps": 2},
    }
    config.update(overrides)
    return config


def write_workspace(tmp_path, config=None, n_samples=500, data_seed=42):
    rows = synthetic_csv_rows(data_seed, n_samples)
    lines = ["timestamp,wind_speed_ms,wind_direction_deg"] + [",".join(r) for r in rows]
    (tmp_path / "wind.csv").write_text("\n".join(lines) + "\n")
    cfg = config or demo_config()
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(cfg))
    return cfg_path


def test_route_command(tmp_path, capsys):
    cfg_path = write_workspace(tmp_path)
    rc = cli.main(["route", "--config", str(cfg_path), "--out", str(tmp_path / "out")])
    assert rc == 0
    doc = json.loads((tmp_path / "out" / "route_plan.json").read_text())
    assert doc["algorithm"]["reassigned"] == [{"turbine": "E105", "from": "UAV1", "to": "UAV2"}]
    assert doc["baseline"]["reassigned"] == []
    base = doc["baseline"]["total_time_s"]
    alg = doc["algorithm"]["total_time_s"]
    assert doc["reduction_pct"] == pytest.approx(100.0 * (base - alg) / base)
    assert doc["reduction_pct"] > 15.0
    out = capsys.readouterr().out
    assert "B110>C214>A106>A411>B110" in out


def test_route_zero_wind_identical_plans(tmp_path):
    cfg = demo_config(routing_wind={"speed_ms": 0.0, "direction_met_deg": 0.0})
    cfg_path = write_workspace(tmp_path, cfg)
    rc = cli.main(["route", "--config", str(cfg_path), "--out", str(tmp_path / "out")])
    assert rc == 0
    doc = json.loads((tmp_path / "out" / "route_plan.json").read_text())
    assert doc["algorithm"] == doc["baseline"]
    assert doc["reduction_pct"] == 0.0


def test_route_unreachable_turbine_exit_3(tmp_path):
    cfg = demo_config()
    for u in cfg["uavs"]:
        u["rho_m"] = 500.0  # nobody can reach anything under drift
    cfg_path = write_workspace(tmp_path, cfg)
    rc = cli.main(["route", "--config", str(cfg_path), "--out", str(tmp_path / "out")])
    assert rc == 3


def test_missing_data_exit_2(tmp_path):
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(demo_config(data_csv="nope.csv")))
    rc = cli.main(["forecast", "--config", str(cfg_path), "--out", str(tmp_path / "out")])
    assert rc == 2


def test_bad_config_exit_2(tmp_path):
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text("{not json")
    assert cli.main(["route", "--config", str(cfg_path)]) == 2
    assert cli.main(["route", "--config", str(tmp_path / "missing.json")]) == 2


def test_training_failure_exit_4(tmp_path, monkeypatch):
    cfg_path = write_workspace(tmp_path)

    def boom(*args, **kwargs):
        raise TrainingError("synthetic failure")

    monkeypatch.setattr(cli, "run_forecast_experiment", boom)
    rc = cli.main(["forecast", "--config", str(cfg_path), "--out", str(tmp_path / "out")])
    assert rc == 4


def test_forecast_report_deterministic_and_shaped(tmp_path):
    cfg = demo_config()
    cfg["forecast"]["bits"] = [16, 8, 4, 2]
    cfg_path = write_workspace(tmp_path, cfg)
    rc = cli.main(["forecast", "--config", str(cfg_path), "--out", str(tmp_path / "a")])
    assert rc == 0
    rc = cli.main(["forecast", "--config", str(cfg_path), "--out", str(tmp_path / "b")])
    assert rc == 0
    a = (tmp_path / "a" / "forecast_report.json").read_bytes()
    b = (tmp_path / "b" / "forecast_report.json").read_bytes()
    assert a == b

    doc = json.loads(a)
    rows = doc["rows"]
    # five rows (float + 4 widths) per resolution/channel
    for resolution in ("5-min", "1-hr"):
        for channel in ("speed", "direction"):
            got = [r for r in rows if r["resolution"] == resolution and r["channel"] == channel]
            assert [r["weight_bits"] for r in got] == ["float32", 16, 8, 4, 2]
    assert (tmp_path / "a" / "models" / "5-min_speed.wfq").exists()
    assert (tmp_path / "a" / "forecast_mae.csv").read_text().startswith(
        "resolution,channel,weight_bits,mae,rmse"
    )


def test_forecast_seed_flag_changes_results(tmp_path):
    cfg_path = write_workspace(tmp_path)
    cli.main(["forecast", "--config", str(cfg_path), "--out", str(tmp_path / "a")])
    cli.main(["forecast", "--config", str(cfg_path), "--out", str(tmp_path / "b"), "--seed", "11"])
    a = json.loads((tmp_path / "a" / "forecast_report.json").read_text())
    b = json.loads((tmp_path / "b" / "forecast_report.json").read_text())
    assert a["rows"] != b["rows"]


def test_commands_do_not_mutate_input(tmp_path):
    cfg_path = write_workspace(tmp_path)
    data = tmp_path / "wind.csv"
    before = hashlib.sha256(data.read_bytes()).hexdigest()
    cli.main(["route", "--config", str(cfg_path), "--out", str(tmp_path / "out")])
    cli.main(["yaw", "--config", str(cfg_path), "--out", str(tmp_path / "out")])
    assert hashlib.sha256(data.read_bytes()).hexdigest() == before


def test_yaw_true_dominates_forecast_methods(tmp_path):
    cfg_path = write_workspace(tmp_path, n_samples=450)
    rc = cli.main(["yaw", "--config", str(cfg_path), "--out", str(tmp_path / "out")])
    assert rc == 0
    doc = json.loads((tmp_path / "out" / "yaw_report.json").read_text())
    rows = {r["method"]: r for r in doc["rows"]}
    assert rows["true"]["energy_kwh"] >= rows["remote_sensing"]["energy_kwh"] - 1e-9
    assert rows["true"]["energy_kwh"] >= rows["hour_ahead"]["energy_kwh"] - 1e-9
    assert set(rows) == {"true", "remote_sensing", "hour_ahead"}
    for r in rows.values():
        assert "polar_angle_deg" in r


def test_simulate_constant_wind_matches_route_plan(tmp_path):
    n = 360
    stamps = synthetic_csv_rows(1, n)
    lines = ["timestamp,wind_speed_ms,wind_direction_deg"]
    for ts, _, _ in stamps:
        lines.append(f"{ts},10.000,90.00")
    (tmp_path / "wind.csv").write_text("\n".join(lines) + "\n")
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(demo_config()))

    rc = cli.main(["simulate", "--config", str(cfg_path), "--out", str(tmp_path / "sim")])
    assert rc == 0
    rc = cli.main(["route", "--config", str(cfg_path), "--out", str(tmp_path / "route")])
    assert rc == 0
    sim = json.loads((tmp_path / "sim" / "simulate_report.json").read_text())
    route = json.loads((tmp_path / "route" / "route_plan.json").read_text())
    assert sim["final_plan"] == route["algorithm"]
    assert sim["energy_kwh_remote_steered"] > 0.0


def test_env_var_overrides_paths(tmp_path, monkeypatch):
    cfg_path = write_workspace(tmp_path)
    moved = tmp_path / "moved.csv"
    moved.write_bytes((tmp_path / "wind.csv").read_bytes())
    monkeypatch.setenv("WINDFARM_DATA", str(moved))
    monkeypatch.setenv("WINDFARM_OUT", str(tmp_path / "envout"))
    rc = cli.main(["route", "--config", str(cfg_path)])
    assert rc == 0
    assert (tmp_path / "envout" / "route_plan.json").exists()


def test_yaw_zero_wind_day_all_zero_energy(tmp_path):
    stamps = synthetic_csv_rows(1, 400)
    lines = ["timestamp,wind_speed_ms,wind_direction_deg"]
    for ts, _, _ in stamps:
        lines.append(f"{ts},0.000,0.00")
    (tmp_path / "wind.csv").write_text("\n".join(lines) + "\n")
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(demo_config()))
    rc = cli.main(["yaw", "--config", str(cfg_path), "--out", str(tmp_path / "out")])
    assert rc == 0
    doc = json.loads((tmp_path / "out" / "yaw_report.json").read_text())
    assert all(r["energy_kwh"] == 0.0 for r in doc["rows"])


def test_simulate_runtime_budget(tmp_path):
    import time

    cfg_path = write_workspace(tmp_path)
    start = time.perf_counter()
    rc = cli.main(["simulate", "--config", str(cfg_path), "--out", str(tmp_path / "out")])
    assert rc == 0
    assert time.perf_counter() - start < 60.0


def test_bits_flag_restricts_quantization_rows(tmp_path):
    cfg_path = write_workspace(tmp_path)
    rc = cli.main(
        ["forecast", "--config", str(cfg_path), "--out", str(tmp_path / "out"), "--bits", "8"]
    )
    assert rc == 0
    doc = json.loads((tmp_path / "out" / "forecast_report.json").read_text())
    widths = {r["weight_bits"] for r in doc["rows"]}
    assert widths == {"float32", 8}
