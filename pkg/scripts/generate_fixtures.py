"""Regenerate the bundled sample data and default run configuration.

Run from the repository root:  python3 scripts/generate_fixtures.py
"""

from __future__ import annotations

import json
from pathlib import Path

from windfarm.sampledata import (
    AIR_DENSITY,
    RATED_POWER,
    ROTOR_AREA,
    TURBINE_POSITIONS,
    synthetic_csv_rows,
)

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"

SAMPLE_SEED = 42
SAMPLE_LEN = 2304  # eight days at 5-minute resolution


def write_sample_csv() -> None:
    rows = synthetic_csv_rows(SAMPLE_SEED, SAMPLE_LEN)
    lines = ["timestamp,wind_speed_ms,wind_direction_deg"]
    lines += [",".join(r) for r in rows]
    (DATA / "sample_wind_5min.csv").write_text("\n".join(lines) + "\n")


def write_config() -> None:
    turbines = [
        {
            "id": name,
            "pos": list(pos),
            "rotor_area_m2": ROTOR_AREA,
            "rated_power_w": RATED_POWER,
            "pitch_deg": 0.0,
            "air_density": AIR_DENSITY,
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
        "data_csv": "sample_wind_5min.csv",
        "out_dir": "out",
        "forecast": {
            "hidden_size": 16,
            "epochs": 24,
            "learning_rate": 0.035,
            "batch_size": 32,
            "init_scale": 0.3,
            "train_fraction": 0.8,
            "bits": [16, 8, 4, 2],
        },
        "turbines": turbines,
        "uavs": uavs,
        "assignment": {
            "UAV1": ["C214", "A106", "A411", "E105"],
            "UAV2": ["D101"],
        },
        "routing_wind": {"speed_ms": 10.0, "direction_met_deg": 90.0},
        "yaw": {"turbine": "B110", "cp": 0.45, "tip_speed_ratio": 8.0, "max_steps": 288},
        "simulate": {"steps": 6},
    }
    (DATA / "config.json").write_text(json.dumps(config, indent=2) + "\n")


if __name__ == "__main__":
    DATA.mkdir(exist_ok=True)
    write_sample_csv()
    write_config()
    print(f"wrote {DATA / 'sample_wind_5min.csv'} and {DATA / 'config.json'}")
