"""Command-line entry point.

Subcommands: ``forecast`` (accuracy tables across resolutions and bit widths),
``yaw`` (energy under true/remote-sensing/hour-ahead steering), ``route``
(inspection plan vs no-reassignment baseline), ``simulate`` (rolling
forecast -> yaw + route).  Reports are written as JSON plus an aligned text
table, and plot-ready CSV where applicable.

Exit codes: 0 success, 2 config/data error, 3 infeasible planning,
4 training failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    ConfigError,
    InfeasibleTourError,
    InfeasibleTurbineError,
    ParseError,
    PlanningAbortedError,
    SeriesError,
    TrainingError,
    UnreachableTurbineError,
    WindfarmError,
)
from .forecasting.serialization import save_model
from .kinematics import UavSpec
from .pipeline import (
    TrainSettings,
    mean_polar_angle_deg,
    render_table,
    rolling_forecasts,
    run_forecast_experiment,
)
from .routing import plan_inspection
from .series import load_csv
from .wind import ConstantCp, TurbineSpec, wind_vector
from .yaw import energy_over_horizon

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_TRAINING = 4


@dataclass
class RunConfig:
    seed: int
    data_csv: str
    out_dir: str
    train: TrainSettings
    bits: tuple[int, ...]
    turbines: list[TurbineSpec]
    uavs: list[UavSpec]
    assignment: dict[str, list[str]]
    routing_wind: object  # WindVector
    yaw_turbine: str
    yaw_cp: float
    yaw_tip_speed_ratio: float
    yaw_max_steps: int
    simulate_steps: int
    raw: dict = field(default_factory=dict)


def _require(section: dict, key: str, where: str):
    if key not in section:
        raise ConfigError(f"missing {key!r} in {where}")
    return section[key]


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None

    fc = raw.get("forecast", {})
    train = TrainSettings(
        hidden_size=int(fc.get("hidden_size", 16)),
        epochs=int(fc.get("epochs", 24)),
        learning_rate=float(fc.get("learning_rate", 0.035)),
        batch_size=int(fc.get("batch_size", 32)),
        init_scale=float(fc.get("init_scale", 0.3)),
        train_fraction=float(fc.get("train_fraction", 0.8)),
        seed=int(raw.get("seed", 7)),
    )
    bits = tuple(int(b) for b in fc.get("bits", (16, 8, 4, 2)))
    for b in bits:
        if b not in (2, 4, 8, 16):
            raise ConfigError(f"unsupported quantization width {b}")

    turbines = []
    for t in raw.get("turbines", []):
        turbines.append(
            TurbineSpec(
                id=str(_require(t, "id", "turbine")),
                pos=tuple(float(v) for v in _require(t, "pos", "turbine")),
                rotor_area=float(_require(t, "rotor_area_m2", f"turbine {t.get('id')}")),
                rated_power=float(_require(t, "rated_power_w", f"turbine {t.get('id')}")),
                pitch=math.radians(float(t.get("pitch_deg", 0.0))),
                air_density=float(t.get("air_density", 1.225)),
            )
        )
    uavs = []
    for u in raw.get("uavs", []):
        uavs.append(
            UavSpec(
                id=str(_require(u, "id", "uav")),
                pos=tuple(float(v) for v in _require(u, "pos", "uav")),
                u_max=float(_require(u, "u_max_ms", f"uav {u.get('id')}")),
                t_max=float(_require(u, "t_max_s", f"uav {u.get('id')}")),
                rho=float(u["rho_m"]) if "rho_m" in u else None,
                wind_resist=float(u["wind_resist_ms"]) if "wind_resist_ms" in u else None,
                base_label=u.get("base_label"),
            )
        )

    rw = raw.get("routing_wind", {"speed_ms": 0.0, "direction_met_deg": 0.0})
    routing_wind = wind_vector(
        float(rw.get("speed_ms", 0.0)), math.radians(float(rw.get("direction_met_deg", 0.0)))
    )

    yaw = raw.get("yaw", {})
    sim = raw.get("simulate", {})
    data_csv = os.environ.get("WINDFARM_DATA", raw.get("data_csv", ""))
    out_dir = os.environ.get("WINDFARM_OUT", raw.get("out_dir", "out"))
    if not Path(data_csv).is_absolute():
        data_csv = str((path.parent / data_csv).resolve()) if data_csv else data_csv
    return RunConfig(
        seed=int(raw.get("seed", 7)),
        data_csv=data_csv,
        out_dir=out_dir,
        train=train,
        bits=bits,
        turbines=turbines,
        uavs=uavs,
        assignment={k: list(v) for k, v in raw.get("assignment", {}).items()},
        routing_wind=routing_wind,
        yaw_turbine=yaw.get("turbine", turbines[0].id if turbines else ""),
        yaw_cp=float(yaw.get("cp", 0.45)),
        yaw_tip_speed_ratio=float(yaw.get("tip_speed_ratio", 8.0)),
        yaw_max_steps=int(yaw.get("max_steps", 288)),
        simulate_steps=int(sim.get("steps", 6)),
        raw=raw,
    )


def _load_series(cfg: RunConfig):
    if not cfg.data_csv:
        raise ConfigError("no data_csv configured")
    if not Path(cfg.data_csv).exists():
        raise ConfigError(f"data file not found: {cfg.data_csv}")
    return load_csv(cfg.data_csv)


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def cmd_forecast(cfg: RunConfig) -> int:
    series = _load_series(cfg)
    experiment = run_forecast_experiment(series, cfg.train, bits_list=cfg.bits)
    rows = experiment.table_rows()

    out = _out_dir(cfg)
    doc = {
        "seed": cfg.seed,
        "settings": {
            "hidden_size": cfg.train.hidden_size,
            "epochs": cfg.train.epochs,
            "learning_rate": cfg.train.learning_rate,
            "batch_size": cfg.train.batch_size,
            "init_scale": cfg.train.init_scale,
            "train_fraction": cfg.train.train_fraction,
        },
        "bits": list(cfg.bits),
        "rows": rows,
        "reductions": {ch: experiment.reduction(ch) for ch in ("speed", "direction")},
        "normalization_bounds": {
            f"{res}/{ch}": list(r.dataset.bounds)
            for (res, ch), r in sorted(experiment.results.items())
        },
    }
    _write_json(out / "forecast_report.json", doc)
    columns = ["resolution", "channel", "weight_bits", "mae", "rmse"]
    (out / "forecast_table.txt").write_text(render_table(rows, columns))
    csv_lines = [",".join(columns)] + [
        ",".join(str(r[c]) for c in columns) for r in rows
    ]
    (out / "forecast_mae.csv").write_text("\n".join(csv_lines) + "\n")

    models = out / "models"
    models.mkdir(exist_ok=True)
    for (res, ch), r in experiment.results.items():
        save_model(r.model, models / f"{res}_{ch}.wfq")
    print((out / "forecast_table.txt").read_text())
    return EXIT_OK


def _yaw_spec(cfg: RunConfig) -> TurbineSpec:
    for t in cfg.turbines:
        if t.id == cfg.yaw_turbine:
            return t
    raise ConfigError(f"yaw turbine {cfg.yaw_turbine!r} not in turbine list")


def cmd_yaw(cfg: RunConfig) -> int:
    series = _load_series(cfg)
    spec = _yaw_spec(cfg)
    experiment = run_forecast_experiment(series, cfg.train, bits_list=())
    span = rolling_forecasts(series, experiment, max_steps=cfg.yaw_max_steps)
    cp_model = ConstantCp(cfg.yaw_cp)
    step_s = float(series.resolution_s)

    methods = {
        "true": None,
        "remote_sensing": span.remote,
        "hour_ahead": span.hour_ahead,
    }
    rows = []
    for name, forecast_winds in methods.items():
        energy = energy_over_horizon(
            spec,
            span.true_winds,
            step_s,
            forecast_winds=forecast_winds,
            cp_model=cp_model,
            tip_speed_ratio=cfg.yaw_tip_speed_ratio,
        )
        hours = len(span.true_winds) * step_s / 3600.0
        rows.append(
            {
                "method": name,
                "polar_angle_deg": mean_polar_angle_deg(forecast_winds or span.true_winds),
                "energy_kwh": energy / 1e3,
                "mean_power_mw": energy / hours / 1e6,
            }
        )

    out = _out_dir(cfg)
    doc = {
        "turbine": spec.id,
        "cp": cfg.yaw_cp,
        "steps": len(span.true_winds),
        "step_seconds": step_s,
        "rows": rows,
    }
    _write_json(out / "yaw_report.json", doc)
    (out / "yaw_table.txt").write_text(
        render_table(rows, ["method", "polar_angle_deg", "energy_kwh", "mean_power_mw"])
    )
    per_step = ["step,true_speed_ms,true_dir_met_deg,remote_dir_met_deg,hour_ahead_dir_met_deg"]
    for k, w in enumerate(span.true_winds):
        per_step.append(
            f"{k},{w.speed:.4f},{math.degrees(w.theta_met):.3f},"
            f"{math.degrees(span.remote[k].theta_met):.3f},"
            f"{math.degrees(span.hour_ahead[k].theta_met):.3f}"
        )
    (out / "yaw_steps.csv").write_text("\n".join(per_step) + "\n")
    print((out / "yaw_table.txt").read_text())
    return EXIT_OK


def _flyable(cfg: RunConfig) -> list[TurbineSpec]:
    assigned = {tid for tids in cfg.assignment.values() for tid in tids}
    return [t for t in cfg.turbines if t.id in assigned]


def cmd_route(cfg: RunConfig) -> int:
    if not cfg.uavs or not cfg.assignment:
        raise ConfigError("route command needs uavs and an assignment")
    turbines = _flyable(cfg)
    plan = plan_inspection(cfg.uavs, turbines, cfg.assignment, cfg.routing_wind)
    baseline = plan_inspection(
        cfg.uavs, turbines, cfg.assignment, cfg.routing_wind, use_effective_range=False
    )
    reduction = (baseline.total_time - plan.total_time) / baseline.total_time

    out = _out_dir(cfg)
    doc = {
        "wind": {
            "speed_ms": cfg.routing_wind.speed,
            "direction_met_deg": math.degrees(cfg.routing_wind.theta_met),
        },
        "algorithm": plan.to_dict(),
        "baseline": baseline.to_dict(),
        "reduction_pct": 100.0 * reduction,
    }
    _write_json(out / "route_plan.json", doc)

    rows = []
    for label, p in (("baseline", baseline), ("algorithm", plan)):
        for up in p.uav_plans:
            for r in up.routes:
                rows.append(
                    {
                        "plan": label,
                        "uav": up.uav_id,
                        "path": r.path_string(up.start_label),
                        "time_min": r.total_time / 60.0,
                    }
                )
    table = render_table(rows, ["plan", "uav", "path", "time_min"])
    summary = (
        f"\nbaseline total: {baseline.total_time / 60.0:.4f} min\n"
        f"algorithm total: {plan.total_time / 60.0:.4f} min\n"
        f"reduction: {100.0 * reduction:.2f} %\n"
        f"reassigned: {', '.join(t for t, _, _ in plan.reassigned) or 'none'}\n"
    )
    (out / "route_table.txt").write_text(table + summary)
    print(table + summary)
    return EXIT_OK


def cmd_simulate(cfg: RunConfig) -> int:
    series = _load_series(cfg)
    spec = _yaw_spec(cfg)
    turbines = _flyable(cfg)
    experiment = run_forecast_experiment(series, cfg.train, bits_list=())
    span = rolling_forecasts(series, experiment, max_steps=cfg.simulate_steps)
    cp_model = ConstantCp(cfg.yaw_cp)
    step_s = float(series.resolution_s)

    energy = energy_over_horizon(
        spec,
        span.true_winds,
        step_s,
        forecast_winds=span.remote,
        cp_model=cp_model,
        tip_speed_ratio=cfg.yaw_tip_speed_ratio,
    )
    steps = []
    last_plan = None
    for k, forecast_wind in enumerate(span.remote):
        plan = plan_inspection(cfg.uavs, turbines, cfg.assignment, forecast_wind)
        last_plan = plan
        steps.append(
            {
                "step": k,
                "forecast_speed_ms": forecast_wind.speed,
                "forecast_dir_met_deg": math.degrees(forecast_wind.theta_met),
                "inspection_min": plan.total_time / 60.0,
                "reassigned": [t for t, _, _ in plan.reassigned],
            }
        )

    out = _out_dir(cfg)
    doc = {
        "steps": steps,
        "energy_kwh_remote_steered": energy / 1e3,
        "mean_inspection_min": sum(s["inspection_min"] for s in steps) / len(steps),
        "final_plan": last_plan.to_dict() if last_plan else None,
    }
    _write_json(out / "simulate_report.json", doc)
    (out / "simulate_table.txt").write_text(
        render_table(
            steps, ["step", "forecast_speed_ms", "forecast_dir_met_deg", "inspection_min"]
        )
    )
    csv_cols = ["step", "forecast_speed_ms", "forecast_dir_met_deg", "inspection_min"]
    csv_lines = [",".join(csv_cols)] + [
        ",".join(str(s[c]) for c in csv_cols) for s in steps
    ]
    (out / "simulate_steps.csv").write_text("\n".join(csv_lines) + "\n")
    print((out / "simulate_table.txt").read_text())
    return EXIT_OK


COMMANDS = {
    "forecast": cmd_forecast,
    "yaw": cmd_yaw,
    "route": cmd_route,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="windfarm",
        description="Wind-farm monitoring toolkit: forecasting, yaw control, inspection routing.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="path to the JSON run configuration")
    parser.add_argument("--seed", type=int, help="override the configured seed")
    parser.add_argument(
        "--bits", type=int, choices=(2, 4, 8, 16, 32), help="restrict quantization to one width (32 = float only)"
    )
    parser.add_argument("--data", help="override the configured data CSV path")
    parser.add_argument("--out", help="override the configured output directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
            cfg.train.seed = args.seed
        if args.bits is not None:
            cfg.bits = () if args.bits == 32 else (args.bits,)
        if args.data is not None:
            cfg.data_csv = args.data
        if args.out is not None:
            cfg.out_dir = args.out
        return COMMANDS[args.command](cfg)
    except (ConfigError, ParseError, SeriesError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (
        UnreachableTurbineError,
        InfeasibleTourError,
        InfeasibleTurbineError,
        PlanningAbortedError,
    ) as exc:
        print(f"planning infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except TrainingError as exc:
        print(f"training failed: {exc}", file=sys.stderr)
        return EXIT_TRAINING
    except WindfarmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
