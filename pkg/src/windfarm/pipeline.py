"""Experiment orchestration shared by the command-line tools and tests.

Wires ingestion -> training -> quantization -> yaw/routing accounting, and
renders the resulting tables.  Everything is deterministic given (config,
seed): identical runs produce byte-identical reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .forecasting import (
    ForecastConfig,
    LstmModel,
    metrics,
    quantize_model,
    train,
)
from .forecasting.model import forecast_batch
from .series import WindowDataset, WindSeries, make_windows, resample_hourly
from .wind import WindVector, met_to_polar, wind_vector


@dataclass
class TrainSettings:
    hidden_size: int = 16
    epochs: int = 24
    learning_rate: float = 0.035
    batch_size: int = 32
    init_scale: float = 0.3
    train_fraction: float = 0.8
    seed: int = 7


@dataclass
class ChannelResult:
    """Per (resolution, channel) training outcome with per-bits errors."""

    resolution: str
    channel: str
    dataset: WindowDataset
    model: LstmModel
    mae: float
    rmse: float
    by_bits: dict[int, tuple[float, float]] = field(default_factory=dict)  # bits -> (mae, rmse)


@dataclass
class ForecastExperiment:
    results: dict[tuple[str, str], ChannelResult]  # (resolution, channel) -> result

    def reduction(self, channel: str) -> float:
        """Fractional MAE reduction of 5-min forecasting over hourly."""
        five = self.results[("5-min", channel)].mae
        hour = self.results[("1-hr", channel)].mae
        return (hour - five) / hour

    def table_rows(self) -> list[dict]:
        rows = []
        for (resolution, channel), res in sorted(self.results.items()):
            rows.append(
                {
                    "resolution": resolution,
                    "channel": channel,
                    "weight_bits": "float32",
                    "mae": res.mae,
                    "rmse": res.rmse,
                }
            )
            for bits, (mae, rmse) in sorted(res.by_bits.items(), reverse=True):
                rows.append(
                    {
                        "resolution": resolution,
                        "channel": channel,
                        "weight_bits": bits,
                        "mae": mae,
                        "rmse": rmse,
                    }
                )
        return rows


def _eval(model: LstmModel, dataset: WindowDataset) -> tuple[float, float]:
    x = dataset.x_test if len(dataset.x_test) else dataset.x_train
    y = dataset.y_test if len(dataset.x_test) else dataset.y_train
    return metrics(y.ravel(), forecast_batch(model, x).ravel())


def run_forecast_experiment(
    series5: WindSeries,
    settings: TrainSettings,
    bits_list: tuple[int, ...] = (16, 8, 4, 2),
    channels: tuple[str, ...] = ("speed", "direction"),
) -> ForecastExperiment:
    """Train {5-min, hourly} x channels, quantize at each width, collect errors."""
    series1 = resample_hourly(series5)
    tasks = {
        "5-min": (series5, ForecastConfig(input_len=24, horizon=8, resolution_s=300)),
        "1-hr": (series1, ForecastConfig(input_len=24, horizon=1, resolution_s=3600)),
    }
    results: dict[tuple[str, str], ChannelResult] = {}
    for resolution, (series, config) in tasks.items():
        for channel in channels:
            dataset = make_windows(
                series, config, channel=channel, train_fraction=settings.train_fraction
            )
            outcome = train(
                dataset.x_train,
                dataset.y_train,
                hidden_size=settings.hidden_size,
                epochs=settings.epochs,
                learning_rate=settings.learning_rate,
                batch_size=settings.batch_size,
                init_scale=settings.init_scale,
                seed=settings.seed,
            )
            mae, rmse = _eval(outcome.model, dataset)
            res = ChannelResult(resolution, channel, dataset, outcome.model, mae, rmse)
            for bits in bits_list:
                qm = quantize_model(outcome.model, bits)
                res.by_bits[bits] = _eval(qm.to_model(), dataset)
            results[(resolution, channel)] = res
    return ForecastExperiment(results)


@dataclass
class StepForecasts:
    """Per-step wind forecasts aligned with a span of the 5-min test series."""

    true_winds: list[WindVector]
    remote: list[WindVector]  # 5-min model, issued a horizon ahead
    hour_ahead: list[WindVector]  # hourly model, one hourly step ahead
    start_index: int  # offset into the 5-min series


def rolling_forecasts(
    series5: WindSeries, experiment: ForecastExperiment, max_steps: int | None = None
) -> StepForecasts:
    """Build aligned per-step forecasts for yaw/routing evaluation.

    The remote-sensing value for step t is the last element of the 5-min
    model's horizon vector issued input_len + horizon steps earlier; the
    hour-ahead value for hour H (applied to each of its 12 steps) is the
    hourly model's one-step forecast issued at H-1.
    """
    r5s = experiment.results[("5-min", "speed")]
    r5d = experiment.results[("5-min", "direction")]
    r1s = experiment.results[("1-hr", "speed")]
    r1d = experiment.results[("1-hr", "direction")]

    cfg5 = r5s.dataset.config
    cfg1 = r1s.dataset.config
    lead5 = cfg5.input_len + cfg5.horizon
    lead1 = (cfg1.input_len + cfg1.horizon) * 12

    speeds = series5.speeds()
    dirs = series5.directions()  # radians, matching the trained datasets

    # start after the longest forecast lead and after the training span
    test_start5 = len(r5s.dataset.x_train) + cfg5.input_len
    start = max(lead5, lead1, test_start5)
    end = len(series5)
    if max_steps is not None:
        end = min(end, start + max_steps)

    def predict(result: ChannelResult, window_raw: np.ndarray) -> float:
        scaled = (window_raw - result.dataset.bounds[0]) / (
            result.dataset.bounds[1] - result.dataset.bounds[0]
        )
        out = forecast_batch(result.model, scaled[None, :])[0]
        return float(result.dataset.denormalize(out[-1]))

    def hourly_means(raw: np.ndarray) -> np.ndarray:
        n_hours = len(raw) // 12
        return raw[: n_hours * 12].reshape(n_hours, 12).mean(axis=1)

    def hourly_circular(raw_rad: np.ndarray) -> np.ndarray:
        n_hours = len(raw_rad) // 12
        chunks = raw_rad[: n_hours * 12].reshape(n_hours, 12)
        return np.angle(np.exp(1j * chunks).sum(axis=1)) % (2.0 * math.pi)

    hr_speed = hourly_means(speeds)
    hr_dir = hourly_circular(dirs)

    true_w, remote_w, hour_w = [], [], []
    for t in range(start, end):
        w5s = speeds[t - lead5 : t - lead5 + cfg5.input_len]
        w5d = dirs[t - lead5 : t - lead5 + cfg5.input_len]
        rs_speed = max(predict(r5s, w5s), 0.0)
        rs_dir = predict(r5d, w5d)

        hour = t // 12
        h_start = hour - cfg1.input_len - cfg1.horizon + 1
        ha_speed = max(predict(r1s, hr_speed[h_start : h_start + cfg1.input_len]), 0.0)
        ha_dir = predict(r1d, hr_dir[h_start : h_start + cfg1.input_len])

        true_w.append(wind_vector(speeds[t], dirs[t]))
        remote_w.append(wind_vector(rs_speed, rs_dir))
        hour_w.append(wind_vector(ha_speed, ha_dir))
    return StepForecasts(true_w, remote_w, hour_w, start)


def mean_polar_angle_deg(winds: list[WindVector]) -> float:
    """Circular-mean polar heading of a wind sequence, degrees."""
    angles = [met_to_polar(w.theta_met) for w in winds if w.speed > 0.0]
    if not angles:
        return 0.0
    mean = np.angle(np.exp(1j * np.array(angles)).sum()) % (2.0 * math.pi)
    return math.degrees(mean)


def render_table(rows: list[dict], columns: list[str], precision: int = 4) -> str:
    """Aligned fixed-width text table."""

    def fmt(value):
        if isinstance(value, float):
            return f"{value:.{precision}f}"
        return str(value)

    cells = [[fmt(r.get(c, "")) for c in columns] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(columns)]
    lines = [
        "  ".join(c.ljust(w) for c, w in zip(columns, widths)),
        "  ".join("-" * w for w in widths),
    ]
    for row in cells:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    return "\n".join(lines) + "\n"
