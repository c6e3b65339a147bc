"""Wind time-series ingestion: CSV loading, resampling, windowing, normalization.

CSV schema (header required): ``timestamp,wind_speed_ms,wind_direction_deg``
with ISO-8601 UTC timestamps.  Directions are stored internally in radians in
[0, 2*pi); degrees appear only at file and CLI boundaries.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, replace
from datetime import datetime, timedelta, timezone

import numpy as np

from .errors import InvalidInputError, ParseError, SeriesError
from .forecasting.config import ForecastConfig

log = logging.getLogger(__name__)


def _wrap_deg(value: float) -> float:
    out = value % 360.0
    return 0.0 if out >= 360.0 else out


DEFAULT_COLUMNS = {
    "timestamp": "timestamp",
    "speed": "wind_speed_ms",
    "direction": "wind_direction_deg",
}

#: gaps of at most this many missing steps are interpolated
MAX_INTERP_GAP = 2


@dataclass(frozen=True)
class WindSample:
    timestamp: datetime
    speed: float  # m/s
    direction: float  # rad, [0, 2*pi), meteorological


@dataclass
class WindSeries:
    samples: list[WindSample]
    resolution_s: int
    source: str = "synthetic"

    def __len__(self) -> int:
        return len(self.samples)

    def speeds(self) -> np.ndarray:
        return np.array([s.speed for s in self.samples])

    def directions(self) -> np.ndarray:
        return np.array([s.direction for s in self.samples])

    def channel(self, name: str) -> np.ndarray:
        if name == "speed":
            return self.speeds()
        if name == "direction":
            return self.directions()
        raise InvalidInputError(f"unknown channel {name!r}")

    def validate(self) -> None:
        for k, (a, b) in enumerate(zip(self.samples, self.samples[1:])):
            delta = (b.timestamp - a.timestamp).total_seconds()
            if delta <= 0:
                raise SeriesError(f"timestamps not strictly increasing at index {k + 1}")
            if abs(delta - self.resolution_s) > 1e-6:
                raise SeriesError(
                    f"non-uniform spacing at index {k + 1}: {delta} s != {self.resolution_s} s"
                )
        for k, s in enumerate(self.samples):
            if s.speed < 0 or not math.isfinite(s.speed):
                raise SeriesError(f"bad speed at index {k}: {s.speed}")
            if not 0.0 <= s.direction < 2.0 * math.pi:
                raise SeriesError(f"direction out of [0, 2*pi) at index {k}")


def _parse_timestamp(raw: str, row: int) -> datetime:
    try:
        ts = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    except ValueError as exc:
        raise ParseError(f"bad timestamp {raw!r}: {exc}", row=row) from None
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _circular_interp_deg(a: float, b: float, frac: float) -> float:
    """Interpolate along the short way around the circle, degrees."""
    diff = (b - a + 180.0) % 360.0 - 180.0
    return _wrap_deg(a + frac * diff)


def load_csv_segments(
    path,
    columns: dict[str, str] | None = None,
    resolution_s: int | None = None,
    source: str = "csv",
) -> list[WindSeries]:
    """Parse a CSV into uniformly spaced segments.

    Gaps of up to two missing samples are filled by interpolation (circular
    for direction); longer gaps split the series.  Out-of-range directions are
    wrapped mod 360 with a warning; negative speeds and non-monotone
    timestamps are errors.
    """
    cols = dict(DEFAULT_COLUMNS)
    if columns:
        cols.update(columns)

    rows: list[tuple[datetime, float, float]] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ParseError("empty file: header row required")
        missing = [c for c in cols.values() if c not in reader.fieldnames]
        if missing:
            raise ParseError(f"missing columns: {', '.join(missing)}")
        for k, rec in enumerate(reader):
            row = k + 2  # header is row 1
            ts = _parse_timestamp(rec[cols["timestamp"]], row)
            try:
                speed = float(rec[cols["speed"]])
                direction = float(rec[cols["direction"]])
            except (TypeError, ValueError) as exc:
                raise ParseError(f"bad numeric field: {exc}", row=row) from None
            if not math.isfinite(speed) or speed < 0.0:
                raise ParseError(f"negative or non-finite speed {speed}", row=row)
            if not math.isfinite(direction):
                raise ParseError(f"non-finite direction {direction}", row=row)
            if not 0.0 <= direction < 360.0:
                log.warning("row %d: direction %.1f wrapped into [0, 360)", row, direction)
                direction = _wrap_deg(direction)
            rows.append((ts, speed, direction))
    if not rows:
        raise ParseError("no data rows")

    if resolution_s is None:
        if len(rows) < 2:
            raise ParseError("cannot infer resolution from a single row")
        resolution_s = round((rows[1][0] - rows[0][0]).total_seconds())
        if resolution_s <= 0:
            raise ParseError("timestamps not strictly increasing", row=3)

    segments: list[list[tuple[datetime, float, float]]] = [[rows[0]]]
    for k, (ts, speed, direction) in enumerate(rows[1:], start=1):
        prev = segments[-1][-1]
        delta = (ts - prev[0]).total_seconds()
        if delta <= 0:
            raise ParseError("timestamps not strictly increasing", row=k + 2)
        steps = delta / resolution_s
        if abs(steps - round(steps)) > 1e-6:
            raise ParseError(
                f"timestamp off the {resolution_s}-second grid", row=k + 2
            )
        steps = round(steps)
        if steps == 1:
            segments[-1].append((ts, speed, direction))
        elif steps - 1 <= MAX_INTERP_GAP:
            log.warning("interpolating %d missing sample(s) before row %d", steps - 1, k + 2)
            for j in range(1, steps):
                frac = j / steps
                t_j = prev[0] + timedelta(seconds=j * resolution_s)
                s_j = prev[1] + frac * (speed - prev[1])
                d_j = _circular_interp_deg(prev[2], direction, frac)
                segments[-1].append((t_j, s_j, d_j))
            segments[-1].append((ts, speed, direction))
        else:
            log.warning("gap of %d samples before row %d splits the series", steps - 1, k + 2)
            segments.append([(ts, speed, direction)])

    out = []
    for seg in segments:
        samples = [
            WindSample(ts, speed, math.radians(direction)) for ts, speed, direction in seg
        ]
        series = WindSeries(samples, resolution_s, source=source)
        series.validate()
        out.append(series)
    return out


def load_csv(path, columns: dict[str, str] | None = None, resolution_s: int | None = None) -> WindSeries:
    """Single-segment loader; refuses files fragmented by large gaps."""
    segments = load_csv_segments(path, columns=columns, resolution_s=resolution_s)
    if len(segments) != 1:
        raise SeriesError(
            f"file contains {len(segments)} segments separated by large gaps; "
            "use load_csv_segments"
        )
    return segments[0]


def resample_hourly(series: WindSeries) -> WindSeries:
    """5-minute series -> hourly series (mean speed, circular-mean direction)."""
    if series.resolution_s != 300:
        raise SeriesError(f"hourly resampling expects 300 s input, got {series.resolution_s} s")
    per_hour = 12
    n_hours = len(series) // per_hour
    if len(series) % per_hour:
        log.warning(
            "dropping %d trailing sample(s) short of a full hour", len(series) % per_hour
        )
    samples = []
    for h in range(n_hours):
        chunk = series.samples[h * per_hour : (h + 1) * per_hour]
        speed = float(np.mean([s.speed for s in chunk]))
        angles = np.array([s.direction for s in chunk])
        direction = float(np.angle(np.exp(1j * angles).sum()))
        direction %= 2.0 * math.pi
        if direction >= 2.0 * math.pi:
            direction = 0.0
        samples.append(WindSample(chunk[0].timestamp, speed, direction))
    out = WindSeries(samples, 3600, source=f"{series.source}:hourly")
    out.validate()
    return out


@dataclass
class WindowDataset:
    """Chronological train/test windows with train-split normalization bounds."""

    x_train: np.ndarray
    y_train: np.ndarray
    x_test: np.ndarray
    y_test: np.ndarray
    config: ForecastConfig
    channel: str
    bounds: tuple[float, float]

    def denormalize(self, values: np.ndarray) -> np.ndarray:
        lo, hi = self.bounds
        return np.asarray(values) * (hi - lo) + lo


def normalize(values: np.ndarray, bounds: tuple[float, float]) -> np.ndarray:
    lo, hi = bounds
    if hi <= lo:
        raise InvalidInputError("degenerate normalization bounds")
    return (np.asarray(values, dtype=float) - lo) / (hi - lo)


def denormalize(values: np.ndarray, bounds: tuple[float, float]) -> np.ndarray:
    lo, hi = bounds
    return np.asarray(values, dtype=float) * (hi - lo) + lo


def make_windows(
    series: WindSeries,
    config: ForecastConfig,
    channel: str = "speed",
    train_fraction: float = 0.8,
) -> WindowDataset:
    """Stride-1 sliding windows split chronologically by window start.

    A series of n samples yields n - input_len - horizon + 1 pairs.  The first
    ``train_fraction`` of them (at least one) form the training set; every
    test window starts strictly after every training window.  Normalization
    bounds come from the samples the training windows touch, so nothing from
    the evaluation span leaks into them (test inputs may overlap the tail of
    the training span, which is ordinary rolling-origin evaluation).
    """
    need = config.input_len + config.horizon
    if len(series) < need:
        raise SeriesError(f"series too short: {len(series)} samples < {need}")
    if not 0.0 < train_fraction < 1.0:
        raise InvalidInputError("train_fraction must be in (0, 1)")

    values = series.channel(channel)
    n_windows = len(values) - need + 1
    m = max(1, int(n_windows * train_fraction))

    train_span = values[: (m - 1) + need]
    lo, hi = float(train_span.min()), float(train_span.max())
    if hi <= lo:
        hi = lo + 1.0  # constant training span still normalizes cleanly
    bounds = (lo, hi)
    scaled = normalize(values, bounds)

    xs = np.stack([scaled[k : k + config.input_len] for k in range(n_windows)])
    ys = np.stack([scaled[k + config.input_len : k + need] for k in range(n_windows)])
    cfg = replace(config, bounds={**config.bounds, channel: bounds})
    return WindowDataset(
        x_train=xs[:m],
        y_train=ys[:m],
        x_test=xs[m:],
        y_test=ys[m:],
        config=cfg,
        channel=channel,
        bounds=bounds,
    )


def make_direction_sincos_windows(
    series: WindSeries,
    config: ForecastConfig,
    train_fraction: float = 0.8,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Direction windows as (sin, cos) pairs, immune to the 0/2*pi seam.

    Returns (x_train, y_train, x_test, y_test) with inputs (N, T, 2) and
    targets (N, 2 * horizon) laid out [sin_1..sin_H, cos_1..cos_H]; recover
    angles with ``decode_sincos``.  An alternative to raw normalization for
    wrap-heavy sites.
    """
    need = config.input_len + config.horizon
    if len(series) < need:
        raise SeriesError(f"series too short: {len(series)} samples < {need}")
    angles = series.directions()
    enc = np.stack([np.sin(angles), np.cos(angles)], axis=1)
    n_windows = len(angles) - need + 1
    m = max(1, int(n_windows * train_fraction))
    xs = np.stack([enc[k : k + config.input_len] for k in range(n_windows)])
    tails = [enc[k + config.input_len : k + need] for k in range(n_windows)]
    ys = np.stack([np.concatenate([t[:, 0], t[:, 1]]) for t in tails])
    return xs[:m], ys[:m], xs[m:], ys[m:]


def decode_sincos(y: np.ndarray, horizon: int) -> np.ndarray:
    """Angles (rad, [0, 2*pi)) from stacked [sin..., cos...] predictions."""
    y = np.asarray(y, dtype=float)
    out = np.arctan2(y[..., :horizon], y[..., horizon:]) % (2.0 * math.pi)
    out[out >= 2.0 * math.pi] = 0.0
    return out


def make_joint_windows(
    series: WindSeries,
    config: ForecastConfig,
    channels: tuple[str, ...] = ("speed", "direction"),
    train_fraction: float = 0.8,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, dict[str, tuple[float, float]]]:
    """One model over several channels: inputs (N, T, C), targets (N, C * H).

    Each channel is min-max normalized on its own training span; targets are
    stacked channel-major.  Returns the per-channel bounds as well.
    """
    per_channel = [
        make_windows(series, config, channel=ch, train_fraction=train_fraction)
        for ch in channels
    ]
    x_train = np.stack([d.x_train for d in per_channel], axis=2)
    x_test = np.stack([d.x_test for d in per_channel], axis=2)
    y_train = np.concatenate([d.y_train for d in per_channel], axis=1)
    y_test = np.concatenate([d.y_test for d in per_channel], axis=1)
    bounds = {ch: d.bounds for ch, d in zip(channels, per_channel)}
    return x_train, y_train, x_test, y_test, bounds


def series_from_arrays(
    speeds: np.ndarray,
    directions_deg: np.ndarray,
    resolution_s: int,
    start: datetime | None = None,
    source: str = "synthetic",
) -> WindSeries:
    """Build a series from raw arrays (directions in degrees)."""
    if len(speeds) != len(directions_deg):
        raise InvalidInputError("speed and direction arrays must have equal length")
    t0 = start or datetime(2024, 3, 1, tzinfo=timezone.utc)
    samples = [
        WindSample(
            t0 + timedelta(seconds=k * resolution_s),
            float(speeds[k]),
            math.radians(_wrap_deg(float(directions_deg[k]))),
        )
        for k in range(len(speeds))
    ]
    series = WindSeries(samples, resolution_s, source=source)
    series.validate()
    return series
