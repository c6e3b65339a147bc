from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import InvalidInputError


@dataclass
class ForecastConfig:
    """Window geometry and normalization bounds for one forecasting task.

    Defaults follow the 5-minute setup: a 2 h input window (24 samples)
    forecasting the next 40 min (8 samples).
    """

    input_len: int = 24
    horizon: int = 8
    resolution_s: int = 300
    channels: tuple[str, ...] = ("speed",)
    #: per-channel (lo, hi) min-max bounds, filled from the training split
    bounds: dict[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        if self.input_len < 1 or self.horizon < 1:
            raise InvalidInputError("input_len and horizon must be >= 1")
        if self.resolution_s <= 0:
            raise InvalidInputError("resolution_s must be positive")
        if not self.channels:
            raise InvalidInputError("at least one channel is required")
