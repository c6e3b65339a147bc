"""Single-layer recurrent forecaster with a one-shot multi-step output head.

Gates use the logistic function, cell/hidden activations tanh:

    f = sig(W_f x + U_f h' + b_f)        i = sig(W_i x + U_i h' + b_i)
    o = sig(W_o x + U_o h' + b_o)        g = tanh(W_c x + U_c h' + b_c)
    c = f * c' + i * g                   h = o * tanh(c)

The forecast is an affine read-out of the final hidden state; the output
matrix has one row per horizon step.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from ..errors import InvalidInputError, ModelError

GATE_MATRICES = ("W_f", "W_i", "W_o", "W_c")
RECURRENT_MATRICES = ("U_f", "U_i", "U_o", "U_c")
WEIGHT_MATRICES = GATE_MATRICES + RECURRENT_MATRICES
BIASES = ("b_f", "b_i", "b_o", "b_c")


def sigmoid(z: np.ndarray) -> np.ndarray:
    # tanh form is overflow-safe
    return 0.5 * (1.0 + np.tanh(0.5 * z))


@dataclass
class LstmModel:
    W_f: np.ndarray
    W_i: np.ndarray
    W_o: np.ndarray
    W_c: np.ndarray
    U_f: np.ndarray
    U_i: np.ndarray
    U_o: np.ndarray
    U_c: np.ndarray
    b_f: np.ndarray
    b_i: np.ndarray
    b_o: np.ndarray
    b_c: np.ndarray
    W_y: np.ndarray
    b_y: np.ndarray
    input_len: int | None = None  # expected window length, when known

    @property
    def hidden_size(self) -> int:
        return self.W_f.shape[0]

    @property
    def input_dim(self) -> int:
        return self.W_f.shape[1]

    @property
    def horizon(self) -> int:
        return self.W_y.shape[0]

    def param_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in fields(self) if f.name != "input_len")

    def validate(self) -> None:
        h, d = self.W_f.shape
        for name in WEIGHT_MATRICES:
            mat = getattr(self, name)
            want = (h, d) if name.startswith("W") else (h, h)
            if mat.shape != want:
                raise ModelError(f"{name} has shape {mat.shape}, expected {want}")
        for name in BIASES:
            if getattr(self, name).shape != (h,):
                raise ModelError(f"{name} must have shape ({h},)")
        if self.W_y.ndim != 2 or self.W_y.shape[1] != h:
            raise ModelError(f"W_y has shape {self.W_y.shape}, expected (horizon, {h})")
        if self.b_y.shape != (self.W_y.shape[0],):
            raise ModelError("b_y length must match the horizon")
        for name in self.param_names():
            if not np.all(np.isfinite(getattr(self, name))):
                raise ModelError(f"{name} contains non-finite entries")

    def copy(self) -> "LstmModel":
        kwargs = {name: getattr(self, name).copy() for name in self.param_names()}
        return LstmModel(**kwargs, input_len=self.input_len)


def init_model(
    input_dim: int,
    hidden_size: int,
    horizon: int,
    seed: int = 0,
    input_len: int | None = None,
    init_scale: float = 1.0,
) -> LstmModel:
    """Uniform(-s/sqrt(H), s/sqrt(H)) initialization, zero biases.

    ``init_scale`` < 1 keeps weight magnitudes small, which keeps the
    fixed-point grid step (proportional to the median weight) small too.
    """
    rng = np.random.default_rng(seed)
    bound = init_scale / np.sqrt(hidden_size)

    def mat(rows, cols):
        return rng.uniform(-bound, bound, size=(rows, cols))

    model = LstmModel(
        W_f=mat(hidden_size, input_dim),
        W_i=mat(hidden_size, input_dim),
        W_o=mat(hidden_size, input_dim),
        W_c=mat(hidden_size, input_dim),
        U_f=mat(hidden_size, hidden_size),
        U_i=mat(hidden_size, hidden_size),
        U_o=mat(hidden_size, hidden_size),
        U_c=mat(hidden_size, hidden_size),
        b_f=np.zeros(hidden_size),
        b_i=np.zeros(hidden_size),
        b_o=np.zeros(hidden_size),
        b_c=np.zeros(hidden_size),
        W_y=mat(horizon, hidden_size),
        b_y=np.zeros(horizon),
        input_len=input_len,
    )
    model.validate()
    return model


def lstm_step(
    model: LstmModel, x_t: np.ndarray, h_prev: np.ndarray, c_prev: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """One recurrence step.  Accepts (D,)/(H,) vectors or (B, D)/(B, H) batches."""
    x_t = np.atleast_1d(np.asarray(x_t, dtype=float))
    h_prev = np.asarray(h_prev, dtype=float)
    c_prev = np.asarray(c_prev, dtype=float)
    if x_t.shape[-1] != model.input_dim:
        raise ModelError(f"input dim {x_t.shape[-1]} != model input dim {model.input_dim}")
    if h_prev.shape != c_prev.shape or h_prev.shape[-1] != model.hidden_size:
        raise ModelError("hidden/cell state shapes are inconsistent with the model")

    f = sigmoid(x_t @ model.W_f.T + h_prev @ model.U_f.T + model.b_f)
    i = sigmoid(x_t @ model.W_i.T + h_prev @ model.U_i.T + model.b_i)
    o = sigmoid(x_t @ model.W_o.T + h_prev @ model.U_o.T + model.b_o)
    g = np.tanh(x_t @ model.W_c.T + h_prev @ model.U_c.T + model.b_c)
    c = f * c_prev + i * g
    h = o * np.tanh(c)
    return h, c


def _as_window(window, input_dim: int) -> np.ndarray:
    arr = np.asarray(window, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[1] != input_dim:
        raise InvalidInputError(
            f"window must be (T,) or (T, {input_dim}), got shape {arr.shape}"
        )
    return arr


def forecast(model: LstmModel, window) -> np.ndarray:
    """Run the window and read out the horizon-length forecast vector."""
    arr = _as_window(window, model.input_dim)
    if model.input_len is not None and arr.shape[0] != model.input_len:
        raise InvalidInputError(
            f"window length {arr.shape[0]} != expected {model.input_len}"
        )
    h = np.zeros(model.hidden_size)
    c = np.zeros(model.hidden_size)
    for x_t in arr:
        h, c = lstm_step(model, x_t, h, c)
    return model.W_y @ h + model.b_y


def forecast_batch(model: LstmModel, windows: np.ndarray) -> np.ndarray:
    """Vectorized forecast for windows of shape (B, T) or (B, T, D)."""
    arr = np.asarray(windows, dtype=float)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3 or arr.shape[2] != model.input_dim:
        raise InvalidInputError(f"windows must be (B, T, {model.input_dim})")
    b = arr.shape[0]
    h = np.zeros((b, model.hidden_size))
    c = np.zeros((b, model.hidden_size))
    for t in range(arr.shape[1]):
        h, c = lstm_step(model, arr[:, t, :], h, c)
    return h @ model.W_y.T + model.b_y


def persistence_forecast(window, horizon: int) -> np.ndarray:
    """Baseline: repeat the last observed value across the horizon."""
    arr = np.asarray(window, dtype=float)
    if arr.size == 0:
        raise InvalidInputError("persistence forecast needs a non-empty window")
    if horizon < 1:
        raise InvalidInputError("horizon must be >= 1")
    last = arr.reshape(arr.shape[0], -1)[-1]
    out = np.tile(last, (horizon, 1))
    return out[:, 0] if out.shape[1] == 1 else out


def metrics(y, y_hat) -> tuple[float, float]:
    """(MAE, RMSE) between a truth vector and a forecast vector."""
    y = np.asarray(y, dtype=float).ravel()
    y_hat = np.asarray(y_hat, dtype=float).ravel()
    if y.shape != y_hat.shape:
        raise InvalidInputError(f"length mismatch: {y.shape} vs {y_hat.shape}")
    if y.size == 0:
        raise InvalidInputError("metrics need at least one sample")
    err = y - y_hat
    mae = float(np.mean(np.abs(err)))
    rmse = float(np.sqrt(np.mean(err**2)))
    return mae, rmse
