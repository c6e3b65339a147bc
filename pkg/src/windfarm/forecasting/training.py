"""Mini-batch gradient-descent training on a mean-absolute-error objective.

Gradients come from full backpropagation through time.  The MAE subgradient at
an exact zero error is taken as 0.  Updates are plain fixed-step descent after
clipping the global gradient norm at 1.0; no optimizer state is kept, so runs
are bit-reproducible given (seed, data, settings).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import TrainingError
from .model import LstmModel, init_model, sigmoid
from .quantization import QuantizedLstm, quantize_model

CLIP_NORM = 1.0


@dataclass
class TrainingResult:
    model: LstmModel
    quantized: QuantizedLstm | None
    loss_history: list[float]  # entry 0 is the pre-training loss


def mae_loss_and_grads(
    model: LstmModel, x: np.ndarray, y: np.ndarray
) -> tuple[float, dict[str, np.ndarray]]:
    """MAE over a batch plus gradients for every parameter.

    ``x`` is (B, T, D) (or (B, T) for one input channel); ``y`` is (B, K).
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 2:
        x = x[:, :, None]
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    b, t_steps, _ = x.shape
    hid = model.hidden_size

    hs = [np.zeros((b, hid))]
    cs = [np.zeros((b, hid))]
    fs, is_, os_, gs = [], [], [], []
    for t in range(t_steps):
        xt, h_prev = x[:, t, :], hs[-1]
        f = sigmoid(xt @ model.W_f.T + h_prev @ model.U_f.T + model.b_f)
        i = sigmoid(xt @ model.W_i.T + h_prev @ model.U_i.T + model.b_i)
        o = sigmoid(xt @ model.W_o.T + h_prev @ model.U_o.T + model.b_o)
        g = np.tanh(xt @ model.W_c.T + h_prev @ model.U_c.T + model.b_c)
        c = f * cs[-1] + i * g
        fs.append(f), is_.append(i), os_.append(o), gs.append(g)
        cs.append(c)
        hs.append(o * np.tanh(c))

    y_hat = hs[-1] @ model.W_y.T + model.b_y
    err = y_hat - y
    loss = float(np.mean(np.abs(err)))

    d_yhat = np.sign(err) / err.size
    grads = {name: np.zeros_like(getattr(model, name)) for name in model.param_names()}
    grads["W_y"] = d_yhat.T @ hs[-1]
    grads["b_y"] = d_yhat.sum(axis=0)

    dh = d_yhat @ model.W_y
    dc = np.zeros((b, hid))
    for t in range(t_steps - 1, -1, -1):
        f, i, o, g = fs[t], is_[t], os_[t], gs[t]
        c, c_prev, h_prev, xt = cs[t + 1], cs[t], hs[t], x[:, t, :]
        tanh_c = np.tanh(c)
        do = dh * tanh_c
        dc = dc + dh * o * (1.0 - tanh_c**2)
        df = dc * c_prev
        di = dc * g
        dg = dc * i
        da_f = df * f * (1.0 - f)
        da_i = di * i * (1.0 - i)
        da_o = do * o * (1.0 - o)
        da_c = dg * (1.0 - g**2)

        grads["W_f"] += da_f.T @ xt
        grads["W_i"] += da_i.T @ xt
        grads["W_o"] += da_o.T @ xt
        grads["W_c"] += da_c.T @ xt
        grads["U_f"] += da_f.T @ h_prev
        grads["U_i"] += da_i.T @ h_prev
        grads["U_o"] += da_o.T @ h_prev
        grads["U_c"] += da_c.T @ h_prev
        grads["b_f"] += da_f.sum(axis=0)
        grads["b_i"] += da_i.sum(axis=0)
        grads["b_o"] += da_o.sum(axis=0)
        grads["b_c"] += da_c.sum(axis=0)

        dh = da_f @ model.U_f + da_i @ model.U_i + da_o @ model.U_o + da_c @ model.U_c
        dc = dc * f
    return loss, grads


def dataset_loss(model: LstmModel, x: np.ndarray, y: np.ndarray) -> float:
    loss, _ = mae_loss_and_grads(model, x, y)
    return loss


def _clip_global_norm(grads: dict[str, np.ndarray], max_norm: float) -> None:
    total = np.sqrt(sum(float(np.sum(g**2)) for g in grads.values()))
    if total > max_norm and total > 0.0:
        factor = max_norm / total
        for g in grads.values():
            g *= factor


def train(
    x: np.ndarray,
    y: np.ndarray,
    *,
    hidden_size: int = 100,
    epochs: int = 50,
    learning_rate: float = 0.05,
    batch_size: int = 32,
    bits: int | None = None,
    output_bits: int | None = None,
    gamma: float = 2.5,
    seed: int = 0,
    init_scale: float = 1.0,
) -> TrainingResult:
    """Fit a forecaster on normalized windows; optionally quantize afterwards.

    ``bits`` triggers post-training quantization of every weight matrix (the
    output head uses ``output_bits``, defaulting to ``bits``); biases stay in
    full precision.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 2:
        x = x[:, :, None]
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    if x.shape[0] == 0:
        raise TrainingError("empty training dataset")
    if x.shape[0] != y.shape[0]:
        raise TrainingError("inputs and targets disagree on sample count")

    n, t_steps, input_dim = x.shape
    horizon = y.shape[1]
    model = init_model(
        input_dim, hidden_size, horizon, seed=seed, input_len=t_steps, init_scale=init_scale
    )
    # warm-start the read-out at the per-step target mean; with a sign-based
    # loss and a fixed step the bias would otherwise crawl there for epochs
    model.b_y[...] = y.mean(axis=0)

    rng = np.random.default_rng(seed + 1)
    history = [dataset_loss(model, x, y)]
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            idx = order[start : start + batch_size]
            loss, grads = mae_loss_and_grads(model, x[idx], y[idx])
            if not np.isfinite(loss):
                raise TrainingError("loss diverged to a non-finite value")
            _clip_global_norm(grads, CLIP_NORM)
            for name, g in grads.items():
                param = getattr(model, name)
                param -= learning_rate * g
        epoch_loss = dataset_loss(model, x, y)
        if not np.isfinite(epoch_loss):
            raise TrainingError("loss diverged to a non-finite value")
        history.append(epoch_loss)

    quantized = None
    if bits is not None:
        quantized = quantize_model(model, bits, output_bits=output_bits, gamma=gamma)
    return TrainingResult(model=model, quantized=quantized, loss_history=history)
