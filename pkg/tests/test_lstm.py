from __future__ import annotations

import math

import numpy as np
import pytest

from windfarm.errors import InvalidInputError, ModelError
from windfarm.forecasting import (
    LstmModel,
    forecast,
    init_model,
    lstm_step,
    metrics,
    persistence_forecast,
)
from windfarm.forecasting.model import forecast_batch


def zero_model(input_dim=1, hidden=3, horizon=2, input_len=None):
    z = np.zeros
    return LstmModel(
        W_f=z((hidden, input_dim)), W_i=z((hidden, input_dim)),
        W_o=z((hidden, input_dim)), W_c=z((hidden, input_dim)),
        U_f=z((hidden, hidden)), U_i=z((hidden, hidden)),
        U_o=z((hidden, hidden)), U_c=z((hidden, hidden)),
        b_f=z(hidden), b_i=z(hidden), b_o=z(hidden), b_c=z(hidden),
        W_y=z((horizon, hidden)), b_y=z(horizon), input_len=input_len,
    )


def scalar_oracle_step(model, x, h_prev, c_prev):
    """Index-by-index re-derivation of one recurrence step (no matrix ops)."""
    hid, d = model.W_f.shape
    sig = lambda v: 1.0 / (1.0 + math.exp(-v))
    h, c = [0.0] * hid, [0.0] * hid
    for r in range(hid):
        acc = {"f": model.b_f[r], "i": model.b_i[r], "o": model.b_o[r], "c": model.b_c[r]}
        for k in range(d):
            acc["f"] += model.W_f[r, k] * x[k]
            acc["i"] += model.W_i[r, k] * x[k]
            acc["o"] += model.W_o[r, k] * x[k]
            acc["c"] += model.W_c[r, k] * x[k]
        for k in range(hid):
            acc["f"] += model.U_f[r, k] * h_prev[k]
            acc["i"] += model.U_i[r, k] * h_prev[k]
            acc["o"] += model.U_o[r, k] * h_prev[k]
            acc["c"] += model.U_c[r, k] * h_prev[k]
        f, i, o = sig(acc["f"]), sig(acc["i"]), sig(acc["o"])
        g = math.tanh(acc["c"])
        c[r] = f * c_prev[r] + i * g
        h[r] = o * math.tanh(c[r])
    return np.array(h), np.array(c)


def test_zero_model_step_gives_zero_hidden():
    model = zero_model()
    h, c = lstm_step(model, np.array([3.7]), np.zeros(3), np.zeros(3))
    # gates sit at 0.5, candidate tanh(0) = 0, so cell and hidden stay 0
    assert np.allclose(h, 0.0)
    assert np.allclose(c, 0.0)


def test_gate_saturation_passes_cell_through():
    model = zero_model()
    model.b_f[:] = 60.0   # forget gate -> 1
    model.b_i[:] = -60.0  # input gate -> 0
    c_prev = np.array([0.3, -1.2, 2.5])
    _, c = lstm_step(model, np.array([0.9]), np.zeros(3), c_prev)
    assert np.allclose(c, c_prev, atol=1e-12)


def test_step_matches_scalar_oracle():
    rng = np.random.default_rng(17)
    model = init_model(input_dim=2, hidden_size=2, horizon=1, seed=5)
    for _ in range(20):
        x = rng.normal(size=2)
        h_prev = rng.normal(size=2)
        c_prev = rng.normal(size=2)
        h, c = lstm_step(model, x, h_prev, c_prev)
        h_ref, c_ref = scalar_oracle_step(model, x, h_prev, c_prev)
        assert np.allclose(h, h_ref, atol=1e-12)
        assert np.allclose(c, c_ref, atol=1e-12)


def test_step_shape_mismatch():
    model = zero_model(input_dim=1, hidden=3)
    with pytest.raises(ModelError):
        lstm_step(model, np.zeros(2), np.zeros(3), np.zeros(3))
    with pytest.raises(ModelError):
        lstm_step(model, np.zeros(1), np.zeros(4), np.zeros(4))


def test_gate_ranges_and_finite_cell():
    from windfarm.forecasting.model import sigmoid

    rng = np.random.default_rng(23)
    model = init_model(input_dim=1, hidden_size=8, horizon=2, seed=9)
    h = np.zeros(8)
    c = np.zeros(8)
    for _ in range(200):
        x = rng.uniform(-1.0, 2.0, size=1)
        pre = x @ model.W_f.T + h @ model.U_f.T + model.b_f
        gate = sigmoid(pre)
        assert np.all(gate > 0.0) and np.all(gate < 1.0)
        h, c = lstm_step(model, x, h, c)
        assert np.all(np.isfinite(c))


def test_forecast_zero_model_returns_output_bias():
    model = zero_model(horizon=4, input_len=6)
    model.b_y[:] = [1.0, -2.0, 0.5, 3.0]
    out = forecast(model, np.ones(6))
    assert np.allclose(out, model.b_y)


def test_forecast_is_deterministic():
    model = init_model(input_dim=1, hidden_size=6, horizon=3, seed=2, input_len=10)
    window = np.linspace(0.0, 1.0, 10)
    a = forecast(model, window)
    b = forecast(model, window)
    assert np.array_equal(a, b)


def test_forecast_rejects_wrong_window_length():
    model = init_model(input_dim=1, hidden_size=4, horizon=2, seed=0, input_len=8)
    with pytest.raises(InvalidInputError):
        forecast(model, np.ones(7))


def test_forecast_batch_matches_single():
    model = init_model(input_dim=1, hidden_size=5, horizon=4, seed=3, input_len=12)
    rng = np.random.default_rng(4)
    windows = rng.uniform(0.0, 1.0, size=(6, 12))
    batch = forecast_batch(model, windows)
    for k in range(6):
        assert np.allclose(batch[k], forecast(model, windows[k]), atol=1e-12)


def test_persistence_forecast():
    assert np.allclose(persistence_forecast(np.full(5, 2.0), 3), [2.0, 2.0, 2.0])
    assert np.allclose(persistence_forecast(np.array([0.0, 1.0, 2.0]), 4), [2.0] * 4)
    mae, _ = metrics(np.full(4, 3.3), persistence_forecast(np.full(9, 3.3), 4))
    assert mae == 0.0
    with pytest.raises(InvalidInputError):
        persistence_forecast(np.array([]), 2)


def test_metrics_examples():
    assert metrics(np.array([1.0, 2.0]), np.array([1.0, 2.0])) == (0.0, 0.0)
    mae, rmse = metrics(np.array([0.0, 0.0]), np.array([1.0, -1.0]))
    assert mae == pytest.approx(1.0)
    assert rmse == pytest.approx(1.0)
    mae, rmse = metrics(np.array([0.0, 0.0]), np.array([2.0, 0.0]))
    assert mae == pytest.approx(1.0)
    assert rmse == pytest.approx(math.sqrt(2.0))


def test_metrics_validation():
    with pytest.raises(InvalidInputError):
        metrics(np.ones(3), np.ones(4))
    with pytest.raises(InvalidInputError):
        metrics(np.array([]), np.array([]))


def test_rmse_at_least_mae():
    rng = np.random.default_rng(31)
    for _ in range(200):
        y = rng.normal(size=8)
        y_hat = rng.normal(size=8)
        mae, rmse = metrics(y, y_hat)
        assert rmse >= mae - 1e-12


def test_constant_series_trains_to_constant():
    from windfarm.forecasting import ForecastConfig, train
    from windfarm.series import make_windows, series_from_arrays

    series = series_from_arrays(np.full(120, 7.0), np.full(120, 180.0), 300)
    ds = make_windows(series, ForecastConfig(input_len=12, horizon=4), channel="speed")
    result = train(ds.x_train, ds.y_train, hidden_size=4, epochs=2, learning_rate=0.05, seed=0)
    out = forecast_batch(result.model, ds.x_train)
    # normalized constant series sits at 0; the model reproduces it exactly
    assert np.allclose(out, 0.0, atol=1e-9)
    assert np.allclose(ds.denormalize(out), 7.0, atol=1e-6)
