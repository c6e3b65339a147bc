"""Quantized recurrent wind forecaster, baselines, and error metrics."""

from .config import ForecastConfig  # noqa: F401
from .model import (  # noqa: F401
    LstmModel,
    forecast,
    init_model,
    lstm_step,
    metrics,
    persistence_forecast,
)
from .quantization import (  # noqa: F401
    QuantizedLstm,
    QuantizedMatrix,
    dequantize,
    quantize,
    quantize_model,
    sparse_matvec,
    zero_level_code,
)
from .serialization import load_model, payload_report, save_model  # noqa: F401
from .training import TrainingResult, mae_loss_and_grads, train  # noqa: F401
