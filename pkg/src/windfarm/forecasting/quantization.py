"""Fixed-point weight quantization and sparse multiplication over code grids.

A matrix W is quantized in three moves: scale by 1/(gamma * median|W|), clamp
to [-0.5, 0.5] and shift to [0, 1], then snap to the grid k/(2^w - 1) with
k = floor((2^w - 1) * x + 0.5).  Dequantization maps a level back through
(level - 0.5) * scale.  A weight of exactly zero lands on code 2^(w-1); the
grid is half-step offset, so that code dequantizes to +0.5*scale/(2^w - 1)
rather than exactly zero.  Sparse products treat that code as the background
level and skip it exactly via background subtraction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError, QuantizationDegenerateError

SUPPORTED_BITS = (2, 4, 8, 16)
DEFAULT_GAMMA = 2.5
SPARSE_ZERO_THRESHOLD = 0.5


def zero_level_code(bits: int) -> int:
    """Code a zero weight snaps to: floor((2^w - 1)/2 + 0.5)."""
    return 1 << (bits - 1)


@dataclass(frozen=True)
class QuantizedMatrix:
    bits: int
    codes: np.ndarray  # uint16, same shape as the source matrix
    scale: float

    def __post_init__(self):
        if self.bits not in SUPPORTED_BITS:
            raise InvalidInputError(f"bits must be one of {SUPPORTED_BITS}")
        if self.scale <= 0.0:
            raise InvalidInputError("scale must be > 0")
        if self.codes.size and int(self.codes.max()) > (1 << self.bits) - 1:
            raise InvalidInputError("code out of range for the bit width")

    @property
    def shape(self) -> tuple[int, ...]:
        return self.codes.shape

    @property
    def levels(self) -> np.ndarray:
        return self.codes.astype(float) / ((1 << self.bits) - 1)

    def zero_fraction(self) -> float:
        return float(np.mean(self.codes == zero_level_code(self.bits)))


def quantize(w: np.ndarray, bits: int, gamma: float = DEFAULT_GAMMA) -> QuantizedMatrix:
    """Snap a real matrix onto the ``bits``-wide fixed-point grid."""
    if bits not in SUPPORTED_BITS:
        raise InvalidInputError(f"bits must be one of {SUPPORTED_BITS}")
    w = np.asarray(w, dtype=float)
    if w.size == 0:
        raise InvalidInputError("cannot quantize an empty matrix")
    med = float(np.median(np.abs(w)))
    if med == 0.0:
        raise QuantizationDegenerateError("median absolute weight is zero")
    scale = gamma * med
    shifted = np.clip(w / scale, -0.5, 0.5) + 0.5
    n_levels = (1 << bits) - 1
    codes = np.floor(n_levels * shifted + 0.5).astype(np.uint16)
    return QuantizedMatrix(bits=bits, codes=codes, scale=scale)


def dequantize(q: QuantizedMatrix) -> np.ndarray:
    """Real matrix represented by the codes: (level - 0.5) * scale."""
    return (q.levels - 0.5) * q.scale


def sparse_matvec(
    q: QuantizedMatrix, v: np.ndarray, zero_threshold: float = SPARSE_ZERO_THRESHOLD
) -> np.ndarray:
    """Matrix-vector product that skips background-level codes when worthwhile.

    Exact rewrite: W v = scale * [(L - l_z) v + (l_z - 0.5) * sum(v)] where L
    is the level matrix and l_z the background level; entries at the background
    level drop out of the first term, so only the others are gathered.  Falls
    back to the dense dequantized product below ``zero_threshold`` sparsity.
    """
    if q.codes.ndim != 2:
        raise InvalidInputError("sparse_matvec expects a 2-D code matrix")
    v = np.asarray(v, dtype=float)
    rows, cols = q.codes.shape
    if v.shape != (cols,):
        raise InvalidInputError(f"vector shape {v.shape} does not match matrix ({rows}, {cols})")

    if q.zero_fraction() < zero_threshold:
        return dequantize(q) @ v

    z = zero_level_code(q.bits)
    level_z = z / ((1 << q.bits) - 1)
    r_idx, c_idx = np.nonzero(q.codes != z)
    out = np.zeros(rows)
    if r_idx.size:
        contrib = (q.levels[r_idx, c_idx] - level_z) * v[c_idx]
        np.add.at(out, r_idx, contrib)
    return q.scale * (out + (level_z - 0.5) * float(v.sum()))


@dataclass
class QuantizedLstm:
    """Post-training quantized forecaster: coded weights plus float biases."""

    weight_bits: int
    output_bits: int
    gamma: float
    matrices: dict[str, QuantizedMatrix]
    biases: dict[str, np.ndarray]
    input_len: int | None = None

    def to_model(self):
        """Dequantize into a plain float model (shared inference path)."""
        from .model import LstmModel

        kwargs = {name: dequantize(q) for name, q in self.matrices.items()}
        kwargs.update({name: b.copy() for name, b in self.biases.items()})
        model = LstmModel(**kwargs, input_len=self.input_len)
        model.validate()
        return model

    def forecast(self, window) -> np.ndarray:
        """Inference driven by sparse code-domain products."""
        from .model import _as_window, sigmoid

        d = self.matrices["W_f"].shape[1]
        arr = _as_window(window, d)
        if self.input_len is not None and arr.shape[0] != self.input_len:
            raise InvalidInputError(f"window length {arr.shape[0]} != expected {self.input_len}")
        hid = self.matrices["W_f"].shape[0]
        h = np.zeros(hid)
        c = np.zeros(hid)
        m, b = self.matrices, self.biases
        for x_t in arr:
            f = sigmoid(sparse_matvec(m["W_f"], x_t) + sparse_matvec(m["U_f"], h) + b["b_f"])
            i = sigmoid(sparse_matvec(m["W_i"], x_t) + sparse_matvec(m["U_i"], h) + b["b_i"])
            o = sigmoid(sparse_matvec(m["W_o"], x_t) + sparse_matvec(m["U_o"], h) + b["b_o"])
            g = np.tanh(sparse_matvec(m["W_c"], x_t) + sparse_matvec(m["U_c"], h) + b["b_c"])
            c = f * c + i * g
            h = o * np.tanh(c)
        return sparse_matvec(m["W_y"], h) + b["b_y"]


def quantize_model(
    model,
    weight_bits: int,
    output_bits: int | None = None,
    gamma: float = DEFAULT_GAMMA,
) -> QuantizedLstm:
    """Quantize every weight matrix of a trained model; keep biases exact."""
    from .model import BIASES, WEIGHT_MATRICES

    if output_bits is None:
        output_bits = weight_bits
    model.validate()
    matrices = {name: quantize(getattr(model, name), weight_bits, gamma) for name in WEIGHT_MATRICES}
    matrices["W_y"] = quantize(model.W_y, output_bits, gamma)
    biases = {name: getattr(model, name).copy() for name in BIASES}
    biases["b_y"] = model.b_y.copy()
    return QuantizedLstm(
        weight_bits=weight_bits,
        output_bits=output_bits,
        gamma=gamma,
        matrices=matrices,
        biases=biases,
        input_len=model.input_len,
    )
