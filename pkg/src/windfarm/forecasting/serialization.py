"""Binary model container.

Layout (little-endian throughout), version 1:

    magic   4s   b"WFQ1"
    version u16
    kind    u8     0 = float model, 1 = quantized model
    input_len u32  0 when unset
    wbits   u8     weight bits (quantized models; 0 otherwise)
    obits   u8     output-head bits (quantized models; 0 otherwise)
    gamma   f64    quantization scale multiplier (0 for float models)
    n_records u16

Each record:

    name_len u8, name utf-8
    rkind    u8    0 = float32 payload, 1 = packed codes
    ndim     u8, dims u32 * ndim
    rkind 0: float32 * prod(dims)
    rkind 1: bits u8, scale f64, packed codes (ceil(n*bits/8) bytes)

Codes pack little-end-first within each byte for 2/4/8 bits and as u16 for 16
bits.  Floats are stored at 32-bit precision, the storage-comparison baseline.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError, ModelError
from .model import BIASES, WEIGHT_MATRICES, LstmModel
from .quantization import QuantizedLstm, QuantizedMatrix

MAGIC = b"WFQ1"
VERSION = 1
ALL_MATRICES = WEIGHT_MATRICES + ("W_y",)
ALL_BIASES = BIASES + ("b_y",)


def pack_codes(codes: np.ndarray, bits: int) -> bytes:
    flat = codes.astype(np.uint16).ravel()
    if bits == 16:
        return flat.astype("<u2").tobytes()
    per_byte = 8 // bits
    pad = (-flat.size) % per_byte
    if pad:
        flat = np.concatenate([flat, np.zeros(pad, dtype=np.uint16)])
    grouped = flat.reshape(-1, per_byte).astype(np.uint16)
    out = np.zeros(grouped.shape[0], dtype=np.uint16)
    for k in range(per_byte):
        out |= grouped[:, k] << (bits * k)
    return out.astype(np.uint8).tobytes()


def unpack_codes(data: bytes, bits: int, count: int) -> np.ndarray:
    if bits == 16:
        return np.frombuffer(data, dtype="<u2").astype(np.uint16)[:count]
    per_byte = 8 // bits
    raw = np.frombuffer(data, dtype=np.uint8)
    mask = (1 << bits) - 1
    cols = [(raw >> (bits * k)) & mask for k in range(per_byte)]
    flat = np.stack(cols, axis=1).ravel()
    return flat[:count].astype(np.uint16)


@dataclass(frozen=True)
class RecordInfo:
    name: str
    kind: str  # "float32" | "codes"
    header_bytes: int
    payload_bytes: int


def _write_record_float(buf: io.BytesIO, name: str, arr: np.ndarray) -> RecordInfo:
    nb = name.encode()
    header = struct.pack("<B", len(nb)) + nb + struct.pack("<BB", 0, arr.ndim)
    header += b"".join(struct.pack("<I", d) for d in arr.shape)
    payload = arr.astype("<f4").tobytes()
    buf.write(header + payload)
    return RecordInfo(name, "float32", len(header), len(payload))


def _write_record_codes(buf: io.BytesIO, name: str, q: QuantizedMatrix) -> RecordInfo:
    nb = name.encode()
    header = struct.pack("<B", len(nb)) + nb + struct.pack("<BB", 1, q.codes.ndim)
    header += b"".join(struct.pack("<I", d) for d in q.codes.shape)
    header += struct.pack("<Bd", q.bits, q.scale)
    payload = pack_codes(q.codes, q.bits)
    buf.write(header + payload)
    return RecordInfo(name, "codes", len(header), len(payload))


def _serialize(model: LstmModel | QuantizedLstm) -> tuple[bytes, list[RecordInfo]]:
    buf = io.BytesIO()
    records: list[RecordInfo] = []
    if isinstance(model, LstmModel):
        model.validate()
        head = struct.pack(
            "<4sHBIBBdH",
            MAGIC,
            VERSION,
            0,
            model.input_len or 0,
            0,
            0,
            0.0,
            len(ALL_MATRICES) + len(ALL_BIASES),
        )
        buf.write(head)
        for name in ALL_MATRICES:
            records.append(_write_record_float(buf, name, getattr(model, name)))
        for name in ALL_BIASES:
            records.append(_write_record_float(buf, name, getattr(model, name)))
    elif isinstance(model, QuantizedLstm):
        head = struct.pack(
            "<4sHBIBBdH",
            MAGIC,
            VERSION,
            1,
            model.input_len or 0,
            model.weight_bits,
            model.output_bits,
            model.gamma,
            len(ALL_MATRICES) + len(ALL_BIASES),
        )
        buf.write(head)
        for name in ALL_MATRICES:
            records.append(_write_record_codes(buf, name, model.matrices[name]))
        for name in ALL_BIASES:
            records.append(_write_record_float(buf, name, model.biases[name]))
    else:
        raise InvalidInputError(f"cannot serialize {type(model).__name__}")
    return buf.getvalue(), records


def save_model(model: LstmModel | QuantizedLstm, path) -> list[RecordInfo]:
    """Write the container; returns per-record byte accounting."""
    data, records = _serialize(model)
    with open(path, "wb") as fh:
        fh.write(data)
    return records


def serialize_model(model: LstmModel | QuantizedLstm) -> bytes:
    return _serialize(model)[0]


def payload_report(model: LstmModel | QuantizedLstm) -> dict[str, RecordInfo]:
    """Byte accounting without touching disk."""
    _, records = _serialize(model)
    return {r.name: r for r in records}


def _read_exact(fh, n: int) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise ModelError("truncated model container")
    return data


def load_model(path) -> LstmModel | QuantizedLstm:
    with open(path, "rb") as fh:
        head = _read_exact(fh, struct.calcsize("<4sHBIBBdH"))
        magic, version, kind, input_len, wbits, obits, gamma, n_records = struct.unpack(
            "<4sHBIBBdH", head
        )
        if magic != MAGIC:
            raise ModelError(f"bad magic {magic!r}; not a model container")
        if version != VERSION:
            raise ModelError(f"unsupported container version {version}")

        floats: dict[str, np.ndarray] = {}
        quants: dict[str, QuantizedMatrix] = {}
        for _ in range(n_records):
            (name_len,) = struct.unpack("<B", _read_exact(fh, 1))
            name = _read_exact(fh, name_len).decode()
            rkind, ndim = struct.unpack("<BB", _read_exact(fh, 2))
            dims = struct.unpack(f"<{ndim}I", _read_exact(fh, 4 * ndim))
            count = int(np.prod(dims)) if ndim else 1
            if rkind == 0:
                raw = _read_exact(fh, 4 * count)
                floats[name] = np.frombuffer(raw, dtype="<f4").astype(float).reshape(dims)
            elif rkind == 1:
                bits, scale = struct.unpack("<Bd", _read_exact(fh, 9))
                nbytes = count * 2 if bits == 16 else -(-count * bits // 8)
                codes = unpack_codes(_read_exact(fh, nbytes), bits, count).reshape(dims)
                quants[name] = QuantizedMatrix(bits=bits, codes=codes, scale=scale)
            else:
                raise ModelError(f"unknown record kind {rkind}")

    stored_len = input_len or None
    if kind == 0:
        missing = [n for n in (*ALL_MATRICES, *ALL_BIASES) if n not in floats]
        if missing:
            raise ModelError(f"container missing records: {missing}")
        model = LstmModel(**{n: floats[n] for n in (*ALL_MATRICES, *ALL_BIASES)}, input_len=stored_len)
        model.validate()
        return model
    missing = [n for n in ALL_MATRICES if n not in quants]
    missing += [n for n in ALL_BIASES if n not in floats]
    if missing:
        raise ModelError(f"container missing records: {missing}")
    return QuantizedLstm(
        weight_bits=wbits,
        output_bits=obits,
        gamma=gamma,
        matrices={n: quants[n] for n in ALL_MATRICES},
        biases={n: floats[n] for n in ALL_BIASES},
        input_len=stored_len,
    )
