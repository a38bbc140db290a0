"""Fixed-point soft demapping and the accelerator word formats.

LLRs use a 6-bit symmetric saturating format with 2 fractional bits,
carried in 8-bit containers: raw integers in [-31, +31], semantic value
raw / 4, range [-7.75, +7.75]. Positive values favor bit 1. Equalized
symbols are Q3.12 (16-bit signed, 12 fractional bits) per component.

The demapper evaluates the per-bit piecewise-linear max-log approximation
(nested absolute differences against the constellation's A/B/C/D offsets)
with every intermediate saturated to 16 bits, then quantizes to SoftLlr.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FormatError

LLR_RAW_MAX = 31
LLR_SCALE = 4  # raw units per unit LLR (2 fractional bits)
LLR_VALUE_MAX = LLR_RAW_MAX / LLR_SCALE  # 7.75

SYMBOL_FRAC_BITS = 12
SYMBOL_SCALE = 1 << SYMBOL_FRAC_BITS
_I16_MIN, _I16_MAX = -32768, 32767

INV_NOISE_FRAC_BITS = 8
_INV_NOISE_MAX = 0xFFFF

MODULATION_ORDERS = (2, 4, 6, 8)

# Unit-energy normalization per modulation order (QPSK..256QAM).
_NORM = {2: math.sqrt(2.0), 4: math.sqrt(10.0), 6: math.sqrt(42.0), 8: math.sqrt(170.0)}
# Decision-boundary offsets (B, C, D) in multiples of A.
_OFFSETS = {2: (), 4: (1,), 6: (2, 1), 8: (4, 2, 1)}


def llr_values(raw: np.ndarray) -> np.ndarray:
    """Semantic LLR values of raw SoftLlr integers."""
    return np.asarray(raw, dtype=np.float64) / LLR_SCALE


def assert_softllr(raw: np.ndarray) -> np.ndarray:
    """Range instrumentation: raw SoftLlrs must stay within [-31, 31]."""
    raw = np.asarray(raw)
    if raw.size and int(np.abs(raw).max()) > LLR_RAW_MAX:
        raise AssertionError("SoftLlr raw value out of [-31, 31]")
    return raw


def quantize(values) -> np.ndarray:
    """Round to the nearest quarter, ties away from zero, clamp to +/-7.75."""
    v = np.asarray(values, dtype=np.float64)
    raw = np.sign(v) * np.floor(np.abs(v) * LLR_SCALE + 0.5)
    return np.clip(raw, -LLR_RAW_MAX, LLR_RAW_MAX).astype(np.int8)


@dataclass(frozen=True)
class EqualizedSymbols:
    """Batch of equalized constellation symbols, Q3.12 per component."""

    re: np.ndarray
    im: np.ndarray

    def __len__(self) -> int:
        return len(self.re)

    def values(self) -> np.ndarray:
        """Complex floating-point view."""
        return (self.re + 1j * self.im) / SYMBOL_SCALE


def _sat16(x: np.ndarray) -> np.ndarray:
    return np.clip(x, _I16_MIN, _I16_MAX).astype(np.int32)


def _quantize_symbols(values: np.ndarray) -> EqualizedSymbols:
    re = np.clip(np.rint(values.real * SYMBOL_SCALE), _I16_MIN, _I16_MAX)
    im = np.clip(np.rint(values.imag * SYMBOL_SCALE), _I16_MIN, _I16_MAX)
    return EqualizedSymbols(re.astype(np.int16), im.astype(np.int16))


@dataclass(frozen=True)
class DemapperParams:
    """Per-modulation demapper constants plus the noise scale.

    A..D are the Q3.12 fixed-point images of the Table-of-offsets
    constants (each quantized from its exact real value); ``inv_noise``
    is 1/sigma^2 in unsigned Q8.8, applied as one multiplier per block.
    """

    Q_m: int
    A: int
    B: int
    C: int
    D: int
    inv_noise: int

    @classmethod
    def for_noise(cls, q_m: int, sigma2: float) -> "DemapperParams":
        if q_m not in MODULATION_ORDERS:
            raise ValueError(f"unsupported modulation order {q_m}")
        a_real = 2.0 / _NORM[q_m]
        mults = _OFFSETS[q_m]
        offs = [int(round(m * a_real * SYMBOL_SCALE)) for m in mults]
        offs += [0] * (3 - len(offs))
        inv = _INV_NOISE_MAX
        if sigma2 > 0:
            inv = min(_INV_NOISE_MAX, int(round((1 << INV_NOISE_FRAC_BITS) / sigma2)))
        return cls(
            Q_m=q_m,
            A=int(round(a_real * SYMBOL_SCALE)),
            B=offs[0],
            C=offs[1],
            D=offs[2],
            inv_noise=inv,
        )


def modulate(bits: np.ndarray, q_m: int) -> EqualizedSymbols:
    """Gray-map groups of q_m bits onto the unit-energy constellation."""
    bits = np.asarray(bits, dtype=np.int64)
    if q_m not in MODULATION_ORDERS:
        raise ValueError(f"unsupported modulation order {q_m}")
    if bits.size % q_m:
        raise ValueError("bit count not a multiple of Q_m")
    g = bits.reshape(-1, q_m)
    half = q_m // 2

    def axis(cols: np.ndarray) -> np.ndarray:
        # Nested Gray amplitude: 2 - (1-2c), 4 - (1-2c)(2 - ...), ...
        mag = np.ones(len(cols), dtype=np.int64)
        for lvl in range(1, half):
            mag = (1 << lvl) - (1 - 2 * cols[:, half - lvl]) * mag
        return (1 - 2 * cols[:, 0]) * mag

    re = axis(g[:, 0::2])
    im = axis(g[:, 1::2])
    return _quantize_symbols((re + 1j * im) / _NORM[q_m])


def awgn(symbols: EqualizedSymbols, sigma2: float, seed) -> EqualizedSymbols:
    """Add complex Gaussian noise of total variance sigma2, re-saturating."""
    if sigma2 < 0:
        raise ValueError("sigma2 must be >= 0")
    if sigma2 == 0:
        return symbols
    rng = np.random.default_rng(seed)
    std = math.sqrt(sigma2 / 2.0)
    noisy = symbols.values() + rng.normal(0.0, std, len(symbols)) \
        + 1j * rng.normal(0.0, std, len(symbols))
    return _quantize_symbols(noisy)


def llr_estimate(symbols: EqualizedSymbols, params: DemapperParams) -> np.ndarray:
    """Per-bit piecewise-linear LLRs, quantized to raw SoftLlr integers.

    Bit k of each symbol comes from the k//2-th nested absolute-difference
    stage of the in-phase (even k) or quadrature (odd k) component; stage
    values and both multiplies saturate to 16 bits.
    """
    q_m = params.Q_m
    n = len(symbols)
    out = np.empty((n, q_m), dtype=np.int8)
    offsets = (params.B, params.C, params.D)
    for comp, base in ((symbols.re, 0), (symbols.im, 1)):
        t = comp.astype(np.int32)
        stage = -t  # sign convention: positive LLR favors bit 1
        for k in range(q_m // 2):
            scaled = _sat16((stage.astype(np.int64) * params.A) >> SYMBOL_FRAC_BITS)
            scaled = _sat16((scaled.astype(np.int64) * params.inv_noise) >> INV_NOISE_FRAC_BITS)
            raw = np.sign(scaled) * ((np.abs(scaled) + (SYMBOL_SCALE // LLR_SCALE // 2))
                                     // (SYMBOL_SCALE // LLR_SCALE))
            out[:, 2 * k + base] = np.clip(raw, -LLR_RAW_MAX, LLR_RAW_MAX)
            if k < q_m // 2 - 1:
                t = _sat16(np.abs(t) - offsets[k])
                stage = t
    return out.reshape(-1)


# ---------------------------------------------------------------------------
# 32-bit word packing (accelerator data interface)
# ---------------------------------------------------------------------------

KIND_RAW_BITS = "raw_bits"
KIND_LLRS = "llrs"


@dataclass(frozen=True)
class PackedWordStream:
    """Sequence of 32-bit words: raw bits LSB-first or 4 LLR bytes per word."""

    words: np.ndarray
    kind: str

    def to_bytes(self) -> bytes:
        """Little-endian on-disk/wire layout."""
        return self.words.astype("<u4").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes, kind: str) -> "PackedWordStream":
        if len(data) % 4:
            raise FormatError("word stream length not a multiple of 4 bytes")
        return cls(np.frombuffer(data, dtype="<u4").astype(np.uint32), kind)

    def dump_hex(self) -> str:
        """Debug dump: one word per line, hexadecimal."""
        return "".join(f"{w:08x}\n" for w in self.words)

    @classmethod
    def from_hex(cls, text: str, kind: str) -> "PackedWordStream":
        words = [int(line, 16) for line in text.split()]
        return cls(np.asarray(words, dtype=np.uint32), kind)


def pack_llr_words(llrs: np.ndarray) -> PackedWordStream:
    """4 LLRs per word, lowest byte first, each sign-extended to 8 bits."""
    raw = assert_softllr(np.asarray(llrs, dtype=np.int8))
    padded = np.zeros((len(raw) + 3) // 4 * 4, dtype=np.int8)
    padded[: len(raw)] = raw
    words = padded.view(np.uint8).astype(np.uint32).reshape(-1, 4)
    return PackedWordStream(
        words[:, 0] | words[:, 1] << 8 | words[:, 2] << 16 | words[:, 3] << 24,
        KIND_LLRS,
    )


def unpack_llr_words(stream: PackedWordStream, count: int | None = None) -> np.ndarray:
    if stream.kind != KIND_LLRS:
        raise FormatError(f"expected llr words, got {stream.kind}")
    w = stream.words.astype(np.uint32)
    raw = np.stack([w & 0xFF, w >> 8 & 0xFF, w >> 16 & 0xFF, w >> 24 & 0xFF], axis=1)
    raw = raw.astype(np.uint8).view(np.int8).reshape(-1)
    if count is not None:
        if count > raw.size:
            raise FormatError("count exceeds stream capacity")
        raw = raw[:count]
    if raw.size and int(np.abs(raw.astype(np.int16)).max()) > LLR_RAW_MAX:
        raise FormatError("byte is not a sign-extended 6-bit LLR")
    return raw


def pack_bit_words(bits: np.ndarray) -> PackedWordStream:
    """Bit i lands in bit (i mod 32) of word (i div 32), LSB-first."""
    bits = np.asarray(bits, dtype=np.uint8)
    padded = np.zeros((len(bits) + 31) // 32 * 32, dtype=np.uint8)
    padded[: len(bits)] = bits
    weights = (np.uint32(1) << np.arange(32, dtype=np.uint32))
    words = (padded.reshape(-1, 32).astype(np.uint32) * weights).sum(
        axis=1, dtype=np.uint64
    )
    return PackedWordStream(words.astype(np.uint32), KIND_RAW_BITS)


def unpack_bit_words(stream: PackedWordStream, count: int) -> np.ndarray:
    if stream.kind != KIND_RAW_BITS:
        raise FormatError(f"expected raw bit words, got {stream.kind}")
    if count > 32 * len(stream.words):
        raise FormatError("count exceeds stream capacity")
    w = stream.words.astype(np.uint32)
    bits = (w[:, None] >> np.arange(32, dtype=np.uint32)[None, :]) & 1
    return bits.reshape(-1)[:count].astype(np.uint8)
