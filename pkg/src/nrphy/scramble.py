"""Gold-sequence scrambling: bits on the encode path, LLR signs on decode.

The sequence is the XOR of two length-31 LFSRs (x1 taps 3,0; x2 taps
3,2,1,0) discarded for the first 1600 outputs. Its initialization packs
the transmission identity as c_init = rnti * 2^15 + q * 2^14 + cell_id.
Descrambling operates on LLRs by conditional negation: flipping the
underlying bit negates the log-ratio, and the symmetric SoftLlr range
makes negation exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

WARMUP = 1600
_REG_BITS = 31


@dataclass(frozen=True)
class ScramblingIdentity:
    rnti: int
    q: int
    cell_id: int

    def __post_init__(self):
        if not 0 <= self.rnti < (1 << 16):
            raise ValueError("rnti out of 16-bit range")
        if self.q not in (0, 1):
            raise ValueError("codeword index must be 0 or 1")
        if not 0 <= self.cell_id <= 1007:
            raise ValueError("cell_id out of [0, 1007]")

    @property
    def c_init(self) -> int:
        return (self.rnti << 15) + (self.q << 14) + self.cell_id


@dataclass(frozen=True)
class GoldState:
    """Registers after warm-up; bit i of x1/x2 is sequence element i."""

    x1: int
    x2: int
    position: int = 0


def _lfsr_blocks(seed31: np.ndarray, n: int, taps: tuple[int, ...]) -> np.ndarray:
    """First n outputs of x[i+31] = XOR of x[i+t] for t in taps (t includes 0)."""
    out = np.zeros(max(n, _REG_BITS), dtype=np.uint8)
    out[:_REG_BITS] = seed31
    # x[j] for j >= 31 depends on x[j-31+t]; fill in strides of 28, the gap
    # between the highest tap (3) and the register length.
    j = _REG_BITS
    while j < n:
        span = min(_REG_BITS - max(taps), n - j)
        acc = out[j - _REG_BITS: j - _REG_BITS + span].copy()
        for t in taps[1:]:
            acc ^= out[j - _REG_BITS + t: j - _REG_BITS + t + span]
        out[j: j + span] = acc
        j += span
    return out[:n]


def _seed_x2(c_init: int) -> np.ndarray:
    return np.array([(c_init >> i) & 1 for i in range(_REG_BITS)], dtype=np.uint8)


_SEED_X1 = np.array([1] + [0] * (_REG_BITS - 1), dtype=np.uint8)


def sequence(identity: ScramblingIdentity, n: int) -> np.ndarray:
    """First n scrambling bits for this identity."""
    total = WARMUP + n
    x1 = _lfsr_blocks(_SEED_X1, total, (0, 3))
    x2 = _lfsr_blocks(_seed_x2(identity.c_init), total, (0, 1, 2, 3))
    return x1[WARMUP:] ^ x2[WARMUP:]


def gold_init(identity: ScramblingIdentity) -> GoldState:
    """State positioned at sequence output 0, warm-up already discarded."""
    x1 = _lfsr_blocks(_SEED_X1, WARMUP + _REG_BITS, (0, 3))[WARMUP:]
    x2 = _lfsr_blocks(_seed_x2(identity.c_init), WARMUP + _REG_BITS, (0, 1, 2, 3))[WARMUP:]
    return GoldState(x1=int(np.packbits(x1, bitorder="little").view(np.uint32)[0]) & 0x7FFFFFFF,
                     x2=int(np.packbits(x2, bitorder="little").view(np.uint32)[0]) & 0x7FFFFFFF,
                     position=0)


def _step(reg: int, taps: tuple[int, ...]) -> int:
    new = 0
    for t in taps:
        new ^= (reg >> t) & 1
    return (reg >> 1) | (new << (_REG_BITS - 1))


def gold_next_word(state: GoldState) -> tuple[int, GoldState]:
    """Next 32 sequence bits packed LSB-first, plus the advanced state."""
    x1, x2 = state.x1, state.x2
    word = 0
    for i in range(32):
        word |= ((x1 ^ x2) & 1) << i
        x1 = _step(x1, (0, 3))
        x2 = _step(x2, (0, 1, 2, 3))
    return word, GoldState(x1=x1, x2=x2, position=state.position + 32)


def scramble_bits(bits: np.ndarray, identity: ScramblingIdentity) -> np.ndarray:
    """XOR the bit stream with the scrambling sequence (an involution)."""
    bits = np.asarray(bits, dtype=np.uint8)
    return bits ^ sequence(identity, len(bits))


def descramble_llrs(llrs: np.ndarray, identity: ScramblingIdentity) -> np.ndarray:
    """Negate LLRs wherever the scrambling bit is 1."""
    raw = np.asarray(llrs, dtype=np.int8)
    c = sequence(identity, len(raw))
    return np.where(c == 1, -raw, raw).astype(np.int8)
