"""Circular-buffer rate matching and the HARQ soft-buffer pool.

The encode path reads E_r bits circularly from the N_cb-bit buffer
(codeword bits 2Zc..N_full-1), starting at the redundancy version's
offset and skipping filler positions, which are never transmitted. The
decode path scatters received LLRs back to their buffer positions with
saturating addition, so retransmissions with different redundancy
versions combine into a lower-rate observation. Sixteen virtual buffers
(each large enough for the biggest code) are bound to HARQ process ids.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PoolExhaustedError, UnknownProcessError
from .ldpc import BaseGraphId, Codeword, LiftedLdpcCode
from .llr import LLR_RAW_MAX

POOL_SLOTS = 16
N_CB_MAX = 25344  # largest buffer any code needs (BG1, Zc=384)

FILLER_LLR_RAW = -LLR_RAW_MAX  # known-zero bits get the minimum LLR

# Circular-buffer start position numerators per redundancy version; the
# denominator is the base graph's buffer width in columns.
_K0_NUM = {BaseGraphId.BG1: (0, 17, 33, 56), BaseGraphId.BG2: (0, 13, 25, 43)}
_K0_DEN = {BaseGraphId.BG1: 66, BaseGraphId.BG2: 50}


@dataclass(frozen=True)
class RateMatchConfig:
    E_r: int
    rv: int
    Q_m: int

    def __post_init__(self):
        if self.E_r <= 0:
            raise ValueError("E_r must be positive")
        if self.Q_m not in (2, 4, 6, 8):
            raise ValueError("Q_m must be one of 2, 4, 6, 8")
        if self.E_r % self.Q_m:
            raise ValueError("E_r must be a multiple of Q_m")
        if self.rv not in (0, 1, 2, 3):
            raise ValueError("rv must be in {0,1,2,3}")


def k0_start(code: LiftedLdpcCode, rv: int) -> int:
    """Circular-buffer read start for a redundancy version."""
    if rv not in (0, 1, 2, 3):
        raise ValueError("rv must be in {0,1,2,3}")
    num = _K0_NUM[code.bg][rv]
    return (num * code.N_cb // (_K0_DEN[code.bg] * code.Zc)) * code.Zc


def buffer_filler_range(code: LiftedLdpcCode, filler_count: int) -> range:
    """Filler positions in buffer coordinates (systematic tail, minus 2Zc)."""
    end = code.K - 2 * code.Zc
    return range(end - filler_count, end)


def _selection_indices(n_cb: int, k0: int, filler_range: range, count: int) -> np.ndarray:
    """Buffer positions read/written by a transmission of ``count`` values."""
    order = np.concatenate([np.arange(k0, n_cb), np.arange(0, k0)])
    usable = np.ones(n_cb, dtype=bool)
    usable[list(filler_range)] = False
    order = order[usable[order]]
    return order[np.arange(count) % len(order)]


def rate_match(codeword: Codeword, filler_range: range, cfg: RateMatchConfig) -> np.ndarray:
    """Select E_r bits from the circular buffer for one transmission."""
    code = codeword.code
    buf = np.asarray(codeword.bits, dtype=np.uint8)[2 * code.Zc:]
    idx = _selection_indices(code.N_cb, k0_start(code, cfg.rv), filler_range, cfg.E_r)
    return buf[idx]


def interleave(e: np.ndarray, q_m: int) -> np.ndarray:
    """Spread bits so each group of Q_m output bits samples the whole block."""
    e = np.asarray(e)
    if len(e) % q_m:
        raise ValueError("Q_m must divide E_r")
    return e.reshape(q_m, -1).T.reshape(-1)


def deinterleave(llrs: np.ndarray, q_m: int) -> np.ndarray:
    """Exact inverse permutation of :func:`interleave`."""
    llrs = np.asarray(llrs)
    if len(llrs) % q_m:
        raise ValueError("Q_m must divide E_r")
    return llrs.reshape(-1, q_m).T.reshape(-1)


@dataclass
class SoftBuffer:
    """One process's N_cb soft values plus its filler interval."""

    llrs: np.ndarray
    filler_range: range


@dataclass
class _SlotMeta:
    bg: BaseGraphId = None
    Zc: int = 0
    n_cb: int = 0
    filler_range: range = range(0)
    last_use: int = 0


class HarqBufferPool:
    """Fixed pool of virtual circular buffers keyed by HARQ process id.

    All methods must be called from a single owner; distinct pools are
    independent. Buffers are zeroed when (re)bound to a new packet and
    returned untouched for retransmissions.
    """

    def __init__(self, num_slots: int = POOL_SLOTS):
        if not 1 <= num_slots <= POOL_SLOTS:
            raise ValueError(f"num_slots must be in [1, {POOL_SLOTS}]")
        self.num_slots = num_slots
        self._store = np.zeros((num_slots, N_CB_MAX), dtype=np.int8)
        self._meta = [_SlotMeta() for _ in range(num_slots)]
        self.bindings: dict[int, int] = {}
        self.free_list: list[int] = list(range(num_slots))
        self._clock = 0

    def acquire(self, process_id: int, is_new_packet: bool,
                code: LiftedLdpcCode = None, filler_count: int = 0) -> SoftBuffer:
        """Bind (new packet) or look up (retransmission) a soft buffer."""
        self._clock += 1
        if is_new_packet:
            if code is None:
                raise ValueError("new packet requires the code dimensions")
            if process_id in self.bindings:
                slot = self.bindings[process_id]  # replace the stale packet
            elif self.free_list:
                slot = self.free_list.pop(0)
                self.bindings[process_id] = slot
            else:
                raise PoolExhaustedError(
                    f"all {self.num_slots} soft buffers are bound")
            meta = self._meta[slot]
            meta.bg, meta.Zc, meta.n_cb = code.bg, code.Zc, code.N_cb
            meta.filler_range = buffer_filler_range(code, filler_count)
            meta.last_use = self._clock
            self._store[slot, :] = 0
        else:
            if process_id not in self.bindings:
                raise UnknownProcessError(f"no buffer bound to process {process_id}")
            slot = self.bindings[process_id]
            meta = self._meta[slot]
            if code is not None and (meta.bg, meta.Zc) != (code.bg, code.Zc):
                raise ValueError("bound buffer dimensions do not match the code")
            meta.last_use = self._clock
        return SoftBuffer(self._store[slot, : meta.n_cb], meta.filler_range)

    def release(self, process_id: int) -> None:
        if process_id not in self.bindings:
            raise UnknownProcessError(f"no buffer bound to process {process_id}")
        slot = self.bindings.pop(process_id)
        self.free_list.append(slot)


def rate_unmatch_combine(buffer: SoftBuffer, llrs: np.ndarray,
                         cfg: RateMatchConfig, code: LiftedLdpcCode) -> None:
    """Scatter-add received LLRs into their buffer positions (saturating).

    Positions hit more than once by one transmission (wrap-around
    repetition) accumulate every copy, in arrival order.
    """
    raw = np.asarray(llrs, dtype=np.int16)
    if raw.shape != (cfg.E_r,):
        raise ValueError("LLR count must equal E_r")
    idx = _selection_indices(code.N_cb, k0_start(code, cfg.rv),
                             buffer.filler_range, cfg.E_r)
    buf = buffer.llrs
    cycle = code.N_cb - len(buffer.filler_range)
    # Within one pass over the buffer every position is unique, so each
    # chunk is an exact element-wise saturating add in arrival order.
    for start in range(0, cfg.E_r, cycle):
        sl = slice(start, min(start + cycle, cfg.E_r))
        acc = buf[idx[sl]].astype(np.int16) + raw[sl]
        buf[idx[sl]] = np.clip(acc, -LLR_RAW_MAX, LLR_RAW_MAX).astype(np.int8)


def materialize_decoder_input(buffer: SoftBuffer, code: LiftedLdpcCode) -> np.ndarray:
    """Full N_full LLR vector: zero punctured head, minimum-LLR fillers."""
    out = np.zeros(code.N_full, dtype=np.int8)
    out[2 * code.Zc:] = buffer.llrs
    if len(buffer.filler_range):
        out[2 * code.Zc + buffer.filler_range.start:
            2 * code.Zc + buffer.filler_range.stop] = FILLER_LLR_RAW
    return out
