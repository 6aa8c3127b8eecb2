"""Rademacher and Walsh generators.

State is held in numpy arrays with a leading instance axis so that a bank
of independent generators (the parallel channels of the modulation
generator, or many sequencer configurations at once) advances in one call.
A single generator is simply a bank of one.
"""

from __future__ import annotations

import numpy as np

from walshctl.walsh import MAX_ORDER

STAGES = MAX_ORDER.bit_length()  # 8 cascade stages for an 8-bit Paley order

# PARITY[v]: XOR of the bits of an 8-bit value
PARITY = np.array([bin(v).count("1") & 1 for v in range(1 << STAGES)], dtype=bool)


def _bitrev_table() -> np.ndarray:
    # BITREV[m, slot]: Rademacher word (bit j = R_j) for segment ``slot`` of a 2**m grid
    t = np.zeros((STAGES + 1, 1 << STAGES), dtype=np.int64)
    slot = np.arange(1 << STAGES)
    for m in range(1, STAGES + 1):
        for j in range(m):
            t[m] |= ((slot >> (m - 1 - j)) & 1) << j
    return t


BITREV = _bitrev_table()


def order_bits(orders) -> np.ndarray:
    """Paley orders -> ``(..., 8)`` bool array of ``b_j`` (LSB first), the order register."""
    o = np.asarray(orders, dtype=np.int64)
    if np.any(o < 0) or np.any(o > MAX_ORDER):
        raise ValueError("Paley orders must lie in 0..255")
    return ((o[..., None] >> np.arange(STAGES)) & 1).astype(bool)


class RademacherGenerator:
    """Counter-driven bank of Rademacher square waves.

    An expansion counter divides the clock by ``expansion``; each time it
    rolls over the segment counter steps. Bit ``m-1-j`` of the segment
    counter drives ``R_j``, so ``R_j`` starts at 0 and toggles every
    ``expansion * 2**(m-1-j)`` clock cycles. Roll-over of the segment counter
    is the auxiliary completion bit.
    """

    def __init__(self, expansion, width):
        exp = np.atleast_1d(np.asarray(expansion, dtype=np.int64))
        wid = np.atleast_1d(np.asarray(width, dtype=np.int64))
        exp, wid = np.broadcast_arrays(exp, wid)
        if np.any(exp < 1):
            raise ValueError("clock expansion must be >= 1")
        if np.any(wid < 1) or np.any(wid > STAGES):
            raise ValueError(f"generator width must lie in 1..{STAGES}")
        self.expansion = exp.copy()
        self.width = wid.copy()
        self.segments = np.left_shift(1, self.width)
        shifts = self.width[:, None] - 1 - np.arange(STAGES)
        self._valid = shifts >= 0
        self._shifts = np.where(self._valid, shifts, 0)
        self.count = np.zeros_like(self.expansion)
        self.slot = np.zeros_like(self.expansion)

    def __len__(self):
        return self.expansion.size

    def clear(self, mask=None) -> None:
        if mask is None:
            self.count[:] = 0
            self.slot[:] = 0
        else:
            self.count[mask] = 0
            self.slot[mask] = 0

    def select(self, idx) -> None:
        """Keep only the instances picked by ``idx`` (index array, mask or slice)."""
        for name in ("expansion", "width", "segments", "_valid", "_shifts", "count", "slot"):
            setattr(self, name, getattr(self, name)[idx])

    def word(self) -> np.ndarray:
        """Current outputs packed as an integer with bit ``j`` = ``R_j``."""
        return BITREV[self.width, self.slot]

    def outputs(self) -> np.ndarray:
        """Current ``R_0..R_7`` per instance, shape ``(B, 8)``; orders at or above the width read 0."""
        return ((self.slot[:, None] >> self._shifts) & 1).astype(bool) & self._valid

    def advance(self, enable=True) -> np.ndarray:
        """Clock the counters of enabled instances; returns the completion (wrap) flags."""
        en = np.broadcast_to(np.asarray(enable, dtype=bool), self.count.shape)
        count = self.count + en
        seg_done = count >= self.expansion
        count[seg_done] = 0
        slot = self.slot + seg_done
        wrapped = slot >= self.segments
        slot[wrapped] = 0
        self.count = count
        self.slot = slot
        return wrapped

    def tick(self, enable=True) -> np.ndarray:
        """Outputs for this clock cycle, then advance."""
        out = self.outputs()
        self.advance(enable)
        return out


def walsh_generator_comb(bits: np.ndarray, rademacher: np.ndarray, complement=False) -> np.ndarray:
    """Cascade of 8 LUT stages: stage ``j`` passes ``In ^ R_j`` when ``b_j`` is set, else ``In``.

    Purely combinational; ``bits`` and ``rademacher`` broadcast over leading axes.
    """
    bits = np.asarray(bits, dtype=bool)
    rad = np.asarray(rademacher, dtype=bool)
    acc = np.zeros(np.broadcast_shapes(bits.shape[:-1], rad.shape[:-1]), dtype=bool)
    for j in range(bits.shape[-1]):
        acc = np.where(bits[..., j], acc ^ rad[..., j], acc)
    return acc ^ np.asarray(complement, dtype=bool)


def walsh_generator_word(orders, rademacher_word, complement=False) -> np.ndarray:
    """Packed form of :func:`walsh_generator_comb`.

    Each stage XORs ``b_j & R_j`` into the running bit, so the cascade
    reduces to the parity of ``order & R``.
    """
    out = PARITY[np.asarray(orders, dtype=np.int64) & np.asarray(rademacher_word, dtype=np.int64)]
    return out ^ np.asarray(complement, dtype=bool)


def generator_stream(order: int, expansion: int, width: int, complement=False, passes: int = 1) -> np.ndarray:
    """Free-running single Walsh generator output over ``passes`` full periods."""
    rad = RademacherGenerator(expansion, width)
    b = order_bits(order)
    n = int(rad.segments[0]) * expansion * passes
    out = np.empty(n, dtype=np.uint8)
    for c in range(n):
        out[c] = walsh_generator_comb(b, rad.tick()[0], complement)
    return out
