"""Walsh Filter Synthesizer: Sum Weights, DDS, and the AM / PM / QAM arbitration paths.

All arithmetic is on integer words. DAC words are 14-bit sign-magnitude
values held as Python/numpy integers in ``[-8191, 8191]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from walshctl.errors import ConfigError
from walshctl.fixed import FULL_SCALE, MAG_BITS, accumulator_width, round_half_up_array, saturate
from walshctl.hw.config import Mode, SynthConfig

PHASE_BITS = 13
PHASE_WORDS = 1 << PHASE_BITS
QAM_KEEP_BITS = 7  # MSBs of each 14-bit operand entering the multiplier
_QAM_SHIFT = MAG_BITS - (QAM_KEEP_BITS - 1)


def _dds_tables() -> tuple[np.ndarray, np.ndarray]:
    ph = 2 * np.pi * np.arange(PHASE_WORDS) / PHASE_WORDS
    cos = round_half_up_array(FULL_SCALE * np.cos(ph))
    sin = round_half_up_array(FULL_SCALE * np.sin(ph))
    for t in (cos, sin):
        t.setflags(write=False)
    return cos, sin


COS_TABLE, SIN_TABLE = _dds_tables()


def dds_lookup(word) -> tuple[int, int]:
    """13-bit phase word (turns, wraps) -> ``(cos, sin)`` DAC words."""
    w = int(word) % PHASE_WORDS
    return int(COS_TABLE[w]), int(SIN_TABLE[w])


def qam_multiply(a: int, b: int) -> int:
    """Sign-magnitude product keeping sign + 6 magnitude MSBs of each operand.

    The 12-bit magnitude product is shifted up one place so full scale maps
    back near full scale (``63 * 63 * 2 = 7938``).
    """
    mag = ((abs(a) >> _QAM_SHIFT) * (abs(b) >> _QAM_SHIFT)) << 1
    return -mag if (a < 0) != (b < 0) else mag


@dataclass
class SumWeights:
    """Multiplexer-and-adder tree: channel bit 1 selects ``+X_k``, bit 0 selects ``-X_k``."""

    weights: np.ndarray
    overflow: bool = False
    width: int = field(init=False)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.int64)
        self.width = accumulator_width(self.weights.size)
        self.limit = (1 << (self.width - 1)) - 1

    def __call__(self, bits) -> int:
        b = np.asarray(bits)
        total = int(np.where(b.astype(bool), self.weights, -self.weights).sum())
        if abs(total) > self.limit:
            self.overflow = True
            total = max(-self.limit, min(self.limit, total))
        return total


def sum_weights(bits, weights) -> tuple[int, bool]:
    """One combinational Sum Weights evaluation; returns ``(sigma, overflow)``."""
    sw = SumWeights(weights)
    sigma = sw(bits)
    return sigma, sw.overflow


class SynthOutputs(NamedTuple):
    i: int
    q: int
    valid: bool


_PATH_STAGES = {Mode.AM: 2, Mode.PM: 2, Mode.QAM: 4}


class FilterSynthesizer:
    """Registered synthesizer pipeline clocked on ``clk_bar``.

    Stage 1 registers the Sum Weights outputs. AM and PM register their DAC
    words at stage 2 (saturated sum, or the DDS lookup of the sum modulo
    2**13). QAM holds the AM word in an alignment DFF beside the DDS at
    stage 2, then spends two more stages in the multiplier, so its output
    lags AM/PM by two cycles.
    """

    def __init__(self, cfg: SynthConfig, n: int | None = None):
        if n is not None:
            cfg = cfg.padded(n)
        if cfg.mode not in _PATH_STAGES:
            raise ConfigError(f"invalid mode {cfg.mode!r}")
        self.cfg = cfg
        self.amp = SumWeights(cfg.weights)
        self.phase = SumWeights(cfg.effective_phase_weights)
        self.stages = _PATH_STAGES[cfg.mode]
        self.saturated = False
        self.reset()

    @property
    def overflow(self) -> bool:
        return self.amp.overflow or self.phase.overflow

    @property
    def latency(self) -> int:
        """Clock cycles from channel bits registered to DAC words registered."""
        return self.stages

    @property
    def idle(self) -> bool:
        return all(r is None for r in self._pipe)

    def reset(self) -> None:
        self._pipe: list = [None] * self.stages

    def _dac(self, sigma: int) -> int:
        v, clipped = saturate(sigma)
        self.saturated |= clipped
        return v

    def tick(self, channels, valid: bool) -> SynthOutputs:
        mode = self.cfg.mode
        p = self._pipe
        # evaluate back to front so each stage reads last cycle's register
        if mode is Mode.QAM:
            p[3] = None if p[2] is None else (qam_multiply(p[2][0], p[2][1]), qam_multiply(p[2][0], p[2][2]))
            p[2] = p[1]
            p[1] = None if p[0] is None else (self._dac(p[0][0]), *dds_lookup(p[0][1]))
        else:
            if p[0] is None:
                p[1] = None
            elif mode is Mode.AM:
                p[1] = (self._dac(p[0][0]), 0)
            else:
                p[1] = dds_lookup(p[0][1])
        p[0] = (self.amp(channels), self.phase(channels)) if valid else None
        out = p[-1]
        if out is None:
            return SynthOutputs(0, 0, False)
        return SynthOutputs(out[0], out[1], True)
