"""Walsh Modulation Generator: ``n`` parallel complement-variant channels on ``clk_bar``."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from walshctl.hw.config import ModulationConfig
from walshctl.hw.generators import RademacherGenerator, walsh_generator_word


class ModulationOutputs(NamedTuple):
    channels: np.ndarray  # (n,) uint8, bit of W_k for this cycle
    data_valid: bool


class ModulationGenerator:
    """``n`` Walsh generators sharing one Rademacher counter bank.

    A trigger seen on a ``clk_bar`` edge is captured, and the first segment
    of every channel is registered on the following ``clk_bar`` edge. The
    counter's wrap bit ends the span. Triggers that arrive while a span is
    still streaming are dropped and counted in ``dropped``.
    """

    def __init__(self, cfg: ModulationConfig):
        self.cfg = cfg
        self.orders = np.arange(cfg.n)
        self.rademacher = RademacherGenerator(cfg.t2, cfg.width)
        self.pending = False
        self.busy = False
        self.dropped = 0
        self._idle = np.zeros(cfg.n, dtype=np.uint8)

    def reset(self) -> None:
        self.pending = False
        self.busy = False
        self.rademacher.clear()

    def tick(self, trigger: bool = False) -> ModulationOutputs:
        if self.pending:
            self.rademacher.clear()
            self.busy = True
            self.pending = False
        if self.busy:
            word = self.rademacher.word()[0]
            channels = walsh_generator_word(self.orders, word, complement=True).astype(np.uint8)
            if self.rademacher.advance()[0]:
                self.busy = False
            valid = True
        else:
            channels, valid = self._idle, False
        if trigger:
            if self.busy:
                self.dropped += 1
            else:
                self.pending = True
        return ModulationOutputs(channels, valid)


def modulation_generator_run(cfg: ModulationConfig, trigger_cycle: int = 0) -> tuple[np.ndarray, np.ndarray, int]:
    """Drive one trigger through the generator.

    Returns ``(streams, data_valid, first_half_cycle)``. ``streams`` is
    ``(n, span)`` with one column per valid ``clk_bar`` cycle, ``data_valid``
    is the per-cycle flag from the capture edge onwards, and
    ``first_half_cycle`` is the half-cycle at which channel bits first appear
    for a trigger raised on the ``clk`` edge of ``trigger_cycle``.
    """
    gen = ModulationGenerator(cfg)
    cols, valid = [], []
    # clk_bar edge 2c+1 sees the trigger raised at 2c
    out = gen.tick(trigger=True)
    valid.append(out.data_valid)
    for _ in range(cfg.span_cycles + 1):
        out = gen.tick()
        valid.append(out.data_valid)
        if out.data_valid:
            cols.append(out.channels)
    return np.array(cols, dtype=np.uint8).T, np.array(valid), 2 * trigger_cycle + 3
