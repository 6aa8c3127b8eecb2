"""Walsh Timing Sequencer with Repeat Module and Edge Detect, clocked on ``clk``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from walshctl.hw.config import TimingConfig
from walshctl.hw.generators import RademacherGenerator, walsh_generator_word

RESET_CYCLES = 3
LOAD_CYCLES = 2


class SequencerOutputs(NamedTuple):
    line: np.ndarray  # timing bitstream [W_s]_R
    launch: np.ndarray  # first cycle of a run (internal trigger)
    flip: np.ndarray  # bit-flip seen by Edge Detect this cycle
    ready: np.ndarray  # ready-to-output after this edge
    active: np.ndarray  # output enabled this cycle

    @property
    def trigger(self) -> np.ndarray:
        return self.launch | self.flip


@dataclass(frozen=True)
class TriggerEvent:
    cycle: int  # clk edge on which the line changed
    kind: str  # "start" or "edge"

    @property
    def half_cycle(self) -> int:
        return 2 * self.cycle

    @property
    def registered_half_cycle(self) -> int:
        """Edge Detect DFF captures on the following falling edge."""
        return 2 * self.cycle + 1


class TimingSequencer:
    """Bank of sequencers, one per :class:`TimingConfig`.

    Protocol per rising ``clk`` edge (see :meth:`tick`):

    * ``start`` is sampled while ready and arms the run; the internal trigger
      and the first timing segment appear on the next edge.
    * each segment of ``W_s`` is held ``t1`` cycles; the Repeat Module counts
      completed passes and drops the enable after ``R`` of them (``R == 0``
      never enables).
    * ``reset`` aborts and holds ready low for 3 cycles; ``load`` (a variable
      change) aborts and holds ready low for 2 cycles.
    """

    def __init__(self, configs: TimingConfig | Iterable[TimingConfig]):
        if isinstance(configs, TimingConfig):
            configs = [configs]
        self.configs = list(configs)
        if not self.configs:
            raise ValueError("need at least one timing configuration")
        self.order = np.array([c.order for c in self.configs], dtype=np.int64)
        self.repeats = np.array([c.repeats for c in self.configs], dtype=np.int64)
        self.t1 = np.array([c.t1 for c in self.configs], dtype=np.int64)
        self.rademacher = RademacherGenerator(self.t1, [c.width for c in self.configs])
        B = len(self.configs)
        self.ready = np.ones(B, dtype=bool)
        self.armed = np.zeros(B, dtype=bool)
        self.running = np.zeros(B, dtype=bool)
        self.passes = np.zeros(B, dtype=np.int64)
        self.wait = np.zeros(B, dtype=np.int64)
        self.prev_line = np.zeros(B, dtype=bool)
        self.prev_active = np.zeros(B, dtype=bool)
        self.cycle = 0

    def __len__(self):
        return len(self.configs)

    def select(self, idx) -> None:
        """Drop every instance not picked by ``idx``; used to retire finished runs from a large bank."""
        self.configs = [self.configs[i] for i in np.arange(len(self.configs))[idx]]
        for name in ("order", "repeats", "t1", "ready", "armed", "running", "passes", "wait",
                     "prev_line", "prev_active"):
            setattr(self, name, getattr(self, name)[idx])
        self.rademacher.select(idx)

    def tick(self, start=False, reset=False, load=False) -> SequencerOutputs:
        quiet = not (np.any(start) or np.any(reset) or np.any(load))
        if quiet:
            launch = self.armed
            active = self.running | launch
        else:
            shape = self.ready.shape
            start = np.broadcast_to(np.asarray(start, dtype=bool), shape)
            reset = np.broadcast_to(np.asarray(reset, dtype=bool), shape)
            load = np.broadcast_to(np.asarray(load, dtype=bool), shape)
            abort = reset | load
            launch = self.armed & ~abort
            active = (self.running | launch) & ~abort
        if launch.any():
            self.rademacher.clear(launch)
        line = walsh_generator_word(self.order, self.rademacher.word()) & active
        flip = active & self.prev_active & (line != self.prev_line)

        wrapped = self.rademacher.advance(active)
        passes = np.where(launch, 0, self.passes) + wrapped
        running = active & ~(wrapped & (passes >= self.repeats))

        if quiet:
            wait = np.maximum(self.wait - 1, 0)
            armed = np.zeros_like(self.armed)
        else:
            wait = np.where(reset, RESET_CYCLES, np.where(load, LOAD_CYCLES, np.maximum(self.wait - 1, 0)))
            armed = start & self.ready & ~abort & (self.repeats > 0)
        ready = (wait == 0) & ~running & ~armed

        self.armed = armed
        self.running = running
        self.passes = np.where(running, passes, 0)
        self.wait = wait
        self.ready = ready
        self.prev_line = line
        self.prev_active = active
        self.cycle += 1
        return SequencerOutputs(line, launch, flip, ready, active)

    def run(self, start_cycle: int = 0, max_cycles: int | None = None) -> list[np.ndarray]:
        """Start every instance at ``start_cycle`` and collect each timing stream until it stops.

        Returns one array per instance covering the cycles it was enabled.
        """
        if max_cycles is None:
            max_cycles = start_cycle + 2 + int(np.max(self.repeats * self.rademacher.segments * self.t1))
        lines, actives = [], []
        for c in range(max_cycles):
            out = self.tick(start=c == start_cycle)
            lines.append(out.line)
            actives.append(out.active)
        lines = np.array(lines).T
        actives = np.array(actives).T
        return [lines[i][actives[i]].astype(np.uint8) for i in range(len(self))]


def timing_sequencer_run(
    cfg: TimingConfig, start_cycle: int = 0, reset_cycle: int | None = None, extra_cycles: int = 4
) -> tuple[np.ndarray, list[TriggerEvent], dict]:
    """Run one sequencer from power-on; returns (timing line per cycle, trigger events, timing record).

    The record holds the cycles of ``start``, the first trigger, any reset and
    the following return to ready.
    """
    seq = TimingSequencer(cfg)
    total = start_cycle + 2 + cfg.repeats * cfg.pass_cycles + extra_cycles
    if reset_cycle is not None:
        total = max(total, reset_cycle + RESET_CYCLES + extra_cycles)
    line = np.zeros(total, dtype=np.uint8)
    ready = np.zeros(total, dtype=bool)
    events: list[TriggerEvent] = []
    for c in range(total):
        out = seq.tick(start=c == start_cycle, reset=c == reset_cycle)
        line[c] = out.line[0]
        ready[c] = out.ready[0]
        if out.launch[0]:
            events.append(TriggerEvent(c, "start"))
        if out.flip[0]:
            events.append(TriggerEvent(c, "edge"))
    record = {"start": start_cycle, "trigger": next((e.cycle for e in events if e.kind == "start"), None)}
    if reset_cycle is not None:
        after = np.nonzero(ready[reset_cycle:])[0]
        record["reset"] = reset_cycle
        record["ready"] = int(reset_cycle + after[0]) if after.size else None
    return line, events, record
