"""Full controller pipeline on a two-phase clock, with per-half-cycle traces.

Even half-cycles are ``clk`` edges (sequencer); odd ones are ``clk_bar``
edges (modulation generator and synthesizer). Every trace holds the value
registered at or before each half-cycle, so a signal launched on one
clock is visible on the next edge of the other clock.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from walshctl.errors import InvariantError
from walshctl.hw.config import ClockModel, ModulationConfig, SynthConfig, TimingConfig
from walshctl.hw.modulation import ModulationGenerator, ModulationOutputs
from walshctl.hw.sequencer import TimingSequencer, TriggerEvent
from walshctl.hw.synth import FilterSynthesizer, SynthOutputs

SCALAR_SIGNALS = (
    "clk", "clk_bar", "start", "reset", "load", "ready", "timing", "trigger", "edge",
    "data_valid", "sigma", "I", "Q", "out_valid",
)


@dataclass(frozen=True)
class CycleLedger:
    """Measured latencies in half clock cycles; ``None`` where the run never produced the event."""

    start_to_trigger: int | None
    trigger_to_channels: int | None
    channels_to_output: int | None
    change_to_ready: int
    reset_to_ready: int

    @property
    def trigger_to_output(self) -> int | None:
        if self.trigger_to_channels is None or self.channels_to_output is None:
            return None
        return self.trigger_to_channels + self.channels_to_output

    @property
    def start_to_output(self) -> int | None:
        if self.start_to_trigger is None or self.trigger_to_output is None:
            return None
        return self.start_to_trigger + self.trigger_to_output

    def cycles(self) -> dict[str, float | None]:
        d = dict(self.__dict__, start_to_output=self.start_to_output)
        return {k: None if v is None else v / 2 for k, v in d.items()}


@dataclass
class PipelineRun:
    traces: dict[str, np.ndarray]
    ledger: CycleLedger
    events: list[TriggerEvent]
    n: int
    saturated: bool = False
    overflow: bool = False
    dropped_triggers: int = 0
    clock: ClockModel = field(default_factory=ClockModel)

    @property
    def half_cycles(self) -> int:
        return len(self.traces["clk"])

    def channel(self, k: int) -> np.ndarray:
        return self.traces[f"W{k}"]

    def launch_outputs(self) -> list[np.ndarray]:
        """I-DAC words of each contiguous output burst, one burst per accepted trigger."""
        v = self.traces["out_valid"]
        i = self.traces["I"]
        # sample once per clk_bar cycle, on the odd edges where outputs are registered
        odd = np.arange(1, v.size, 2)
        vv, ii = v[odd], i[odd]
        edges = np.diff(np.concatenate(([0], vv.astype(np.int8), [0])))
        starts, stops = np.nonzero(edges == 1)[0], np.nonzero(edges == -1)[0]
        return [ii[a:b].copy() for a, b in zip(starts, stops)]

    def to_csv(self) -> str:
        """Long-format trace: one ``half_cycle,signal,value`` row per signal per half-cycle."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("half_cycle", "signal", "value"))
        names = list(SCALAR_SIGNALS) + [f"W{k}" for k in range(self.n)]
        cols = [self.traces[s] for s in names]
        for h in range(self.half_cycles):
            for s, col in zip(names, cols):
                w.writerow((h, s, int(col[h])))
        return buf.getvalue()


def _first_rise(trace: np.ndarray, after: int | None = 0) -> int | None:
    if after is None:
        return None
    hits = np.nonzero(trace[after:])[0]
    return None if hits.size == 0 else after + int(hits[0])


def _gap(a: int | None, b: int | None) -> int | None:
    return None if a is None or b is None else b - a


def run_pipeline(
    timing: TimingConfig,
    modulation: ModulationConfig,
    synth: SynthConfig,
    reset_at: int | None = None,
    tail_cycles: int = 4,
    clock: ClockModel = ClockModel(),
) -> PipelineRun:
    """Simulate load, start, the full run, and a reset, returning traces and the measured ledger.

    Script (in clock cycles): the configuration is loaded at cycle 0;
    ``start`` is raised on the first cycle the sequencer reports ready; a
    reset is raised at ``reset_at`` if given, otherwise once the run and
    every downstream stage has drained. Simulation stops ``tail_cycles``
    after ready returns.
    """
    n = modulation.n
    seq = TimingSequencer(timing)
    mod = ModulationGenerator(modulation)
    syn = FilterSynthesizer(synth, n)
    rows: list[dict] = []
    events: list[TriggerEvent] = []

    state = dict(start=0, reset=0, load=0, ready=0, timing=0, trigger=0, edge=0)
    mod_out = mod.tick(False)  # idle register contents
    syn_out = syn.tick(mod_out.channels, False)
    sigma = 0
    start_cycle = reset_cycle = None
    ready_after_reset = None
    pending_reset = False
    c = 0
    h = 0
    while True:
        # ---- clk edge (even half-cycle) ----
        load = c == 0
        start = start_cycle is None and not load and bool(seq.ready[0])
        if start:
            start_cycle = c
        reset = False
        if reset_cycle is None and start_cycle is not None:
            if reset_at is not None:
                reset = c == reset_at
            else:
                drained = (
                    c > start_cycle + 1
                    and not seq.running[0]
                    and not seq.armed[0]
                    and not mod.busy
                    and not mod.pending
                    and not mod_out.data_valid
                    and syn.idle
                )
                reset = drained
        if reset:
            reset_cycle = c
            pending_reset = True
        out = seq.tick(start=start, reset=reset, load=load)
        if out.launch[0]:
            events.append(TriggerEvent(c, "start"))
        if out.flip[0]:
            events.append(TriggerEvent(c, "edge"))
        state.update(
            start=int(start), reset=int(reset), load=int(load), ready=int(out.ready[0]),
            timing=int(out.line[0]), trigger=int(out.trigger[0]), edge=int(out.flip[0]),
        )
        rows.append(_row(h, state, mod_out, sigma, syn_out))
        h += 1
        if reset_cycle is not None and ready_after_reset is None and out.ready[0]:
            ready_after_reset = c
        if ready_after_reset is not None and c >= ready_after_reset + tail_cycles:
            break
        if c > 1_000_000:
            raise InvariantError("pipeline did not return to ready")

        # ---- clk_bar edge (odd half-cycle) ----
        if pending_reset:
            # synchronous reset: every clk_bar register loads its idle value
            mod.reset()
            syn.reset()
            pending_reset = False
            mod_out = ModulationOutputs(np.zeros(n, dtype=np.uint8), False)
            syn_out = SynthOutputs(0, 0, False)
            sigma = 0
        else:
            syn_out = syn.tick(mod_out.channels, mod_out.data_valid)
            sigma = syn.amp(mod_out.channels) if mod_out.data_valid else 0
            mod_out = mod.tick(bool(state["trigger"]))
        rows.append(_row(h, state, mod_out, sigma, syn_out))
        h += 1
        c += 1

    traces = _columns(rows, n)
    s_h = _first_rise(traces["start"])
    t_h = _first_rise(traces["trigger"], s_h)
    d_h = _first_rise(traces["data_valid"], t_h)
    o_h = _first_rise(traces["out_valid"], d_h)
    ready_h = _first_rise(traces["ready"])
    r_h = _first_rise(traces["reset"])
    rr_h = _first_rise(traces["ready"], r_h + 1)
    ledger = CycleLedger(_gap(s_h, t_h), _gap(t_h, d_h), _gap(d_h, o_h), ready_h, rr_h - r_h)
    return PipelineRun(
        traces, ledger, events, n, syn.saturated, syn.overflow, mod.dropped, clock
    )


def _row(h: int, state: dict, mod_out, sigma: int, syn_out) -> dict:
    return dict(
        clk=int(h % 2 == 0), clk_bar=int(h % 2 == 1), **state,
        data_valid=int(mod_out.data_valid), channels=mod_out.channels,
        sigma=sigma, I=syn_out.i, Q=syn_out.q, out_valid=int(syn_out.valid),
    )


def _columns(rows: list[dict], n: int) -> dict[str, np.ndarray]:
    traces = {s: np.array([r[s] for r in rows], dtype=np.int64) for s in SCALAR_SIGNALS}
    ch = np.array([r["channels"] for r in rows], dtype=np.int64).reshape(len(rows), n)
    for k in range(n):
        traces[f"W{k}"] = ch[:, k]
    return traces
