import csv
import io

import numpy as np
import pytest

from walshctl.fixed import round_half_up_array
from walshctl.hw.config import ModulationConfig, SynthConfig, TimingConfig
from walshctl.hw.pipeline import SCALAR_SIGNALS, run_pipeline
from walshctl.walsh import WalshSpectrum, synthesize

FIG3 = (TimingConfig(3, 16, 2), ModulationConfig(8, 1), SynthConfig.from_floats("AM", [0.5, 0, 0, 0.25]))


@pytest.fixture(scope="module")
def fig3():
    return run_pipeline(*FIG3)


def test_ledger_half_cycles(fig3):
    L = fig3.ledger
    assert (L.start_to_trigger, L.trigger_to_channels, L.channels_to_output) == (2, 3, 4)
    assert L.start_to_output == 9
    assert L.change_to_ready == 4
    assert L.reset_to_ready == 6
    assert L.cycles()["start_to_output"] == 4.5


def test_qam_adds_two_cycles():
    run = run_pipeline(FIG3[0], FIG3[1], SynthConfig("QAM", (4096, 0, 0, 2048), (0, 0, 0, 0)))
    assert run.ledger.cycles()["start_to_output"] == 6.5


def test_fig3_launches(fig3):
    bursts = fig3.launch_outputs()
    assert [e.cycle for e in fig3.events] == [4, 20, 52, 84, 116]
    assert len(bursts) == 5
    ref = round_half_up_array(8191 * synthesize(WalshSpectrum(np.array([0.5, 0, 0, 0.25])), 3))
    for b in bursts:
        assert b.tolist() == [6144, 6144, 2048, 2048, 2048, 2048, 6144, 6144]
        assert np.max(np.abs(b - ref)) <= 1
    assert not fig3.saturated and fig3.dropped_triggers == 0


@pytest.mark.parametrize("reset_at", [8, 21, 40])
def test_mid_run_reset(reset_at):
    run = run_pipeline(*FIG3, reset_at=reset_at)
    assert run.ledger.reset_to_ready == 6
    v = run.traces["out_valid"]
    assert not v[2 * reset_at + 2:].any()


def test_dropped_triggers_counted():
    # segments shorter than the modulation span: edges arrive while a span streams
    run = run_pipeline(TimingConfig(3, 1, 1), ModulationConfig(8, 1), FIG3[2])
    assert run.dropped_triggers > 0


def test_csv_schema(fig3):
    rows = list(csv.reader(io.StringIO(fig3.to_csv())))
    assert rows[0] == ["half_cycle", "signal", "value"]
    names = {r[1] for r in rows[1:]}
    assert names == set(SCALAR_SIGNALS) | {f"W{k}" for k in range(8)}
    assert len(rows) - 1 == fig3.half_cycles * len(names)


def test_clocks_alternate(fig3):
    assert np.array_equal(fig3.traces["clk"] ^ fig3.traces["clk_bar"], np.ones(fig3.half_cycles, dtype=int))


def test_zero_repeats_never_outputs():
    run = run_pipeline(TimingConfig(3, 16, 0), *FIG3[1:])
    assert not run.traces["out_valid"].any()
    assert run.ledger.start_to_output is None
