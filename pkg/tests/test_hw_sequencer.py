import numpy as np
import pytest

from walshctl.errors import ConfigError
from walshctl.hw.config import TimingConfig
from walshctl.hw.sequencer import TimingSequencer, timing_sequencer_run
from walshctl.walsh import sample_grid


def test_config_widths():
    with pytest.raises(ConfigError) as e:
        TimingConfig(order=256, t1=0, repeats=16)
    assert len(e.value.problems) == 3
    assert any("repeats=16 exceeds 4-bit range" in p for p in e.value.problems)


def test_config_derived():
    c = TimingConfig(3, 16, 2)
    assert (c.width, c.segments, c.pass_cycles) == (2, 4, 64)


def test_w3_triggers_every_transition():
    _, events, record = timing_sequencer_run(TimingConfig(3, 1, 2))
    assert [(e.cycle, e.kind) for e in events] == [(1, "start"), (2, "edge"), (4, "edge"), (6, "edge"), (8, "edge")]
    assert record["trigger"] == 1


def test_edge_after_expansion():
    _, events, _ = timing_sequencer_run(TimingConfig(1, 4, 1))
    assert [e.cycle for e in events if e.kind == "edge"] == [5]


def test_zero_repeats_disables_output():
    line, events, _ = timing_sequencer_run(TimingConfig(3, 1, 0))
    assert events == []
    assert not line.any()


def test_reset_holds_ready_three_cycles():
    _, _, record = timing_sequencer_run(TimingConfig(3, 1, 2), reset_cycle=6)
    assert record["ready"] - record["reset"] == 3


def test_line_follows_walsh_core():
    line, _, _ = timing_sequencer_run(TimingConfig(5, 2, 3))
    ref = np.tile(np.repeat(sample_grid(5, 3).samples, 2), 3)
    assert np.array_equal(line[1:1 + ref.size], ref)
    assert not line[1 + ref.size:].any()


def test_batched_run_matches_single():
    cfgs = [TimingConfig(s, t, r) for s, t, r in [(3, 2, 1), (12, 1, 2), (0, 3, 1), (255, 1, 1)]]
    streams = TimingSequencer(cfgs).run()
    for cfg, got in zip(cfgs, streams):
        ref = np.tile(np.repeat(sample_grid(cfg.order, cfg.width).samples, cfg.t1), cfg.repeats)
        assert np.array_equal(got, ref)


def test_start_ignored_while_running():
    seq = TimingSequencer(TimingConfig(1, 4, 1))
    seq.tick(start=True)
    launches = [bool(seq.tick(start=True).launch[0]) for _ in range(6)]
    assert launches == [True] + [False] * 5


def test_pass_boundary_edge_only_for_odd_weight():
    # W1 ends high, so the next pass restarting low is an edge; W3 ends low
    _, ev1, _ = timing_sequencer_run(TimingConfig(1, 2, 2))
    assert [e.cycle for e in ev1 if e.kind == "edge"] == [3, 5, 7]
    _, ev3, _ = timing_sequencer_run(TimingConfig(3, 2, 2))
    assert 1 + 8 not in [e.cycle for e in ev3]
