import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from walshctl.errors import ConfigError
from walshctl.fixed import FULL_SCALE
from walshctl.hw.config import Mode, ModulationConfig, SynthConfig
from walshctl.hw.modulation import ModulationGenerator, modulation_generator_run
from walshctl.hw.synth import (
    COS_TABLE,
    SIN_TABLE,
    FilterSynthesizer,
    dds_lookup,
    qam_multiply,
    sum_weights,
)
from walshctl.walsh import sample_grid


def test_modulation_config_rules():
    with pytest.raises(ConfigError):
        ModulationConfig(6)
    with pytest.raises(ConfigError):
        ModulationConfig(8, 16)
    assert ModulationConfig(8, 3).span_cycles == 24


@pytest.mark.parametrize("n, t2", [(8, 1), (16, 2), (1, 1), (4, 5)])
def test_channels_are_complement_walsh(n, t2):
    cfg = ModulationConfig(n, t2)
    streams, valid, first = modulation_generator_run(cfg, 0)
    assert first == 3
    assert streams.shape == (n, cfg.span_cycles)
    for k in range(n):
        ref = np.repeat(sample_grid(k, cfg.width, "complement").samples, t2)
        assert np.array_equal(streams[k], ref)


def test_trigger_while_busy_is_dropped():
    gen = ModulationGenerator(ModulationConfig(4))
    gen.tick(trigger=True)
    gen.tick()
    gen.tick(trigger=True)
    assert gen.dropped == 1


def test_dds_tables_within_one_lsb():
    ph = np.arange(COS_TABLE.size) * 2 * math.pi / COS_TABLE.size
    assert np.max(np.abs(COS_TABLE - FULL_SCALE * np.cos(ph))) <= 0.5
    assert np.max(np.abs(SIN_TABLE - FULL_SCALE * np.sin(ph))) <= 0.5


def test_dds_quarter_turn_and_wrap():
    assert dds_lookup(2048) == (0, FULL_SCALE)
    assert dds_lookup(0) == dds_lookup(8192)
    assert dds_lookup(-2048) == (0, -FULL_SCALE)


def test_qam_multiply():
    assert qam_multiply(FULL_SCALE, FULL_SCALE) == 7938
    assert qam_multiply(-FULL_SCALE, FULL_SCALE) == -7938
    assert qam_multiply(100, FULL_SCALE) == 0


@given(st.lists(st.integers(-FULL_SCALE, FULL_SCALE), min_size=1, max_size=16), st.data())
def test_sum_weights_signs(ws, data):
    bits = data.draw(st.lists(st.integers(0, 1), min_size=len(ws), max_size=len(ws)))
    sigma, ovf = sum_weights(bits, ws)
    assert sigma == sum(w if b else -w for w, b in zip(ws, bits))
    assert not ovf


def test_sum_weights_full_scale_no_overflow():
    assert sum_weights([1] * 8, [FULL_SCALE] * 8) == (65528, False)


def _drive(synth, channels, valid_cycles, total):
    return [synth.tick(channels, c < valid_cycles) for c in range(total)]


@pytest.mark.parametrize("mode, latency", [("AM", 2), ("PM", 2), ("QAM", 4)])
def test_synth_latency(mode, latency):
    s = FilterSynthesizer(SynthConfig(mode, (1000, 0)), 2)
    outs = _drive(s, np.array([1, 1]), 1, 6)
    assert [o.valid for o in outs].index(True) == latency - 1
    assert s.latency == latency


def test_am_output_and_saturation():
    s = FilterSynthesizer(SynthConfig("AM", (6000, 6000)))
    out = _drive(s, np.array([1, 1]), 1, 2)[1]
    assert out.i == FULL_SCALE and s.saturated


def test_pm_uses_dds():
    s = FilterSynthesizer(SynthConfig("PM", (2048,)))
    out = _drive(s, np.array([1]), 1, 2)[1]
    assert (out.i, out.q) == (0, FULL_SCALE)


def test_qam_combines_amplitude_and_phase():
    s = FilterSynthesizer(SynthConfig(Mode.QAM, (FULL_SCALE,), (0,)))
    out = _drive(s, np.array([1]), 1, 4)[3]
    assert (out.i, out.q) == (7938, 0)


def test_weights_exceeding_channels_rejected():
    with pytest.raises(ConfigError):
        FilterSynthesizer(SynthConfig("AM", (1, 2, 3)), 2)
