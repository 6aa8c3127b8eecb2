import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from walshctl.errors import ConfigError
from walshctl.fixed import FULL_SCALE
from walshctl.qubit import WalshNoise, batch_fidelities
from walshctl.sid import (
    ARCSIN,
    Divider,
    SIDPipeline,
    decoded_weights,
    default_divisor,
    divisor_full_scale,
    divisor_word,
    error_metrics,
    estimate_phase_word,
    quantize_fidelities,
    quantize_fidelity,
    reconstruct,
    shift_subtract,
    sid_pipeline,
    weights_estimate,
)


def test_quantize_and_shift():
    assert quantize_fidelity(0.5) == 4096
    assert quantize_fidelity(1.0) == FULL_SCALE
    assert shift_subtract(4096) == 1
    assert shift_subtract(0) == -FULL_SCALE
    assert quantize_fidelities([0.0, 0.25]).tolist() == [0, 2048]
    with pytest.raises(ValueError):
        quantize_fidelity(1.01)


def test_arcsin_table_shape():
    v = ARCSIN.by_value()
    assert len(ARCSIN) == 1 << 14
    assert np.array_equal(v, -v[::-1])
    assert np.all(np.diff(v) >= 0)
    assert ARCSIN.lookup(FULL_SCALE) == FULL_SCALE
    assert ARCSIN[1 << 13] == 0  # negative zero


def test_arcsin_entries_within_half_lsb():
    u = np.arange(-FULL_SCALE, FULL_SCALE + 1)
    ref = FULL_SCALE * np.arcsin(u / FULL_SCALE) / (math.pi / 2)
    assert np.max(np.abs(ARCSIN.by_value() - ref)) <= 0.5 + 1e-9


def test_divisor_words():
    assert divisor_word(1.0, 1.0, math.pi / 2) == 512
    assert default_divisor(16, 1.0, 1.0) == 4096
    assert divisor_full_scale(4096, 1.0, 1.0) == pytest.approx(4 * math.pi)
    with pytest.raises(ConfigError):
        divisor_word(1.0, 1.0, 1e-6)


def test_divider_rounds_and_saturates():
    d = Divider(1024)
    assert d(3) == 2  # 1.5 rounds up
    assert d(-3) == -2
    assert not d.saturated
    assert Divider(512)(9000) == FULL_SCALE
    with pytest.raises(ConfigError):
        Divider(0)


@given(st.integers(0, FULL_SCALE - 1))
def test_estimate_monotone(w):
    assert estimate_phase_word(w) <= estimate_phase_word(w + 1)


def test_weights_estimate():
    assert weights_estimate(FULL_SCALE, 512) == (FULL_SCALE, False)
    assert weights_estimate(4096, 512) == (1, False)


def test_reconstruct_plain_weights():
    s = reconstruct([4096, 0, 0, 2048])
    assert s.segments.tolist() == [6144, 2048, 2048, 6144]


def test_reconstruct_holds_segments():
    s = reconstruct([100, 50], t2=3)
    assert s.words.tolist() == [150] * 3 + [50] * 3
    assert s.segments.tolist() == [150, 50]


def test_ledger_two_two_one():
    L = SIDPipeline().measure()
    assert (L.estimate, L.sum_weights, L.divider, L.total) == (2, 2, 1, 5)


@pytest.mark.parametrize("seed", range(5))
def test_in_span_round_trip(seed):
    g, T, N = 2.0, 1.0, 16
    noise = WalshNoise.random(N, (math.pi / 4) / (g * T), T, seed)
    res = sid_pipeline(batch_fidelities(noise, g, T, N), reference=noise)
    assert res.metrics["linf_lsb"] <= 2
    assert decoded_weights(res.phase_words, g, T) == pytest.approx(noise.weights, abs=2e-3)


def test_more_functions_resolve_more_noise():
    noise = WalshNoise.random(32, 0.1, 1.0, seed=7)
    e16 = sid_pipeline(batch_fidelities(noise, 1.0, 1.0, 16), reference=noise).metrics["l2"]
    e32 = sid_pipeline(batch_fidelities(noise, 1.0, 1.0, 32), reference=noise).metrics["l2"]
    assert e32 < e16


def test_error_metrics_with_sample_reference():
    s = reconstruct([FULL_SCALE, 0])
    s.full_scale = 1.0
    m = error_metrics(s, np.array([1.0, 1.0]), 1.0)
    assert m["linf"] == pytest.approx(0.0)


def test_result_dict():
    noise = WalshNoise.random(8, 0.1, 1.0, seed=1)
    d = sid_pipeline(batch_fidelities(noise, 1.0, 1.0, 8)).to_dict()
    assert d["ledger_cycles"]["total"] == 5
    assert len(d["stream"]) == 8
