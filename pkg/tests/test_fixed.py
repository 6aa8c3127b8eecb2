import pytest
from hypothesis import given
from hypothesis import strategies as st

from walshctl.fixed import (
    FULL_SCALE,
    FixedWord,
    accumulator_width,
    round_half_up,
    round_half_up_array,
    saturate,
)


def test_full_scale():
    assert FULL_SCALE == 8191


@pytest.mark.parametrize("x, r", [(0.5, 1), (1.5, 2), (2.5, 3), (-0.5, -1), (-2.5, -3), (0.49, 0), (-1.2, -1)])
def test_round_half_up_on_magnitude(x, r):
    assert round_half_up(x) == r


def test_round_array_matches_scalar():
    xs = [-2.5, -0.5, 0.5, 1.49, 7.5]
    assert round_half_up_array(xs).tolist() == [round_half_up(x) for x in xs]


def test_saturate():
    assert saturate(9000) == (FULL_SCALE, True)
    assert saturate(-9000) == (-FULL_SCALE, True)
    assert saturate(12) == (12, False)


def test_accumulator_width():
    assert accumulator_width(1) == 14
    assert accumulator_width(8) == 17
    assert accumulator_width(9) == 18


@given(st.integers(-FULL_SCALE, FULL_SCALE))
def test_word_bits_round_trip(v):
    w = FixedWord.from_int(v)
    assert w.value == v
    assert FixedWord.from_bits(w.bits()).value == v
    assert 0 <= w.bits() < 1 << 14


def test_sign_magnitude_layout():
    assert FixedWord.from_int(-1).bits() == (1 << 13) | 1
    assert FixedWord.from_float(1.0).value == FULL_SCALE
    assert FixedWord.from_float(-0.5).value == -4096


def test_word_rejects_overrange():
    with pytest.raises(ValueError):
        FixedWord.from_int(8192)
