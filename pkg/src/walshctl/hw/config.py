"""Configuration records for the controller pipeline, checked against register widths."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from walshctl.errors import ConfigError
from walshctl.fixed import FULL_SCALE, FixedWord
from walshctl.walsh import MAX_ORDER, grid_exponent, paley

ORDER_BITS = 8
T1_BITS = 8
REPEAT_BITS = 4
T2_BITS = 4
MODE_BITS = 2
MAX_CHANNELS = 256


@dataclass(frozen=True)
class ClockModel:
    """Two-phase clock: ``clk`` rises on even half-cycles, ``clk_bar`` on odd ones."""

    period: float = 10e-9

    def __post_init__(self):
        if not self.period > 0:
            raise ConfigError(f"clock period must be positive, got {self.period}")

    def time(self, half_cycle: int) -> float:
        return half_cycle * self.period / 2

    @staticmethod
    def is_clk_edge(half_cycle: int) -> bool:
        return half_cycle % 2 == 0

    @staticmethod
    def is_clk_bar_edge(half_cycle: int) -> bool:
        return half_cycle % 2 == 1


class Mode(enum.IntEnum):
    """2-bit modulation select. Code 0 is unassigned."""

    AM = 0b01
    PM = 0b10
    QAM = 0b11

    @classmethod
    def parse(cls, value) -> "Mode":
        if isinstance(value, Mode):
            return value
        if isinstance(value, str):
            key = value.strip().upper().replace("Φ", "PH").replace("PHIM", "PM").replace("PHM", "PM")
            try:
                return cls[key]
            except KeyError:
                raise ConfigError(f"unknown modulation mode {value!r}") from None
        try:
            return cls(int(value))
        except ValueError:
            raise ConfigError(f"invalid 2-bit mode code {value!r}") from None


def _width_problem(name: str, value, lo: int, hi: int, bits: int) -> str | None:
    if isinstance(value, bool) or not isinstance(value, int):
        return f"{name} must be an integer, got {value!r}"
    if value < lo:
        return f"{name}={value} below minimum {lo}"
    if value > hi:
        return f"{name}={value} exceeds {bits}-bit range (max {hi})"
    return None


@dataclass(frozen=True)
class TimingConfig:
    """Walsh Timing Sequencer inputs: order ``s``, expansion ``t1``, repeat count ``R``."""

    order: int
    t1: int = 1
    repeats: int = 1

    def __post_init__(self):
        problems = [
            p
            for p in (
                _width_problem("order", self.order, 0, MAX_ORDER, ORDER_BITS),
                _width_problem("t1", self.t1, 1, (1 << T1_BITS) - 1, T1_BITS),
                _width_problem("repeats", self.repeats, 0, (1 << REPEAT_BITS) - 1, REPEAT_BITS),
            )
            if p
        ]
        if problems:
            raise ConfigError(problems)

    @property
    def width(self) -> int:
        return paley(self.order).bit_width

    @property
    def segments(self) -> int:
        return 1 << self.width

    @property
    def pass_cycles(self) -> int:
        return self.t1 * self.segments

    def tau1(self, clock: ClockModel = ClockModel()) -> float:
        return self.t1 * clock.period

    def duration(self, clock: ClockModel = ClockModel()) -> float:
        """Single-pass duration ``t1 * T_c * 2**m(s)``."""
        return self.pass_cycles * clock.period


@dataclass(frozen=True)
class ModulationConfig:
    """Walsh Modulation Generator inputs: ``n`` parallel channels, expansion ``t2``."""

    n: int
    t2: int = 1

    def __post_init__(self):
        problems = []
        p = _width_problem("n", self.n, 1, MAX_CHANNELS, ORDER_BITS)
        if p:
            problems.append(p)
        elif self.n & (self.n - 1):
            problems.append(f"n={self.n} must be a power of two")
        p = _width_problem("t2", self.t2, 1, (1 << T2_BITS) - 1, T2_BITS)
        if p:
            problems.append(p)
        if problems:
            raise ConfigError(problems)

    @property
    def width(self) -> int:
        """Grid exponent of the truncated basis (native grid of order ``n - 1``)."""
        return grid_exponent(self.n)

    @property
    def segments(self) -> int:
        return 1 << self.width

    @property
    def span_cycles(self) -> int:
        return self.t2 * self.segments

    def tau2(self, clock: ClockModel = ClockModel()) -> float:
        return self.t2 * clock.period


def _as_word(w) -> int:
    if isinstance(w, FixedWord):
        return w.value
    if isinstance(w, bool) or not isinstance(w, (int, np.integer)):
        raise ConfigError(f"weight {w!r} is not an integer word")
    w = int(w)
    if abs(w) > FULL_SCALE:
        raise ConfigError(f"weight {w} exceeds 14-bit sign-magnitude range")
    return w


@dataclass(frozen=True)
class SynthConfig:
    """Walsh Filter Synthesizer inputs.

    ``weights`` are 14-bit sign-magnitude integers (``FULL_SCALE`` = 8191).
    In PM mode the summed weights are read as a 13-bit phase word;
    QAM uses ``weights`` for amplitude and ``phase_weights`` for phase.
    ``carrier`` (rad/s) is metadata only; no carrier is synthesized.
    """

    mode: Mode
    weights: tuple[int, ...]
    phase_weights: tuple[int, ...] | None = None
    carrier: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        object.__setattr__(self, "weights", tuple(_as_word(w) for w in self.weights))
        if self.phase_weights is not None:
            pw = tuple(_as_word(w) for w in self.phase_weights)
            if len(pw) != len(self.weights):
                raise ConfigError("phase_weights and weights must have equal length")
            object.__setattr__(self, "phase_weights", pw)
        if not self.weights:
            raise ConfigError("at least one weight is required")

    @classmethod
    def from_floats(cls, mode, weights, phase_weights=None, carrier: float = 0.0) -> "SynthConfig":
        """Build from fractions of full scale, quantized round-half-up."""
        def quantize(ws):
            return tuple(FixedWord.from_float(float(x)).value for x in ws)

        pw = None if phase_weights is None else quantize(phase_weights)
        return cls(mode, quantize(weights), pw, carrier)

    @property
    def effective_phase_weights(self) -> tuple[int, ...]:
        return self.weights if self.phase_weights is None else self.phase_weights

    def padded(self, n: int) -> "SynthConfig":
        """Zero-extend (or reject) the weight vector to ``n`` channels."""
        if len(self.weights) > n:
            raise ConfigError(f"{len(self.weights)} weights given for only {n} channels")
        pad = (0,) * (n - len(self.weights))
        pw = None if self.phase_weights is None else self.phase_weights + pad
        return SynthConfig(self.mode, self.weights + pad, pw, self.carrier)
