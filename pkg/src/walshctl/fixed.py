"""Sign-magnitude fixed-point words (1 sign bit + 13 magnitude bits)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

WORD_BITS = 14
MAG_BITS = WORD_BITS - 1
FULL_SCALE = (1 << MAG_BITS) - 1  # 8191


def round_half_up(x) -> int:
    """Round the magnitude half-up and keep the sign (symmetric for sign-magnitude words)."""
    if x < 0:
        return -round_half_up(-x)
    f = math.floor(x)
    return int(f) + (x - f >= 0.5)


def round_half_up_array(x) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    mag = np.abs(a)
    f = np.floor(mag)
    r = f + (mag - f >= 0.5)
    return (np.sign(a) * r).astype(np.int64)


def saturate(value: int, limit: int = FULL_SCALE) -> tuple[int, bool]:
    """Clamp to ``[-limit, limit]``; the flag reports whether clamping happened."""
    if value > limit:
        return limit, True
    if value < -limit:
        return -limit, True
    return value, False


def accumulator_width(n: int) -> int:
    """Sum Weights output width ``ceil(14 + log2 n)``."""
    if n < 1:
        raise ValueError("need at least one channel")
    return WORD_BITS + math.ceil(math.log2(n))


@dataclass(frozen=True)
class FixedWord:
    """14-bit sign-magnitude sample; ``value = (-1)**sign * magnitude / 8191`` of full scale."""

    sign: int
    magnitude: int

    def __post_init__(self):
        if self.sign not in (0, 1):
            raise ValueError(f"sign bit must be 0 or 1, got {self.sign}")
        if not 0 <= self.magnitude <= FULL_SCALE:
            raise ValueError(f"magnitude {self.magnitude} exceeds {MAG_BITS} bits")

    @classmethod
    def from_int(cls, v: int) -> "FixedWord":
        v = int(v)
        if abs(v) > FULL_SCALE:
            raise ValueError(f"{v} does not fit a {WORD_BITS}-bit sign-magnitude word")
        return cls(int(v < 0), abs(v))

    @classmethod
    def from_float(cls, x: float) -> "FixedWord":
        """Quantize a fraction of full scale (``|x| <= 1``)."""
        if not -1.0 <= x <= 1.0:
            raise ValueError(f"{x} outside +-1 full scale")
        return cls.from_int(round_half_up(x * FULL_SCALE))

    @property
    def value(self) -> int:
        return -self.magnitude if self.sign else self.magnitude

    def to_float(self) -> float:
        return self.value / FULL_SCALE

    def bits(self) -> int:
        """Raw 14-bit pattern, sign in the MSB."""
        return (self.sign << MAG_BITS) | self.magnitude

    @classmethod
    def from_bits(cls, raw: int) -> "FixedWord":
        if not 0 <= raw < 1 << WORD_BITS:
            raise ValueError(f"raw word {raw} exceeds {WORD_BITS} bits")
        return cls(raw >> MAG_BITS, raw & FULL_SCALE)

    def __int__(self):
        return self.value
