"""Walsh and Rademacher functions in Paley order.

Everything here is evaluated with integer segment arithmetic on dyadic
grids, so grid identities (orthogonality, the XOR group law, moment
cancellation) hold exactly rather than to floating tolerance.

Two variants of each Walsh function exist:

* ``standard``   -- XOR of Rademacher bits, always starts at 0. Used for timing.
* ``complement`` -- bit-inverted standard form, starts at 1 (so order 0 is the
  constant 1). Used for synthesis after the mapping ``b -> 2b - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

MAX_ORDER = 255
MAX_GRID_EXP = 16
MAX_RADEMACHER = 30

STANDARD = "standard"
COMPLEMENT = "complement"
VARIANTS = (STANDARD, COMPLEMENT)


@dataclass(frozen=True)
class PaleyIndex:
    """Unsigned 8-bit Paley order ``l`` with its binary decomposition."""

    value: int

    def __post_init__(self):
        if isinstance(self.value, bool) or not isinstance(self.value, (int, np.integer)):
            raise TypeError(f"Paley order must be an integer, got {self.value!r}")
        if not 0 <= self.value <= MAX_ORDER:
            raise ValueError(f"Paley order {self.value} outside 0..{MAX_ORDER}")
        object.__setattr__(self, "value", int(self.value))

    @property
    def bit_width(self) -> int:
        # order 0 is still one constant segment pair on the 2-grid
        return max(1, self.value.bit_length())

    @property
    def bits(self) -> tuple[int, ...]:
        """Binary digits ``(b_0, ..., b_{m-1})``, least significant first."""
        return tuple((self.value >> j) & 1 for j in range(self.bit_width))

    @property
    def hamming(self) -> int:
        return bin(self.value).count("1")

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value


OrderLike = Union[int, PaleyIndex]


def paley(l: OrderLike) -> PaleyIndex:
    return l if isinstance(l, PaleyIndex) else PaleyIndex(l)


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"unknown Walsh variant {variant!r}; expected one of {VARIANTS}")


def _check_x(x) -> None:
    if not 0 <= x < 1:
        raise ValueError(f"x={x} outside the normalized domain [0, 1)")


@dataclass(frozen=True)
class BinaryWaveform:
    """A {0,1} sequence on a uniform grid of ``2**m`` segments of [0, 1)."""

    samples: np.ndarray
    variant: str = STANDARD

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.uint8)
        n = arr.size
        if arr.ndim != 1 or n == 0 or n & (n - 1):
            raise ValueError(f"waveform length must be a power of two, got {n}")
        if np.any(arr > 1):
            raise ValueError("binary waveform samples must be 0 or 1")
        _check_variant(self.variant)
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def m(self) -> int:
        return self.samples.size.bit_length() - 1

    def __len__(self):
        return self.samples.size

    def signed(self) -> "SignedWaveform":
        return SignedWaveform(2 * self.samples.astype(np.int8) - 1)

    def bitstring(self) -> str:
        return "".join(str(int(b)) for b in self.samples)


@dataclass(frozen=True)
class SignedWaveform:
    """A {-1,+1} sequence on the same grid as a :class:`BinaryWaveform`."""

    samples: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.int8).copy()
        if not np.all(np.abs(arr) == 1):
            raise ValueError("signed waveform samples must be -1 or +1")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def __len__(self):
        return self.samples.size


@dataclass(frozen=True)
class WalshSpectrum:
    """Paley-ordered Walsh weights ``X_0..X_{N-1}`` of a signal over duration ``T``."""

    weights: np.ndarray
    T: float = 1.0

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        n = w.size
        if w.ndim != 1 or n == 0 or n & (n - 1):
            raise ValueError(f"spectrum length must be a power of two, got {n}")
        if not np.all(np.isfinite(w)):
            raise ValueError("spectrum weights must be finite")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def N(self) -> int:
        return self.weights.size

    @classmethod
    def from_sparse(cls, terms: dict[int, float], N: int, T: float = 1.0) -> "WalshSpectrum":
        w = np.zeros(N)
        for k, v in terms.items():
            if not 0 <= k < N:
                raise ValueError(f"order {k} outside truncation N={N}")
            w[k] = v
        return cls(w, T)


def rademacher_eval(j: int, x) -> int:
    """``R_j(x)``: 0 on even segments of width ``2**-(j+1)``, 1 on odd ones."""
    if not 0 <= j <= MAX_RADEMACHER:
        raise ValueError(f"Rademacher order {j} outside 0..{MAX_RADEMACHER}")
    _check_x(x)
    # scaling by a power of two is exact for floats and Fractions alike
    return math.floor(x * (1 << (j + 1))) & 1


def walsh_eval(l: OrderLike, x, variant: str = STANDARD) -> int:
    idx = paley(l)
    _check_variant(variant)
    _check_x(x)
    bit = 0
    for j, b in enumerate(idx.bits):
        if b:
            bit ^= rademacher_eval(j, x)
    return bit ^ (variant == COMPLEMENT)


def rademacher_grid(j: int, m: int) -> np.ndarray:
    """``R_j`` sampled on the ``2**m`` grid (requires ``j < m``)."""
    if not 0 <= j < m:
        raise ValueError(f"R_{j} is not constant on segments of the 2**{m} grid")
    i = np.arange(1 << m)
    return ((i >> (m - 1 - j)) & 1).astype(np.uint8)


def sample_grid(l: OrderLike, m: int, variant: str = STANDARD) -> BinaryWaveform:
    """Walsh function ``l`` on the ``2**m`` grid; ``m`` above the native width oversamples."""
    idx = paley(l)
    _check_variant(variant)
    if not idx.bit_width <= m <= MAX_GRID_EXP:
        raise ValueError(
            f"grid exponent {m} must lie in {idx.bit_width}..{MAX_GRID_EXP} for order {idx.value}"
        )
    out = np.zeros(1 << m, dtype=np.uint8)
    for j, b in enumerate(idx.bits):
        if b:
            out ^= rademacher_grid(j, m)
    if variant == COMPLEMENT:
        out ^= 1
    return BinaryWaveform(out, variant)


def signed_walsh(l: OrderLike, m: int) -> np.ndarray:
    """Synthesis form ``W_l^(+-1)``: complement variant mapped by ``b -> 2b - 1``."""
    return sample_grid(l, m, COMPLEMENT).signed().samples.astype(np.int64)


def walsh_matrix(n: int) -> np.ndarray:
    """Rows ``W_0..W_{n-1}`` in signed synthesis form on the native grid of ``n``."""
    m = grid_exponent(n)
    return np.stack([signed_walsh(k, m) for k in range(n)])


def grid_exponent(n: int) -> int:
    """Smallest grid exponent on which orders ``0..n-1`` are all native."""
    if n < 1:
        raise ValueError("need at least one Walsh function")
    return max(1, (n - 1).bit_length())


def transition_points(l: OrderLike) -> list[Fraction]:
    """Bit-flip locations of the standard form in normalized time (WDD pulse times)."""
    idx = paley(l)
    m = idx.bit_width
    w = sample_grid(idx, m).samples
    flips = np.nonzero(w[1:] != w[:-1])[0] + 1
    return [Fraction(int(i), 1 << m) for i in flips]


def hamming_order(l: OrderLike) -> int:
    return paley(l).hamming


def is_thue_morse(k: OrderLike) -> bool:
    """True for Paley orders of the form ``2**n - 1`` (``n >= 0``)."""
    v = paley(k).value
    return (v + 1) & v == 0


def _bit_reverse(m: int) -> np.ndarray:
    i = np.arange(1 << m)
    r = np.zeros_like(i)
    for b in range(m):
        r |= ((i >> b) & 1) << (m - 1 - b)
    return r


def fwht(a: Sequence[float]) -> np.ndarray:
    """Unnormalized fast Walsh-Hadamard transform in natural (Hadamard) order."""
    x = np.array(a, dtype=float)
    n = x.size
    if n == 0 or n & (n - 1):
        raise ValueError(f"transform length must be a power of two, got {n}")
    h = 1
    while h < n:
        x = x.reshape(-1, 2, h)
        x = np.concatenate((x[:, 0] + x[:, 1], x[:, 0] - x[:, 1]), axis=1)
        h *= 2
    return x.reshape(n)


def decompose(signal: Sequence[float], T: float = 1.0) -> WalshSpectrum:
    """Paley-ordered Walsh coefficients of samples on a ``2**m`` grid.

    ``X_k = 2**-m * sum_i signal_i * W_k(i)``. Paley row ``k`` of the signed
    basis is Hadamard row ``bitrev(k)``, so a natural-order FWHT followed by
    a bit-reversal permutation gives the Paley spectrum.
    """
    s = np.asarray(signal, dtype=float)
    n = s.size
    if s.ndim != 1 or n == 0 or n & (n - 1):
        raise ValueError(f"signal length must be a power of two, got {n}")
    m = n.bit_length() - 1
    if n == 1:
        # a single sample is the constant function
        return WalshSpectrum(s.copy(), T)
    H = fwht(s) / n
    return WalshSpectrum(H[_bit_reverse(m)], T)


def synthesize(spectrum: WalshSpectrum, m: int) -> np.ndarray:
    """Samples of ``sum_k X_k W_k`` on the ``2**m`` grid."""
    N = spectrum.N
    if N > (1 << m):
        raise ValueError(f"spectrum with N={N} does not fit the 2**{m} grid")
    if m == 0:
        return spectrum.weights.copy()
    full = np.zeros(1 << m)
    full[:N] = spectrum.weights
    natural = np.empty_like(full)
    natural[_bit_reverse(m)] = full
    return fwht(natural)


def moment(l: OrderLike, p: int) -> Fraction:
    """Exact ``integral_0^1 x**p * W_l(x) dx`` for the standard form mapped to +-1."""
    idx = paley(l)
    m = idx.bit_width
    w = sample_grid(idx, m).samples
    n = 1 << m
    q = p + 1
    total = 0
    for i, b in enumerate(w):
        seg = (i + 1) ** q - i ** q
        total += seg if b else -seg
    return Fraction(total, q * n ** q)
