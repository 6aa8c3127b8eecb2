"""Walsh system identification: fidelity words to a streamed reconstruction of b(t).

Word formats
------------
fidelity word ``w``   13-bit unsigned, ``P = w / 8191``
shifted word ``u``    ``2w - 8191``: 14-bit sign-magnitude, ``2P - 1 = u / 8191``
phase word ``a``      arcsin table output, ``gamma T X = a / 8191 * pi/2``
divisor ``D``         unsigned Q5.9 (14 bits), ratio of ``pi/2`` in phase words to
                      one DAC full scale of signal: ``D = gamma T * full_scale / (pi/2)``
DAC word              ``b = word / 8191 * full_scale``

The estimation stage produces phase words; Sum Weights combines them with
the Walsh channels; the divider scales the summed stream into DAC words.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from walshctl.errors import ConfigError
from walshctl.fixed import FULL_SCALE, MAG_BITS, WORD_BITS, round_half_up, round_half_up_array
from walshctl.hw.config import ModulationConfig
from walshctl.hw.modulation import ModulationGenerator
from walshctl.hw.synth import SumWeights
from walshctl.qubit import FidelityVector, NoiseTrace

FIDELITY_BITS = 13
DIVISOR_FRAC_BITS = 9
DIVISOR_MAX = (1 << WORD_BITS) - 1


def quantize_fidelity(P: float) -> int:
    """``round(P * 8191)``, half-up."""
    if not 0.0 <= P <= 1.0:
        raise ValueError(f"fidelity {P} outside [0, 1]")
    return round_half_up(P * FULL_SCALE)


def quantize_fidelities(P) -> np.ndarray:
    p = np.asarray(P, dtype=float)
    if np.any(p < 0) or np.any(p > 1):
        raise ValueError("fidelities must lie in [0, 1]")
    return round_half_up_array(p * FULL_SCALE)


def shift_subtract(word) -> np.ndarray | int:
    """Shift left one place and subtract the 14-bit ``1``: ``2w - 8191``."""
    return 2 * word - FULL_SCALE


def _sm_index(u) -> np.ndarray:
    u = np.asarray(u, dtype=np.int64)
    return ((u < 0).astype(np.int64) << MAG_BITS) | np.abs(u)


class ArcsinTable:
    """``2**14`` entries indexed by the raw sign-magnitude input.

    Entry for input ``u`` is ``round(8191 * arcsin(u / 8191) / (pi/2))``,
    so ``+-pi/2`` maps to full scale. Negative zero reads 0.
    """

    SIZE = 1 << WORD_BITS

    def __init__(self):
        raw = np.arange(self.SIZE)
        mag = raw & FULL_SCALE
        sign = np.where(raw >> MAG_BITS, -1, 1)
        val = round_half_up_array(FULL_SCALE * np.arcsin(mag / FULL_SCALE) / (np.pi / 2))
        self.entries = sign * val
        self.entries.setflags(write=False)

    def __len__(self):
        return self.SIZE

    def __getitem__(self, raw):
        return self.entries[raw]

    def lookup(self, u):
        """Signed input value(s) in ``[-8191, 8191]``."""
        u = np.asarray(u, dtype=np.int64)
        if np.any(np.abs(u) > FULL_SCALE):
            raise ValueError("arcsin input exceeds 14-bit sign-magnitude range")
        out = self.entries[_sm_index(u)]
        return int(out) if out.ndim == 0 else out

    def by_value(self) -> np.ndarray:
        """Entries ordered by signed input ``-8191..8191``."""
        return self.lookup(np.arange(-FULL_SCALE, FULL_SCALE + 1))


ARCSIN = ArcsinTable()


def divisor_word(gamma: float, T: float, full_scale: float) -> int:
    """Q5.9 divisor for a DAC full scale of ``full_scale`` signal units."""
    ratio = gamma * T * full_scale / (math.pi / 2)
    d = round_half_up(ratio * (1 << DIVISOR_FRAC_BITS))
    if not 1 <= d <= DIVISOR_MAX:
        raise ConfigError(f"divisor ratio {ratio:.4g} not representable in unsigned Q5.9")
    return d


def divisor_full_scale(d_word: int, gamma: float, T: float) -> float:
    """Signal value represented by DAC full scale for a given divisor word."""
    return d_word / (1 << DIVISOR_FRAC_BITS) * (math.pi / 2) / (gamma * T)


def default_divisor(N: int, gamma: float, T: float) -> int:
    """Divisor whose full scale covers ``N`` weights each at ``|gamma T X| = pi/4``.

    Capped at the largest Q5.9 value, so for ``N > 64`` extreme inputs may saturate.
    """
    ratio = min(N / 2, DIVISOR_MAX / (1 << DIVISOR_FRAC_BITS))
    return divisor_word(gamma, T, ratio * (math.pi / 2) / (gamma * T))


@dataclass
class Divider:
    """``q = round(x * 512 / D)``, saturated to the 14-bit word with a sticky flag."""

    d_word: int
    saturated: bool = False

    def __post_init__(self):
        if isinstance(self.d_word, bool) or not 1 <= int(self.d_word) <= DIVISOR_MAX:
            raise ConfigError(f"divisor word {self.d_word} outside 1..{DIVISOR_MAX}")
        self.d_word = int(self.d_word)

    def __call__(self, x: int) -> int:
        num = abs(int(x)) << DIVISOR_FRAC_BITS
        q = (2 * num + self.d_word) // (2 * self.d_word)
        if q > FULL_SCALE:
            self.saturated = True
            q = FULL_SCALE
        return -q if x < 0 else q


def estimate_phase_word(word: int) -> int:
    """Fidelity word -> ``gamma T X`` phase word (shift, subtract, table)."""
    if not 0 <= word <= FULL_SCALE:
        raise ValueError(f"fidelity word {word} exceeds {FIDELITY_BITS} bits")
    return ARCSIN.lookup(shift_subtract(int(word)))


def weights_estimate(word: int, d_word: int) -> tuple[int, bool]:
    """Single-weight estimate ``X`` in DAC words; returns ``(X, saturated)``."""
    div = Divider(d_word)
    x = div(estimate_phase_word(word))
    return x, div.saturated


@dataclass
class ReconstructionStream:
    """DAC words streamed once per clock, each Walsh segment held ``t2`` cycles."""

    words: np.ndarray
    t2: int
    N: int
    full_scale: float | None = None
    saturated: bool = False

    @property
    def segments(self) -> np.ndarray:
        """One word per Walsh segment."""
        return self.words[:: self.t2]

    def values(self) -> np.ndarray:
        if self.full_scale is None:
            raise ValueError("stream has no physical full scale")
        return self.segments * (self.full_scale / FULL_SCALE)


def reconstruct(words, t2: int = 1, d_word: int | None = None) -> ReconstructionStream:
    """Stream ``sum_k words_k W_k`` through the hardware channels and Sum Weights.

    With ``d_word`` the sum is passed through the divider (phase words in,
    DAC words out); without it the inputs are taken as DAC-word weights and
    the 14-bit sum is saturated.
    """
    w = np.asarray(words, dtype=np.int64)
    N = w.size
    cfg = ModulationConfig(N, t2)
    gen = ModulationGenerator(cfg)
    sw = SumWeights(w)
    div = Divider(d_word) if d_word is not None else None
    gen.tick(trigger=True)
    out = np.empty(cfg.span_cycles, dtype=np.int64)
    sat = False
    for c in range(cfg.span_cycles):
        ch = gen.tick()
        sigma = sw(ch.channels)
        if div is not None:
            out[c] = div(sigma)
        else:
            out[c] = max(-FULL_SCALE, min(FULL_SCALE, sigma))
            sat |= abs(sigma) > FULL_SCALE
    return ReconstructionStream(out, t2, N, saturated=sat or (div is not None and div.saturated) or sw.overflow)


@dataclass(frozen=True)
class SIDLedger:
    estimate: int
    sum_weights: int
    divider: int

    @property
    def total(self) -> int:
        return self.estimate + self.sum_weights + self.divider


@dataclass
class SIDResult:
    stream: ReconstructionStream
    ledger: SIDLedger
    fidelity_words: np.ndarray
    phase_words: np.ndarray
    d_word: int
    metrics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "N": self.stream.N,
            "t2": self.stream.t2,
            "d_word": self.d_word,
            "full_scale": self.stream.full_scale,
            "fidelity_words": [int(x) for x in self.fidelity_words],
            "phase_words": [int(x) for x in self.phase_words],
            "stream": [int(x) for x in self.stream.segments],
            "saturated": bool(self.stream.saturated),
            "ledger_cycles": {
                "estimate": self.ledger.estimate,
                "sum_weights": self.ledger.sum_weights,
                "divider": self.ledger.divider,
                "total": self.ledger.total,
            },
            "metrics": self.metrics,
        }


class SIDPipeline:
    """Register-level model of trigger to first valid DAC word.

    Each stage is a list of registers clocked together; a token entering at
    the trigger edge is followed through until the divider output is valid.
    """

    STAGES = (
        ("estimate", "sample_shift"),
        ("estimate", "arcsin"),
        ("sum_weights", "enable"),
        ("sum_weights", "sum"),
        ("divider", "quotient"),
    )

    def __init__(self):
        self.valid = [False] * len(self.STAGES)

    def tick(self, trigger: bool) -> list[bool]:
        self.valid = [trigger] + self.valid[:-1]
        return self.valid

    def measure(self) -> SIDLedger:
        """Clock one trigger through and record when each stage group last holds it."""
        done: dict[str, int] = {}
        valid = self.tick(True)
        cycle = 1
        while True:
            for (group, _), ok in zip(self.STAGES, valid):
                if ok:
                    done[group] = cycle
            if valid[-1]:
                break
            valid = self.tick(False)
            cycle += 1
        return SIDLedger(
            done["estimate"],
            done["sum_weights"] - done["estimate"],
            done["divider"] - done["sum_weights"],
        )


def error_metrics(stream: ReconstructionStream, reference: NoiseTrace | np.ndarray, T: float) -> dict:
    """L2 (RMS) and L-infinity error of the stream against a reference signal.

    Both are compared on the finer of the two grids; the reference enters as
    exact segment averages (a ``NoiseTrace``) or as given samples (an array).
    Errors are reported in signal units and in LSB of the stream's full scale.
    """
    rec = stream.values()
    if isinstance(reference, NoiseTrace):
        M = max(rec.size.bit_length() - 1, reference.grid)
        n = 1 << M
        edges = np.arange(n + 1) * (T / n)
        ref = np.asarray(reference.integral(edges[:-1], edges[1:]), dtype=float) / (T / n)
    else:
        ref = np.asarray(reference, dtype=float)
        n = max(rec.size, ref.size)
        if n % ref.size:
            raise ValueError("reference length must divide the comparison grid")
        ref = np.repeat(ref, n // ref.size)
    if n % rec.size:
        raise ValueError("stream length must divide the comparison grid")
    err = np.repeat(rec, n // rec.size) - ref
    lsb = stream.full_scale / FULL_SCALE
    l2 = float(np.sqrt(np.mean(err**2)))
    linf = float(np.max(np.abs(err)))
    return {"l2": l2, "linf": linf, "l2_lsb": l2 / lsb, "linf_lsb": linf / lsb, "lsb": lsb}


def sid_pipeline(
    fidelities: FidelityVector,
    d_word: int | None = None,
    t2: int = 1,
    reference: NoiseTrace | np.ndarray | None = None,
) -> SIDResult:
    """Quantize, estimate, reconstruct; optionally score against ``reference``."""
    N = fidelities.N
    if N & (N - 1) or N > 256:
        raise ConfigError(f"N={N} must be a power of two <= 256")
    g, T = fidelities.gamma, fidelities.T
    d = default_divisor(N, g, T) if d_word is None else d_word
    fw = quantize_fidelities(fidelities.P)
    pw = ARCSIN.lookup(shift_subtract(fw))
    pw = np.atleast_1d(pw)
    stream = reconstruct(pw, t2, d)
    stream.full_scale = divisor_full_scale(d, g, T)
    ledger = SIDPipeline().measure()
    res = SIDResult(stream, ledger, fw, pw, d)
    if reference is not None:
        res.metrics = error_metrics(stream, reference, T)
    return res


def decoded_weights(phase_words, gamma: float, T: float) -> np.ndarray:
    """Phase words back to ``X_k`` in signal units (floating, for diagnostics)."""
    return np.asarray(phase_words, dtype=float) / FULL_SCALE * (math.pi / 2) / (gamma * T)

