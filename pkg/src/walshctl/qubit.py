"""Dephasing-qubit oracle under Walsh-modulated dynamical decoupling.

The sensing protocol is: prepare |0>, pi/2 about x, a train of pi pulses
about x at the transitions of the Walsh function, then pi/2 about -y and
measure the return probability. Two solvers are provided:

* ``analytic``: instantaneous pulses, ``phi_k = gamma * int W_k(t/T) b(t) dt``
  and ``P_k = (1 + sin phi_k) / 2``.
* ``unitary``: finite square pulses, product of exact 2x2 propagators on a
  refinement grid where control and noise are both constant.

Hamiltonian convention: ``H = (Omega/2) n.sigma + (gamma b(t)/2) sigma_z``,
so the Bloch vector precesses by exactly ``gamma * int b`` and the two
solvers share one definition of ``gamma``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import ClassVar, Sequence

import numpy as np

from walshctl.errors import ConfigError
from walshctl.walsh import (
    OrderLike,
    WalshSpectrum,
    decompose,
    grid_exponent,
    paley,
    sample_grid,
    synthesize,
    transition_points,
)

AXES = {
    "I": (0.0, 0.0, 0.0),
    "x": (1.0, 0.0, 0.0),
    "y": (0.0, 1.0, 0.0),
    "-y": (0.0, -1.0, 0.0),
    "z": (0.0, 0.0, 1.0),
}
DEFAULT_REFINE = 64
INSTANT_PULSE = 1e-6  # tau_pi / T for the instantaneous limit


# ---------------------------------------------------------------- control


@dataclass(frozen=True)
class ControlRow:
    rabi_rate: float  # rad/s
    duration: float  # s
    axis: str

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError(f"unknown control axis {self.axis!r}")
        if not self.duration > 0:
            raise ConfigError(f"row duration must be positive, got {self.duration}")
        if self.axis == "I" and self.rabi_rate != 0:
            raise ConfigError("identity rows carry no drive")

    @property
    def angle(self) -> float:
        return self.rabi_rate * self.duration


@dataclass(frozen=True)
class ControlMatrix:
    """Ordered control rows ``(Rabi rate, duration, axis)`` and the pi-time they were built with."""

    rows: tuple[ControlRow, ...]
    tau_pi: float

    @property
    def duration(self) -> float:
        return math.fsum(r.duration for r in self.rows)

    def boundaries(self) -> np.ndarray:
        return np.concatenate(([0.0], np.cumsum([r.duration for r in self.rows])))

    def pulse_times(self) -> list[float]:
        """Start times of the pi pulses."""
        t = self.boundaries()
        return [float(t[i]) for i, r in enumerate(self.rows) if r.axis != "I" and 0 < i < len(self.rows) - 1]

    def as_table(self) -> list[tuple[float, float, str]]:
        return [(r.rabi_rate, r.duration, r.axis) for r in self.rows]


def build_wdd_control(l: OrderLike, T: float, tau_pi: float, grid: int | None = None) -> ControlMatrix:
    """Control rows for the WDD_l sensing protocol.

    With ``grid=None`` consecutive free-evolution rows are merged. With an
    explicit ``grid`` exponent every free-evolution stretch is split at the
    ``2**grid`` segment boundaries, which for ``l=3, grid=3`` gives the
    twelve-row table with pi pulses starting at ``2 tau`` and ``6 tau``.
    Each pi pulse starts at its transition and eats into the following
    segment; the opening pi/2 eats into the first.
    """
    idx = paley(l)
    if not T > 0 or not tau_pi > 0:
        raise ConfigError("T and tau_pi must be positive")
    g = idx.bit_width if grid is None else grid
    if g < idx.bit_width:
        raise ConfigError(f"grid 2**{g} is coarser than the native grid of order {idx.value}")
    tau = T / (1 << g)
    if tau_pi >= tau:
        raise ConfigError(f"tau_pi={tau_pi} does not fit inside a segment of {tau}")
    omega = math.pi / tau_pi
    pulses = [float(x) * T for x in transition_points(idx)]

    rows: list[ControlRow] = [ControlRow(omega, tau_pi / 2, "x")]
    t = tau_pi / 2
    stops = sorted(set(pulses) | ({k * tau for k in range(1, 1 << g)} if grid is not None else set()) | {T})
    for stop in stops:
        if stop in pulses:
            if stop > t:
                rows.append(ControlRow(0.0, stop - t, "I"))
            rows.append(ControlRow(omega, tau_pi, "x"))
            t = stop + tau_pi
        elif stop > t:
            rows.append(ControlRow(0.0, stop - t, "I"))
            t = stop
    rows.append(ControlRow(omega, tau_pi / 2, "-y"))
    return ControlMatrix(tuple(rows), tau_pi)


# ---------------------------------------------------------------- noise


class NoiseTrace:
    """Dephasing field ``b(t)``; every kind provides an exact antiderivative.

    ``integral`` accepts floats, numpy arrays or (for the polynomial,
    constant and piecewise kinds) ``Fraction`` scalars, in which case the
    result is exact.
    """

    kind: ClassVar[str]
    seed: int | None = None
    grid: int = 0  # exponent of the grid on which the trace is piecewise constant (0 = smooth)

    def antiderivative(self, t):
        raise NotImplementedError

    def __call__(self, t):
        raise NotImplementedError

    def integral(self, a, b):
        return self.antiderivative(b) - self.antiderivative(a)

    def parameters(self) -> dict:
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {"kind": self.kind, "seed": self.seed, "parameters": self.parameters()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def scaled(self, factor: float) -> "NoiseTrace":
        raise NotImplementedError

    @staticmethod
    def from_dict(d: dict) -> "NoiseTrace":
        kind = d.get("kind")
        p = dict(d.get("parameters", {}))
        if kind == "constant":
            return ConstantNoise(**p)
        if kind == "sinusoid":
            return SinusoidNoise(**p)
        if kind == "polynomial":
            return PolynomialNoise(tuple(p["coefficients"]), p["T"])
        if kind == "samples":
            return SampledNoise(np.asarray(p["values"], dtype=float), p["T"])
        if kind == "walsh":
            if "weights" in p:
                return WalshNoise.from_weights(p["weights"], p["T"], d.get("seed"), p.get("amplitude", 0.0))
            return WalshNoise.random(p["N"], p["amplitude"], p["T"], d["seed"])
        raise ConfigError(f"unknown noise kind {kind!r}")


@dataclass(frozen=True)
class ConstantNoise(NoiseTrace):
    value: float = 0.0
    kind: ClassVar[str] = "constant"

    def __call__(self, t):
        return self.value * np.ones_like(np.asarray(t, dtype=float))

    def antiderivative(self, t):
        return self.value * t

    def parameters(self):
        return {"value": self.value}

    def scaled(self, factor):
        return ConstantNoise(self.value * factor)


@dataclass(frozen=True)
class SinusoidNoise(NoiseTrace):
    amplitude: float = 0.0
    frequency: float = 0.0  # Hz
    phase: float = 0.0
    kind: ClassVar[str] = "sinusoid"

    def __call__(self, t):
        return self.amplitude * np.sin(2 * np.pi * self.frequency * np.asarray(t, dtype=float) + self.phase)

    def antiderivative(self, t):
        t = np.asarray(t, dtype=float)
        if self.frequency == 0:
            return self.amplitude * math.sin(self.phase) * t
        w = 2 * np.pi * self.frequency
        return -self.amplitude * np.cos(w * t + self.phase) / w

    def parameters(self):
        return {"amplitude": self.amplitude, "frequency": self.frequency, "phase": self.phase}

    def scaled(self, factor):
        return SinusoidNoise(self.amplitude * factor, self.frequency, self.phase)


@dataclass(frozen=True)
class PolynomialNoise(NoiseTrace):
    """``b(t) = sum_p c_p (t/T)**p``."""

    coefficients: tuple = (0,)
    T: float = 1.0
    kind: ClassVar[str] = "polynomial"

    def __call__(self, t):
        x = np.asarray(t, dtype=float) / self.T
        return sum(c * x**p for p, c in enumerate(self.coefficients))

    def antiderivative(self, t):
        x = t / self.T
        return self.T * sum(c * x ** (p + 1) / (p + 1) for p, c in enumerate(self.coefficients))

    def parameters(self):
        return {"coefficients": [float(c) for c in self.coefficients], "T": float(self.T)}

    def scaled(self, factor):
        return PolynomialNoise(tuple(c * factor for c in self.coefficients), self.T)


@dataclass(frozen=True, eq=False)
class SampledNoise(NoiseTrace):
    """Piecewise-constant ``values`` on ``len(values)`` equal segments of ``[0, T]``."""

    values: np.ndarray
    T: float = 1.0
    kind: ClassVar[str] = "samples"

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        n = v.size
        if v.ndim != 1 or n == 0 or n & (n - 1):
            raise ConfigError("sampled noise needs a power-of-two number of segments")
        if not np.all(np.isfinite(v)):
            raise ConfigError("sampled noise values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "_cum", np.concatenate(([0.0], np.cumsum(v))))

    @property
    def grid(self) -> int:
        return self.values.size.bit_length() - 1

    def _index(self, x):
        n = self.values.size
        return np.clip(np.floor(np.asarray(x, dtype=float) * n).astype(np.int64), 0, n - 1)

    def __call__(self, t):
        return self.values[self._index(np.asarray(t, dtype=float) / self.T)]

    def antiderivative(self, t):
        n = self.values.size
        if isinstance(t, Fraction):
            u = t * n / Fraction(self.T)
            i = min(max(math.floor(u), 0), n - 1)
            u = min(max(u, 0), n)
            cum = sum(Fraction(float(v)) for v in self.values[:i])
            return Fraction(self.T) / n * (cum + Fraction(float(self.values[i])) * (u - i))
        u = np.clip(np.asarray(t, dtype=float) * n / self.T, 0, n)
        i = np.clip(np.floor(u).astype(np.int64), 0, n - 1)
        return self.T / n * (self._cum[i] + self.values[i] * (u - i))

    def parameters(self):
        return {"values": [float(v) for v in self.values], "T": float(self.T)}

    def scaled(self, factor):
        return SampledNoise(self.values * factor, self.T)


@dataclass(frozen=True, eq=False)
class WalshNoise(SampledNoise):
    """Band-limited noise: a seeded random spectrum on the first ``N`` Walsh functions."""

    weights: np.ndarray = field(default=None)
    seed: int | None = None
    amplitude: float = 0.0
    kind: ClassVar[str] = "walsh"

    @classmethod
    def from_weights(cls, weights: Sequence[float], T: float, seed=None, amplitude=0.0) -> "WalshNoise":
        w = np.asarray(weights, dtype=float)
        values = synthesize(WalshSpectrum(w, T), grid_exponent(w.size))
        return cls(values, T, w, seed, amplitude)

    @classmethod
    def random(cls, N: int, amplitude: float, T: float, seed: int) -> "WalshNoise":
        """Weights uniform on ``[-amplitude, amplitude]`` for orders ``0..N-1``."""
        if N < 1 or N & (N - 1):
            raise ConfigError(f"N={N} must be a power of two")
        rng = np.random.default_rng(seed)
        return cls.from_weights(rng.uniform(-amplitude, amplitude, N), T, seed, amplitude)

    def parameters(self):
        return {"N": int(self.weights.size), "amplitude": float(self.amplitude), "T": float(self.T),
                "weights": [float(x) for x in self.weights]}

    def scaled(self, factor):
        return WalshNoise.from_weights(self.weights * factor, self.T, self.seed, self.amplitude * factor)


# ---------------------------------------------------------------- states and results


@dataclass(frozen=True)
class QubitState:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex).reshape(2)
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def ground(cls) -> "QubitState":
        return cls(np.array([1, 0], dtype=complex))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def fidelity(self, other: "QubitState | None" = None) -> float:
        ref = QubitState.ground() if other is None else other
        return float(abs(np.vdot(ref.amplitudes, self.amplitudes)) ** 2)


@dataclass(frozen=True)
class FidelityVector:
    P: np.ndarray
    gamma: float
    T: float
    method: str = "analytic"

    def __post_init__(self):
        p = np.array(self.P, dtype=float)
        if np.any(p < -1e-12) or np.any(p > 1 + 1e-12):
            raise ValueError("fidelities must lie in [0, 1]")
        p = np.clip(p, 0.0, 1.0)
        p.setflags(write=False)
        object.__setattr__(self, "P", p)

    @property
    def N(self) -> int:
        return self.P.size

    def to_dict(self) -> dict:
        return {"P": [float(x) for x in self.P], "gamma": self.gamma, "T": self.T, "method": self.method}

    @classmethod
    def from_dict(cls, d: dict) -> "FidelityVector":
        return cls(np.asarray(d["P"], dtype=float), float(d["gamma"]), float(d["T"]), d.get("method", "analytic"))


# ---------------------------------------------------------------- propagation


def su2_steps(omega: np.ndarray, axis: np.ndarray, delta: np.ndarray, dt: np.ndarray) -> np.ndarray:
    """Exact ``exp(-i H dt)`` for ``H = (omega n + delta z) . sigma / 2``; returns ``(P, 2, 2)``."""
    vx = omega * axis[:, 0]
    vy = omega * axis[:, 1]
    vz = omega * axis[:, 2] + delta
    norm = np.sqrt(vx**2 + vy**2 + vz**2)
    half = 0.5 * norm * dt
    c = np.cos(half)
    # sin(half)/norm, continuous at norm -> 0
    s = np.where(norm > 0, np.sin(half) / np.where(norm > 0, norm, 1.0), 0.5 * dt)
    U = np.empty((omega.size, 2, 2), dtype=complex)
    U[:, 0, 0] = c - 1j * s * vz
    U[:, 1, 1] = c + 1j * s * vz
    U[:, 0, 1] = -1j * s * (vx - 1j * vy)
    U[:, 1, 0] = -1j * s * (vx + 1j * vy)
    return U


def chain_product(U: np.ndarray) -> np.ndarray:
    """``U[-1] @ ... @ U[0]`` by pairwise reduction."""
    U = np.asarray(U)
    while U.shape[0] > 1:
        if U.shape[0] % 2:
            U = np.concatenate((U, np.eye(2, dtype=U.dtype)[None]), axis=0)
        U = U[1::2] @ U[0::2]
    return U[0]


def propagator(control: ControlMatrix, noise: NoiseTrace, gamma: float, T: float | None = None,
               refine: int = DEFAULT_REFINE) -> np.ndarray:
    """Total 2x2 propagator of the protocol with noise acting on ``[0, T]``.

    The time axis is cut at every control-row boundary and on a uniform grid
    of ``refine`` points per minimal segment (the finer of the control grid
    and the noise grid). On each piece the noise enters through its exact
    average, so piecewise-constant noise aligned to the grid is reproduced
    without discretization error.
    """
    bounds = control.boundaries()
    if T is None:
        T = float(bounds[-1] - control.rows[-1].duration)
    rows = control.rows
    grid_exp = max(noise.grid, _row_grid(control, T))
    step = T / ((1 << grid_exp) * refine)
    fine = np.arange(0, int(round(T / step)) + 1) * step
    cuts = np.unique(np.concatenate((bounds, fine)))
    cuts = cuts[np.concatenate(([True], np.diff(cuts) > 1e-15 * T))]
    cuts[-1] = bounds[-1]
    a, b = cuts[:-1], cuts[1:]
    dt = b - a
    mid = 0.5 * (a + b)
    ri = np.clip(np.searchsorted(bounds, mid, side="right") - 1, 0, len(rows) - 1)
    omega = np.array([r.rabi_rate for r in rows])[ri]
    axis = np.array([AXES[r.axis] for r in rows])[ri]
    lo, hi = np.clip(a, 0, T), np.clip(b, 0, T)
    inside = hi > lo
    avg = np.zeros_like(dt)
    avg[inside] = noise.integral(lo[inside], hi[inside]) / dt[inside]
    return chain_product(su2_steps(omega, axis, gamma * avg, dt))


def _row_grid(control: ControlMatrix, T: float) -> int:
    shortest = min((r.duration for r in control.rows if r.axis == "I"), default=T)
    return max(0, math.ceil(math.log2(T / max(shortest, control.tau_pi))))


def propagate(control: ControlMatrix, noise: NoiseTrace, gamma: float, T: float | None = None,
              refine: int = DEFAULT_REFINE, initial: QubitState | None = None) -> QubitState:
    psi0 = QubitState.ground() if initial is None else initial
    U = propagator(control, noise, gamma, T, refine)
    return QubitState(U @ psi0.amplitudes)


# ---------------------------------------------------------------- analytic path


def analytic_phase(l: OrderLike, noise: NoiseTrace, gamma, T):
    """``gamma * int_0^T W_l(t/T) b(t) dt`` summed segment by segment.

    Exact when ``gamma``, ``T`` and the noise are rational (``Fraction`` or ``int``).
    """
    idx = paley(l)
    m = idx.bit_width
    n = 1 << m
    w = sample_grid(idx, m, "complement").samples
    exact = isinstance(T, (int, Fraction)) and isinstance(gamma, (int, Fraction))
    total = 0
    for i in range(n):
        a = Fraction(i, n) * T if exact else i * T / n
        b = Fraction(i + 1, n) * T if exact else (i + 1) * T / n
        seg = noise.integral(a, b)
        total = total + seg if w[i] else total - seg
    return gamma * total


def analytic_protocol(l: OrderLike, noise: NoiseTrace, gamma, T) -> tuple[float, float]:
    phi = analytic_phase(l, noise, gamma, T)
    return phi, (1 + math.sin(float(phi))) / 2


def analytic_phases(noise: NoiseTrace, gamma: float, T: float, N: int) -> np.ndarray:
    """``phi_k`` for ``k < N`` at once: exact segment integrals on the ``2**M`` grid, then a fast transform."""
    M = max(grid_exponent(N), noise.grid)
    n = 1 << M
    edges = np.arange(n + 1) * (T / n)
    G = np.asarray(noise.integral(edges[:-1], edges[1:]), dtype=float)
    return gamma * n * decompose(G).weights[:N]


def batch_fidelities(noise: NoiseTrace, gamma: float, T: float, N: int, method: str = "analytic",
                     tau_pi: float | None = None, refine: int = DEFAULT_REFINE) -> FidelityVector:
    """``P_k`` for ``k = 0..N-1``, each from its own sensor seeing the same noise."""
    if N < 1 or N > 256 or N & (N - 1):
        raise ConfigError(f"N={N} must be a power of two <= 256")
    if method == "analytic":
        phi = analytic_phases(noise, gamma, T, N)
        return FidelityVector((1 + np.sin(phi)) / 2, gamma, T, method)
    if method != "unitary":
        raise ConfigError(f"unknown method {method!r}")
    tp = INSTANT_PULSE * T if tau_pi is None else tau_pi
    P = np.empty(N)
    for k in range(N):
        ctl = build_wdd_control(k, T, tp)
        P[k] = propagate(ctl, noise, gamma, T, refine).fidelity()
    return FidelityVector(P, gamma, T, method)


def walsh_test_signal(k: int, beta: float, T: float, N: int | None = None) -> WalshNoise:
    """``beta * W_k(t/T)`` as a noise trace."""
    size = N if N is not None else 1 << grid_exponent(k + 1)
    w = np.zeros(size)
    w[k] = beta
    return WalshNoise.from_weights(w, T)


__all__ = [
    "ControlMatrix",
    "ControlRow",
    "ConstantNoise",
    "FidelityVector",
    "NoiseTrace",
    "PolynomialNoise",
    "QubitState",
    "SampledNoise",
    "SinusoidNoise",
    "WalshNoise",
    "analytic_phase",
    "analytic_phases",
    "analytic_protocol",
    "batch_fidelities",
    "build_wdd_control",
    "chain_product",
    "propagate",
    "propagator",
    "su2_steps",
    "walsh_test_signal",
]
