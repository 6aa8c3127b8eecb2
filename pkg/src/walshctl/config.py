"""Run-file parsing and validation.

Run files are flat ``section.key = value`` lines; ``#`` starts a comment.
Lists are comma separated. Every problem in a file is collected and
reported together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from walshctl.errors import ConfigError
from walshctl.hw.config import ModulationConfig, SynthConfig, TimingConfig
from walshctl.walsh import MAX_GRID_EXP, VARIANTS

COMMANDS = ("gen", "timing", "synth", "sid", "bench", "figures")

_INT, _FLOAT, _STR, _INTS, _FLOATS = "int", "float", "str", "ints", "floats"

SCHEMA: dict[str, str] = {
    "gen.kind": _STR,
    "gen.order": _INT,
    "gen.m": _INT,
    "gen.variant": _STR,
    "timing.order": _INT,
    "timing.t1": _INT,
    "timing.repeats": _INT,
    "timing.reset_at": _INT,
    "modulation.n": _INT,
    "modulation.t2": _INT,
    "synth.mode": _STR,
    "synth.weights": _INTS,
    "synth.weights_fs": _FLOATS,
    "synth.phase_weights": _INTS,
    "synth.carrier": _FLOAT,
    "sid.gamma": _FLOAT,
    "sid.T": _FLOAT,
    "sid.N": _INT,
    "sid.noise": _STR,
    "sid.noise_N": _INT,
    "sid.phase_bound": _FLOAT,
    "sid.seed": _INT,
    "sid.method": _STR,
    "sid.t2": _INT,
    "sid.divisor": _INT,
    "bench.n_weights": _INT,
    "bench.cycles_per_sample": _FLOAT,
    "bench.trigger_to_output": _FLOAT,
    "bench.walsh_slowdown": _FLOAT,
}


def parse_text(text: str, origin: str = "<config>") -> dict[str, str]:
    out: dict[str, str] = {}
    problems = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"{origin}:{n}: expected 'key = value'")
            continue
        k, v = (s.strip() for s in line.split("=", 1))
        if k in out:
            problems.append(f"{origin}:{n}: duplicate key {k!r}")
        out[k] = v
    if problems:
        raise ConfigError(problems)
    return out


def load(path: str | Path) -> dict[str, str]:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {p}: {e.strerror}") from None
    return parse_text(text, str(p))


def _convert(key: str, kind: str, raw: str):
    try:
        if kind == _INT:
            return int(raw, 0)
        if kind == _FLOAT:
            v = float(raw)
            if not math.isfinite(v):
                raise ValueError
            return v
        if kind == _INTS:
            return tuple(int(x, 0) for x in raw.split(",") if x.strip())
        if kind == _FLOATS:
            return tuple(float(x) for x in raw.split(",") if x.strip())
        return raw
    except ValueError:
        raise ConfigError(f"{key}: cannot read {raw!r} as {kind}") from None


@dataclass(frozen=True)
class GenSpec:
    kind: str = "walsh"
    order: int = 12
    m: int | None = None
    variant: str = "standard"


@dataclass(frozen=True)
class SIDSpec:
    gamma: float = 1.0
    T: float = 1.0
    N: int = 16
    noise: str = "walsh"
    noise_N: int | None = None
    phase_bound: float = math.pi / 4
    seed: int | None = None
    method: str = "analytic"
    t2: int = 1
    divisor: int | None = None


@dataclass(frozen=True)
class BenchSpec:
    n_weights: int = 16
    cycles_per_sample: float | None = None
    trigger_to_output: float | None = None
    walsh_slowdown: float | None = None


@dataclass(frozen=True)
class RunConfig:
    command: str
    gen: GenSpec = field(default_factory=GenSpec)
    timing: TimingConfig = TimingConfig(3, 16, 2)
    reset_at: int | None = None
    modulation: ModulationConfig = ModulationConfig(8, 1)
    synth: SynthConfig = SynthConfig.from_floats("AM", [0.5, 0, 0, 0.25])
    sid: SIDSpec = field(default_factory=SIDSpec)
    bench: BenchSpec = field(default_factory=BenchSpec)

    def normalized(self) -> dict:
        """Flat echo of every effective value, in run-file key order."""
        s = self.synth
        out = {
            "gen.kind": self.gen.kind, "gen.order": self.gen.order, "gen.m": self.gen.m,
            "gen.variant": self.gen.variant,
            "timing.order": self.timing.order, "timing.t1": self.timing.t1,
            "timing.repeats": self.timing.repeats, "timing.reset_at": self.reset_at,
            "modulation.n": self.modulation.n, "modulation.t2": self.modulation.t2,
            "synth.mode": s.mode.name, "synth.weights": list(s.weights),
            "synth.phase_weights": None if s.phase_weights is None else list(s.phase_weights),
            "synth.carrier": s.carrier,
        }
        out.update({f"sid.{k}": v for k, v in self.sid.__dict__.items()})
        out.update({f"bench.{k}": v for k, v in self.bench.__dict__.items()})
        return out


def validate_config(values: dict[str, str], command: str, seed: int | None = None) -> RunConfig:
    """Check every field against the hardware register widths; raise all problems at once."""
    problems: list[str] = []
    if command not in COMMANDS:
        problems.append(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    v: dict[str, object] = {}
    for key, raw in values.items():
        if key not in SCHEMA:
            problems.append(f"unknown key {key!r}")
            continue
        try:
            v[key] = _convert(key, SCHEMA[key], raw)
        except ConfigError as e:
            problems.extend(e.problems)

    def section(prefix: str) -> dict:
        return {k.split(".", 1)[1]: x for k, x in v.items() if k.startswith(prefix + ".")}

    def attempt(build, *args, **kw):
        try:
            return build(*args, **kw)
        except ConfigError as e:
            problems.extend(e.problems)
        except (TypeError, ValueError) as e:
            problems.append(str(e))
        return None

    g = section("gen")
    gen = attempt(GenSpec, **g)
    if gen is not None:
        if gen.kind not in ("walsh", "rademacher"):
            problems.append(f"gen.kind must be 'walsh' or 'rademacher', got {gen.kind!r}")
        if gen.variant not in VARIANTS:
            problems.append(f"gen.variant must be one of {VARIANTS}, got {gen.variant!r}")
        if gen.m is not None and not 1 <= gen.m <= MAX_GRID_EXP:
            problems.append(f"gen.m={gen.m} outside 1..{MAX_GRID_EXP}")
        if gen.kind == "rademacher" and not 0 <= gen.order <= 30:
            problems.append(f"gen.order={gen.order}: Rademacher order must lie in 0..30")

    t = section("timing")
    reset_at = t.pop("reset_at", None)
    if reset_at is not None and reset_at < 0:
        problems.append("timing.reset_at must be non-negative")
    base = RunConfig.__dataclass_fields__
    timing = attempt(TimingConfig, **{"order": 3, "t1": 16, "repeats": 2, **t}) if t else base["timing"].default
    modulation = attempt(ModulationConfig, **{"n": 8, "t2": 1, **section("modulation")})

    sy = section("synth")
    synth = base["synth"].default
    if sy:
        if "weights" in sy and "weights_fs" in sy:
            problems.append("give synth.weights or synth.weights_fs, not both")
        mode = sy.get("mode", "AM")
        weights = sy.get("weights", synth.weights)
        if "weights_fs" in sy:
            scaled = attempt(SynthConfig.from_floats, mode, sy["weights_fs"])
            weights = None if scaled is None else scaled.weights
        synth = None
        if weights is not None:
            synth = attempt(SynthConfig, mode, weights, sy.get("phase_weights"), sy.get("carrier", 0.0))
    if synth is not None and modulation is not None and len(synth.weights) > modulation.n:
        problems.append(f"{len(synth.weights)} weights exceed modulation.n={modulation.n} channels")

    s = section("sid")
    if seed is not None:
        s["seed"] = seed
    sid = attempt(SIDSpec, **s)
    if sid is not None:
        if sid.N < 1 or sid.N > 256 or sid.N & (sid.N - 1):
            problems.append(f"sid.N={sid.N} must be a power of two <= 256")
        if sid.noise_N is not None and (sid.noise_N < 1 or sid.noise_N > 256 or sid.noise_N & (sid.noise_N - 1)):
            problems.append(f"sid.noise_N={sid.noise_N} must be a power of two <= 256")
        if sid.noise != "walsh":
            problems.append(f"sid.noise={sid.noise!r}: only 'walsh' noise is available from run files")
        if sid.method not in ("analytic", "unitary"):
            problems.append(f"sid.method must be 'analytic' or 'unitary', got {sid.method!r}")
        if not sid.gamma > 0 or not sid.T > 0:
            problems.append("sid.gamma and sid.T must be positive")
        if not 0 < sid.phase_bound <= math.pi / 2:
            problems.append("sid.phase_bound must lie in (0, pi/2]")
        if not 1 <= sid.t2 <= 15:
            problems.append(f"sid.t2={sid.t2} exceeds 4-bit range (max 15)" if sid.t2 > 15
                            else "sid.t2 must be >= 1")
        if sid.divisor is not None and not 1 <= sid.divisor < 1 << 14:
            problems.append(f"sid.divisor={sid.divisor} exceeds 14-bit range")
        if command == "sid" and sid.seed is None:
            problems.append("sid.seed is required for stochastic runs (or pass --seed)")

    bench = attempt(BenchSpec, **section("bench"))
    if bench is not None:
        if bench.n_weights < 1 or bench.n_weights > 256:
            problems.append("bench.n_weights must lie in 1..256")
        for k in ("cycles_per_sample", "trigger_to_output", "walsh_slowdown"):
            x = getattr(bench, k)
            if x is not None and not x > 0:
                problems.append(f"bench.{k} must be positive")

    if problems:
        raise ConfigError(problems)
    return RunConfig(command, gen, timing, reset_at, modulation, synth, sid, bench)

