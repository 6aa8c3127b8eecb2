"""SVG analogues of the Walsh basis, generator, pipeline and reconstruction plots.

Every figure is rebuilt from a fresh run and saved with a fixed hash salt
and no timestamp, so identical inputs give byte-identical files. The
plotted arrays are embedded in an XML comment after the header.
"""

from __future__ import annotations

import io
import json
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from walshctl.hw.config import ModulationConfig, SynthConfig, TimingConfig  # noqa: E402
from walshctl.hw.generators import generator_stream  # noqa: E402
from walshctl.hw.pipeline import run_pipeline  # noqa: E402
from walshctl.qubit import WalshNoise, batch_fidelities  # noqa: E402
from walshctl.sid import sid_pipeline  # noqa: E402
from walshctl.walsh import is_thue_morse, rademacher_grid, sample_grid  # noqa: E402

_RC = {"svg.hashsalt": "walshctl", "svg.fonttype": "none", "font.size": 8}


def to_svg(fig, data: dict) -> str:
    with plt.rc_context(_RC):
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    text = buf.getvalue()
    blob = json.dumps(data, sort_keys=True, separators=(",", ":")).replace("--", "- -")
    head, sep, rest = text.partition("\n")
    return f"{head}{sep}<!-- walshctl-data {blob} -->\n{rest}"


def _steps(ax, y, offset=0.0, **kw):
    y = np.asarray(y, dtype=float)
    x = np.arange(y.size + 1)
    ax.stairs(y + offset, x, baseline=None, **kw)


def fig_walsh_basis(n: int = 16):
    """Standard-form Walsh functions 0..n-1 on the 16-grid, Thue-Morse orders highlighted."""
    m = max(1, (n - 1).bit_length())
    rows = {k: sample_grid(k, m).samples.tolist() for k in range(n)}
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4, 6))
        for k, bits in rows.items():
            color = "tab:red" if is_thue_morse(k) else "black"
            _steps(ax, np.array(bits) * 0.8, offset=-1.2 * k, color=color, lw=1)
        ax.set_yticks([-1.2 * k + 0.4 for k in range(n)], [f"W{k}" for k in range(n)])
        ax.set_xlabel("segment")
        ax.set_title("Paley-ordered Walsh functions")
    return fig, {"m": m, "walsh": {str(k): v for k, v in rows.items()},
                 "thue_morse": [k for k in range(n) if is_thue_morse(k)]}


def fig_rademacher(order: int = 12, m: int = 4):
    """Rademacher outputs of the hardware generator and the Walsh function they combine into."""
    rad = {j: rademacher_grid(j, m).tolist() for j in range(m)}
    walsh = generator_stream(order, 1, m).tolist()
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5, 3))
        for j, bits in rad.items():
            _steps(ax, np.array(bits) * 0.8, offset=-1.2 * j, color="tab:blue", lw=1)
        _steps(ax, np.array(walsh) * 0.8, offset=-1.2 * m, color="tab:red", lw=1.5)
        ax.set_yticks([-1.2 * j + 0.4 for j in range(m + 1)], [f"R{j}" for j in range(m)] + [f"W{order}"])
        ax.set_xlabel("clock cycle")
    return fig, {"m": m, "rademacher": {str(j): v for j, v in rad.items()}, "order": order, "walsh": walsh}


def _fig3_run():
    return run_pipeline(TimingConfig(3, 16, 2), ModulationConfig(8, 1), SynthConfig.from_floats("AM", [0.5, 0, 0, 0.25]))


def fig_pipeline_traces(run=None):
    """Timing line, trigger locations and the I-DAC word per half-cycle."""
    run = _fig3_run() if run is None else run
    tr = run.traces
    h = np.arange(run.half_cycles)
    trig = [e.half_cycle for e in run.events]
    with plt.rc_context(_RC):
        fig, (a0, a1) = plt.subplots(2, 1, sharex=True, figsize=(6, 3.5))
        a0.step(h, tr["timing"], where="post", color="black", lw=1)
        a0.set_ylabel("timing")
        a1.step(h, tr["I"], where="post", color="tab:blue", lw=1)
        a1.set_ylabel("I-DAC word")
        a1.set_xlabel("half clock cycle")
        for ax in (a0, a1):
            for t in trig:
                ax.axvline(t, color="tab:red", ls=":", lw=0.8)
    return fig, {"timing": tr["timing"].tolist(), "I": tr["I"].tolist(), "triggers": trig}


def fig_channels(run=None, count: int = 6):
    """First ``count`` modulation channels following the first trigger."""
    run = _fig3_run() if run is None else run
    v = run.traces["data_valid"]
    first = int(np.nonzero(v)[0][0])
    span = int(np.nonzero(v[first:] == 0)[0][0])
    odd = np.arange(first, first + span, 2)
    ch = {k: run.channel(k)[odd].tolist() for k in range(count)}
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4, 3.5))
        for k, bits in ch.items():
            _steps(ax, np.array(bits) * 0.8, offset=-1.2 * k, color="black", lw=1)
        ax.set_yticks([-1.2 * k + 0.4 for k in range(count)], [f"W{k}" for k in range(count)])
        ax.set_xlabel("clk_bar cycle after trigger")
    return fig, {"first_half_cycle": first, "channels": {str(k): v for k, v in ch.items()}}


def fig_reconstruction(N: int, seed: int = 1, gamma: float = 1.0, T: float = 1.0, noise_N: int = 32):
    """Applied band-limited noise against the SID reconstruction from ``N`` fidelities."""
    noise = WalshNoise.random(noise_N, (math.pi / 4) / (gamma * T) / 4, T, seed)
    res = sid_pipeline(batch_fidelities(noise, gamma, T, N), reference=noise)
    rec = res.stream.values()
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5, 3))
        ax.stairs(noise.values, np.linspace(0, T, noise.values.size + 1), baseline=None, color="black",
                  label="applied", lw=1)
        ax.stairs(rec, np.linspace(0, T, rec.size + 1), baseline=None, color="tab:red", label=f"N={N}", lw=1.5)
        ax.set_xlabel("t")
        ax.set_ylabel("b(t)")
        ax.legend(loc="upper right", frameon=False)
    return fig, {"N": N, "seed": seed, "applied": noise.values.tolist(), "reconstruction": rec.tolist(),
                 "metrics": res.metrics}


FIGURES = {
    "walsh_basis": lambda seed: fig_walsh_basis(),
    "rademacher": lambda seed: fig_rademacher(),
    "pipeline_traces": lambda seed: fig_pipeline_traces(),
    "modulation_channels": lambda seed: fig_channels(),
    "sid_n16": lambda seed: fig_reconstruction(16, seed),
    "sid_n32": lambda seed: fig_reconstruction(32, seed),
}


def render_all(seed: int = 1) -> dict[str, str]:
    """SVG text of every figure keyed by file name."""
    out = {}
    for name, build in FIGURES.items():
        fig, data = build(seed)
        out[f"{name}.svg"] = to_svg(fig, data)
    return out


def write_all(out_dir: str | Path, seed: int = 1) -> list[Path]:
    out = Path(out_dir)
    paths = []
    for name, text in render_all(seed).items():
        (out / name).write_text(text)
        paths.append(out / name)
    return paths
