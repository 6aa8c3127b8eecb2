"""Command-line entry point.

    walshctl <command> [--config FILE] [--out-dir DIR] [--seed N] [--format csv|json|svg]

Artifacts are written to a scratch directory and moved into ``--out-dir``
only after the command finishes, so a failing run leaves nothing behind.

Exit codes: 0 success, 2 configuration error, 3 precondition violation,
4 internal invariant failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import shutil
import sys
import tempfile
from pathlib import Path

from walshctl import config as cfgmod
from walshctl.bench import CostModel, compare_report, resource_estimate, sid_resource_estimate
from walshctl.config import RunConfig
from walshctl.errors import ConfigError, InvariantError
from walshctl.hw.pipeline import run_pipeline
from walshctl.hw.sequencer import timing_sequencer_run
from walshctl.qubit import WalshNoise, batch_fidelities
from walshctl.sid import sid_pipeline
from walshctl.walsh import grid_exponent, rademacher_grid, sample_grid

EXIT_OK, EXIT_CONFIG, EXIT_PRECONDITION, EXIT_INVARIANT = 0, 2, 3, 4

FORMATS = {
    "gen": ("csv", "json"),
    "timing": ("csv", "json"),
    "synth": ("csv", "json"),
    "sid": ("json", "csv"),
    "bench": ("json",),
    "figures": ("svg",),
}


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------- commands
# each returns {filename: text}


def cmd_gen(rc: RunConfig, fmt: str) -> dict[str, str]:
    g = rc.gen
    if g.kind == "walsh":
        m = g.m if g.m is not None else grid_exponent(g.order + 1)
        bits = sample_grid(g.order, m, g.variant).samples
        name = f"W{g.order}"
    else:
        m = g.m if g.m is not None else g.order + 1
        bits = rademacher_grid(g.order, m)
        if g.variant == "complement":
            bits = 1 - bits
        name = f"R{g.order}"
    bits = [int(b) for b in bits]
    if fmt == "json":
        return {"gen.json": _dumps({"kind": g.kind, "order": g.order, "m": m, "variant": g.variant,
                                    "signal": name, "samples": bits})}
    return {"gen.csv": _csv(("segment", "signal", "value"), ((i, name, b) for i, b in enumerate(bits)))}


def cmd_timing(rc: RunConfig, fmt: str) -> dict[str, str]:
    line, events, record = timing_sequencer_run(rc.timing, reset_cycle=rc.reset_at)
    if fmt == "json":
        return {"timing.json": _dumps({
            "config": {"order": rc.timing.order, "t1": rc.timing.t1, "repeats": rc.timing.repeats,
                       "reset_at": rc.reset_at},
            "timing": [int(x) for x in line],
            "events": [{"cycle": e.cycle, "half_cycle": e.half_cycle, "kind": e.kind} for e in events],
            "record": record,
        })}
    rows = [(2 * c, "timing", int(x)) for c, x in enumerate(line)]
    rows += [(e.half_cycle, "trigger", 1) for e in events]
    rows.sort(key=lambda r: (r[0], r[1]))
    return {"timing.csv": _csv(("half_cycle", "signal", "value"), rows)}


def cmd_synth(rc: RunConfig, fmt: str) -> dict[str, str]:
    run = run_pipeline(rc.timing, rc.modulation, rc.synth, reset_at=rc.reset_at)
    if fmt == "csv":
        return {"synth.csv": run.to_csv()}
    return {"synth.json": _dumps({
        "config": rc.normalized(),
        "ledger_half_cycles": run.ledger.__dict__,
        "ledger_cycles": run.ledger.cycles(),
        "events": [{"cycle": e.cycle, "half_cycle": e.half_cycle, "kind": e.kind} for e in run.events],
        "launches": [[int(x) for x in b] for b in run.launch_outputs()],
        "saturated": run.saturated,
        "overflow": run.overflow,
        "dropped_triggers": run.dropped_triggers,
    })}


def cmd_sid(rc: RunConfig, fmt: str) -> dict[str, str]:
    s = rc.sid
    noise = WalshNoise.random(s.noise_N or s.N, s.phase_bound / (s.gamma * s.T), s.T, s.seed)
    fid = batch_fidelities(noise, s.gamma, s.T, s.N, s.method)
    res = sid_pipeline(fid, d_word=s.divisor, t2=s.t2, reference=noise)
    if fmt == "csv":
        return {"sid.csv": _csv(("segment", "signal", "value"),
                                ((i, "reconstruction", int(x)) for i, x in enumerate(res.stream.segments)))}
    return {"sid.json": _dumps({
        "config": {k: v for k, v in rc.normalized().items() if k.startswith("sid.")},
        "noise": noise.to_dict(),
        "fidelities": [float(p) for p in fid.P],
        "result": res.to_dict(),
    })}


def cmd_bench(rc: RunConfig, fmt: str) -> dict[str, str]:
    b = rc.bench
    overrides = {k: getattr(b, k) for k in ("cycles_per_sample", "trigger_to_output", "walsh_slowdown")
                 if getattr(b, k) is not None}
    report = compare_report(rc.timing, rc.modulation, rc.synth, CostModel(**overrides), b.n_weights)
    d = report.to_dict()
    d["resources"] = {"controller": resource_estimate(rc.modulation.n).to_dict(),
                      "sid": sid_resource_estimate(rc.sid.N).to_dict()}
    return {"bench.json": _dumps(d), "bench.txt": report.to_table() + "\n"}


def cmd_figures(rc: RunConfig, fmt: str) -> dict[str, str]:
    from walshctl import figures

    return figures.render_all(rc.sid.seed if rc.sid.seed is not None else 1)


COMMANDS = {
    "gen": cmd_gen,
    "timing": cmd_timing,
    "synth": cmd_synth,
    "sid": cmd_sid,
    "bench": cmd_bench,
    "figures": cmd_figures,
}


# ---------------------------------------------------------------- driver


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="walshctl", description="Walsh-function qubit controller model")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="run file of 'section.key = value' lines")
    p.add_argument("--out-dir", default=".", help="directory receiving the artifacts (default: .)")
    p.add_argument("--seed", type=int, help="seed for stochastic runs; overrides sid.seed")
    p.add_argument("--format", choices=("csv", "json", "svg"), help="artifact format")
    return p


def execute(command: str, values: dict[str, str], fmt: str | None = None, seed: int | None = None
            ) -> dict[str, str]:
    """Validate and run one command, returning artifact texts by file name."""
    fmt = fmt or FORMATS[command][0]
    problems = []
    if fmt not in FORMATS[command]:
        problems.append(f"--format {fmt} not available for {command} (choose {', '.join(FORMATS[command])})")
    try:
        rc = cfgmod.validate_config(values, command, seed)
    except ConfigError as e:
        raise ConfigError(problems + e.problems) from None
    if problems:
        raise ConfigError(problems)
    return COMMANDS[command](rc, fmt)


def _publish(files: dict[str, str], out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory(dir=out_dir, prefix=".walshctl-") as tmp:
        staged = []
        for name, text in files.items():
            p = Path(tmp) / name
            p.write_text(text)
            staged.append(p)
        return [Path(shutil.move(str(p), out_dir / p.name)) for p in staged]


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        values = cfgmod.load(args.config) if args.config else {}
        files = execute(args.command, values, args.format, args.seed)
    except ConfigError as e:
        for msg in e.problems:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantError as e:
        print(f"internal invariant failed: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as e:
        print(f"precondition violated: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    try:
        written = _publish(files, Path(args.out_dir))
    except OSError as e:
        print(f"cannot write artifacts: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    for p in written:
        print(p)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
