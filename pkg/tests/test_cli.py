import csv
import json

import pytest

from walshctl.cli import EXIT_CONFIG, EXIT_INVARIANT, EXIT_PRECONDITION, main
from walshctl.errors import InvariantError


def run(tmp_path, *args, cfg=None):
    argv = list(args) + ["--out-dir", str(tmp_path / "out")]
    if cfg is not None:
        p = tmp_path / "run.cfg"
        p.write_text(cfg)
        argv += ["--config", str(p)]
    return main(argv)


def test_gen_w12(tmp_path):
    assert run(tmp_path, "gen", cfg="gen.order = 12\ngen.m = 4\n") == 0
    rows = list(csv.DictReader(open(tmp_path / "out" / "gen.csv")))
    assert "".join(r["value"] for r in rows) == "0110011001100110"
    assert {r["signal"] for r in rows} == {"W12"}


def test_gen_rademacher_json(tmp_path):
    assert run(tmp_path, "gen", "--format", "json", cfg="gen.kind = rademacher\ngen.order = 1\ngen.m = 3\n") == 0
    assert json.load(open(tmp_path / "out" / "gen.json"))["samples"] == [0, 0, 1, 1, 0, 0, 1, 1]


def test_timing_zero_repeats(tmp_path):
    assert run(tmp_path, "timing", cfg="timing.order = 3\ntiming.repeats = 0\n") == 0
    rows = list(csv.DictReader(open(tmp_path / "out" / "timing.csv")))
    assert rows and not [r for r in rows if r["signal"] == "trigger"]


def test_sid_seed_one(tmp_path):
    assert run(tmp_path, "sid", "--seed", "1") == 0
    d = json.load(open(tmp_path / "out" / "sid.json"))
    assert d["result"]["metrics"]["linf_lsb"] <= 2
    assert d["result"]["ledger_cycles"]["total"] == 5


def test_synth_json_ledger(tmp_path):
    assert run(tmp_path, "synth", "--format", "json") == 0
    d = json.load(open(tmp_path / "out" / "synth.json"))
    assert d["ledger_cycles"]["start_to_output"] == 4.5
    assert len(d["launches"]) == 5


def test_bench(tmp_path):
    assert run(tmp_path, "bench") == 0
    d = json.load(open(tmp_path / "out" / "bench.json"))
    assert d["model_based"] is True
    assert (tmp_path / "out" / "bench.txt").exists()


@pytest.mark.parametrize("cmd, args", [("gen", []), ("timing", ["--format", "json"]), ("synth", []),
                                       ("sid", ["--seed", "4"]), ("bench", [])])
def test_deterministic(tmp_path, cmd, args):
    assert main([cmd, *args, "--out-dir", str(tmp_path / "a")]) == 0
    assert main([cmd, *args, "--out-dir", str(tmp_path / "b")]) == 0
    for f in (tmp_path / "a").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_config_error_writes_nothing(tmp_path, capsys):
    assert run(tmp_path, "synth", cfg="timing.repeats = 16\ntiming.t1 = 0\n") == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "exceeds 4-bit range" in err and "t1=0" in err
    assert not (tmp_path / "out").exists()


def test_missing_config_file(tmp_path):
    assert main(["gen", "--config", str(tmp_path / "missing.cfg")]) == EXIT_CONFIG


def test_unseeded_sid_is_config_error(tmp_path):
    assert run(tmp_path, "sid") == EXIT_CONFIG


def test_wrong_format(tmp_path):
    assert run(tmp_path, "bench", "--format", "svg") == EXIT_CONFIG


def test_precondition_exit(tmp_path):
    # order 3 on a 2-segment grid cannot be sampled
    assert run(tmp_path, "gen", cfg="gen.order = 3\ngen.m = 1\n") == EXIT_PRECONDITION


def test_invariant_exit(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise InvariantError("forced")

    monkeypatch.setattr("walshctl.cli.run_pipeline", boom)
    assert run(tmp_path, "synth") == EXIT_INVARIANT
    assert not (tmp_path / "out").exists()


def test_module_entry_point():
    import subprocess
    import sys

    r = subprocess.run([sys.executable, "-m", "walshctl", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "--seed" in r.stdout


def test_bench_without_output_is_precondition(tmp_path):
    assert run(tmp_path, "bench", cfg="timing.repeats = 0\n") == EXIT_PRECONDITION
