import pytest

from walshctl.config import load, parse_text, validate_config
from walshctl.errors import ConfigError


def test_parse_comments_and_lists():
    v = parse_text("# run\nsynth.weights = 1, 2 ,3\ntiming.order=3  # W3\n")
    assert v == {"synth.weights": "1, 2 ,3", "timing.order": "3"}


def test_parse_errors_collected():
    with pytest.raises(ConfigError) as e:
        parse_text("a = 1\nnonsense\na = 2\n")
    assert len(e.value.problems) == 2


def test_all_problems_reported_together():
    v = {"timing.t1": "0", "timing.repeats": "16", "modulation.n": "6", "bogus.key": "1"}
    with pytest.raises(ConfigError) as e:
        validate_config(v, "synth")
    text = "\n".join(e.value.problems)
    assert "repeat" in text and "exceeds 4-bit range" in text
    assert "t1=0" in text
    assert "power of two" in text
    assert "unknown key" in text


def test_valid_config_normalized():
    rc = validate_config({"timing.order": "5", "synth.weights_fs": "0.5, 0.25", "synth.mode": "QAM",
                          "synth.phase_weights": "0, 100"}, "synth")
    n = rc.normalized()
    assert n["timing.order"] == 5 and n["timing.t1"] == 16
    assert n["synth.weights"] == [4096, 2048]
    assert n["synth.mode"] == "QAM"


def test_sid_needs_seed():
    with pytest.raises(ConfigError, match="seed"):
        validate_config({}, "sid")
    assert validate_config({}, "sid", seed=3).sid.seed == 3


def test_bad_values():
    with pytest.raises(ConfigError) as e:
        validate_config({"sid.N": "12", "sid.method": "guess", "timing.order": "x"}, "sid", seed=1)
    assert len(e.value.problems) == 3


def test_too_many_weights():
    with pytest.raises(ConfigError, match="exceed"):
        validate_config({"modulation.n": "2", "synth.weights": "1,2,3"}, "synth")


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load(tmp_path / "nope.cfg")
