"""Smoke tests for the python bindings."""

import math
import os

import pytest

import noisynth

ROOT = os.environ.get("NOISYNTH_ROOT", os.path.join(os.path.dirname(__file__), "..", ".."))


def grammar(name):
    return os.path.join(ROOT, "grammars", name)


def test_dl():
    assert noisynth.dl("abc", "abc") == 0
    assert noisynth.dl("abc", "ab") == 1
    assert noisynth.dl("abcd", "acbd") == 1


def test_enumerate_and_evaluate():
    programs = noisynth.enumerate_programs(grammar("arith.json"), 2)
    assert len(programs) == 21
    assert programs[0] == "x"
    assert noisynth.evaluate(grammar("arith.json"), "(mul (add x 3) 3)", {"x": 1}) == 12


def test_synthesize():
    result = noisynth.synthesize(
        grammar("arith.json"),
        {"inputs": [{"x": 1}], "outputs": [6]},
        "zero_one",
        depth=2,
    )
    assert result["outputs"] == [6]
    assert not result["all_infinite"]
    oracle = noisynth.synthesize(
        grammar("arith.json"),
        {"inputs": [{"x": 1}], "outputs": [6]},
        "zero_one",
        depth=2,
        oracle=True,
    )
    assert oracle["program"] == result["program"]


def test_loss_and_noise():
    assert noisynth.loss("zero_one", ["a", "b"], ["a", "c"]) == 1.0
    assert math.isinf(noisynth.loss("zero_infty", ["a"], ["b"]))
    assert noisynth.noise_pmf({"kind": "one_delete", "delta": 0.1}, ["ab"], ["ab"]) == pytest.approx(0.9)
    y = noisynth.noise_corrupt({"kind": "first_char_delete"}, ["abc", "b"], seed=3)
    assert y == ["bc", ""]
    # determinism in the seed
    assert noisynth.noise_corrupt({"kind": "one_delete", "delta": 0.5}, ["abcd"], seed=9) == \
        noisynth.noise_corrupt({"kind": "one_delete", "delta": 0.5}, ["abcd"], seed=9)


def test_converge_deterministic():
    config = {
        "grammar": grammar("strings_pair.json"),
        "depth": 1,
        "input_source": {"kind": "str_random", "var": "x", "alphabet": "ab",
                         "min_len": 0, "max_len": 2},
        "noise": {"kind": "identity"},
        "loss": "zero_infty",
        "n_grid": [1, 3],
        "trials": 25,
        "seed": 11,
    }
    a = noisynth.converge(config, jobs=1)
    b = noisynth.converge(config, jobs=3)
    assert a["csv"] == b["csv"]
    assert a["csv"].startswith("n,trials,successes,p_hat,ci_lo,ci_hi\n")


def test_expected_reward():
    reward = noisynth.expected_reward(
        grammar("strings_pair.json"), 1,
        {"kind": "first_char_delete"},
        [{"x": "q"}], ["q"], ["aq"],
    )
    assert reward == pytest.approx(0.5)


def test_config_error():
    with pytest.raises(ValueError):
        noisynth.synthesize(grammar("arith.json"),
                            {"inputs": [], "outputs": []}, "zero_one", 2)
