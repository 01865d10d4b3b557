import json
from fractions import Fraction as F

import pytest

from rieszprob import CondExp, Partition, Space, make_bernoulli, variance
from rieszprob.config import ConfigError, fraction_list, int_list, load_config
from rieszprob.serialize import (
    condexp_from_json,
    condexp_to_json,
    element_from_json,
    element_to_json,
    process_from_json,
    process_to_json,
    space_from_json,
    space_to_json,
    variance_report_to_json,
)


def test_space_and_element_round_trip():
    sp = Space([F(1, 3), 2, F(5, 7)], labels=["a", "b", "c"])
    back = space_from_json(json.loads(json.dumps(space_to_json(sp))))
    assert back == sp
    assert list(back.labels) == ["a", "b", "c"]
    x = sp.element([F(-1, 2), 0, 4])
    assert element_from_json(back, json.loads(json.dumps(element_to_json(x)))) == x
    assert element_to_json(x) == ["-1/2", "0", "4"]


def test_float_space_round_trip():
    sp = Space([0.25, 0.75], exact=False)
    data = space_to_json(sp)
    assert data["weights"] == [0.25, 0.75]
    assert space_from_json(data) == sp


def test_condexp_round_trip():
    sp = Space([1, 2, 3])
    T = CondExp(Partition(sp, [0, 1, 0]))
    back = condexp_from_json(json.loads(json.dumps(condexp_to_json(T))))
    x = sp.element([1, 2, 3])
    assert back(x) == T(x)


def test_process_round_trip():
    base = Space([1, 1])
    T = CondExp(Partition.discrete(base))
    proc = make_bernoulli(base, T, base.element([F(1, 3), F(1, 2)]), 4, "aggregated")
    back = process_from_json(json.loads(json.dumps(process_to_json(proc))))
    assert back.realized_space == proc.realized_space
    assert back.representation == "aggregated"


def test_variance_report_json():
    sp = Space.uniform(2)
    rep = variance(CondExp.expectation(sp), sp.element([0, 1]))
    assert variance_report_to_json(rep)["variance"] == ["1/4", "1/4"]


def test_list_parsers():
    assert int_list("0..3, 7", "j") == [0, 1, 2, 3, 7]
    assert int_list([1, 2], "n") == [1, 2]
    assert fraction_list("1/2, 0.25", "p") == [F(1, 2), F(1, 4)]
    with pytest.raises(ConfigError):
        int_list("a, b", "n")
    with pytest.raises(ConfigError):
        fraction_list("1/0", "p")


def test_load_ini(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text(
        "[verify]\nseed = 7\ntrials = 3\n\n"
        "[process.coin]\nweights = 1, 1\nblock_of = 0, 1\nf = 1/2, 1/3\nn = 4\n\n"
        "[converge]\nexperiment = lln ; trailing comment\n"
    )
    cfg = load_config(path)
    assert cfg["verify"] == {"seed": "7", "trials": "3"}
    assert cfg["processes"][0]["name"] == "coin"
    assert cfg["converge"]["experiment"] == "lln"


def test_load_json(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"verify": {"seed": 1}, "processes": [{"name": "x"}]}))
    cfg = load_config(path)
    assert cfg["verify"]["seed"] == 1 and cfg["converge"] == {}


@pytest.mark.parametrize(
    "name,text",
    [
        ("bad.ini", "[verify\nseed = 1\n"),
        ("bad.ini", "[mystery]\nx = 1\n"),
        ("bad.json", "{not json"),
        ("bad.json", '{"processes": 3}'),
    ],
)
def test_load_rejects_malformed(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    with pytest.raises(ConfigError):
        load_config(path)


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.ini")
