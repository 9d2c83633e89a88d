import json
import math

import numpy as np
import pytest

from medforest.errors import ParseError
from medforest.generators import gen_gap, gen_random
from medforest.io import (
    dumps,
    euclidean_matrix,
    instance_from_dict,
    instance_to_dict,
    read_instance,
    write_instance,
)


def test_euclidean_matrix_rounding():
    d = euclidean_matrix([[0, 0], [3, 4], [0, 1]])
    assert d[0, 1] == 5.0
    assert d[0, 2] == 1.0
    assert d[1, 2] == round(math.hypot(3, 3), 12)
    assert np.array_equal(d, d.T)
    with pytest.raises(ParseError):
        euclidean_matrix([[0, 0, 0]])


def test_write_read_round_trip(tmp_path):
    inst = gen_random(8, 3)
    path = tmp_path / "inst.json"
    write_instance(path, inst)
    back = read_instance(path)
    assert np.array_equal(back.q, inst.q)
    assert np.array_equal(back.d, inst.d)
    assert back.k == inst.k and back.Q == inst.Q
    assert back.meta == inst.meta
    # second write is byte-identical
    path2 = tmp_path / "again.json"
    write_instance(path2, back)
    assert path.read_bytes() == path2.read_bytes()


def test_round_trip_preserves_c_and_labels(tmp_path):
    inst = gen_gap(k=3)
    path = tmp_path / "gap.json"
    write_instance(path, inst)
    back = read_instance(path)
    assert np.array_equal(back.c, inst.c)
    assert back.labels == inst.labels


def test_euclidean_kind_expands():
    data = {
        "n": 3, "k": 1, "Q": 2.0, "q": [1, 1, 1],
        "d": {"kind": "euclidean", "points": [[0, 0], [3, 4], [0, 1]]},
    }
    inst = instance_from_dict(data)
    assert inst.d[0, 1] == 5.0
    # serialization always emits matrix form
    assert instance_to_dict(inst)["d"]["kind"] == "matrix"


def test_dumps_is_canonical():
    text = dumps({"b": 1, "a": [1.5, 2]})
    assert text == '{\n  "a": [\n    1.5,\n    2\n  ],\n  "b": 1\n}\n'
    with pytest.raises(ValueError):
        dumps({"x": float("nan")})


@pytest.mark.parametrize("mutate, fragment", [
    (lambda d: d.pop("q"), "missing required key 'q'"),
    (lambda d: d.update(q=[1, 2]), "q must be a list of 3"),
    (lambda d: d.update(d={"rows": []}), "'kind' key"),
    (lambda d: d.update(d={"kind": "matrix", "rows": [[0, 1], [1, 0]]}),
     "d.rows must be a list of 3 rows"),
    (lambda d: d.update(d={"kind": "triangle", "rows": []}), "triangle"),
    (lambda d: d.update(n="six"), "n/k"),
    (lambda d: d.update(labels=["a"]), "labels must be a list of 3"),
    (lambda d: d.update(meta=[1]), "meta must be an object"),
])
def test_malformed_dict_errors(mutate, fragment):
    data = {
        "n": 3, "k": 1, "Q": None, "q": [1, 1, 1],
        "d": {"kind": "matrix", "rows": [[0, 1, 1], [1, 0, 1], [1, 1, 0]]},
    }
    mutate(data)
    with pytest.raises(ParseError) as err:
        instance_from_dict(data, source="unit.json")
    assert fragment in str(err.value)
    assert "unit.json" in str(err.value)


def test_read_instance_errors_carry_location(tmp_path):
    missing = tmp_path / "nope.json"
    with pytest.raises(ParseError) as err:
        read_instance(missing)
    assert err.value.source == str(missing)

    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "n": 3,\n  !!!\n}\n')
    with pytest.raises(ParseError) as err:
        read_instance(bad)
    assert err.value.line == 3
    assert "bad.json:3" in str(err.value)


def test_non_object_top_level(tmp_path):
    path = tmp_path / "arr.json"
    path.write_text("[1, 2, 3]\n")
    with pytest.raises(ParseError) as err:
        read_instance(path)
    assert "top level" in str(err.value)


def test_shape_error_becomes_parse_error():
    data = {
        "n": 2, "k": 5, "Q": None, "q": [1, 1],
        "d": {"kind": "matrix", "rows": [[0, 1], [1, 0]]},
    }
    # k out of range is a validation finding, not a parse failure
    inst = instance_from_dict(data)
    assert inst.k == 5

    data["q"] = [1, "x"]
    with pytest.raises(ParseError):
        instance_from_dict(data)
