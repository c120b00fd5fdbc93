import json

import numpy as np
import pytest

from crext.errors import DataDomainError, ParseError, SchemaError
from crext.expr import Expression
from crext.fixtures import split_model
from crext.io import (
    load_json,
    model_to_json,
    parse_data,
    parse_json,
    parse_model,
    parse_point,
    parse_probe_path,
)


def test_expression_variables_and_functions():
    e = Expression("z1 * zb1 + x2 - I * y2 + s * exp(0) + sqrt(-4)", 2)
    z = np.array([1 + 2j, 3 - 1j])
    # |z1|^2 + x2 - i y2 + s + 2i
    assert np.isclose(e(z, 0.5), 5 + 3 + 1j + 0.5 + 2j)


def test_expression_guards_and_domain_errors():
    e = Expression("0 if s == 0 else exp(-1/s**2)", 1)
    vals = e(np.zeros((3, 1)), np.array([0.0, 0.5, -0.5]))
    assert vals[0] == 0 and np.isclose(vals[1], np.exp(-4))
    with pytest.raises(DataDomainError):
        Expression("1/z1", 1)(np.zeros(1), 0.0)
    with pytest.raises(DataDomainError):
        Expression("log(z1)", 1)(np.zeros(1), 0.0)


@pytest.mark.parametrize("src", ["", "  ", "z1 +", "__import__('os')", "z1.real", "[z1]", "q1", "lambda: 1"])
def test_expression_rejects_bad_input(src):
    with pytest.raises(ParseError):
        Expression(src, 1)


def test_parse_json_errors(tmp_path):
    with pytest.raises(ParseError):
        parse_json("")
    with pytest.raises(ParseError):
        parse_json("{not json")
    with pytest.raises(ParseError):
        load_json(tmp_path / "missing.json")


def test_model_round_trip():
    m = split_model()
    back = parse_model(json.loads(json.dumps(model_to_json(m))))
    assert np.allclose(back.A, m.A) and np.allclose(back.B, m.B) and back.E is None


@pytest.mark.parametrize("obj,path", [
    ([], "$"),
    ({"A": [[1]]}, "n"),
    ({"n": 1}, "A"),
    ({"n": 2, "A": [[1, 0], [0]]}, "A[1]"),
    ({"n": 2, "A": [[1, 0], [0, "x"]]}, "A[1][1]"),
    ({"n": 1, "A": [[[0, 1]]]}, "A"),
    ({"n": 1, "A": [[1]], "E": [{"z_exp": [1], "zbar_exp": [1], "coeff": 1}]}, "E"),
    ({"n": 1, "A": [[1]], "E": [{"z_exp": [3], "zbar_exp": [0], "coeff": 1}]}, "E"),
])
def test_model_schema_errors_carry_paths(obj, path):
    with pytest.raises(SchemaError) as info:
        parse_model(obj)
    assert info.value.path.startswith(path)


def test_points_and_probes():
    z, s = parse_point({"z": [[0.1, 0.2], 0.3], "s": -1}, 2)
    assert np.allclose(z, [0.1 + 0.2j, 0.3]) and s == -1.0
    with pytest.raises(SchemaError) as info:
        parse_point({"z": [[0.1, 0.2]], "s": 0}, 2)
    assert info.value.path == "$.z"
    with pytest.raises(SchemaError):
        parse_point({"z": [0, 0]}, 2)
    probes = parse_probe_path({"probes": [{"z": [1], "s": 0}, {"z": [2], "s": 0}]}, 1)
    assert len(probes) == 2
    with pytest.raises(SchemaError):
        parse_probe_path([{"z": [1], "s": 0}], 1)


def test_data_kinds():
    z = np.array([0.5 + 0.5j])
    e = parse_data({"kind": "expression", "source": "z1 * s"}, 1)
    assert np.isclose(e(z, 2.0), 1 + 1j)
    p = parse_data([{"z_exp": [0], "zbar_exp": [1], "coeff": [0, 1]}], 1)
    assert np.isclose(p(z, 0.0), 1j * (0.5 - 0.5j))
    sp = parse_data({"kind": "spolynomial", "terms": [{"z_exp": [1], "s_exp": 1, "coeff": 2}]}, 1)
    assert np.isclose(sp(z, 3.0), 6 * z[0])
    with pytest.raises(SchemaError):
        parse_data({"kind": "table"}, 1)
    with pytest.raises(SchemaError):
        parse_data({"kind": "expression"}, 1)
