import copy
import hashlib
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from conftest import exact_algebras, float_algebras
from nilcurv import families as fam
from nilcurv import fileformat as ff

HEIS = {
    "dim": 3,
    "mode": "rational",
    "metric": [["1", 0, 0], [0, 1, 0], [0, 0, "-1/2"]],
    "brackets": [{"i": 1, "j": 2, "k": 3, "c": "3/2"}],
}


def test_parse_heisenberg():
    f = ff.parse(HEIS)
    assert f.exact and f.cocycle is None and f.tolerance is None
    assert f.algebra.lie.c[0, 1, 2] == Fraction(3, 2) and f.algebra.lie.c[1, 0, 2] == Fraction(-3, 2)
    assert f.algebra.metric.g[2, 2] == Fraction(-1, 2)


@given(exact_algebras())
def test_exact_round_trip(a):
    d = ff.emit(a)
    b = ff.parse(json.loads(ff.dumps(d))).algebra
    assert np.all(b.lie.c == a.lie.c) and np.all(b.metric.g == a.metric.g)
    assert ff.emit(b) == d


@given(float_algebras())
def test_float_round_trip_is_bit_identical(a):
    b = ff.parse(json.loads(ff.dumps(ff.emit(a)))).algebra
    assert np.array_equal(b.lie.c, a.lie.c) and np.array_equal(b.metric.g, a.metric.g)


def test_cocycle_round_trip_exact():
    g, om = fam.make_qe_dim6(3, 4, 1, -1, exact=True)
    d = ff.emit(g, om, tolerance=1e-7)
    f = ff.parse(json.loads(ff.dumps(d)))
    assert np.all(f.cocycle.S == om.S)
    assert f.z_metric.n == 1 and f.tolerance == 1e-7
    assert f.algebra.tol == 1e-7


def test_cocycle_round_trip_float():
    g, om = fam.make_qe_dim5(1.5, 1, -1)
    f = ff.parse(json.loads(ff.dumps(ff.emit(g, om))))
    assert np.allclose(f.cocycle.S, om.S, atol=1e-15)


def test_emit_is_canonical():
    d = ff.emit(fam.make_l6_19(2, exact=True))
    keys = [(b["i"], b["j"], b["k"]) for b in d["brackets"]]
    assert keys == sorted(keys) and all(i < j for i, j, _ in keys)
    assert all(Fraction(b["c"]) != 0 for b in d["brackets"])
    assert d["metric"][3][4] == "-8"


def test_duplicate_brackets_accumulate():
    data = copy.deepcopy(HEIS)
    data["brackets"].append({"i": 1, "j": 2, "k": 3, "c": "1/2"})
    assert ff.parse(data).algebra.lie.c[0, 1, 2] == 2


def _mut(**changes):
    data = copy.deepcopy(HEIS)
    for k, v in changes.items():
        if v is None:
            del data[k]
        else:
            data[k] = v
    return data


@pytest.mark.parametrize(
    "data,exc,match",
    [
        ([], ff.ParseError, "JSON object"),
        (_mut(extra=1), ff.ParseError, "unknown field"),
        (_mut(brackets=None), ff.ParseError, "missing field: brackets"),
        (_mut(dim=-1), ff.ParseError, "dim"),
        (_mut(dim=True), ff.ParseError, "dim"),
        (_mut(mode="complex"), ff.ParseError, "mode"),
        (_mut(tolerance=0), ff.ParseError, "tolerance"),
        (_mut(metric=[[1, 0, 0], [0, 1, 0]]), ff.ParseError, "metric"),
        (_mut(metric=[[1, 0, 0], [0, 1], [0, 0, 1]]), ff.ParseError, r"metric\[1\]"),
        (_mut(metric=[[1.0, 0, 0], [0, 1, 0], [0, 0, 1]]), ff.ParseError, r"metric\[0\]\[0\]"),
        (_mut(metric=[["x", 0, 0], [0, 1, 0], [0, 0, 1]]), ff.ParseError, "not a rational"),
        (_mut(metric=[["1/0", 0, 0], [0, 1, 0], [0, 0, 1]]), ff.ParseError, "not a rational"),
        (_mut(metric=[[1, 1, 0], [0, 1, 0], [0, 0, 1]]), ff.ValidationError, r"\(1,2\) and \(2,1\)"),
        (_mut(metric=[[1, 1, 0], [1, 1, 0], [0, 0, 1]]), ff.ValidationError, "metric"),
        (_mut(brackets={}), ff.ParseError, "brackets"),
        (_mut(brackets=[1]), ff.ParseError, r"brackets\[0\]"),
        (_mut(brackets=[{"i": 1, "j": 2, "k": 3}]), ff.ParseError, "fields"),
        (_mut(brackets=[{"i": 1, "j": 2, "k": 4, "c": 1}]), ff.ParseError, r"brackets\[0\]\.k"),
        (_mut(brackets=[{"i": 2, "j": 1, "k": 3, "c": 1}]), ff.ValidationError, "i < j"),
        (_mut(cocycle=[]), ff.ParseError, "cocycle"),
        (_mut(cocycle={"p": 1, "S": []}), ff.ParseError, "z_metric"),
        (_mut(cocycle={"p": 1, "z_metric": [[1]], "S": [], "q": 0}), ff.ParseError, "unknown"),
        (_mut(cocycle={"p": 1, "z_metric": [[1]], "S": []}), ff.ParseError, r"cocycle\.S"),
        (
            _mut(cocycle={"p": 1, "z_metric": [[1]], "S": [[[0, 1, 0], [1, 0, 0], [0, 0, 0]]]}),
            ff.ValidationError,
            "antisymmetric",
        ),
        (_mut(cocycle={"p": 1, "z_metric": [[0]], "S": [[[0] * 3] * 3]}), ff.ValidationError, "z_metric"),
    ],
)
def test_malformed_inputs_name_the_field(data, exc, match):
    with pytest.raises(exc, match=match):
        ff.parse(data)


def test_float_mode_rejects_strings():
    data = _mut(mode="float", metric=[["1", 0, 0], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(ff.ParseError, match="JSON numbers"):
        ff.parse(data)


def test_float_symmetry_uses_tolerance():
    data = _mut(mode="float", metric=[[1, 1e-12, 0], [0, 1, 0], [0, 0, 1]], brackets=[])
    ff.parse(data)
    data["tolerance"] = 1e-14
    with pytest.raises(ff.ValidationError):
        ff.parse(data)


def test_load_hashes_bytes(tmp_path):
    p = tmp_path / "h.json"
    p.write_text(ff.dumps(HEIS))
    f, digest = ff.load(p)
    assert digest == hashlib.sha256(p.read_bytes()).hexdigest()
    assert f.algebra.n == 3
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 3,\n "mode": ')
    with pytest.raises(ff.ParseError, match="line 2"):
        ff.load(bad)
    binary = tmp_path / "bin.json"
    binary.write_bytes(b"\xff\xfe")
    with pytest.raises(ff.ParseError, match="UTF-8"):
        ff.load(binary)
