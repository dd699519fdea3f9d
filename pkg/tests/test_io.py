import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from latshift.cbc import cbc_shift
from latshift.io import (
    ShiftTable,
    emit_shift_table,
    file_digest,
    format_shift_file,
    load_vector_file,
    parse_shift_file,
    parse_shift_table,
    read_vector_file,
    shift_table_from_result,
    write_vector_file,
)
from latshift.kernel import HalfShift
from latshift.weights import ProductWeights, parse_weight_spec


@pytest.fixture
def vec(tmp_path):
    def make(text, name="z.txt"):
        p = tmp_path / name
        p.write_text(text)
        return p

    return make


def test_single_column(vec):
    assert load_vector_file(vec("1\n619\n"), 2048, 2) == (1, 619)


def test_two_column(vec):
    p = vec("1 1\n2 619\n")
    assert load_vector_file(p, 2048, 2) == (1, 619)
    assert read_vector_file(p).layout == "indexed"


def test_comments_and_blank_lines(vec):
    assert load_vector_file(vec("# header\n\n1  # first\n3\n5\n"), 8, None) == (1, 3, 5)


@pytest.mark.parametrize(
    "text, match",
    [
        ("1\n2048\n", "component 2 is 2048"),
        ("1\n0\n", "outside"),
        ("1\n", "need 2"),
        ("1\nx\n", ":2:"),
        ("1 1\n3 5\n", ":2: index 3"),
        ("1\n2 5\n", ":2: column count"),
        ("1 2 3\n", ":1: expected 1 or 2"),
        ("# nothing\n", "no generating vector"),
    ],
)
def test_vector_file_errors(vec, text, match):
    with pytest.raises(ValueError, match=match):
        load_vector_file(vec(text), 2048, 2)


def test_missing_vector_file(tmp_path):
    with pytest.raises(OSError):
        load_vector_file(tmp_path / "absent.txt", 8, 1)


def test_write_vector_roundtrip(tmp_path):
    p = tmp_path / "out.txt"
    write_vector_file(p, [1, 7, 3])
    vf = read_vector_file(p)
    assert vf.z == (1, 7, 3) and vf.digest == file_digest(p) and len(vf.digest) == 64


def _table():
    return ShiftTable([(1, 1, 0.708210507514776, 1.4147653988879214), (2, 227, 0.77482897, 1.24260007)],
                      {"n": 2048, "s_max": 2, "weights": "prod:1/j^2", "summation": "plain"})


def test_csv_layout():
    text = emit_shift_table(_table(), "csv").decode("utf-8")
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    assert lines[0] == "s,m,kappa,kappa0"
    assert lines[1] == "1,1,0.708211,1.414765"
    assert "# n: 2048" in text


def test_tsv_layout():
    text = emit_shift_table(_table(), "tsv").decode("utf-8")
    assert "1\t1\t0.708211\t1.414765" in text.splitlines()


@pytest.mark.parametrize("fmt", ["csv", "tsv", "json"])
def test_roundtrip(fmt):
    t = _table()
    back = parse_shift_table(emit_shift_table(t, fmt))
    assert back.m == t.m and back.meta == t.meta
    tol = 0 if fmt == "json" else 5e-7
    for a, b in zip(back.kappa + back.kappa0, t.kappa + t.kappa0):
        assert abs(a - b) <= tol


def test_json_is_full_precision():
    doc = json.loads(emit_shift_table(_table(), "json"))
    assert doc["rows"][0]["kappa"] == 0.708210507514776


def test_emit_errors():
    with pytest.raises(ValueError):
        emit_shift_table(_table(), "xml")
    with pytest.raises(ValueError):
        emit_shift_table(ShiftTable([], {}), "csv")
    with pytest.raises(ValueError):
        ShiftTable([(1, 1, float("nan"), 1.0)])
    with pytest.raises(ValueError):
        ShiftTable([(1, 1, 0.0, 1.0)])


def test_parse_rejects_bad_header():
    with pytest.raises(ValueError):
        parse_shift_table("s,m,k\n1,1,0.5\n", "csv")


def test_table_from_result_records_digest(vec):
    p = vec("1\n")
    res = cbc_shift(2, (1,), 1, ProductWeights((1.0,), "1/j^2"))
    t = shift_table_from_result(res, z_file=p, weights_spec="prod:1/j^2")
    assert t.meta["z_digest"] == file_digest(p)
    assert emit_shift_table(res, "csv").decode().splitlines()[-1] == "1,1,0.707107,1.414214"
    with pytest.raises(ValueError):
        shift_table_from_result(res.__class__(**{**res.__dict__, "m": ()}))


def test_table_recomputes_from_metadata(vec):
    z_path = vec("1\n5\n7\n")
    w_spec = "prod:1/j^2"
    res = cbc_shift(16, load_vector_file(z_path, 16, 3), 3, parse_weight_spec(w_spec, 3))
    table = parse_shift_table(emit_shift_table(shift_table_from_result(res, z_path, w_spec), "csv"))
    meta = table.meta
    assert file_digest(meta["z_file"]) == meta["z_digest"]
    again = cbc_shift(meta["n"], load_vector_file(meta["z_file"], meta["n"], meta["s_max"]), meta["s_max"],
                      parse_weight_spec(meta["weights"], meta["s_max"]), summation=meta["summation"])
    assert again.m == table.m
    for a, b in zip(again.kappa + again.kappa0, table.kappa + table.kappa0):
        assert abs(a - b) <= 1e-6


def test_shift_file_roundtrip(tmp_path):
    p = tmp_path / "shift.txt"

    @given(st.integers(1, 5000), st.data())
    def check(n, data):
        m = data.draw(st.lists(st.integers(1, n), min_size=1, max_size=6))
        p.write_text(format_shift_file(HalfShift(n, m)))
        assert parse_shift_file(p, n) == HalfShift(n, m)

    check()


def test_shift_file_variants(vec):
    assert parse_shift_file(vec("0.25\n0.5\n"), 4) == [0.25, 0.5]
    with pytest.raises(ValueError, match="does not match"):
        parse_shift_file(vec("1 1 0.3\n"), 4)
    with pytest.raises(ValueError, match="dimension 2"):
        parse_shift_file(vec("2 1 0.125\n"), 4)
    with pytest.raises(ValueError, match="mixes"):
        parse_shift_file(vec("1 1 0.125\n0.5\n"), 4)
    with pytest.raises(ValueError, match="malformed"):
        parse_shift_file(vec("1 a 0.125\n"), 4)
    with pytest.raises(ValueError, match="empty"):
        parse_shift_file(vec("\n"), 4)
    with pytest.raises(ValueError):
        parse_shift_file(vec("1 2\n"), 4)
