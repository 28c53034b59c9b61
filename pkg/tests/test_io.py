import json
import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from greedyprune import io
from greedyprune.errors import (
    BadMagic,
    FormatError,
    NonFiniteValue,
    RecordParseError,
    TruncatedFile,
    UnsupportedVersion,
)


def test_fnv_reference_vectors():
    # published FNV-1a 64 test vectors
    assert io.checksum_hex(b"") == "cbf29ce484222325"
    assert io.checksum_hex(b"a") == "af63dc4c8601ec8c"
    assert io.checksum_hex(b"foobar") == "85944171f73967e8"


def test_token_round_trip(tmp_path, rng):
    x = rng.standard_normal((5, 3)).astype(np.float32)
    q = rng.standard_normal(3).astype(np.float32)
    path = tmp_path / "t.tokd"
    io.write_token_file(path, x, q)
    tokens, query = io.read_token_file(path)
    assert tokens.dtype == np.float64
    assert tokens.astype(np.float32).tobytes() == x.tobytes()
    assert query.astype(np.float32).tobytes() == q.tobytes()
    io.write_token_file(tmp_path / "u.tokd", tokens, query)
    assert (tmp_path / "u.tokd").read_bytes() == path.read_bytes()
    _, none = io.decode_token_file(io.encode_token_file(x))
    assert none is None


def test_header_layout():
    data = io.encode_token_file(np.ones((2, 3)), np.zeros(3) + 1)
    assert data[:4] == b"TOKD"
    assert struct.unpack_from("<III", data, 4) == (1, 2, 3)
    assert data[16:20] == b"\x01\0\0\0"
    assert len(data) == 20 + 4 * 6 + 4 * 3
    assert data[20:24] == struct.pack("<f", 1.0)


def test_bad_files():
    good = io.encode_token_file(np.ones((2, 3)))
    with pytest.raises(BadMagic):
        io.decode_token_file(b"XXXX" + good[4:])
    with pytest.raises(UnsupportedVersion):
        io.decode_token_file(good[:4] + struct.pack("<I", 2) + good[8:])
    with pytest.raises(TruncatedFile) as exc:
        io.decode_token_file(good[:-4])
    assert (exc.value.expected, exc.value.actual) == (len(good), len(good) - 4)
    with pytest.raises(TruncatedFile):
        io.decode_token_file(good[:10])
    with pytest.raises(FormatError):
        io.decode_token_file(good + b"\0")
    bad = bytearray(good)
    bad[20 + 4 * 4 : 20 + 4 * 5] = struct.pack("<f", float("nan"))
    with pytest.raises(NonFiniteValue) as exc:
        io.decode_token_file(bytes(bad))
    assert (exc.value.row, exc.value.col) == (1, 1)
    with pytest.raises(NonFiniteValue):
        io.encode_token_file([[1.0, float("inf")]])


finite32 = st.floats(allow_nan=False, allow_infinity=False, width=32)


@settings(max_examples=1000, deadline=None)
@given(
    shape=st.tuples(st.integers(0, 6), st.integers(1, 6)),
    data=st.data(),
    with_query=st.booleans(),
)
def test_token_file_property(shape, data, with_query):
    n, d = shape
    x = np.array(data.draw(st.lists(finite32, min_size=n * d, max_size=n * d)), dtype=np.float32).reshape(n, d)
    q = np.array(data.draw(st.lists(finite32, min_size=d, max_size=d)), dtype=np.float32) if with_query else None
    blob = io.encode_token_file(x, q)
    tokens, query = io.decode_token_file(blob)
    assert tokens.astype(np.float32).tobytes() == x.tobytes()
    assert (query is None) == (q is None)
    if q is not None:
        assert query.astype(np.float32).tobytes() == q.tobytes()
    assert io.encode_token_file(tokens, query) == blob


def _record(**kw):
    base = dict(
        method="greedy",
        budget=4,
        tau=0.9,
        indices=[3, 1, 2],
        backfilled=1,
        objective=1.25,
        feasibility_violation_count=0,
        runtime_microseconds=17,
        input_checksum="0123456789abcdef",
        backfilled_indices=[2],
    )
    base.update(kw)
    return io.SelectionRecord(**base)


def test_record_round_trip_and_canonical(tmp_path):
    rec = _record()
    assert rec.indices == [1, 2, 3]
    path = tmp_path / "sel.json"
    io.write_selection(path, rec)
    back = io.read_selection(path)
    assert back == rec
    assert io.dumps_selection(back) == path.read_text()
    assert path.read_text().count("\n") == 12


def test_record_extra_fields_kept():
    text = io.dumps_selection(_record()).replace('"method"', '"note": "hi",\n  "method"')
    rec = io.loads_selection(text)
    assert rec.extra == {"note": "hi"}
    assert rec.method == "greedy"
    assert io.loads_selection(io.dumps_selection(rec)) == rec


def test_record_missing_and_bad_fields():
    d = json.loads(io.dumps_selection(_record()))
    del d["objective"]
    with pytest.raises(RecordParseError) as exc:
        io.loads_selection(json.dumps(d))
    assert exc.value.field == "objective"
    assert "objective" in str(exc.value)
    text = io.dumps_selection(_record()).replace('"budget": 4', '"budget": "four"')
    with pytest.raises(RecordParseError) as exc:
        io.loads_selection(text)
    assert exc.value.field == "budget" and exc.value.line == 3
    with pytest.raises(RecordParseError):
        io.loads_selection(io.dumps_selection(_record()).replace('"indices": [1, 2, 3]', '"indices": [2, 1]'))
    with pytest.raises(RecordParseError):
        io.loads_selection("{ not json")


records = st.builds(
    io.SelectionRecord,
    method=st.sampled_from(["greedy", "topk", "maxmin", "random", "grid", "exact"]),
    budget=st.integers(0, 10**6),
    tau=st.none() | st.floats(allow_nan=False, allow_infinity=False),
    indices=st.sets(st.integers(0, 10**5), max_size=30).map(list),
    backfilled=st.integers(0, 100),
    objective=st.floats(allow_nan=False, allow_infinity=False),
    feasibility_violation_count=st.integers(0, 1000),
    runtime_microseconds=st.integers(0, 10**12),
    input_checksum=st.integers(0, 2**64 - 1).map(lambda v: f"{v:016x}"),
    backfilled_indices=st.sets(st.integers(0, 10**5), max_size=5).map(list),
    extra=st.dictionaries(st.text(min_size=1, max_size=8).filter(lambda k: k not in io._FIELDS), st.integers() | st.text(max_size=8), max_size=3),
)


@settings(max_examples=1000, deadline=None)
@given(records)
def test_record_property(rec):
    text = io.dumps_selection(rec)
    back = io.loads_selection(text)
    assert back == rec
    assert io.dumps_selection(back) == text


def test_saliency_file(tmp_path):
    p = tmp_path / "w.txt"
    p.write_text("0.5 0.25\n-1\n")
    assert io.read_saliency_file(p).tolist() == [0.5, 0.25, -1.0]
    p.write_text("0.5 nan\n")
    with pytest.raises(FormatError):
        io.read_saliency_file(p)


def test_planted_sidecar(tmp_path):
    from greedyprune import generate_clustered

    inst = generate_clustered(2, 3, 2, 8, 0.9, 0.2)
    path = io.planted_sidecar_path(tmp_path / "a.tokd")
    assert path.name == "a.tokd.planted.json"
    io.write_planted_metadata(path, inst, 2)
    meta = io.read_planted_metadata(path)
    assert tuple(meta["planted_critical"]) == inst.planted_critical
    path.write_text("{}")
    with pytest.raises(RecordParseError):
        io.read_planted_metadata(path)
