import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from specgap import records

json_values = st.recursive(
    st.none() | st.booleans() | st.integers(-10**12, 10**12) |
    st.floats(allow_nan=False, allow_infinity=False) | st.text(max_size=8),
    lambda kids: st.lists(kids, max_size=4) | st.dictionaries(st.text(max_size=5), kids, max_size=4),
    max_leaves=20)


@given(json_values)
def test_canonical_round_trip(obj):
    text = records.dumps_canonical(obj)
    assert json.loads(text) == obj
    assert records.dumps_canonical(json.loads(text)) == text


def test_floats_keep_full_precision():
    x = 0.1 + 0.2
    assert records.dumps_canonical(x) == "0.30000000000000004"
    assert records.dumps_canonical(2.0) == "2.0"
    assert records.dumps_canonical(1e300) == "1.0000000000000001e+300"


def test_key_order_and_types():
    assert records.dumps_canonical({"b": 1, "a": [np.int64(2), np.float64(0.5), True]}) == \
        '{"a":[2,0.5,true],"b":1}'
    assert records.dumps_canonical(Fraction(3, 7)) == '"3/7"'


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        records.dumps_canonical(float("nan"))
    with pytest.raises(TypeError):
        records.dumps_canonical(object())


def test_run_log_append(tmp_path):
    rec = records.RunRecord("bound", ["bound", "--progression", "1,0,1"], "abc", None,
                            {"D": 0.5}, "2026-01-01T00:00:00Z")
    path = records.append_record(rec, tmp_path)
    records.append_record(rec, tmp_path)
    lines = path.read_text().splitlines()
    assert len(lines) == 2 and lines[0] == lines[1]
    obj = json.loads(lines[0])
    assert obj["schema_version"] == records.SCHEMA_VERSION
    assert obj["outputs_digest"] == records.digest(records.dumps_canonical({"D": 0.5}))


def test_log_dir_env(monkeypatch, tmp_path):
    monkeypatch.setenv(records.LOG_ENV, str(tmp_path / "x"))
    assert records.log_dir() == tmp_path / "x"
    monkeypatch.delenv(records.LOG_ENV)
    assert str(records.log_dir()) == records.DEFAULT_LOG_DIR
