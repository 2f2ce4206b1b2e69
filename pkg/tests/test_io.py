import io
import json
import math

import pytest

from spintop import schemas
from spintop.errors import ConfigError
from spintop.io import dumps, fmt, load_config, validate, write_csv


def test_fmt_full_precision():
    assert float(fmt(0.1 + 0.2)) == 0.1 + 0.2
    assert fmt(math.pi) == "3.1415926535897931"
    assert fmt(float("nan")) == ""
    assert fmt(None) == ""
    assert fmt("ok") == "ok"
    assert fmt(True) == "true"


def test_write_csv():
    buf = io.StringIO()
    write_csv(buf, ["a", "b"], [[1.0, float("nan")], [1 / 3, "x"]])
    assert buf.getvalue() == "a,b\n1,\n0.33333333333333331,x\n"


def test_dumps_round_trips_floats():
    vals = [1 / 3, 2.0**-40, 1e300, -0.0]
    assert json.loads(dumps({"v": vals}))["v"] == vals
    assert json.loads(dumps({"r": float("nan"), "t": (1, 2)})) == {"r": None, "t": [1, 2]}


def test_load_config(tmp_path):
    good = tmp_path / "c.json"
    good.write_text('{"n_v": 1}')
    assert load_config(str(good)) == {"n_v": 1}
    assert load_config("-", stdin=io.StringIO('{"a": 2}')) == {"a": 2}
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    with pytest.raises(ConfigError, match="malformed"):
        load_config(str(bad))
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"))
    arr = tmp_path / "arr.json"
    arr.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_config(str(arr))


def test_validate_rejects_unknown_and_missing_keys():
    validate({"n_v": 1, "n_i": 2, "n_ii": 0}, schemas.DOF, "dof")
    with pytest.raises(ConfigError, match="dof config invalid"):
        validate({"n_v": 1, "n_i": 2, "n_ii": 0, "extra": 1}, schemas.DOF, "dof")
    with pytest.raises(ConfigError):
        validate({"n_v": 1, "n_i": 2}, schemas.DOF, "dof")
    with pytest.raises(ConfigError):
        validate({"m": 1, "ell": 1, "initial": {"p": [1, 0, 0, 0], "k": [1, 0, 0, 1], "pi": [0, 0.5, 0, 0]}, "gauges": [], "span": [0, 1]}, schemas.TUBE, "tube")
