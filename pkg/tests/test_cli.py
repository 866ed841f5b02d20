import io
import json

import pytest

from oshimalab.cli import parse_path, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    payload = json.loads(out.getvalue()) if out.getvalue().strip() else None
    return code, payload, err.getvalue()


def test_roots_sl3():
    code, r, _ = call("roots", "--group", "sl3r")
    assert code == 0 and r["schema"] == "oshimalab/1"
    assert r["count_positive"] == 3 and len(r["positive"]) == 3


def test_orbit_usage_error():
    code, r, err = call("orbit", "--group", "sl2r", "--t", "x")
    assert code == 2 and r is None and "cannot parse" in err


def test_unknown_command_and_group():
    assert call("nope")[0] == 2
    assert call("roots", "--group", "so3")[0] == 2


def test_parabolic():
    code, r, _ = call("parabolic", "--group", "sl3r", "--subset", "a1")
    assert code == 0
    assert r["dims"] == {"a_I": 1, "m_I": 3, "n_I": 2, "k_I": 1, "h_I": 3, "p_I": 6}
    assert call("parabolic", "--group", "sl3r", "--subset", "a7")[0] == 2


def test_deform_basis_and_sample():
    code, r, _ = call("deform", "--group", "sl2r", "--t", "0.5", "--emit", "basis")
    assert code == 0 and r["dim"] == 1
    code, r, _ = call("deform", "--group", "sl2r", "--t", "1", "--emit", "sample", "--R", "2", "--eps", "0.2")
    assert code == 0 and r["count"] > 10


def test_fell_limit_table(tmp_path):
    csv_path = tmp_path / "t.csv"
    code, r, _ = call("fell-limit", "--group", "sl2r", "--path", "t=2^-n", "--steps", "10", "--csv", str(csv_path))
    assert code == 0 and len(r["rows"]) == 10
    assert r["rows"][-1]["window_distance"] <= 1e-2
    assert csv_path.read_text().startswith("step,t1,window_distance")


def test_parse_path():
    trees, limit = parse_path("t=(2^-n, 1)", 2)
    assert list(limit) == [0.0, 1.0]
    from oshimalab.cli import UsageError

    with pytest.raises(UsageError):
        parse_path("t=__import__('os')", 1)


def test_orbit_and_sphere():
    code, r, _ = call("orbit", "--group", "sl3r", "--t", "1,0")
    assert code == 0 and r["orbit_class"] == "+0" and r["satake"] and r["orbit_count"] == 9
    code, r, _ = call("sphere", "--g", "1,1;0,1", "--t", "0")
    assert code == 0 and r["z"] == {"re": 1.0, "im": 0.0} and r["region"] == "real"
    code, r, _ = call("sphere", "--g", "0,-1;1,0", "--t", "0")
    assert r["z"] == "inf"
    assert call("sphere", "--group", "sl3r", "--g", "1,0;0,1", "--t", "0")[0] == 2


def test_compose():
    a1 = json.dumps({"gamma": [[2, 0], [0, 0.5]], "g": [[1, 0], [0, 1]], "t": [1]})
    a2 = json.dumps({"gamma": [[1, 1], [0, 1]], "base": {"g": [[1, 0], [0, 1]], "t": [4]}})
    code, r, _ = call("compose", "--arrow1", a1, "--arrow2", a2)
    assert code == 0 and r["composite"]["gamma"] == [[2.0, 0.5], [0.0, 0.5]]
    code, r, _ = call("compose", "--arrow1", a1, "--arrow2", a1)
    assert code == 1 and r["ok"] is False and "NotComposable" in r["error"]
    assert call("compose", "--arrow1", "{", "--arrow2", a1)[0] == 2


def test_reduce():
    code, r, _ = call("reduce", "--group", "sl3r", "--orbit", "a1")
    assert code == 0 and r["I"] == [0]
    arrow = json.dumps({"gamma": [[1, 0], [0, 1]], "g": [[1, 0], [0, 1]], "t": [0]})
    code, r, _ = call("reduce", "--orbit", "{}", "--arrow", arrow)
    assert code == 0 and r["isotropy"]
    code, r, _ = call("reduce", "--orbit", "a1", "--arrow", arrow)
    assert code == 1 and "WrongOrbit" in r["error"]


def test_bmodel():
    b1 = json.dumps({"m2": [0, 2], "a": [2], "m1": [0, 1]})
    b2 = json.dumps({"m2": [0, 6], "a": [3], "m1": [0, 2]})
    code, r, _ = call("bmodel", "--compose", "--arrow1", b1, "--arrow2", b2)
    assert code == 0 and r["composite"]["a"] == [6.0]
    code, r, _ = call("bmodel", "--normal-derivative", "--word", "diag:2,0.5", "--t0", "0", "--alpha", "a1")
    assert code == 0 and abs(r["derivative"] - 4.0) < 1e-5
    code, r, _ = call("bmodel", "--normal-derivative", "--word", "[[0.7]]", "--t0", "0", "--alpha", "a1")
    assert code == 0 and abs(r["derivative"] - 1.0) < 1e-5
    code, r, _ = call("bmodel", "--group", "sl3r", "--normal-derivative", "--word", '{"coeffs": [[0.3, -0.2, 0.5]], "m": 1}', "--t0", "0,1", "--alpha", "a1")
    assert code == 0 and abs(r["derivative"] - 1.0) < 1e-5
    assert call("bmodel", "--normal-derivative", "--t0", "1", "--alpha", "a1")[0] == 2
    assert call("bmodel")[0] == 2


def test_verify_exit_codes():
    code, r, _ = call("verify", "--group", "sl2r", "--checks", "DEG-DIM,LIE-ROOTS")
    assert code == 0 and r["pass"]
    code, r, _ = call("verify", "--group", "sl3r", "--fault-inject", "DEG-BRACKET", "--checks", "DEG-BRACKET")
    assert code == 1 and not r["pass"]
    assert call("verify", "--fault-inject", "LIE-ROOTS")[0] == 2
    assert call("verify", "--checks", "BOGUS")[0] == 2


def test_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"group": "sl3r", "seed": 5, "json_indent": 0, "tol_alg": 1e-9}))
    code, r, _ = call("verify", "--config", str(cfg), "--checks", "DEG-DIM")
    assert code == 0 and r["seed"] == 5 and r["groups"] == ["sl3r"] and r["tolerances"]["alg"] == 1e-9
    code, r, _ = call("verify", "--config", str(cfg), "--seed", "9", "--checks", "DEG-DIM")
    assert r["seed"] == 9
    bad = tmp_path / "b.json"
    bad.write_text(json.dumps({"colour": 1}))
    assert call("roots", "--config", str(bad))[0] == 2
    assert call("roots", "--config", str(tmp_path / "missing.json"))[0] == 2
