import json
from pathlib import Path

import pytest

from oshimalab.lie import Tolerances
from oshimalab.verify import CHECKS, CHECKS_BY_ID, SCHEMA, strip_timing, verify_suite

QUICK = ["DEG-BRACKET", "DEG-DIM", "LIE-ROOTS", "PAR-STRUCTURE", "B-A-OF-T", "OSH-Z2"]
README = Path(__file__).resolve().parents[1] / "README.md"


def test_registry_sorted_and_documented():
    ids = [c.check_id for c in CHECKS]
    assert ids == sorted(ids)
    assert all(c.anchor for c in CHECKS)
    text = README.read_text()
    missing = [cid for cid in ids if f"`{cid}`" not in text]
    assert not missing


def test_report_schema():
    r = verify_suite(("sl2r",), check_ids=QUICK)
    assert r["schema"] == SCHEMA and r["seed"] == 42
    assert r["pass"]
    keys = {"check_id", "paper_anchor", "group", "samples", "max_residual", "tolerance", "pass", "wall_time"}
    for e in r["entries"]:
        assert keys <= set(e)
        assert e["pass"] == (e["max_residual"] != "inf" and e["max_residual"] <= e["tolerance"])
    json.dumps(r)


def test_ordering_fixed_by_check_id():
    r = verify_suite(("sl3r", "sl2r"), check_ids=list(reversed(QUICK)))
    keys = [(e["check_id"], e["group"]) for e in r["entries"]]
    assert keys == sorted(keys)


def test_deterministic_modulo_timing():
    a = verify_suite(("sl2r", "sl3r"), seed=7, check_ids=QUICK + ["GRP-CHART-ISO"])
    b = verify_suite(("sl2r", "sl3r"), seed=7, check_ids=QUICK + ["GRP-CHART-ISO"])
    assert json.dumps(strip_timing(a)) == json.dumps(strip_timing(b))


def test_seed_changes_samples_not_outcome():
    a = verify_suite(("sl3r",), seed=1, check_ids=["DEG-EQUIVARIANCE"])
    b = verify_suite(("sl3r",), seed=2, check_ids=["DEG-EQUIVARIANCE"])
    assert a["pass"] and b["pass"]
    assert a["entries"][0]["max_residual"] != b["entries"][0]["max_residual"]


@pytest.mark.parametrize("cid", ["DEG-BRACKET", "DEG-EQUIVARIANCE"])
def test_fault_injection_is_caught(cid):
    r = verify_suite(("sl3r",), fault_inject=cid, check_ids=[cid])
    assert not r["pass"]
    assert r["fault_inject"] == cid


def test_fault_injection_only_touches_target():
    r = verify_suite(("sl3r",), fault_inject="DEG-BRACKET", check_ids=["DEG-BRACKET", "DEG-EQUIVARIANCE"])
    by_id = {e["check_id"]: e["pass"] for e in r["entries"]}
    assert by_id == {"DEG-BRACKET": False, "DEG-EQUIVARIANCE": True}


def test_bad_fault_ids():
    with pytest.raises(KeyError):
        verify_suite(("sl2r",), fault_inject="NOPE")
    assert not CHECKS_BY_ID["LIE-ROOTS"].fault_capable
    with pytest.raises(ValueError):
        verify_suite(("sl2r",), fault_inject="LIE-ROOTS")


def test_tolerances_recorded():
    r = verify_suite(("sl2r",), tol=Tolerances(alg=1e-9, fact=1e-8), check_ids=["DEG-DIM"])
    assert r["tolerances"] == {"alg": 1e-9, "fact": 1e-8}


def test_group_specific_checks_skipped():
    r = verify_suite(("sl3r",), check_ids=["OSH-SPHERE", "DEG-DIM"])
    assert [e["check_id"] for e in r["entries"]] == ["DEG-DIM"]
