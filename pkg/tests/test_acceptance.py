"""The fourteen acceptance criteria, each with its tolerance and time budget.

Every criterion prints one PASS/FAIL line; the lines are also collected
into an "acceptance criteria" section of the pytest terminal summary.
"""

import json
import time

import pytest

from oshimalab.verify import strip_timing, verify_suite

from .conftest import ACCEPTANCE_LINES

BOTH = ("sl2r", "sl3r")


def report_line(num, title, ok, elapsed, budget, detail=""):
    status = "PASS" if ok else "FAIL"
    line = f"[criterion {num:2d}] {status}  {title}  ({elapsed:.2f}s / {budget:.0f}s){'  ' + detail if detail else ''}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return line


def run_criterion(num, title, check_ids, groups, budget, extra=None):
    t0 = time.perf_counter()
    report = verify_suite(groups, seed=42, check_ids=check_ids)
    elapsed = time.perf_counter() - t0
    entries = report["entries"]
    problems = [f"{e['check_id']}/{e['group']}: {e['max_residual']} > {e['tolerance']}" for e in entries if not e["pass"]]
    problems += [f"{e['check_id']}/{e['group']}: {e['error']}" for e in entries if "error" in e]
    if extra:
        problems += extra(entries)
    expected = {(c, g) for c in check_ids for g in groups}
    seen = {(e["check_id"], e["group"]) for e in entries}
    ok = not problems and elapsed < budget
    report_line(num, title, ok, elapsed, budget, "; ".join(problems))
    assert seen <= expected and seen, "no entries were produced"
    assert not problems, problems
    assert elapsed < budget, f"took {elapsed:.2f}s, budget {budget}s"


def min_samples(n, check_id=None):
    def extra(entries):
        return [
            f"{e['check_id']}/{e['group']}: only {e['samples']} samples"
            for e in entries
            if (check_id is None or e["check_id"] == check_id) and e["samples"] < n
        ]

    return extra


def tolerance_at_most(check_id, group, tol):
    def extra(entries):
        return [
            f"{check_id}/{group}: tolerance {e['tolerance']} looser than {tol}"
            for e in entries
            if e["check_id"] == check_id and e["group"] == group and e["tolerance"] > tol
        ]

    return extra


def both(*fns):
    return lambda entries: [p for f in fns for p in f(entries)]


def test_criterion_01_subalgebra_family():
    run_criterion(1, "h_t bracket closure <= 1e-9", ["DEG-BRACKET"], BOTH, 5.0,
                  both(min_samples(200), tolerance_at_most("DEG-BRACKET", "sl3r", 1e-9)))


def test_criterion_02_equivariance():
    run_criterion(2, "h_(a.t) = Ad_a h_t within 1e-9", ["DEG-EQUIVARIANCE"], BOTH, 5.0,
                  both(min_samples(200), tolerance_at_most("DEG-EQUIVARIANCE", "sl3r", 1e-9)))


def test_criterion_03_normalizer_dimensions():
    def subsets(entries):
        want = {"sl2r": 2, "sl3r": 4}
        return [f"{e['group']}: {e['samples']} subsets" for e in entries if e["samples"] != want[e["group"]]]

    run_criterion(3, "dim N(h_I) = dim a_I + dim h_I", ["PAR-NORMALIZER"], BOTH, 2.0,
                  both(subsets, tolerance_at_most("PAR-NORMALIZER", "sl3r", 0.0)))


def test_criterion_04_nilpotent_dichotomy():
    run_criterion(4, "nbar_I nilpotent, mixed elements not (sl3r)", ["PAR-NILPOTENT"], ("sl3r",), 5.0,
                  both(min_samples(100), tolerance_at_most("PAR-NILPOTENT", "sl3r", 0.0)))


def test_criterion_05_transversality():
    run_criterion(5, "h_t + a + n = g", ["DEG-TRANSVERSAL"], BOTH, 2.0, min_samples(200))


def four_limits(entries):
    return [f"sl3r: {e['samples']} limits" for e in entries if e["group"] == "sl3r" and e["samples"] != 4]


def test_criterion_06_fell_limit():
    run_criterion(6, "window distance to the limit subgroup", ["FELL-LIMIT"], BOTH, 30.0,
                  both(tolerance_at_most("FELL-LIMIT", "sl2r", 1e-2), tolerance_at_most("FELL-LIMIT", "sl3r", 5 * 0.05), four_limits))


def test_criterion_07_groupoid_axioms():
    run_criterion(7, "groupoid laws on representatives", ["GRP-AXIOMS"], BOTH, 10.0, min_samples(1100))


def test_criterion_08_chart_isomorphism():
    run_criterion(8, "chart groupoid round trip and homomorphism", ["GRP-CHART-ISO"], BOTH, 5.0,
                  both(min_samples(400), tolerance_at_most("GRP-CHART-ISO", "sl3r", 1e-9)))


def test_criterion_09_normal_derivative():
    def counts(entries):
        # 50 words per degenerate t0 plus A-elements: 1 degenerate class in sl2r, 5 in sl3r
        want = {"sl2r": 50, "sl3r": 250}
        return [f"{e['group']}: {e['samples']} samples" for e in entries if e["samples"] < want[e["group"]]]

    run_criterion(9, "normal derivative of H-words is 1", ["B-NORMAL-DERIVATIVE"], BOTH, 20.0,
                  both(counts, tolerance_at_most("B-NORMAL-DERIVATIVE", "sl3r", 1e-5)))


def test_criterion_10_b_model():
    run_criterion(10, "b-model functoriality and a(T)", ["B-FUNCTOR", "B-A-OF-T"], BOTH, 2.0,
                  both(min_samples(200), tolerance_at_most("B-FUNCTOR", "sl3r", 1e-12)))


def test_criterion_11_orbit_combinatorics():
    run_criterion(11, "orbit classes, Satake orbits and containment order", ["OSH-ORBITS", "OSH-CONTAINMENT"], BOTH, 30.0,
                  tolerance_at_most("OSH-CONTAINMENT", "sl3r", 0.0))


def test_criterion_12_sphere_model():
    run_criterion(12, "SL(2,R) sphere model", ["OSH-SPHERE"], ("sl2r",), 5.0,
                  both(min_samples(1000), tolerance_at_most("OSH-SPHERE", "sl2r", 1e-9)))


def test_criterion_13_compactness():
    run_criterion(13, "compactness witness", ["OSH-COMPACT"], BOTH, 5.0,
                  both(min_samples(500), tolerance_at_most("OSH-COMPACT", "sl3r", 1e-8)))


@pytest.mark.slow
def test_criterion_14_determinism():
    t0 = time.perf_counter()
    a = verify_suite(BOTH, seed=42)
    first = time.perf_counter() - t0
    b = verify_suite(BOTH, seed=42)
    second = time.perf_counter() - t0 - first
    same = json.dumps(strip_timing(a), sort_keys=True) == json.dumps(strip_timing(b), sort_keys=True)
    ok = same and a["pass"] and max(first, second) < 120.0
    failing = [f"{e['check_id']}/{e['group']}" for e in a["entries"] if not e["pass"]]
    report_line(14, "identical reports for seed 42, full suite", ok, max(first, second), 120.0,
                f"runs {first:.1f}s and {second:.1f}s" + (f"; failing {failing}" if failing else ""))
    assert same
    assert a["pass"], failing
    assert first < 120.0 and second < 120.0
