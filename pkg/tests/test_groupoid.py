import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oshimalab.degeneration import random_h_word, random_t, subgroup_membership
from oshimalab.errors import NotComposable, WrongOrbit
from oshimalab.groupoid import (
    Arrow,
    ChartArrow,
    arrow_eq,
    chart_arrow_distance,
    chart_compose,
    chart_inverse,
    chart_iso,
    chart_iso_inv,
    chart_unit,
    compose,
    inverse,
    inverse_exact,
    isotropy_subalgebra,
    labels_equal,
    openness_witness,
    orbit_reduction,
    random_integer_sl,
    source,
    target,
    unit,
)
from oshimalab.lie import random_sl
from oshimalab.linalg import subspace_distance
from oshimalab.oshima import OshimaPoint, act, point_distance, points_equal, random_n, random_point

from .conftest import rot

seeds = st.integers(min_value=0, max_value=2**32 - 1)
E1 = OshimaPoint(np.eye(2), np.array([1.0]))


def test_unit_and_isotropy_examples(sl2):
    U = unit(E1)
    assert points_equal(sl2, source(U), target(U))
    K = Arrow(rot(0.4), E1)
    assert points_equal(sl2, target(K), E1)
    D = Arrow(np.diag([2.0, 0.5]), E1)
    assert points_equal(sl2, target(D), OshimaPoint(np.eye(2), np.array([4.0])))


def test_arrow_eq_examples(sl2):
    A = Arrow(np.array([[1.0, 2.0], [0.0, 1.0]]), E1)
    assert arrow_eq(sl2, A, A)
    assert arrow_eq(sl2, A, Arrow(A.gamma @ rot(1.3), E1))
    assert not arrow_eq(sl2, A, Arrow(A.gamma @ np.diag([2.0, 0.5]), E1))


def test_inverse_laws(sl3, rng):
    for _ in range(20):
        p = random_point(sl3, rng)
        A = Arrow(random_sl(3, rng), p)
        assert arrow_eq(sl3, compose(sl3, A, inverse(A)), unit(target(A)))
        assert arrow_eq(sl3, compose(sl3, inverse(A), A), unit(p))


def test_exact_associativity_on_integer_representatives(sl3, rng):
    for _ in range(50):
        p = OshimaPoint(random_integer_sl(3, rng), random_t(rng, 2))
        A1 = Arrow(random_integer_sl(3, rng), p)
        A2 = Arrow(random_integer_sl(3, rng), target(A1))
        A3 = Arrow(random_integer_sl(3, rng), target(A2))
        left = compose(sl3, A3, compose(sl3, A2, A1))
        right = compose(sl3, compose(sl3, A3, A2), A1)
        assert np.array_equal(left.gamma, right.gamma)
        U = compose(sl3, A1, unit(p))
        assert np.array_equal(U.gamma, A1.gamma)
        B = inverse_exact(A1)
        assert np.array_equal(B.gamma @ A1.gamma, np.eye(3))


def test_not_composable(sl2):
    A = Arrow(np.diag([2.0, 0.5]), E1)
    with pytest.raises(NotComposable) as info:
        compose(sl2, A, A)
    assert info.value.distance > 1.0


@given(seeds)
def test_representative_change_keeps_class(seed):
    from oshimalab import build_group

    G = build_group("sl3r")
    rng = np.random.default_rng(seed)
    p = random_point(G, rng)
    A1 = Arrow(random_sl(3, rng, 0.5), p)
    A2 = Arrow(random_sl(3, rng, 0.5), target(A1))
    h = random_h_word(G, p.t, rng)
    A1h = Arrow(A1.gamma @ p.g @ h @ np.linalg.inv(p.g), p)
    assert arrow_eq(G, A1, A1h)
    assert arrow_eq(G, compose(G, A2, A1), compose(G, A2, A1h))


def test_normality_and_covariance(sl3, rng):
    for _ in range(20):
        p = random_point(sl3, rng)
        gamma = random_sl(3, rng, 0.5)
        h = p.g @ random_h_word(sl3, p.t, rng) @ np.linalg.inv(p.g)
        q = act(gamma, p)
        assert subgroup_membership(sl3, gamma @ h @ np.linalg.inv(gamma), q.t, g=q.g)
        lhs = isotropy_subalgebra(sl3, p).conjugate(gamma)
        assert subspace_distance(lhs, isotropy_subalgebra(sl3, q)) < 1e-9


def test_chart_iso_examples(sl2):
    A = chart_iso(sl2, chart_unit(sl2, np.eye(2), [0.7]))
    assert np.allclose(A.gamma, np.eye(2))
    w = ChartArrow(np.eye(2), np.array([4.0]), np.diag([2.0, 0.5]), np.eye(2), np.array([1.0])).check(sl2)
    A = chart_iso(sl2, w)
    assert np.allclose(A.gamma, np.diag([2.0, 0.5])) and np.allclose(A.base.t, [1.0])
    with pytest.raises(ValueError):
        ChartArrow(np.eye(2), np.array([3.0]), np.diag([2.0, 0.5]), np.eye(2), np.array([1.0])).check(sl2)


def _chart_arrow(G, rng, t1=None, n1=None):
    from oshimalab.degeneration import a_action

    t1 = random_t(rng, G.roots.rank) if t1 is None else t1
    n1 = random_n(G, rng) if n1 is None else n1
    a = G.a_from_coords(rng.uniform(-1, 1, G.dim_a))
    return ChartArrow(random_n(G, rng), a_action(G, a, t1), a, n1, t1)


@pytest.mark.parametrize("fixture", ["sl2", "sl3"])
def test_chart_iso_round_trip_and_functoriality(fixture, request, rng):
    G = request.getfixturevalue(fixture)
    for _ in range(30):
        w1 = _chart_arrow(G, rng)
        assert chart_arrow_distance(chart_iso_inv(G, chart_iso(G, w1)), w1) < 1e-9
        w2 = _chart_arrow(G, rng, t1=w1.t2, n1=w1.n2)
        lhs = chart_iso(G, chart_compose(G, w2, w1))
        rhs = compose(G, chart_iso(G, w2), chart_iso(G, w1))
        assert arrow_eq(G, lhs, rhs)
        inv = chart_iso(G, chart_inverse(w1))
        assert arrow_eq(G, inv, inverse(chart_iso(G, w1)))


def test_chart_compose_mismatch(sl2, rng):
    w = _chart_arrow(sl2, rng)
    with pytest.raises(NotComposable):
        chart_compose(sl2, w, w)


def test_orbit_reduction_unit_and_mismatch(sl3, rng):
    p = OshimaPoint(random_sl(3, rng), np.array([1.0, 0.0]))
    r = orbit_reduction(sl3, unit(p), (0,))
    assert labels_equal(r, r)
    assert r.isotropy
    assert np.allclose(r.source_label.n, r.target_label.n) and np.allclose(r.source_label.log_a, r.target_label.log_a)
    with pytest.raises(WrongOrbit):
        orbit_reduction(sl3, unit(p), (1,))


def test_reduction_separates_classes(sl3, rng):
    p = OshimaPoint(random_sl(3, rng), np.array([-0.8, 0.0]))
    A = Arrow(random_sl(3, rng), p)
    h = p.g @ random_h_word(sl3, p.t, rng) @ np.linalg.inv(p.g)
    assert labels_equal(orbit_reduction(sl3, A), orbit_reduction(sl3, Arrow(A.gamma @ h, p)))
    B = Arrow(A.gamma @ random_sl(3, rng), p)
    assert not labels_equal(orbit_reduction(sl3, A), orbit_reduction(sl3, B))


def test_sl2_empty_orbit_isotropy(sl2):
    p = OshimaPoint(np.eye(2), np.array([0.0]))
    r = orbit_reduction(sl2, Arrow(np.diag([2.0, 0.5]), p), ())
    assert r.isotropy


def test_full_subset_is_pair_groupoid(sl2, rng):
    # A_Sigma is trivial: labels only see the cosets g K
    p = OshimaPoint(random_sl(2, rng), np.array([1.0]))
    A = Arrow(random_sl(2, rng), p)
    r = orbit_reduction(sl2, A, (0,))
    B = Arrow(A.gamma @ p.g @ rot(0.8) @ np.linalg.inv(p.g), p)
    assert labels_equal(r, orbit_reduction(sl2, B, (0,)))


def test_openness_witness_bounded(sl3, rng):
    assert openness_witness(sl3, rng, points=6) < 1e3


def test_arrows_need_matching_points(sl2):
    A = Arrow(np.eye(2), E1)
    assert point_distance(sl2, source(A), target(A)) == 0.0
