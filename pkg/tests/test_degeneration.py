import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from oshimalab.degeneration import (
    a_action,
    a_weights,
    a_with_weights,
    block_udl,
    h_t_basis,
    h_word,
    in_h_I,
    nah_factorize,
    random_h_word,
    random_t,
    sampled_subgroup,
    section,
    sign_patterns,
    split_k_n,
    subgroup_membership,
    support,
    t_pow_2gamma,
    transversality_rank,
)
from oshimalab.errors import NotInCell, UnknownRoot
from oshimalab.linalg import Subalgebra, bracket_closure_residual, subspace_distance
from oshimalab.parabolic import parabolic_datum

from .conftest import E2, F2, rot

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_t_pow_2gamma(sl3):
    top = sl3.roots.find((1, 1))
    assert t_pow_2gamma([2.0, 3.0], top) == pytest.approx(36.0)
    assert t_pow_2gamma([0.0, 3.0], (0, 1)) == pytest.approx(9.0)
    assert t_pow_2gamma([0.0, 3.0], (1, 0)) == 0.0
    with pytest.raises(UnknownRoot):
        t_pow_2gamma([1.0, 1.0], (0, 0))


def test_sl2_h_t_examples(sl2):
    h = h_t_basis(sl2, [2.0])
    assert h.dim == 1 and h.contains(np.array([[0.0, 4.0], [-1.0, 0.0]]))
    k_t, n_t = split_k_n(sl2, [2.0])
    assert k_t.contains(4 * E2 - F2) and n_t.dim == 0
    k0, n0 = split_k_n(sl2, [0.0])
    assert k0.dim == 0 and n0.contains(E2)


def test_sl3_split(sl3):
    k_t, n_t = split_k_n(sl3, [1.0, 0.0])
    assert (k_t.dim, n_t.dim) == (1, 2)


@pytest.mark.parametrize("fixture", ["sl2", "sl3", "sl4"])
def test_unit_t_gives_k(fixture, request):
    G = request.getfixturevalue(fixture)
    for signs in sign_patterns(G.roots.rank):
        if 0 in signs:
            continue
        assert subspace_distance(h_t_basis(G, np.array(signs, float)), G.k_space) < 1e-9


@pytest.mark.parametrize("fixture", ["sl2", "sl3", "sl4"])
def test_zero_t_and_support_limits(fixture, request):
    G = request.getfixturevalue(fixture)
    for signs in sign_patterns(G.roots.rank):
        t = np.array(signs, dtype=float)
        P = parabolic_datum(G, support(t))
        if all(s >= 0 for s in signs):
            assert subspace_distance(h_t_basis(G, t), P.h_I) < 1e-9


@given(seeds)
def test_h_t_is_subalgebra_of_right_dimension(seed):
    from oshimalab import build_group

    G = build_group("sl3r")
    t = random_t(np.random.default_rng(seed), 2)
    h = h_t_basis(G, t)
    assert h.dim == G.k_space.dim
    assert bracket_closure_residual(h) < 1e-9
    r, total = transversality_rank(G, t)
    assert r == G.dim_g


def test_a_action_examples(sl2, sl3):
    a = np.diag([2.0, 0.5])
    assert np.allclose(a_action(sl2, a, [1.0]), [4.0])
    assert np.allclose(a_action(sl3, np.eye(3), [0.3, -2.0]), [0.3, -2.0])
    assert np.allclose(a_weights(sl3, np.diag([2.0, 1.0, 0.5])), [2.0, 2.0])


@given(seeds)
def test_equivariance(seed):
    from oshimalab import build_group

    G = build_group("sl3r")
    rng = np.random.default_rng(seed)
    t = random_t(rng, 2)
    a = G.a_from_coords(rng.uniform(-1, 1, 2))
    assert subspace_distance(h_t_basis(G, a_action(G, a, t)), h_t_basis(G, t).conjugate(a)) < 1e-9


def test_a_with_weights_inverts_weights(sl3):
    a = a_with_weights(sl3, [3.0, 0.25])
    assert np.allclose(a_weights(sl3, a), [3.0, 0.25])
    s = section(sl3, [-2.0, 0.0])
    assert np.allclose(a_weights(sl3, s), [2.0, 1.0])


def test_nah_examples(sl2):
    n, a, h = nah_factorize(sl2, np.array([[1.0, 0.0], [1.0, 1.0]]), [1.0])
    s = np.sqrt(2)
    assert np.allclose(n, [[1, 0.5], [0, 1]])
    assert np.allclose(a, np.diag([1 / s, s]))
    assert np.allclose(h @ h.T, np.eye(2))
    k = rot(0.7)
    n, a, h = nah_factorize(sl2, k, [1.0])
    assert np.allclose(n, np.eye(2)) and np.allclose(a, np.eye(2)) and np.allclose(h, k)
    g = np.diag([3.0, 1 / 3])
    for t in ([0.4], [-2.0]):
        n, a, h = nah_factorize(sl2, g, t)
        assert np.allclose(n, np.eye(2)) and np.allclose(a, g) and np.allclose(h, np.eye(2))


@pytest.mark.parametrize("fixture", ["sl2", "sl3", "sl4"])
def test_nah_reconstructs_for_every_pattern(fixture, request, rng):
    G = request.getfixturevalue(fixture)
    for signs in sign_patterns(G.roots.rank):
        t = random_t(rng, G.roots.rank, signs)
        g = scipy.linalg.expm(0.5 * np.tensordot(rng.normal(size=G.dim_g), G.algebra_basis, axes=(0, 0)))
        n, a, h = nah_factorize(G, g, t)
        assert np.allclose(n @ a @ h, g, atol=1e-9)
        assert np.allclose(np.tril(n, -1), 0) and np.allclose(np.diag(n), 1)
        assert np.allclose(a, np.diag(np.diag(a))) and np.all(np.diag(a) > 0)
        assert subgroup_membership(G, h, t)


def test_nah_outside_cell(sl2):
    with pytest.raises(NotInCell):
        nah_factorize(sl2, np.array([[0.0, 1.0], [-1.0, 0.0]]), [0.0])


def test_block_udl(rng):
    g = rng.normal(size=(4, 4))
    U, D, L = block_udl(g, ((0, 1), (2, 3)))
    assert np.allclose(U @ D @ L, g)
    assert np.allclose(D[:2, 2:], 0) and np.allclose(D[2:, :2], 0)


def test_membership_examples(sl2):
    assert subgroup_membership(sl2, rot(1.1), [1.0])
    assert not subgroup_membership(sl2, np.diag([2.0, 0.5]), [1.0])
    for s in (-3.0, 0.5, 7.0):
        assert in_h_I(sl2, np.array([[-1.0, 0.0], [s, -1.0]]), ())
        assert subgroup_membership(sl2, np.array([[1.0, 0.0], [s, 1.0]]), [0.0])
    assert not subgroup_membership(sl2, np.array([[1.0, 1.0], [0.0, 1.0]]), [0.0])


def test_membership_sl2_explicit_oracle(sl2):
    # H_t = {[[c, -t^2 s], [s, c]] : c^2 + t^2 s^2 = 1}
    for t in (0.3, 1.0, 2.5, -1.7):
        for phi in np.linspace(0, 2 * np.pi, 13):
            c, s = np.cos(phi), np.sin(phi) / abs(t)
            x = np.array([[c, -t * t * s], [s, c]])
            assert subgroup_membership(sl2, x, [t])
        assert not subgroup_membership(sl2, np.array([[1.0, 0.0], [1.0, 1.0]]), [t])


@given(seeds)
def test_h_words_are_members(seed):
    from oshimalab import build_group

    G = build_group("sl3r")
    rng = np.random.default_rng(seed)
    t = random_t(rng, 2)
    x = random_h_word(G, t, rng)
    assert subgroup_membership(G, x, t)
    g = scipy.linalg.expm(0.3 * np.tensordot(rng.normal(size=8), G.algebra_basis, axes=(0, 0)))
    assert subgroup_membership(G, g @ x @ np.linalg.inv(g), t, g=g)


def test_h_word_identity(sl2):
    assert np.allclose(h_word(sl2, [0.0], np.zeros((2, 1))), np.eye(2))


def test_sampled_subgroup_points_are_members(sl3):
    t = np.array([0.5, 0.0])
    pts = sampled_subgroup(sl3, t).raw_points(radius=3.0, step=0.5)
    assert np.allclose(pts[0], np.eye(3))
    sel = pts[:: max(1, len(pts) // 50)]
    assert all(subgroup_membership(sl3, x, t) for x in sel)


def test_h_t_basis_orthonormal(sl3):
    h = h_t_basis(sl3, [0.7, -1.2])
    assert isinstance(h, Subalgebra)
    f = h.flat()
    assert np.allclose(f @ f.T, np.eye(h.dim))
