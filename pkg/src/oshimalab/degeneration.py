"""The deformation family h_t / H_t, the A-action on R^Sigma and NAH factorization.

For t in R^Sigma with support I = {alpha : t_alpha != 0} we use the section
s_t in A with s_t^alpha = |t_alpha| on I and 1 off I.  Then
H_t = s_t H_I s_t^{-1}, which for nondegenerate t is a_{|t|} K a_{|t|}^{-1}.
All group-level operations reduce to H_I through this conjugation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import CenterAmbiguity, NotInCell, UnknownRoot, Unsupported
from .lie import nak
from .linalg import Subalgebra
from .parabolic import sl_blocks


def as_t(G, t):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.shape != (G.roots.rank,):
        raise ValueError(f"t must have {G.roots.rank} entries, got {t.shape}")
    if not np.all(np.isfinite(t)):
        raise ValueError("t must be finite")
    return t


def sign_vector(t):
    return tuple(int(s) for s in np.sign(np.asarray(t, dtype=float)))


def support(t):
    """I = {alpha : t_alpha != 0} as a tuple of simple-root indices."""
    return tuple(int(i) for i in np.flatnonzero(np.asarray(t, dtype=float) != 0.0))


def t_pow_2gamma(t, root) -> float:
    """prod_alpha t_alpha^(2 n_{gamma,alpha}) with 0^0 = 1."""
    coeffs = getattr(root, "coeffs", root)
    coeffs = tuple(int(c) for c in coeffs)
    t = np.asarray(t, dtype=float)
    if len(coeffs) != t.shape[0] or any(c < 0 for c in coeffs) or sum(coeffs) == 0:
        raise UnknownRoot(f"{coeffs} is not a positive root for this parameter")
    out = 1.0
    for ta, c in zip(t, coeffs):
        if c:
            out *= ta ** (2 * c)
    return out


# ---------------------------------------------------------------------------
# Lie algebra level


def h_t_generators(G, t):
    """The natural spanning set m_basis + {t^{2 gamma} X + theta(X)}."""
    t = as_t(G, t)
    R = G.roots
    gens = list(R.m_basis)
    for root in R.positive:
        w = t_pow_2gamma(t, root)
        for X in root.space:
            gens.append(w * X + G.theta(X))
    return np.array(gens)


def h_t_basis(G, t) -> Subalgebra:
    return Subalgebra.span(h_t_generators(G, t), closed=True, name="h_t", n=G.n)


def split_k_n(G, t):
    """(k_t, n_t): the part of h_t with t^{2 gamma} != 0 and the root spaces with it = 0."""
    t = as_t(G, t)
    R = G.roots
    k_parts, n_parts = list(R.m_basis), []
    for root in R.positive:
        w = t_pow_2gamma(t, root)
        for X in root.space:
            if w != 0.0:
                k_parts.append(w * X + G.theta(X))
            else:
                n_parts.append(X)
    k_t = Subalgebra.span(np.array(k_parts).reshape(-1, G.n, G.n), closed=True, name="k_t", n=G.n)
    n_t = Subalgebra.span(np.array(n_parts).reshape(-1, G.n, G.n), closed=True, name="n_t", n=G.n)
    return k_t, n_t


# ---------------------------------------------------------------------------
# A and its action on R^Sigma


def a_weights(G, a):
    """(a^alpha)_alpha = exp(alpha(log a)) for the simple roots."""
    return np.exp(G.roots.simple_matrix() @ G.a_coords(a))


def a_action(G, a, t):
    return a_weights(G, a) * as_t(G, t)


def a_with_weights(G, weights):
    """The element a in A with a^alpha = weights[alpha] (unique for compact center)."""
    S = G.roots.simple_matrix()
    if S.shape[0] != S.shape[1]:
        raise CenterAmbiguity("a_t is not unique: the group has noncompact center")
    w = np.asarray(weights, dtype=float)
    return G.a_from_coords(np.linalg.solve(S, np.log(w)))


def section(G, t):
    """s_t with s_t^alpha = |t_alpha| where t_alpha != 0 and 1 elsewhere."""
    t = as_t(G, t)
    w = np.where(t != 0.0, np.abs(t), 1.0)
    return a_with_weights(G, w)


def random_a(G, rng, scale=1.0):
    return G.a_from_coords(rng.uniform(-scale, scale, size=G.dim_a))


# ---------------------------------------------------------------------------
# group level: NAH factorization and membership


def block_udl(g, blocks, cond_cap=1e10):
    """g = U D L with U block upper unipotent, D block diagonal, L block lower unipotent."""
    n = g.shape[0]
    U, L, D = np.eye(n), np.eye(n), np.zeros((n, n))
    cur = np.array(g, dtype=float)
    for k in range(len(blocks) - 1, -1, -1):
        b = list(blocks[k])
        rest = [i for blk in blocks[:k] for i in blk]
        Dk = cur[np.ix_(b, b)]
        if np.linalg.cond(Dk) > cond_cap:
            raise NotInCell("element is outside the open cell N A H_I (singular pivot block)")
        D[np.ix_(b, b)] = Dk
        if not rest:
            break
        B = cur[np.ix_(rest, b)]
        C = cur[np.ix_(b, rest)]
        X = np.linalg.solve(Dk.T, B.T).T  # B Dk^{-1}
        Y = np.linalg.solve(Dk, C)  # Dk^{-1} C
        U[np.ix_(rest, b)] = X
        L[np.ix_(b, rest)] = Y
        cur = cur[np.ix_(rest, rest)] - X @ C
    return U, D, L


def nah_I(G, g, I):
    """g = n a h with h in H_I = K_I N_I-bar (SL(n,R) only)."""
    blocks = sl_blocks(G, I)
    U, D, L = block_udl(np.asarray(g, dtype=float), blocks)
    n_mat = np.zeros_like(D)
    a_mat = np.zeros_like(D)
    k_mat = np.zeros_like(D)
    for b in blocks:
        idx = np.ix_(b, b)
        nb, ab, kb = nak(D[idx])
        n_mat[idx], a_mat[idx], k_mat[idx] = nb, ab, kb
    return U @ n_mat, a_mat, k_mat @ L


def nah_factorize(G, g, t):
    """g = n a h with n in N, a in A, h in H_t."""
    if not G.is_sl:
        raise Unsupported("NAH factorization is implemented for SL(n,R) backends")
    t = as_t(G, t)
    g = np.asarray(g, dtype=float)
    s = section(G, t)
    sinv = np.diag(1.0 / np.diag(s))
    n, a1, h1 = nah_I(G, g @ s, support(t))
    return n, a1 @ sinv, s @ h1 @ sinv


def in_h_I(G, z, I, tol=1e-8):
    """Membership in H_I: block lower triangular with orthogonal diagonal blocks, det 1."""
    blocks = sl_blocks(G, I)
    scale = max(1.0, float(np.linalg.norm(z)))
    for i, bi in enumerate(blocks):
        for bj in blocks[i + 1 :]:
            if np.linalg.norm(z[np.ix_(bi, bj)]) > tol * scale:
                return False
        blk = z[np.ix_(bi, bi)]
        if np.linalg.norm(blk.T @ blk - np.eye(len(bi))) > tol * max(1.0, np.linalg.norm(blk) ** 2):
            return False
    return abs(np.linalg.det(z) - 1.0) <= tol * scale**G.n


def subgroup_membership(G, x, t, g=None, tol=1e-8) -> bool:
    """True iff g^{-1} x g lies in H_t (g defaults to the identity)."""
    if not G.is_sl:
        raise Unsupported("group-level membership needs an SL(n,R) backend")
    t = as_t(G, t)
    x = np.asarray(x, dtype=float)
    if g is not None:
        g = np.asarray(g, dtype=float)
        x = np.linalg.solve(g, x @ g)
    s = section(G, t)
    d = np.diag(s)
    z = (x / d[:, None]) * d[None, :]  # s^{-1} x s
    return in_h_I(G, z, support(t), tol=tol)


def h_word(G, t, coeffs, m_index=0):
    """m * exp(Y_1) ... exp(Y_k), Y_j = sum_i coeffs[j][i] * (normalized h_t generator i)."""
    gens = normalized_generators(G, t)
    out = np.array(G.m_reps[m_index % len(G.m_reps)], dtype=float)
    for c in np.atleast_2d(np.asarray(coeffs, dtype=float)):
        out = out @ scipy.linalg.expm(np.tensordot(c, gens, axes=(0, 0)))
    return out


def normalized_generators(G, t):
    gens = h_t_generators(G, t)
    return gens / np.linalg.norm(gens.reshape(gens.shape[0], -1), axis=1)[:, None, None]


def random_h_word(G, t, rng, length=3, scale=1.0):
    k = normalized_generators(G, t).shape[0]
    coeffs = rng.uniform(-scale, scale, size=(length, k))
    return h_word(G, t, coeffs, m_index=int(rng.integers(len(G.m_reps))))


def transversality_rank(G, t):
    """rank of h_t + a + n; equals dim g exactly when h_t, a, n are complementary."""
    from .linalg import numerical_rank

    n_basis = [X for r in G.roots.positive for X in r.space]
    stack = np.concatenate([h_t_basis(G, t).basis, G.a_space.basis, np.array(n_basis)])
    return numerical_rank(stack), stack.shape[0]


# ---------------------------------------------------------------------------
# sampled subgroups (input to the Fell laboratory)


@dataclass(frozen=True, eq=False)
class SampledSubgroup:
    """Deterministic description of a net of H_t.

    Points are M-representatives times (i) one-parameter lines exp(sY) on a
    uniform grid of s and (ii) words of length <= word_length in exp(cY) with
    c drawn from ``grid``; Y runs over the unit-normalized natural generators
    of h_t, so the samples depend continuously on t.
    """

    t: np.ndarray
    generators: np.ndarray
    m_reps: tuple
    word_length: int = 3
    grid: tuple = (0.25, 0.5, 1.0)
    line_step: float | None = None
    n_random: int = 0
    conjugator: np.ndarray | None = field(default=None)

    def raw_points(self, radius, step, seed=42):
        gens = self.generators
        n = gens.shape[-1]
        line_step = self.line_step or step
        chunks = [np.eye(n)[None]]
        s = np.arange(-radius, radius + 0.5 * line_step, line_step)
        s = s[s != 0.0]
        for Y in gens:
            chunks.append(scipy.linalg.expm(s[:, None, None] * Y[None]))
        cs = np.array(sorted({sign * c for c in self.grid for sign in (1.0, -1.0)}))
        letters = scipy.linalg.expm((cs[None, :, None, None] * gens[:, None]).reshape(-1, n, n))
        words = [np.eye(n)[None]]
        level = np.eye(n)[None]
        for _ in range(self.word_length):
            level = np.einsum("wab,lbc->wlac", level, letters).reshape(-1, n, n)
            norms = np.linalg.norm(level, axis=(1, 2))
            level = level[norms <= 4.0 * np.sqrt(n) * radius]
            words.append(level)
        chunks.extend(words[1:])
        if self.n_random:
            rng = np.random.default_rng(seed)
            for _ in range(self.n_random):
                c = rng.uniform(-1.0, 1.0, size=(self.word_length, gens.shape[0]))
                w = np.eye(n)
                for row in c:
                    w = w @ scipy.linalg.expm(np.tensordot(row, gens, axes=(0, 0)))
                chunks.append(w[None])
        base = np.concatenate(chunks)
        pts = np.concatenate([np.asarray(m) @ base for m in self.m_reps])
        if self.conjugator is not None:
            g = self.conjugator
            pts = g @ pts @ np.linalg.inv(g)
        return pts


def sampled_subgroup(G, t, word_length=3, grid=(0.25, 0.5, 1.0), n_random=0, conjugator=None):
    t = as_t(G, t)
    return SampledSubgroup(
        t=t,
        generators=normalized_generators(G, t),
        m_reps=tuple(np.asarray(m, dtype=float) for m in G.m_reps),
        word_length=word_length,
        grid=tuple(grid),
        n_random=n_random,
        conjugator=conjugator,
    )


def sign_patterns(rank):
    return list(itertools.product((-1, 0, 1), repeat=rank))


def random_t(rng, rank, pattern=None, low=0.2, high=3.0):
    """Random parameter with a given sign pattern (random pattern if None)."""
    if pattern is None:
        pattern = rng.integers(-1, 2, size=rank)
    mags = rng.uniform(low, high, size=rank)
    return np.asarray(pattern, dtype=float) * mags
