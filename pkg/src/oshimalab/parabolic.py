"""Standard parabolic data attached to subsets I of the simple roots."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnknownRoot, Unsupported
from .linalg import (
    Subalgebra,
    bracket_closure_residual,
    bracket_into_residual,
    intersection,
    null_space,
    numerical_rank,
    orth,
    subspace_sum,
)


def normalize_subset(G, I):
    """Turn "a1,a2", [0, 1], {"a2"} ... into a sorted tuple of simple-root indices."""
    rank = G.roots.rank
    if I is None:
        return ()
    if isinstance(I, str):
        s = I.strip().lower()
        if s in ("", "none", "empty", "{}", "-"):
            return ()
        if s in ("all", "sigma"):
            return tuple(range(rank))
        items = [p.strip() for p in s.split(",") if p.strip()]
    else:
        items = list(I)
    out = set()
    for item in items:
        if isinstance(item, str):
            if not (item.startswith("a") and item[1:].isdigit()):
                raise UnknownRoot(f"cannot parse simple root {item!r}; use a1, a2, ...")
            k = int(item[1:]) - 1
        else:
            k = int(item)
        if not 0 <= k < rank:
            raise UnknownRoot(f"simple root index {k} out of range for rank {rank}")
        out.add(k)
    return tuple(sorted(out))


def all_subsets(G):
    rank = G.roots.rank
    return [tuple(i for i in range(rank) if mask >> i & 1) for mask in range(2**rank)]


def subset_label(I):
    return ",".join(f"a{i + 1}" for i in I) if I else "{}"


def supported_in(root, I):
    """True iff the root vanishes on a_I, i.e. its coefficients live on I."""
    return all(c == 0 for k, c in enumerate(root.coeffs) if k not in I)


def sl_blocks(G, I):
    """Block partition of {0..n-1} for SL(n,R): alpha_i in I glues i and i+1."""
    if not G.is_sl:
        raise Unsupported("block structure is only defined for SL(n,R) backends")
    blocks = [[0]]
    for i in range(1, G.n):
        if (i - 1) in I:
            blocks[-1].append(i)
        else:
            blocks.append([i])
    return [tuple(b) for b in blocks]


@dataclass(frozen=True, eq=False)
class ParabolicDatum:
    I: tuple
    a_I: Subalgebra
    m_I: Subalgebra
    n_I: Subalgebra
    nbar_I: Subalgebra
    k_I: Subalgebra
    h_I: Subalgebra
    p_I: Subalgebra
    m_reps: tuple
    blocks: tuple | None = None

    @property
    def l_I(self):
        return subspace_sum(self.m_I, self.a_I, closed=True, name="l_I")

    def dims(self):
        return {
            "a_I": self.a_I.dim,
            "m_I": self.m_I.dim,
            "n_I": self.n_I.dim,
            "k_I": self.k_I.dim,
            "h_I": self.h_I.dim,
            "p_I": self.p_I.dim,
        }

    def check(self, G, tol=1e-9):
        """Residuals of the structural invariants (all should be ~0)."""
        res = {}
        res["p_direct_sum"] = float(self.m_I.dim + self.a_I.dim + self.n_I.dim - self.p_I.dim)
        res["h_direct_sum"] = float(self.k_I.dim + self.nbar_I.dim - self.h_I.dim)
        res["k_normalizes_nbar"] = bracket_into_residual(self.k_I, self.nbar_I, self.nbar_I)
        for name in ("m_I", "n_I", "h_I", "p_I"):
            res[f"{name}_closed"] = bracket_closure_residual(getattr(self, name))
        return res


def _a_subspaces(G, I):
    R = G.roots
    S = R.simple_matrix()
    r = G.dim_a
    ker = null_space(S[list(I)]) if I else np.eye(r)  # a-coordinates of a_I
    gram_a = np.einsum("iab,jba->ij", G.a_basis, G.a_basis) if G.is_sl else _form_on_a(G)
    perp = null_space(ker @ gram_a) if ker.shape[0] else np.eye(r)
    to_mats = lambda c: np.tensordot(c, G.a_basis, axes=(1, 0)) if c.shape[0] else np.zeros((0, G.n, G.n))
    return ker, to_mats(ker), to_mats(perp)


def _form_on_a(G):
    c = G.coords(G.a_basis)
    return c @ G.form_matrix @ c.T


def parabolic_datum(G, I) -> ParabolicDatum:
    I = normalize_subset(G, I)
    R = G.roots
    n = G.n
    _, a_I_mats, a_perp_mats = _a_subspaces(G, I)
    levi_roots = [r.space for r in R.roots if supported_in(r, I)]
    nil_roots = [r.space for r in R.positive if not supported_in(r, I)]
    empty = np.zeros((0, n, n))

    def cat(parts):
        parts = [p for p in parts if p.shape[0]]
        return np.concatenate(parts) if parts else empty

    a_I = Subalgebra(orth(a_I_mats, n=n), closed=True, name="a_I")
    m_I = Subalgebra(orth(cat([R.m_basis, a_perp_mats] + levi_roots), n=n), closed=True, name="m_I")
    n_I = Subalgebra(orth(cat(nil_roots), n=n), closed=True, name="n_I")
    nbar_I = Subalgebra(orth(G.theta(n_I.basis), n=n) if n_I.dim else empty, closed=True, name="nbar_I")
    k_I = intersection(G.k_space, m_I, rtol=G.tol.rank)
    k_I = Subalgebra(k_I.basis, closed=True, name="k_I")
    h_I = subspace_sum(k_I, nbar_I, closed=True, name="h_I")
    p_I = subspace_sum(m_I, a_I, n_I, closed=True, name="p_I")
    blocks = tuple(sl_blocks(G, I)) if G.is_sl else None
    return ParabolicDatum(I, a_I, m_I, n_I, nbar_I, k_I, h_I, p_I, tuple(G.m_reps), blocks)


def normalizer_subalgebra(G, h: Subalgebra, rtol=None) -> Subalgebra:
    """{X in g : [X, h] is contained in h}, as the kernel of X -> ([X, h_j] mod h)_j."""
    rtol = G.tol.rank if rtol is None else rtol
    basis = G.algebra_basis
    if h.dim == 0:
        return Subalgebra(orth(basis), closed=True, name="normalizer")
    br = np.einsum("iab,jbc->ijac", basis, h.basis) - np.einsum("jab,ibc->ijac", h.basis, basis)
    br = br.reshape(G.dim_g, -1, G.n, G.n)
    off = br - h.project(br.reshape(-1, G.n, G.n)).reshape(br.shape)
    L = off.reshape(G.dim_g, -1).T
    ker = null_space(L, rtol=rtol, atol=rtol * max(1.0, float(np.linalg.norm(br))))
    if ker.shape[0] == 0:
        return Subalgebra(np.zeros((0, G.n, G.n)), closed=True, name="normalizer")
    return Subalgebra.span(G.from_coords(ker), closed=True, name="normalizer", rtol=rtol)


def is_ad_nilpotent(G, x, tol=None) -> bool:
    """ad_x nilpotent, tested via power sums: |tr (ad_x / |ad_x|)^k| <= tol for k = 1..dim g.

    Power sums determine the characteristic polynomial and stay well
    conditioned, unlike |ad^dim g|, which underflows for small eigenvalues.
    """
    tol = G.tol.alg if tol is None else tol
    ad = G.ad(x)
    nrm = np.linalg.norm(ad, 2)
    if nrm == 0.0:
        return True
    m = ad / nrm
    p = np.eye(m.shape[0])
    for _ in range(G.dim_g):
        p = p @ m
        if abs(np.trace(p)) > tol:
            return False
    return True


def dimension_of_normalizer(G, I):
    P = parabolic_datum(G, I)
    N = normalizer_subalgebra(G, P.h_I)
    return N.dim, P.a_I.dim + P.h_I.dim


__all__ = [
    "ParabolicDatum",
    "parabolic_datum",
    "normalizer_subalgebra",
    "is_ad_nilpotent",
    "normalize_subset",
    "all_subsets",
    "subset_label",
    "supported_in",
    "sl_blocks",
    "dimension_of_normalizer",
]
