"""Subspaces of matrix Lie algebras.

Everything here works on stacks of square matrices, shape ``(k, n, n)``,
flattened to vectors in R^{n*n} with the Frobenius inner product.  For the
SL(n, R) backends that inner product is exactly -B(X, theta(Y)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch

RANK_RTOL = 1e-8


def bracket(x, y):
    return x @ y - y @ x


def _flat(mats):
    mats = np.asarray(mats, dtype=float)
    if mats.ndim == 2:
        mats = mats[None]
    return mats.reshape(mats.shape[0], -1), mats.shape[-1]


def numerical_rank(mats, rtol=RANK_RTOL):
    flat, _ = _flat(mats)
    if flat.shape[0] == 0:
        return 0
    s = np.linalg.svd(flat, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def orth(mats, rtol=RANK_RTOL, n=None):
    """Orthonormal basis (Frobenius) for the span of a stack of matrices."""
    mats = np.asarray(mats, dtype=float)
    if mats.size == 0:
        if n is None:
            n = mats.shape[-1] if mats.ndim == 3 else 0
        return np.zeros((0, n, n))
    flat, n = _flat(mats)
    u, s, vt = np.linalg.svd(flat, full_matrices=False)
    if s[0] == 0.0:
        return np.zeros((0, n, n))
    r = int(np.sum(s > rtol * s[0]))
    return vt[:r].reshape(r, n, n)


def null_space(a, rtol=RANK_RTOL, atol=0.0):
    """Orthonormal basis (as rows) of the kernel of the matrix ``a``.

    Singular values at most max(rtol * s_max, atol) count as zero.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.shape[0] == 0:
        return np.eye(a.shape[1])
    u, s, vt = np.linalg.svd(a, full_matrices=True)
    if s.size == 0 or s[0] <= atol or s[0] == 0.0:
        return np.eye(a.shape[1])
    r = int(np.sum(s > max(rtol * s[0], atol)))
    return vt[r:]


@dataclass(frozen=True, eq=False)
class Subalgebra:
    """A linear subspace of gl(n) carried by an orthonormal basis.

    ``closed`` records that the subspace is claimed to be bracket-closed;
    it is a label for checks, not something enforced on construction.
    """

    basis: np.ndarray
    closed: bool = False
    name: str = ""

    @classmethod
    def span(cls, mats, closed=False, name="", rtol=RANK_RTOL, n=None):
        return cls(orth(mats, rtol=rtol, n=n), closed=closed, name=name)

    @property
    def dim(self):
        return int(self.basis.shape[0])

    @property
    def n(self):
        return int(self.basis.shape[-1])

    def flat(self):
        return self.basis.reshape(self.dim, -1)

    def project(self, x):
        x = np.asarray(x, dtype=float)
        if self.dim == 0:
            return np.zeros_like(x)
        coeffs = np.tensordot(self.basis, x, axes=([1, 2], [-2, -1]))
        return np.tensordot(coeffs, self.basis, axes=(0, 0))

    def residual(self, x):
        """Frobenius norm of the component of ``x`` orthogonal to the subspace."""
        x = np.asarray(x, dtype=float)
        return float(np.linalg.norm(x - self.project(x)))

    def contains(self, x, tol=1e-9):
        scale = max(1.0, float(np.linalg.norm(x)))
        return self.residual(x) <= tol * scale

    def conjugate(self, g):
        """Ad_g of the subspace."""
        g = np.asarray(g, dtype=float)
        ginv = np.linalg.inv(g)
        return Subalgebra.span(g @ self.basis @ ginv, closed=self.closed, n=self.n)

    def __add__(self, other):
        return subspace_sum(self, other)


def subspace_sum(*spaces, closed=False, name=""):
    mats = [s.basis for s in spaces if s.dim]
    n = spaces[0].n
    if not mats:
        return Subalgebra(np.zeros((0, n, n)), closed=closed, name=name)
    return Subalgebra.span(np.concatenate(mats), closed=closed, name=name)


def intersection(v, w, rtol=RANK_RTOL):
    """Intersection of two subspaces via the kernel of [V^T, -W^T]."""
    n = v.n
    if v.dim == 0 or w.dim == 0:
        return Subalgebra(np.zeros((0, n, n)))
    stacked = np.concatenate([v.flat(), -w.flat()]).T
    ker = null_space(stacked, rtol=rtol)
    if ker.shape[0] == 0:
        return Subalgebra(np.zeros((0, n, n)))
    vecs = ker[:, : v.dim] @ v.flat()
    return Subalgebra.span(vecs.reshape(-1, n, n), rtol=rtol)


def orthogonal_complement(v, ambient):
    """Complement of ``v`` inside ``ambient`` (Frobenius)."""
    n = ambient.n
    if v.dim == 0:
        return ambient
    coeffs = ambient.flat() @ v.flat().T  # (dim ambient, dim v)
    ker = null_space(coeffs.T)
    if ker.shape[0] == 0:
        return Subalgebra(np.zeros((0, n, n)))
    vecs = ker @ ambient.flat()
    return Subalgebra.span(vecs.reshape(-1, n, n))


def containment_residual(v, w):
    """Largest sine of the angle between a unit vector of V and the subspace W.

    Zero iff V is contained in W.
    """
    if v.dim == 0:
        return 0.0
    if w.dim == 0:
        return 1.0
    vf, wf = v.flat(), w.flat()
    off = vf - (vf @ wf.T) @ wf
    return float(np.linalg.norm(off, 2))


def subspace_distance(v, w):
    """Largest principal-angle sine between two subspaces of equal dimension."""
    if v.dim != w.dim:
        raise DimensionMismatch(f"dimensions differ: {v.dim} vs {w.dim}")
    return max(containment_residual(v, w), containment_residual(w, v))


def bracket_closure_residual(s):
    """max_{i<=j} |component of [b_i, b_j] orthogonal to s|."""
    if s.dim < 2:
        return 0.0
    b = s.basis
    br = np.einsum("iab,jbc->ijac", b, b) - np.einsum("jab,ibc->ijac", b, b)
    br = br.reshape(-1, s.n, s.n)
    off = br - s.project(br)
    return float(np.max(np.linalg.norm(off.reshape(off.shape[0], -1), axis=1)))


def bracket_into_residual(x_space, y_space, target):
    """How far [X, Y] leaves ``target`` for X, Y ranging over orthonormal bases."""
    if x_space.dim == 0 or y_space.dim == 0:
        return 0.0
    br = np.einsum("iab,jbc->ijac", x_space.basis, y_space.basis) - np.einsum(
        "jab,ibc->ijac", y_space.basis, x_space.basis
    )
    br = br.reshape(-1, target.n, target.n)
    off = br - target.project(br)
    return float(np.max(np.linalg.norm(off.reshape(off.shape[0], -1), axis=1)))
