"""Matrix Lie algebra substrate: Cartan data, restricted roots, KAN/NAK/KAK.

The built-in backends are SL(n, R) with theta(X) = -X^T, B(X, Y) = tr(XY),
a = traceless diagonals and K = SO(n).  Raw algebra data can be supplied
as well; it is validated but only the Lie-algebra level operations are
available for it.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import (
    InvalidCartanData,
    NonSemisimpleAction,
    NotInA,
    NotInGroup,
    NumericalBreakdown,
    UnsupportedGroup,
)
from .linalg import Subalgebra, bracket, null_space, numerical_rank, orth


@dataclass(frozen=True)
class Tolerances:
    alg: float = 1e-10
    fact: float = 1e-9
    int: float = 1e-6
    cluster: float = 1e-8
    rank: float = 1e-8
    cond_cap: float = 1e12


# ---------------------------------------------------------------------------
# group data


@dataclass(frozen=True, eq=False)
class ReductiveGroupData:
    name: str
    family: str  # "sl" or "raw"
    n: int
    algebra_basis: np.ndarray  # (d, n, n)
    theta_matrix: np.ndarray  # (d, d), acts on basis coordinates
    form_matrix: np.ndarray  # (d, d) Gram matrix of B
    a_basis: np.ndarray  # (r, n, n)
    positivity_basis: np.ndarray  # (q, r) rows are elements of a in a_basis coords
    m_reps: tuple = ()
    tol: Tolerances = field(default_factory=Tolerances)

    @property
    def dim_g(self):
        return int(self.algebra_basis.shape[0])

    @property
    def dim_a(self):
        return int(self.a_basis.shape[0])

    @property
    def is_sl(self):
        return self.family == "sl"

    @cached_property
    def _coord_pinv(self):
        return np.linalg.pinv(self.algebra_basis.reshape(self.dim_g, -1))

    def coords(self, x):
        """Coordinates of a matrix (or stack) in the algebra basis."""
        x = np.asarray(x, dtype=float)
        flat = x.reshape(*x.shape[:-2], -1)
        return flat @ self._coord_pinv

    def from_coords(self, c):
        return np.tensordot(np.asarray(c, dtype=float), self.algebra_basis, axes=(-1, 0))

    def theta(self, x):
        if self.is_sl:
            return -np.swapaxes(np.asarray(x, dtype=float), -1, -2)
        return self.from_coords(self.coords(x) @ self.theta_matrix.T)

    def form(self, x, y):
        return float(self.coords(x) @ self.form_matrix @ self.coords(y))

    def ad(self, x):
        """Matrix of ad_x in basis coordinates (columns are images of basis vectors)."""
        images = bracket(np.asarray(x, dtype=float), self.algebra_basis)
        return self.coords(images).T

    @cached_property
    def algebra(self):
        return Subalgebra(orth(self.algebra_basis), closed=True, name="g")

    @cached_property
    def k_space(self):
        return _eigenspace(self, +1.0, "k")

    @cached_property
    def p_space(self):
        return _eigenspace(self, -1.0, "p")

    @cached_property
    def a_space(self):
        return Subalgebra(orth(self.a_basis), closed=True, name="a")

    @cached_property
    def inner_gram(self):
        """Gram matrix of the Cartan inner product -B(X, theta Y) in coordinates."""
        return -self.form_matrix @ self.theta_matrix

    @cached_property
    def roots(self):
        return restricted_root_decomposition(self)

    def k_membership(self, x, tol=None):
        if not self.is_sl:
            raise UnsupportedGroup("K membership predicate is only available for SL(n,R)")
        tol = self.tol.fact if tol is None else tol
        x = np.asarray(x, dtype=float)
        ok = np.linalg.norm(x.T @ x - np.eye(self.n)) <= tol * max(1.0, np.linalg.norm(x) ** 2)
        return bool(ok and abs(np.linalg.det(x) - 1.0) <= tol * 10)

    @cached_property
    def weyl_reps(self):
        """Signed permutation matrices of determinant one, identity first."""
        if not self.is_sl:
            return (np.eye(self.n),)
        reps = []
        for perm in itertools.permutations(range(self.n)):
            w = np.eye(self.n)[list(perm)]
            if np.linalg.det(w) < 0:
                w[0] *= -1.0
            reps.append(w)
        return tuple(reps)

    # -- A ------------------------------------------------------------------

    def a_coords(self, a):
        """Coordinates (in a_basis) of log(a) for a in A."""
        a = np.asarray(a, dtype=float)
        if self.is_sl:
            if np.linalg.norm(a - np.diag(np.diag(a))) > self.tol.fact * max(1.0, np.linalg.norm(a)):
                raise NotInA("element of A must be diagonal")
            d = np.diag(a)
            if np.any(d <= 0):
                raise NotInA("element of A must have positive diagonal")
            log_a = np.diag(np.log(d))
        else:
            log_a = np.real(scipy.linalg.logm(a))
        flat_basis = self.a_basis.reshape(self.dim_a, -1)
        c, *_ = np.linalg.lstsq(flat_basis.T, log_a.ravel(), rcond=None)
        if np.linalg.norm(flat_basis.T @ c - log_a.ravel()) > 1e-8 * max(1.0, np.linalg.norm(log_a)):
            raise NotInA("log(a) is not in the span of a")
        return c

    def a_from_coords(self, c):
        x = np.tensordot(np.asarray(c, dtype=float), self.a_basis, axes=(0, 0))
        if self.is_sl:
            return np.diag(np.exp(np.diag(x)))
        return scipy.linalg.expm(x)


def _eigenspace(G, sign, name):
    w, v = np.linalg.eig(G.theta_matrix)
    cols = v[:, np.abs(w - sign) < 1e-6].real
    if cols.shape[1] == 0:
        return Subalgebra(np.zeros((0, G.n, G.n)), closed=(sign > 0), name=name)
    return Subalgebra(orth(G.from_coords(cols.T)), closed=(sign > 0), name=name)


def _sl_basis(n):
    basis = []
    for i in range(n):
        for j in range(n):
            if i != j:
                e = np.zeros((n, n))
                e[i, j] = 1.0
                basis.append(e)
    diag = []
    for i in range(n - 1):
        h = np.zeros((n, n))
        h[i, i], h[i + 1, i + 1] = 1.0, -1.0
        diag.append(h)
    return np.array(basis + diag), np.array(diag)


def _sl_group(n, tol):
    if n < 2:
        raise UnsupportedGroup("sl(n, R) needs n >= 2")
    basis, a_basis = _sl_basis(n)
    d = basis.shape[0]
    flat = basis.reshape(d, -1)
    pinv = np.linalg.pinv(flat)
    theta = (-np.swapaxes(basis, 1, 2)).reshape(d, -1) @ pinv
    form = np.einsum("iab,jba->ij", basis, basis)
    # regular element diag(n-1, n-3, ..., 1-n) first so that lex order picks
    # the upper triangular roots as positive
    reg = np.diag(np.arange(n - 1, -n, -2, dtype=float))
    reg_c, *_ = np.linalg.lstsq(a_basis.reshape(n - 1, -1).T, reg.ravel(), rcond=None)
    positivity = np.vstack([reg_c, np.eye(n - 1)])
    m_reps = []
    for signs in itertools.product([1.0, -1.0], repeat=n):
        if np.prod(signs) > 0:
            m_reps.append(np.diag(signs))
    return ReductiveGroupData(
        name=f"sl{n}r",
        family="sl",
        n=n,
        algebra_basis=basis,
        theta_matrix=theta.T,
        form_matrix=form,
        a_basis=a_basis,
        positivity_basis=positivity,
        m_reps=tuple(m_reps),
        tol=tol,
    )


def _parse_spec(spec):
    if isinstance(spec, str):
        s = spec.strip()
        if s.startswith("{"):
            return json.loads(s)
        s = s.lower()
        if s.startswith("sl") and s.endswith("r") and s[2:-1].isdigit():
            return {"family": "sl", "n": int(s[2:-1])}
        raise UnsupportedGroup(f"unknown group name {spec!r}")
    if isinstance(spec, dict):
        return spec
    raise UnsupportedGroup(f"cannot interpret group spec {spec!r}")


def build_group(spec, tol=None) -> ReductiveGroupData:
    """Build and validate a group from a name ("sl3r"), a dict or a JSON string.

    Accepted forms: ``{"family": "sl", "n": 3}`` or
    ``{"raw": {"basis": ..., "theta_matrix": ..., "form_matrix": ..., "a_basis": ...}}``.
    """
    tol = tol or Tolerances()
    spec = _parse_spec(spec)
    if "raw" in spec:
        G = _raw_group(spec["raw"], tol, spec.get("name", "raw"))
    elif spec.get("family") == "sl":
        G = _sl_group(int(spec.get("n", 0)), tol)
    else:
        raise UnsupportedGroup(f"unsupported family {spec.get('family')!r}")
    validate_group(G)
    return G


def _raw_group(raw, tol, name):
    try:
        basis = np.asarray(raw["basis"], dtype=float)
        theta = np.asarray(raw["theta_matrix"], dtype=float)
        form = np.asarray(raw["form_matrix"], dtype=float)
        a_basis = np.asarray(raw["a_basis"], dtype=float)
    except KeyError as exc:
        raise InvalidCartanData(f"raw group data is missing {exc}") from None
    if basis.ndim != 3 or basis.shape[1] != basis.shape[2]:
        raise InvalidCartanData("basis must be a list of square matrices")
    d, n = basis.shape[0], basis.shape[1]
    if theta.shape != (d, d) or form.shape != (d, d):
        raise InvalidCartanData("theta_matrix and form_matrix must be dim_g x dim_g")
    if a_basis.ndim == 2:
        a_basis = a_basis[None]
    positivity = np.asarray(raw.get("positivity_basis", np.eye(a_basis.shape[0])), dtype=float)
    m_reps = tuple(np.asarray(m, dtype=float) for m in raw.get("m_reps", [np.eye(n)]))
    return ReductiveGroupData(
        name=name,
        family="raw",
        n=n,
        algebra_basis=basis,
        theta_matrix=theta,
        form_matrix=form,
        a_basis=a_basis,
        positivity_basis=positivity,
        m_reps=m_reps,
        tol=tol,
    )


def validate_group(G):
    tol = G.tol.alg
    d = G.dim_g
    if numerical_rank(G.algebra_basis) != d:
        raise InvalidCartanData("algebra basis is linearly dependent")
    br = bracket(G.algebra_basis[:, None], G.algebra_basis[None])
    br = br.reshape(-1, G.n, G.n)
    if np.max(np.abs(G.from_coords(G.coords(br)) - br)) > 1e-8 * max(1.0, np.max(np.abs(br))):
        raise InvalidCartanData("algebra basis is not closed under bracket")
    th = G.theta_matrix
    if np.linalg.norm(th @ th - np.eye(d)) > tol * d:
        raise InvalidCartanData("theta is not an involution")
    # theta must be an automorphism
    tb = G.theta(G.algebra_basis)
    lhs = G.theta(br.reshape(d, d, G.n, G.n)).reshape(-1, G.n, G.n)
    rhs = bracket(tb[:, None], tb[None]).reshape(-1, G.n, G.n)
    if np.max(np.abs(lhs - rhs)) > 1e-8 * max(1.0, np.max(np.abs(rhs))):
        raise InvalidCartanData("theta does not preserve brackets")
    B = G.form_matrix
    if np.linalg.norm(B - B.T) > tol * max(1.0, np.linalg.norm(B)):
        raise InvalidCartanData("form is not symmetric")
    if np.linalg.norm(th.T @ B @ th - B) > 1e-8 * max(1.0, np.linalg.norm(B)):
        raise InvalidCartanData("form is not theta-invariant")
    for sign, want in ((+1.0, -1.0), (-1.0, +1.0)):
        w, v = np.linalg.eig(th)
        cols = v[:, np.abs(w - sign) < 1e-6].real
        if cols.shape[1] == 0:
            continue
        cols = scipy.linalg.orth(cols)
        ev = np.linalg.eigvalsh(cols.T @ B @ cols)
        if not np.all(want * ev > 0):
            raise InvalidCartanData("form has the wrong signature on a theta eigenspace")
    # a: abelian, inside p
    a = G.a_basis
    if a.shape[0] == 0:
        raise InvalidCartanData("a_basis is empty")
    if np.max(np.abs(bracket(a[:, None], a[None]))) > tol * max(1.0, np.max(np.abs(a))) ** 2:
        raise InvalidCartanData("a is not abelian")
    if np.max(np.abs(G.theta(a) + a)) > 1e-8 * max(1.0, np.max(np.abs(a))):
        raise InvalidCartanData("a is not contained in the -1 eigenspace of theta")
    return G


# ---------------------------------------------------------------------------
# restricted roots


@dataclass(frozen=True, eq=False)
class Root:
    vector: np.ndarray  # values on a_basis
    space: np.ndarray  # (k, n, n) orthonormal basis of the root space
    coeffs: tuple = ()  # simple-root coefficients n_{gamma, alpha}
    index: int = -1

    @property
    def mult(self):
        return int(self.space.shape[0])

    def __call__(self, h_coords):
        return float(np.dot(self.vector, h_coords))


@dataclass(frozen=True, eq=False)
class RestrictedRootDatum:
    positive: tuple
    negative: tuple
    simple: tuple
    m_basis: np.ndarray
    g0_basis: np.ndarray

    @property
    def rank(self):
        return len(self.simple)

    @property
    def roots(self):
        return self.positive + self.negative

    def simple_matrix(self):
        """Rows are the simple roots' values on a_basis."""
        return np.array([r.vector for r in self.simple])

    def find(self, coeffs):
        coeffs = tuple(int(c) for c in coeffs)
        for r in self.roots:
            if r.coeffs == coeffs:
                return r
        return None


def _sign_normalize(space):
    out = []
    for x in space:
        flat = x.ravel()
        k = int(np.argmax(np.abs(flat) > np.max(np.abs(flat)) * (1 - 1e-9)))
        out.append(x if flat[k] > 0 else -x)
    return np.array(out)


def restricted_root_decomposition(G: ReductiveGroupData) -> RestrictedRootDatum:
    """Joint eigenspace decomposition of ad(a) with lexicographic positivity."""
    tol = G.tol
    d = G.dim_g
    gram = G.inner_gram
    gram = 0.5 * (gram + gram.T)
    try:
        L = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError:
        raise InvalidCartanData("Cartan inner product is not positive definite") from None
    Linv_T = np.linalg.inv(L).T
    sym = []
    for h in G.a_basis:
        S = L.T @ G.ad(h) @ Linv_T
        if np.linalg.norm(S - S.T) > 1e-8 * max(1.0, np.linalg.norm(S)):
            raise NonSemisimpleAction("ad(a) is not self-adjoint for the Cartan inner product")
        sym.append(0.5 * (S + S.T))
    for S1, S2 in itertools.combinations(sym, 2):
        if np.linalg.norm(S1 @ S2 - S2 @ S1) > 1e-8 * max(1.0, np.linalg.norm(S1) * np.linalg.norm(S2)):
            raise NonSemisimpleAction("ad(a) elements do not commute")
    weights = 1.0 / (np.pi + np.arange(G.dim_a)) + np.sqrt(2.0 + np.arange(G.dim_a)) * 1e-1
    S_gen = sum(w * S for w, S in zip(weights, sym))
    evals, evecs = np.linalg.eigh(S_gen)
    scale = max(1.0, float(np.max(np.abs(evals))))
    clusters = [[0]]
    for i in range(1, d):
        if evals[i] - evals[clusters[-1][-1]] > tol.cluster * scale:
            clusters.append([i])
        else:
            clusters[-1].append(i)

    zero_space = None
    found = []
    for cl in clusters:
        U = evecs[:, cl]
        vals = []
        for S in sym:
            SU = S @ U
            g = float(np.trace(U.T @ SU)) / len(cl)
            if np.linalg.norm(SU - g * U) > 1e-7 * max(1.0, np.linalg.norm(S)):
                raise NonSemisimpleAction("ad(a) is not simultaneously diagonalizable")
            vals.append(g)
        vals = np.array(vals)
        coords = (Linv_T @ U).T
        mats = G.from_coords(coords)
        if np.max(np.abs(vals)) <= 1e-7 * scale:
            zero_space = mats
            continue
        vals[np.abs(vals) < 1e-9 * scale] = 0.0
        found.append((vals, _sign_normalize(orth(mats))))

    g0 = orth(zero_space) if zero_space is not None else np.zeros((0, G.n, G.n))
    m_basis = _intersect_with_k(G, g0)

    def positivity_key(v):
        coords = G.positivity_basis @ v
        for c in coords:
            if abs(c) > 1e-9 * scale:
                return 1 if c > 0 else -1
        return 0

    positive = [(v, s) for v, s in found if positivity_key(v) > 0]
    negative = [(v, s) for v, s in found if positivity_key(v) < 0]
    if len(positive) != len(negative) or len(positive) + len(negative) != len(found):
        raise NonSemisimpleAction("roots do not split into positive and negative halves")

    # simple roots: positive roots that are not a sum of two positive roots
    def is_sum(v):
        for (v1, _), (v2, _) in itertools.combinations_with_replacement(positive, 2):
            if np.linalg.norm(v1 + v2 - v) <= 1e-8 * scale:
                return True
        return False

    simple = [(v, s) for v, s in positive if not is_sum(v)]

    def position(space):
        flat = np.abs(space[0]).ravel()
        return int(np.argmax(flat > 0.5 * flat.max()))

    simple.sort(key=lambda vs: position(vs[1]))
    smat = np.array([v for v, _ in simple])
    if np.linalg.matrix_rank(smat, tol=1e-8 * scale) != len(simple):
        raise NonSemisimpleAction("simple roots are linearly dependent")

    def coefficients(v, sign):
        c, *_ = np.linalg.lstsq(smat.T, v, rcond=None)
        if np.linalg.norm(smat.T @ c - v) > 1e-8 * scale:
            raise NonSemisimpleAction("root is not in the span of the simple roots")
        rounded = np.round(c)
        if np.max(np.abs(c - rounded)) > tol.int or np.any(sign * rounded < 0):
            raise NonSemisimpleAction(f"root coefficients {c} are not non-negative integers")
        return tuple(int(x) for x in rounded)

    pos_roots = []
    for v, s in positive:
        pos_roots.append((coefficients(v, +1), v, s))
    # order by height, then lexicographically on coefficients (descending)
    pos_roots.sort(key=lambda item: (sum(item[0]), tuple(-c for c in item[0])))
    pos = tuple(Root(v, s, c, i) for i, (c, v, s) in enumerate(pos_roots))
    neg_list = []
    for v, s in negative:
        neg_list.append((coefficients(v, -1), v, s))
    neg_list.sort(key=lambda item: (-sum(item[0]), tuple(item[0])))
    neg = tuple(Root(v, s, c, len(pos) + i) for i, (c, v, s) in enumerate(neg_list))
    simple_roots = tuple(r for r in pos if sum(r.coeffs) == 1)
    simple_roots = tuple(sorted(simple_roots, key=lambda r: r.coeffs.index(1)))
    return RestrictedRootDatum(pos, neg, simple_roots, m_basis, g0)


def _intersect_with_k(G, g0):
    if g0.shape[0] == 0:
        return g0
    # X in g0 with theta(X) = X
    diff = (G.theta(g0) - g0).reshape(g0.shape[0], -1)
    ker = null_space(diff.T, rtol=G.tol.rank) if np.linalg.norm(diff) > 0 else np.eye(g0.shape[0])
    if ker.shape[0] == 0:
        return np.zeros((0, G.n, G.n))
    return orth(np.tensordot(ker, g0, axes=(1, 0)))


# ---------------------------------------------------------------------------
# group elements and factorizations


def check_group_element(G, g):
    g = np.asarray(g, dtype=float)
    if g.shape != (G.n, G.n):
        raise NotInGroup(f"expected a {G.n}x{G.n} matrix, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise NotInGroup("matrix has non-finite entries")
    if G.is_sl:
        det = np.linalg.det(g)
        if abs(det - 1.0) > max(G.tol.alg, 1e-9 * np.linalg.norm(g) ** G.n):
            raise NotInGroup(f"determinant {det} differs from 1")
    return g


def _reversal(n):
    return np.eye(n)[::-1]


def _positive_qr(m):
    q, r = np.linalg.qr(m)
    s = np.sign(np.diag(r))
    s[s == 0] = 1.0
    return q * s, s[:, None] * r


def kan(m):
    """m = k a n with k orthogonal, a positive diagonal, n unit upper triangular."""
    q, r = _positive_qr(m)
    diag = np.diag(r)
    return q, np.diag(diag), r / diag[:, None]


def nak(m):
    """m = n a k with n unit upper triangular, a positive diagonal, k orthogonal."""
    J = _reversal(m.shape[0])
    q, r = _positive_qr((J @ m @ J).T)
    diag = np.diag(r)
    lower = r.T / diag[None, :]
    return J @ lower @ J, J @ np.diag(diag) @ J, J @ q.T @ J


def kak(m):
    """m = k1 a k2 with a sorted ascending, i.e. in the closed negative chamber."""
    J = _reversal(m.shape[0])
    u, s, vt = np.linalg.svd(J @ m @ J)
    u, s, vt = J @ u @ J, s[::-1].copy(), J @ vt @ J
    if np.linalg.det(u) < 0:
        u[:, 0] *= -1.0
        vt[0] *= -1.0
    return u, np.diag(s), vt


def factorize(G, g, mode="KAN"):
    """Factor ``g`` as (k, a, n), (n, a, k) or (k1, a, k2) depending on ``mode``."""
    if not G.is_sl:
        raise UnsupportedGroup("matrix factorizations are implemented for SL(n,R) backends")
    g = check_group_element(G, g)
    if np.linalg.cond(g) > G.tol.cond_cap:
        raise NumericalBreakdown("condition number exceeds cap")
    mode = mode.upper()
    if mode == "KAN":
        return kan(g)
    if mode == "NAK":
        return nak(g)
    if mode == "KAK":
        return kak(g)
    raise ValueError(f"unknown factorization mode {mode!r}")


def random_sl(n, rng, scale=1.0):
    """exp of a random traceless matrix; scale controls the spread."""
    x = rng.normal(scale=scale, size=(n, n))
    x -= np.trace(x) / n * np.eye(n)
    g = scipy.linalg.expm(x)
    return g / np.linalg.det(g) ** (1.0 / n)
