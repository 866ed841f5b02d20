"""Property checks behind ``oshimalab verify``.

Each check returns (samples, max_residual, tolerance); an entry passes iff
max_residual <= tolerance.  Every check draws from its own generator seeded
by (seed, check_id, group), so results do not depend on execution order.
"""

from __future__ import annotations

import itertools
import time
import zlib
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.stats import special_ortho_group

from . import bgroupoid as bg
from . import degeneration as dg
from . import fell
from . import groupoid as gp
from . import oshima as osh
from .lie import Tolerances, build_group, factorize, random_sl
from .linalg import (
    Subalgebra,
    bracket,
    bracket_closure_residual,
    containment_residual,
    numerical_rank,
    subspace_distance,
)
from .parabolic import all_subsets, is_ad_nilpotent, normalizer_subalgebra, parabolic_datum

SCHEMA = "oshimalab/1"
DEFAULT_GROUPS = ("sl2r", "sl3r")


@dataclass
class Context:
    G: object
    rng: np.random.Generator
    fault: bool = False
    R: float = fell.DEFAULT_R
    eps: float = fell.DEFAULT_EPS
    seed: int = 42
    cache: dict = field(default_factory=dict)

    @property
    def tol(self) -> Tolerances:
        return self.G.tol

    @property
    def tol_alg10(self):
        return 10.0 * self.tol.alg

    def sample(self, t, R=None):
        R = self.R if R is None else R
        key = ("sample", tuple(float(v) for v in np.atleast_1d(t)), R)
        if key not in self.cache:
            self.cache[key] = fell.sample_h_t(self.G, t, R=R, eps=self.eps, seed=self.seed)
        return self.cache[key]

    def window_distance(self, t, t_lim):
        key = ("dist", tuple(map(float, t)), tuple(map(float, t_lim)))
        if key not in self.cache:
            self.cache[key] = fell.local_hausdorff(self.sample(t), self.sample(t_lim))
        return self.cache[key]


def t_samples(G, rng, count):
    """All sign patterns first, then random sign patterns, magnitudes in [0.2, 3]."""
    rank = G.roots.rank
    pats = dg.sign_patterns(rank)
    out = [dg.random_t(rng, rank, p) for p in pats]
    while len(out) < count:
        out.append(dg.random_t(rng, rank))
    return out[:count]


def random_a(G, rng, scale=1.0):
    return G.a_from_coords(rng.uniform(-scale, scale, size=G.dim_a))


def _fault_noise(G, k):
    noise = np.random.default_rng(12345).normal(size=(k, G.n, G.n))
    return 1e-3 * (noise - np.trace(noise, axis1=1, axis2=2)[:, None, None] / G.n * np.eye(G.n))


def h_space(ctx, t):
    """h_t; with fault injection the generators receive a fixed perturbation."""
    gens = dg.h_t_generators(ctx.G, t)
    if ctx.fault:
        gens = gens + _fault_noise(ctx.G, gens.shape[0])
    return Subalgebra.span(gens, closed=True, n=ctx.G.n)


# ---------------------------------------------------------------------------
# lie_core


def check_lie_cartan(ctx):
    G = ctx.G
    th, B = G.theta_matrix, G.form_matrix
    d = G.dim_g
    res = [np.linalg.norm(th @ th - np.eye(d)), np.linalg.norm(th.T @ B @ th - B) / max(1.0, np.linalg.norm(B))]
    basis = G.algebra_basis
    br = bracket(basis[:, None], basis[None]).reshape(-1, G.n, G.n)
    tb = G.theta(basis)
    lhs = G.theta(br)
    rhs = bracket(tb[:, None], tb[None]).reshape(-1, G.n, G.n)
    res.append(np.max(np.abs(lhs - rhs)))
    a = G.a_basis
    res.append(np.max(np.abs(bracket(a[:, None], a[None]))))
    return 4, float(max(res)), ctx.tol_alg10


def check_lie_roots(ctx):
    G = ctx.G
    R = G.roots
    res = []
    for root in R.roots:
        for X in root.space:
            for i, H in enumerate(G.a_basis):
                res.append(np.linalg.norm(bracket(H, X) - root.vector[i] * X))
        res.append(subspace_distance(Subalgebra(G.theta(root.space)), Subalgebra(R.find(tuple(-c for c in root.coeffs)).space)))
    for root in R.positive:
        c = np.asarray(root.coeffs, dtype=float)
        res.append(float(np.max(np.abs(c - np.rint(c)))))
        res.append(float(max(0.0, -c.min())))
    # grading [g_gamma, g_delta] inside g_{gamma + delta}
    for r1, r2 in itertools.product(R.roots, repeat=2):
        s = tuple(a + b for a, b in zip(r1.coeffs, r2.coeffs))
        if all(v == 0 for v in s):
            continue
        try:
            target = Subalgebra(R.find(s).space)
        except Exception:
            target = Subalgebra(np.zeros((0, G.n, G.n)))
        br = bracket(r1.space[:, None], r2.space[None]).reshape(-1, G.n, G.n)
        res.append(max(target.residual(b) for b in br))
    stack = np.concatenate([R.m_basis, G.a_basis] + [r.space for r in R.roots])
    res.append(float(abs(numerical_rank(stack) - G.dim_g)))
    return len(res), float(max(res)), ctx.tol_alg10


def check_lie_factor(ctx):
    G, rng = ctx.G, ctx.rng
    worst = 0.0
    count = 500
    for _ in range(count):
        g = random_sl(G.n, rng, scale=0.7)
        scale = np.linalg.norm(g)
        for mode in ("KAN", "NAK", "KAK"):
            x, a, y = factorize(G, g, mode)
            worst = max(worst, np.linalg.norm(x @ a @ y - g) / scale)
            d = np.diag(a)
            if np.any(d <= 0) or np.linalg.norm(a - np.diag(d)) > 0:
                worst = np.inf
            if mode == "KAK" and np.any(np.diff(d) < 0):
                worst = np.inf
    return count * 3, float(worst), ctx.tol.fact


# ---------------------------------------------------------------------------
# parabolic


def check_par_struct(ctx):
    G = ctx.G
    res = []
    data = {I: parabolic_datum(G, I) for I in all_subsets(G)}
    for P in data.values():
        res.extend(P.check(G).values())
    for I, J in itertools.product(data, repeat=2):
        if set(I) <= set(J):
            res.append(containment_residual(data[J].a_I, data[I].a_I))
            res.append(containment_residual(data[J].n_I, data[I].n_I))
    return len(res), float(max(res)), ctx.tol_alg10


def check_par_normalizer(ctx):
    G = ctx.G
    mism = 0
    subsets = all_subsets(G)
    for I in subsets:
        P = parabolic_datum(G, I)
        N = normalizer_subalgebra(G, P.h_I)
        mism += int(N.dim != P.a_I.dim + P.h_I.dim)
    return len(subsets), float(mism), 0.0


def check_par_nilpotent(ctx):
    G, rng = ctx.G, ctx.rng
    fails, samples = 0, 0
    subsets = all_subsets(G)
    datas = [parabolic_datum(G, I) for I in subsets]
    for P in datas:
        for X in P.nbar_I.basis:
            samples += 1
            fails += int(not is_ad_nilpotent(G, X))
    with_k = [P for P in datas if P.k_I.dim]
    for k in range(100):
        P = with_k[k % len(with_k)]
        Y = np.tensordot(rng.normal(size=P.k_I.dim), P.k_I.basis, axes=(0, 0))
        Z = np.tensordot(rng.normal(size=P.nbar_I.dim), P.nbar_I.basis, axes=(0, 0)) if P.nbar_I.dim else 0.0
        samples += 1
        fails += int(is_ad_nilpotent(G, Y + Z))
    return samples, float(fails), 0.0


# ---------------------------------------------------------------------------
# degeneration


def check_deg_bracket(ctx):
    ts = t_samples(ctx.G, ctx.rng, 200)
    worst = max(bracket_closure_residual(h_space(ctx, t)) for t in ts)
    return len(ts), float(worst), ctx.tol_alg10


def check_deg_dim(ctx):
    G = ctx.G
    ts = t_samples(G, ctx.rng, 200)
    k_dim = G.k_space.dim
    mism = sum(int(numerical_rank(dg.h_t_generators(G, t)) != k_dim) for t in ts)
    return len(ts), float(mism), 0.0


def check_deg_equivariance(ctx):
    G, rng = ctx.G, ctx.rng
    worst = 0.0
    ts = t_samples(G, rng, 200)
    for t in ts:
        a = random_a(G, rng)
        lhs = h_space(ctx, dg.a_action(G, a, t))
        rhs = h_space(ctx, t).conjugate(a)
        worst = max(worst, subspace_distance(lhs, rhs))
    return len(ts), float(worst), ctx.tol_alg10


def check_deg_transversal(ctx):
    G = ctx.G
    ts = t_samples(G, ctx.rng, 200)
    mism = 0
    for t in ts:
        r, total = dg.transversality_rank(G, t)
        mism += int(r != G.dim_g or total != G.dim_g)
    return len(ts), float(mism), 0.0


def check_deg_nah(ctx):
    G, rng = ctx.G, ctx.rng
    worst = 0.0
    ts = t_samples(G, rng, 200)
    for t in ts:
        g = random_sl(G.n, rng, scale=0.7)
        n, a, h = dg.nah_factorize(G, g, t)
        worst = max(worst, np.linalg.norm(n @ a @ h - g) / np.linalg.norm(g))
        if np.linalg.norm(np.tril(n, -1)) > 0 or np.any(np.diag(n) != 1.0):
            worst = np.inf
        if not dg.subgroup_membership(G, h, t, tol=1e-8):
            worst = np.inf
    return len(ts), float(worst), ctx.tol.fact


def check_deg_continuity(ctx):
    """Along t_k -> t_lim (20 geometric steps) the Grassmannian distance decays monotonically."""
    G, rng = ctx.G, ctx.rng
    worst = 0.0
    samples = 0
    for pat in dg.sign_patterns(G.roots.rank):
        t_lim = dg.random_t(rng, G.roots.rank, pat)
        # stay inside the sign class of t_lim: h_t only depends on t^2
        signs = np.where(t_lim != 0, np.sign(t_lim), rng.choice([-1.0, 1.0], size=G.roots.rank))
        direction = rng.uniform(0.5, 1.5, size=G.roots.rank) * signs
        h_lim = dg.h_t_basis(G, t_lim)
        dists = []
        for k in range(20):
            t = t_lim + 2.0 ** (-k) * direction
            dists.append(subspace_distance(dg.h_t_basis(G, t), h_lim))
            samples += 1
        increase = max(b - a for a, b in zip(dists, dists[1:]))
        worst = max(worst, np.inf if increase > 1e-12 else dists[-1])
    return samples, float(worst), 1e-4


def check_deg_arrow_relation(ctx):
    """Ad_g h_t = Ad_n h_{a.t} for g = n a h."""
    G, rng = ctx.G, ctx.rng
    worst = 0.0
    ts = t_samples(G, rng, 200)
    for t in ts:
        g = random_sl(G.n, rng, scale=0.7)
        n, a, _ = dg.nah_factorize(G, g, t)
        lhs = dg.h_t_basis(G, t).conjugate(g)
        rhs = dg.h_t_basis(G, dg.a_action(G, a, t)).conjugate(n)
        worst = max(worst, subspace_distance(lhs, rhs))
    return len(ts), float(worst), ctx.tol_alg10


# ---------------------------------------------------------------------------
# fell


def fell_limit_targets(G):
    """(t_n at n = 10, t_lim, tolerance) for the limit criterion."""
    eps = fell.DEFAULT_EPS
    rank = G.roots.rank
    out = []
    if rank == 1:
        out.append((np.array([2.0**-10]), np.array([0.0]), 1e-2))
    else:
        for I in [tuple(i for i in range(rank) if m >> i & 1) for m in range(2**rank)]:
            t_lim = osh.t_I(G, I)
            t = t_lim.copy()
            t[t == 0] = 2.0**-10
            if len(I) == rank:
                t = t_lim * (1.0 + 2.0**-10)
            out.append((t, t_lim, 5 * eps))
    return out


def check_fell_limit(ctx):
    targets = fell_limit_targets(ctx.G)
    worst = max(ctx.window_distance(t, t_lim) for t, t_lim, _ in targets)
    return len(targets), float(worst), float(min(tol for *_, tol in targets))


def check_fell_oracle(ctx):
    """Sampled H_t in SL(2,R) against the explicit ellipse parametrization."""
    worst = 0.0
    ts = [0.0, 2.0**-10, 0.5, 1.0, 2.0]
    for t in ts:
        X = ctx.sample(np.array([t]))
        Y = fell.sl2_h_t_oracle(t, R=ctx.R, eps=ctx.eps)
        worst = max(worst, fell.local_hausdorff(X, Y))
    return len(ts), float(worst), ctx.eps


def check_fell_conjugation(ctx):
    """Hausdorff(gPg^-1, gQg^-1) <= cond(g) Hausdorff(P, Q) on the sampled nets."""
    G, rng = ctx.G, ctx.rng
    R, eps = 3.0, 2 * ctx.eps
    rank = G.roots.rank
    P = fell.sample_h_t(G, np.ones(rank), R=R, eps=eps).points
    Q = fell.sample_h_t(G, 1.1 * np.ones(rank), R=R, eps=eps).points
    base = fell.hausdorff(P, Q)
    worst = 0.0
    count = 20
    for _ in range(count):
        g = random_sl(G.n, rng, scale=0.3)
        gi = np.linalg.inv(g)
        d = fell.hausdorff(g @ P @ gi, g @ Q @ gi)
        worst = max(worst, d - np.linalg.cond(g) * base)
    return count, float(max(worst, 0.0)), 1e-12


def check_fell_coset(ctx):
    """g_n H_{t_n} -> g H_{t_lim} on the window of radius R/2."""
    G, rng = ctx.G, ctx.rng
    worst = 0.0
    count = 3
    targets = fell_limit_targets(G)[:2]
    for t, t_lim, _ in targets:
        for _ in range(count):
            X = G.algebra_basis[rng.integers(G.dim_g)]
            g = random_sl(G.n, rng, scale=0.15)
            g_n = g @ scipy.linalg.expm(2.0**-10 * X)
            A = ctx.sample(t).transform(left=g_n, R=ctx.R / 2)
            B = ctx.sample(t_lim).transform(left=g, R=ctx.R / 2)
            worst = max(worst, fell.local_hausdorff(A, B))
    return count * len(targets), float(worst), 5 * ctx.eps


def check_fell_grassmannian(ctx):
    G = ctx.G
    worst = 0.0
    ts = [2.0**-k for k in range(0, 12)]
    h0 = dg.h_t_basis(G, [0.0])
    for t in ts:
        exact = t * t / np.sqrt(1.0 + t**4)
        worst = max(worst, abs(fell.grassmannian_distance(dg.h_t_basis(G, [t]), h0) - exact))
    return len(ts), float(worst), ctx.tol_alg10


# ---------------------------------------------------------------------------
# oshima


def check_osh_chart(ctx):
    G, rng = ctx.G, ctx.rng
    worst = 0.0
    ts = t_samples(G, rng, 200)
    for t in ts:
        n = osh.random_n(G, rng)
        h = dg.random_h_word(G, t, rng)
        a = random_a(G, rng)
        p = osh.OshimaPoint(n @ h @ a, dg.a_action(G, np.linalg.inv(a), t))
        c = osh.canonicalize(G, p)
        worst = max(worst, osh.coordinate_distance(osh.ChartCoordinates(0, n, t), c))
        if c.chart != 0:
            worst = np.inf
    return len(ts), float(worst), 1e-8


def check_osh_stabilizer(ctx):
    G, rng = ctx.G, ctx.rng
    fails, samples = 0, 0
    rank = G.roots.rank
    for I in all_subsets(G):
        tI = osh.t_I(G, I)
        p = osh.OshimaPoint(np.eye(G.n), tI)
        for _ in range(25):
            a = osh.stabilizer_a_I(G, I, np.exp(rng.uniform(-1, 1, size=rank - len(I))))
            h = dg.random_h_word(G, tI, rng)
            samples += 1
            fails += int(not osh.points_equal(G, osh.act(a @ h, p), p, tol=1e-8))
            n = osh.random_n(G, rng)
            samples += 1
            fails += int(osh.points_equal(G, osh.act(n, p), p, tol=1e-8))
    return samples, float(fails), 0.0


def check_osh_orbits(ctx):
    """3^r classes on samples, 2^r Satake classes, invariance under G and under A-equivalence."""
    G, rng = ctx.G, ctx.rng
    rank = G.roots.rank
    pts = [osh.random_point(G, rng, p) for p in dg.sign_patterns(rank) for _ in range(4)]
    pts += [osh.random_point(G, rng) for _ in range(64)]
    classes = {osh.orbit_class(p).s for p in pts}
    satake = {s for s in classes if all(v >= 0 for v in s)}
    bad = abs(len(classes) - 3**rank) + abs(len(satake) - 2**rank)
    for p in pts[:100]:
        g = random_sl(G.n, rng)
        a = random_a(G, rng)
        q = osh.OshimaPoint(g @ p.g @ a, dg.a_action(G, np.linalg.inv(a), p.t))
        bad += int(osh.orbit_class(q) != osh.orbit_class(p))
        bad += int(osh.satake_member(q) != osh.satake_member(p))
        bad += int(osh.satake_member(p) != all(v >= 0 for v in osh.orbit_class(p).s))
    return len(pts), float(bad), 0.0


def _rotation_witnesses(G, I, count=64):
    pts = []
    for al in I:
        for th in np.linspace(0.0, 2 * np.pi, count, endpoint=False):
            r = np.eye(G.n)
            c, s = np.cos(th), np.sin(th)
            r[al, al], r[al, al + 1], r[al + 1, al], r[al + 1, al + 1] = c, -s, s, c
            pts.extend(m @ r for m in G.m_reps)
    return np.array(pts)


def containment_witness(ctx):
    """Rows (I, J, expected, witnessed, value) for the orbit containment order.

    I subset of J: the path t_n -> t_I inside the orbit of t_J has window
    distance <= 5 eps at n = 10.  I not a subset of J: the sign class of t_I is
    not in the closure of the class of t_J, and rotations in K_I stay more
    than 5 eps away from every sampled conjugate k H_t k^{-1}, supp t = J.
    """
    G = ctx.G
    rank = G.roots.rank
    thr = 5 * ctx.eps
    subsets = all_subsets(G)
    ks = [np.eye(G.n), special_ortho_group.rvs(G.n, random_state=int(ctx.rng.integers(2**31)))]
    rows = []
    for I, J in itertools.product(subsets, repeat=2):
        expected = set(I) <= set(J)
        if expected:
            t_lim = osh.t_I(G, I)
            t = t_lim.copy()
            extra = [j for j in J if j not in I]
            t[extra] = 2.0**-10
            if not extra:
                t = t_lim * (1.0 + 2.0**-10)
            ok_class = osh.orbit_class(osh.OshimaPoint(np.eye(G.n), t)).I == tuple(J)
            d = ctx.window_distance(t, t_lim)
            rows.append((I, J, True, bool(ok_class and d <= thr), float(d)))
        else:
            cls_J = osh.OrbitClass(tuple(int(j in J) for j in range(rank)))
            closure = {c.s for c in osh.orbit_closure_classes(cls_J)}
            comb_ok = tuple(int(i in I) for i in range(rank)) not in closure
            P = _rotation_witnesses(G, [i for i in I if i not in J])
            lower = np.inf
            for ws in itertools.product([2.0**-6, 1.0, 2.0**6], repeat=len(J)):
                t = np.zeros(rank)
                t[list(J)] = ws
                for k in ks:
                    Q = dg.sampled_subgroup(G, t, conjugator=k).raw_points(4.0, ctx.eps)
                    Q = Q[fell.op_norms(Q) <= 3.0]
                    lower = min(lower, min(2.0, fell.directed_hausdorff(P, Q)))
            rows.append((I, J, False, bool(comb_ok and lower > thr), float(lower)))
    return rows


def check_osh_containment(ctx):
    rows = containment_witness(ctx)
    bad = sum(int(not witnessed) for *_, witnessed, _ in rows)
    return len(rows), float(bad), 0.0


def check_osh_compact(ctx):
    G, rng = ctx.G, ctx.rng
    rank = G.roots.rank
    worst = 0.0
    count = 500
    for _ in range(count):
        pat = rng.choice([-1, 1], size=rank)
        p = osh.OshimaPoint(random_sl(G.n, rng), dg.random_t(rng, rank, pat))
        q, res = osh.compactness_witness(G, p)
        worst = max(worst, res)
        if np.any(np.abs(q.t) > 1.0 + 1e-12) or not G.k_membership(q.g):
            worst = np.inf
    return count, float(worst), 1e-8


def check_osh_z2(ctx):
    G, rng = ctx.G, ctx.rng
    rank = G.roots.rank
    bad = 0
    count = 100
    for _ in range(count):
        p = osh.random_point(G, rng)
        s = rng.choice([-1.0, 1.0], size=rank)
        g = random_sl(G.n, rng)
        lhs = osh.z2_flip(s, osh.act(g, p))
        rhs = osh.act(g, osh.z2_flip(s, p))
        bad += int(not (np.array_equal(lhs.g, rhs.g) and np.array_equal(lhs.t, rhs.t)))
        twice = osh.z2_flip(s, osh.z2_flip(s, p))
        bad += int(not np.array_equal(twice.t, p.t))
        if G.n == 2 and p.t[0] != 0:
            z = osh.sl2_sphere(G, p)
            w = osh.sl2_sphere(G, osh.z2_flip([-1.0], p))
            bad += int({osh.sphere_region(z), osh.sphere_region(w)} != {"upper", "lower"})
    return count, float(bad), 0.0


def check_osh_sphere(ctx):
    G, rng = ctx.G, ctx.rng
    worst = 0.0
    count = 1000
    for k in range(count):
        pat = (-1, 0, 1)[k % 3]
        p = osh.random_point(G, rng, (pat,))
        g = random_sl(2, rng)
        z = osh.sl2_sphere(G, p)
        worst = max(worst, osh.chordal(osh.sl2_sphere(G, osh.act(g, p)), osh.mobius(g, z)))
        a = random_a(G, rng)
        h = dg.random_h_word(G, p.t, rng)
        q = osh.OshimaPoint(p.g @ h @ a, dg.a_action(G, np.linalg.inv(a), p.t))
        worst = max(worst, osh.chordal(osh.sl2_sphere(G, q), z))
        region = {1: "upper", -1: "lower", 0: "real"}[pat]
        if osh.sphere_region(z, tol=1e-12) != region:
            worst = np.inf
    return count, float(worst), ctx.tol_alg10


# ---------------------------------------------------------------------------
# groupoid


def random_integer_point(G, rng):
    return osh.OshimaPoint(gp.random_integer_sl(G.n, rng), dg.random_t(rng, G.roots.rank))


def check_grp_axioms(ctx):
    """Exact laws on SL(n, Z) representatives plus representative changes under arrow_eq."""
    G, rng = ctx.G, ctx.rng
    worst = 0.0
    triples = 1000
    for _ in range(triples):
        base = random_integer_point(G, rng)
        A1 = gp.Arrow(gp.random_integer_sl(G.n, rng), base)
        A2 = gp.Arrow(gp.random_integer_sl(G.n, rng), gp.target(A1))
        A3 = gp.Arrow(gp.random_integer_sl(G.n, rng), gp.target(A2))
        left = gp.compose(G, gp.compose(G, A3, A2), A1)
        right = gp.compose(G, A3, gp.compose(G, A2, A1))
        worst = max(worst, np.max(np.abs(left.gamma - right.gamma)))
        worst = max(worst, 0.0 if left.base is right.base else np.inf)
        u1 = gp.compose(G, gp.unit(gp.target(A1)), A1)
        u2 = gp.compose(G, A1, gp.unit(base))
        worst = max(worst, np.max(np.abs(u1.gamma - A1.gamma)), np.max(np.abs(u2.gamma - A1.gamma)))
        inv = gp.inverse_exact(A1)
        worst = max(worst, np.max(np.abs(gp.compose(G, inv, A1).gamma - np.eye(G.n))))
        worst = max(worst, np.max(np.abs(gp.compose(G, A1, inv).gamma - np.eye(G.n))))
    changes = 100
    for _ in range(changes):
        base = osh.random_point(G, rng)
        A = gp.Arrow(random_sl(G.n, rng), base)
        h = base.g @ dg.random_h_word(G, base.t, rng) @ np.linalg.inv(base.g)
        if not gp.arrow_eq(G, A, gp.Arrow(A.gamma @ h, base)):
            worst = np.inf
        if not gp.arrow_eq(G, gp.compose(G, gp.inverse(A), A), gp.unit(base)):
            worst = np.inf
        if gp.arrow_eq(G, A, gp.Arrow(A.gamma @ random_a(G, rng, 1.0), base)):
            worst = np.inf
    return triples + changes, float(worst), 0.0


def check_grp_normal(ctx):
    G, rng = ctx.G, ctx.rng
    fails = 0
    count = 200
    for _ in range(count):
        base = osh.random_point(G, rng)
        gamma = random_sl(G.n, rng)
        h = base.g @ dg.random_h_word(G, base.t, rng) @ np.linalg.inv(base.g)
        tgt = gp.target(gp.Arrow(gamma, base))
        c = osh.canonicalize(G, tgt)
        x = gamma @ h @ np.linalg.inv(gamma)
        ok = dg.subgroup_membership(G, x, c.t, g=osh.charts(G)[c.chart] @ c.n, tol=1e-7)
        fails += int(not ok)
    return count, float(fails), 0.0


def check_grp_covariance(ctx):
    G, rng = ctx.G, ctx.rng
    worst = 0.0
    count = 200
    for _ in range(count):
        base = osh.random_point(G, rng)
        gamma = random_sl(G.n, rng)
        c = osh.canonicalize(G, osh.act(gamma, base))
        lhs = gp.isotropy_subalgebra(G, base).conjugate(gamma)
        rhs = dg.h_t_basis(G, c.t).conjugate(osh.charts(G)[c.chart] @ c.n)
        worst = max(worst, subspace_distance(lhs, rhs))
    return count, float(worst), ctx.tol_alg10


def check_grp_satake(ctx):
    """Arrows between Satake points are closed under compose and inverse."""
    G, rng = ctx.G, ctx.rng
    rank = G.roots.rank
    bad = 0
    count = 200
    for _ in range(count):
        pat = rng.integers(0, 2, size=rank)
        base = osh.random_point(G, rng, pat)
        A1 = gp.Arrow(random_sl(G.n, rng), base)
        A2 = gp.Arrow(random_sl(G.n, rng), gp.target(A1))
        for X in (gp.compose(G, A2, A1), gp.inverse(A1), gp.inverse(A2)):
            bad += int(not (osh.satake_member(gp.source(X)) and osh.satake_member(gp.target(X))))
            bad += int(osh.orbit_class(gp.source(X)) != osh.orbit_class(gp.target(X)))
    return count, float(bad), 0.0


def random_chart_arrow(G, rng, t1=None):
    t1 = dg.random_t(rng, G.roots.rank) if t1 is None else t1
    a = random_a(G, rng)
    return gp.ChartArrow(osh.random_n(G, rng), dg.a_action(G, a, t1), a, osh.random_n(G, rng), t1)


def next_chart_arrow(G, rng, w):
    a = random_a(G, rng)
    return gp.ChartArrow(osh.random_n(G, rng), dg.a_action(G, a, w.t2), a, w.n2, w.t2)


def check_grp_chart_iso(ctx):
    G, rng = ctx.G, ctx.rng
    worst = 0.0
    count = 200
    for _ in range(count):
        w = random_chart_arrow(G, rng)
        worst = max(worst, gp.chart_arrow_distance(gp.chart_iso_inv(G, gp.chart_iso(G, w)), w))
    for _ in range(count):
        w1 = random_chart_arrow(G, rng)
        w2 = next_chart_arrow(G, rng, w1)
        lhs = gp.chart_iso(G, gp.chart_compose(G, w2, w1))
        rhs = gp.compose(G, gp.chart_iso(G, w2), gp.chart_iso(G, w1))
        worst = max(worst, np.linalg.norm(lhs.gamma - rhs.gamma) / np.linalg.norm(lhs.gamma))
        if not gp.arrow_eq(G, lhs, rhs):
            worst = np.inf
    return 2 * count, float(worst), ctx.tol_alg10


def check_grp_reduction(ctx):
    G, rng = ctx.G, ctx.rng
    rank = G.roots.rank
    bad = 0
    samples = 0
    for I in all_subsets(G):
        for _ in range(20):
            pat = np.array([rng.choice([-1, 1]) if i in I else 0 for i in range(rank)])
            base = osh.random_point(G, rng, pat)
            A = gp.Arrow(random_sl(G.n, rng), base)
            h = base.g @ dg.random_h_word(G, base.t, rng) @ np.linalg.inv(base.g)
            B = gp.Arrow(A.gamma @ h, base)
            C = gp.Arrow(random_sl(G.n, rng), base)
            rA, rB, rC = (gp.orbit_reduction(G, X, I) for X in (A, B, C))
            bad += int(gp.labels_equal(rA, rB) != gp.arrow_eq(G, A, B))
            bad += int(gp.labels_equal(rA, rC) != gp.arrow_eq(G, A, C))
            # same arrow over another representative [[g1 a, t]], a in A_I
            a = osh.stabilizer_a_I(G, I, np.exp(rng.uniform(-1, 1, size=rank - len(I))))
            D = gp.Arrow(A.gamma, osh.OshimaPoint(base.g @ a, base.t))
            bad += int(not gp.labels_equal(rA, gp.orbit_reduction(G, D)))
            samples += 3
    return samples, float(bad), 0.0


def check_grp_openness(ctx):
    ratio = gp.openness_witness(ctx.G, ctx.rng)
    return 20, float(ratio), 1e3


# ---------------------------------------------------------------------------
# bgroupoid


def check_b_functor(ctx):
    G, rng = ctx.G, ctx.rng
    worst = 0.0
    count = 200
    for _ in range(count):
        w1 = random_chart_arrow(G, rng)
        w2 = next_chart_arrow(G, rng, w1)
        lhs = bg.oshima_to_b(G, gp.chart_compose(G, w2, w1))
        rhs = bg.chart_b_compose(bg.oshima_to_b(G, w2), bg.oshima_to_b(G, w1))
        worst = max(worst, bg.chart_b_distance(lhs, rhs))
    return count, float(worst), 1e-12


def check_b_a_of_t(ctx):
    """a(T) m = m' exactly on model arrows with dyadic data."""
    rng = ctx.rng
    rank = ctx.G.roots.rank
    worst = 0.0
    count = 200
    for _ in range(count):
        m = rng.integers(-8, 9, size=rank + 2).astype(float) / 4.0
        m[: rank][rng.random(rank) < 0.4] = 0.0
        a = 2.0 ** rng.integers(-3, 4, size=rank).astype(float)
        m2 = m.copy()
        m2[:rank] = a * m[:rank]
        T = {j: a[j] for j in range(rank) if m[j] == 0.0}
        got = bg.a_of_T(m2, T, m, p=rank)
        worst = max(worst, float(np.max(np.abs(got * m[:rank] - m2[:rank]))), float(np.max(np.abs(got - a))))
    return count, float(worst), 0.0


def check_b_normal_frame(ctx):
    """a(T) from normal derivatives of chart-arrow representatives equals (a^alpha)."""
    G, rng = ctx.G, ctx.rng
    rank = G.roots.rank
    worst = 0.0
    count = 0
    for pat in dg.sign_patterns(rank):
        if all(pat):
            continue
        for _ in range(5):
            w = random_chart_arrow(G, rng, dg.random_t(rng, rank, pat))
            worst = max(worst, float(np.max(np.abs(bg.a_from_normal_frames(G, w) - bg.sl_weights(w.a)))))
            count += 1
    return count, worst, 1e-5


def check_b_normal_derivative(ctx):
    G, rng = ctx.G, ctx.rng
    rank = G.roots.rank
    worst = 0.0
    count = 0
    for pat in dg.sign_patterns(rank):
        if all(pat):
            continue
        t0 = dg.random_t(rng, rank, pat)
        zeros = np.flatnonzero(t0 == 0.0)
        for _ in range(50):
            h = dg.random_h_word(G, t0, rng)
            for al in zeros:
                worst = max(worst, abs(bg.normal_derivative(G, h, t0, al) - 1.0))
            count += 1
        for _ in range(5):
            a = random_a(G, rng)
            wts = bg.sl_weights(a)
            for al in zeros:
                worst = max(worst, abs(bg.normal_derivative(G, a, t0, al) - wts[al]))
            count += 1
    return count, float(worst), 1e-5


def check_b_n_independence(ctx):
    G, rng = ctx.G, ctx.rng
    rank = G.roots.rank
    worst = 0.0
    count = 50
    for k in range(count):
        pat = dg.sign_patterns(rank)[k % (3**rank - 1)]
        t0 = dg.random_t(rng, rank, pat)
        zeros = np.flatnonzero(t0 == 0.0)
        n, base = osh.random_n(G, rng), osh.random_n(G, rng)
        for al in zeros:
            worst = max(worst, abs(bg.normal_derivative(G, n, t0, al, base_n=base) - 1.0))
    return count, float(worst), 1e-5


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class Check:
    check_id: str
    anchor: str
    fn: object
    groups: tuple | None = None
    fault_capable: bool = False


CHECKS = [
    Check("B-A-OF-T", "normal frame formula a(T)_j = T_j on hyperplanes, m'_j / m_j elsewhere", check_b_a_of_t),
    Check("B-FUNCTOR", "chart arrows map to b-groupoid arrows compatibly with composition", check_b_functor),
    Check("B-N-INDEPENDENCE", "N acts trivially on the normal bundles of the boundary faces", check_b_n_independence),
    Check("B-NORMAL-DERIVATIVE", "H_t acts as the identity on the normal fibre at degenerate t", check_b_normal_derivative),
    Check("B-NORMAL-FRAME", "a(T) from normal derivatives recovers the A-weights of a chart arrow", check_b_normal_frame),
    Check("DEG-ARROW-RELATION", "Ad_g h_t = Ad_n h_{a.t} for g = n a h", check_deg_arrow_relation),
    Check("DEG-BRACKET", "h_t is a Lie subalgebra for every t", check_deg_bracket, fault_capable=True),
    Check("DEG-CONTINUITY", "t -> h_t is continuous into the Grassmannian", check_deg_continuity),
    Check("DEG-DIM", "dim h_t = dim k for every t", check_deg_dim),
    Check("DEG-EQUIVARIANCE", "h_{a.t} = Ad_a h_t", check_deg_equivariance, fault_capable=True),
    Check("DEG-NAH", "N x A x H_t -> G is a diffeomorphism onto an open set", check_deg_nah),
    Check("DEG-TRANSVERSAL", "g = h_t + a + n is direct for every t", check_deg_transversal),
    Check("FELL-CONJUGATION", "conjugation acts continuously on closed subsets", check_fell_conjugation),
    Check("FELL-COSET", "limits of cosets g_n H_n are cosets g H of the limit", check_fell_coset),
    Check("FELL-GRASSMANNIAN", "h_t -> h_0 in SL(2,R) with sin angle t^2 / sqrt(1 + t^4)", check_fell_grassmannian, groups=("sl2r",)),
    Check("FELL-LIMIT", "H_t converges in the Fell topology as coordinates of t vanish", check_fell_limit),
    Check("FELL-ORACLE", "sampled H_t in SL(2,R) matches {c^2 + t^2 s^2 = 1}", check_fell_oracle, groups=("sl2r",)),
    Check("GRP-AXIOMS", "groupoid laws for the coset groupoid and the Oshima groupoid", check_grp_axioms),
    Check("GRP-CHART-ISO", "the chart groupoid W is isomorphic to the restriction to the big cell", check_grp_chart_iso),
    Check("GRP-COVARIANCE", "Ad_gamma H_p = H_{gamma . p}", check_grp_covariance),
    Check("GRP-NORMALITY", "the isotropy family H is a normal subgroupoid", check_grp_normal),
    Check("GRP-OPENNESS", "source and target maps of the coset groupoid are open", check_grp_openness),
    Check("GRP-REDUCTION", "restriction to an orbit is G/K_I N_I x_{A_I} G/K_I N_I", check_grp_reduction),
    Check("GRP-SATAKE", "the Satake groupoid is the reduction to the closure of M_+", check_grp_satake),
    Check("LIE-CARTAN", "Cartan involution, invariant form and abelian a", check_lie_cartan),
    Check("LIE-FACTOR", "Iwasawa G = KAN and the KAK decomposition", check_lie_factor),
    Check("LIE-ROOTS", "restricted root space decomposition with integral coefficients", check_lie_roots),
    Check("OSH-CHART", "N x R^Sigma -> M is a diffeomorphism onto the big cell", check_osh_chart),
    Check("OSH-COMPACT", "the Oshima space is compact", check_osh_compact),
    Check("OSH-CONTAINMENT", "X_I lies in the closure of X_J exactly when I is contained in J", check_osh_containment),
    Check("OSH-ORBITS", "orbits are classified by the signs of t", check_osh_orbits),
    Check("OSH-SPHERE", "SL(2,R) Oshima space is the Riemann sphere via [[g,t]] -> g.(it)", check_osh_sphere, groups=("sl2r",)),
    Check("OSH-STABILIZER", "the orbit of [[e, t_I]] is G / A_I H_I", check_osh_stabilizer),
    Check("OSH-Z2", "sign flips commute with G and exchange the hemispheres", check_osh_z2),
    Check("PAR-NILPOTENT", "X in h_I is ad-nilpotent iff its k_I part vanishes", check_par_nilpotent),
    Check("PAR-NORMALIZER", "the normalizer of H_I is A_I H_I", check_par_normalizer),
    Check("PAR-STRUCTURE", "p_I = m_I + a_I + n_I and h_I = k_I + nbar_I", check_par_struct),
]

CHECKS_BY_ID = {c.check_id: c for c in CHECKS}
assert [c.check_id for c in CHECKS] == sorted(CHECKS_BY_ID)


def applicable(check, group_name):
    return check.groups is None or group_name in check.groups


def _rng_for(seed, check_id, group):
    return np.random.default_rng([int(seed), zlib.crc32(f"{check_id}/{group}".encode())])


def run_check(check_id, G, seed=42, fault=False, cache=None):
    check = CHECKS_BY_ID[check_id]
    ctx = Context(G, _rng_for(seed, check_id, G.name), fault=fault, seed=seed, cache={} if cache is None else cache)
    t0 = time.perf_counter()
    try:
        samples, residual, tol = check.fn(ctx)
        error = None
    except Exception as exc:  # a crashing check is a failed check
        samples, residual, tol = 0, float("inf"), 0.0
        error = f"{type(exc).__name__}: {exc}"
    entry = {
        "check_id": check_id,
        "paper_anchor": check.anchor,
        "group": G.name,
        "samples": int(samples),
        "max_residual": _json_float(residual),
        "tolerance": float(tol),
        "pass": bool(residual <= tol),
        "wall_time": round(time.perf_counter() - t0, 3),
    }
    if error:
        entry["error"] = error
    return entry


def _json_float(x):
    x = float(x)
    return x if np.isfinite(x) else "inf"


def verify_suite(groups=DEFAULT_GROUPS, seed=42, tol=None, fault_inject=None, check_ids=None):
    """Run every applicable check for each group; entries ordered by (check_id, group)."""
    if fault_inject is not None:
        if fault_inject not in CHECKS_BY_ID:
            raise KeyError(f"unknown check id {fault_inject!r}")
        if not CHECKS_BY_ID[fault_inject].fault_capable:
            raise ValueError(f"fault injection is not available for {fault_inject}")
    tol = tol or Tolerances()
    start = time.perf_counter()
    entries = []
    ids = sorted(check_ids) if check_ids else sorted(CHECKS_BY_ID)
    for name in groups:
        G = build_group(name, tol=tol)
        cache = {}
        for cid in ids:
            if applicable(CHECKS_BY_ID[cid], G.name):
                entries.append(run_check(cid, G, seed, fault=(cid == fault_inject), cache=cache))
    entries.sort(key=lambda e: (e["check_id"], e["group"]))
    return {
        "schema": SCHEMA,
        "command": "verify",
        "seed": int(seed),
        "groups": list(groups),
        "tolerances": {"alg": tol.alg, "fact": tol.fact},
        "fault_inject": fault_inject,
        "entries": entries,
        "pass": all(e["pass"] for e in entries),
        "wall_time": round(time.perf_counter() - start, 3),
    }


def strip_timing(report):
    """Copy of a report without wall-clock fields (for determinism comparisons)."""
    out = {k: v for k, v in report.items() if k != "wall_time"}
    out["entries"] = [{k: v for k, v in e.items() if k != "wall_time"} for e in report["entries"]]
    return out
