"""Arrows of the Oshima groupoid G x M / H and the chart groupoid W.

An arrow is stored as a representative gamma together with its source point
[[g1, t]]; gamma is determined up to right multiplication by
H_{[[g1, t]]} = g1 H_t g1^{-1}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .degeneration import (
    a_action,
    as_t,
    h_t_basis,
    nah_I,
    nah_factorize,
    section,
    subgroup_membership,
    support,
)
from .errors import NotComposable, NotInCell, NotInChart, WrongOrbit
from .oshima import OshimaPoint, act, chart_coordinates, charts, point_distance


@dataclass(frozen=True, eq=False)
class Arrow:
    gamma: np.ndarray
    base: OshimaPoint


@dataclass(frozen=True, eq=False)
class ChartArrow:
    """((n2, t2), a, (n1, t1)) with t2 = a . t1."""

    n2: np.ndarray
    t2: np.ndarray
    a: np.ndarray
    n1: np.ndarray
    t1: np.ndarray

    def check(self, G, tol=None):
        tol = G.tol.fact if tol is None else tol
        res = np.linalg.norm(self.t2 - a_action(G, self.a, self.t1))
        if res > tol * max(1.0, np.linalg.norm(self.t2)):
            raise ValueError(f"t2 differs from a . t1 by {res}")
        return self


def source(A: Arrow) -> OshimaPoint:
    return A.base


def target(A: Arrow) -> OshimaPoint:
    return act(A.gamma, A.base)


def unit(p: OshimaPoint) -> Arrow:
    return Arrow(np.eye(p.g.shape[0]), p)


def inverse(A: Arrow) -> Arrow:
    return Arrow(np.linalg.inv(A.gamma), target(A))


def inverse_exact(A: Arrow) -> Arrow:
    """Inverse for integer representatives of SL(n, Z), rounded to exact integers."""
    return Arrow(np.rint(np.linalg.inv(A.gamma)), target(A))


def compose(G, A2: Arrow, A1: Arrow, tol=None) -> Arrow:
    """A2 o A1 = (gamma2 gamma1, source(A1)); needs source(A2) = target(A1)."""
    tol = G.tol.fact * 10 if tol is None else tol
    exact = np.array_equal(A2.base.t, A1.base.t) and np.array_equal(A2.base.g, A1.gamma @ A1.base.g)
    if not exact:
        try:
            d = point_distance(G, A2.base, target(A1))
        except NotInChart as exc:
            raise NotComposable("source of the second arrow lies in no chart with the target of the first") from exc
        if d > tol:
            raise NotComposable(f"source(A2) and target(A1) differ by {d:.3e}", distance=d)
    return Arrow(A2.gamma @ A1.gamma, A1.base)


def arrow_eq(G, A: Arrow, B: Arrow, tol=None) -> bool:
    """Same source and gamma_B^{-1} gamma_A in H_source."""
    tol = G.tol.fact * 10 if tol is None else tol
    if point_distance(G, A.base, B.base) > tol:
        return False
    x = np.linalg.solve(B.gamma, A.gamma)
    return subgroup_membership(G, x, A.base.t, g=A.base.g, tol=max(tol, 1e-8))


def isotropy_subalgebra(G, p: OshimaPoint):
    """Lie algebra of H_{[[g, t]]} = Ad_g h_t."""
    return h_t_basis(G, p.t).conjugate(p.g)


# -- chart groupoid -----------------------------------------------------------


def chart_unit(G, n, t):
    t = as_t(G, t)
    return ChartArrow(np.asarray(n, dtype=float), t, np.eye(G.n), np.asarray(n, dtype=float), t)


def chart_compose(G, w2: ChartArrow, w1: ChartArrow, tol=None) -> ChartArrow:
    tol = G.tol.fact * 10 if tol is None else tol
    d = max(np.linalg.norm(w2.n1 - w1.n2), np.linalg.norm(w2.t1 - w1.t2))
    if d > tol * max(1.0, np.linalg.norm(w1.n2)):
        raise NotComposable(f"chart arrows do not match ({d:.3e})", distance=float(d))
    return ChartArrow(w2.n2, w2.t2, w2.a @ w1.a, w1.n1, w1.t1)


def chart_inverse(w: ChartArrow) -> ChartArrow:
    return ChartArrow(w.n1, w.t1, np.diag(1.0 / np.diag(w.a)), w.n2, w.t2)


def chart_iso(G, w: ChartArrow) -> Arrow:
    """((n2, t2), a, (n1, t1)) -> [[n2 a n1^{-1}, n1, t1]]."""
    return Arrow(w.n2 @ w.a @ np.linalg.inv(w.n1), OshimaPoint(np.asarray(w.n1, dtype=float), as_t(G, w.t1)))


def chart_iso_inv(G, A: Arrow) -> ChartArrow:
    """Inverse of chart_iso; both endpoints must lie in the big cell."""
    c1 = chart_coordinates(G, A.base, 0)
    try:
        n2, a, _ = nah_factorize(G, A.gamma @ c1.n, c1.t)
    except NotInCell as exc:
        raise NotInChart("target of the arrow is outside the big cell") from exc
    return ChartArrow(n2, a_action(G, a, c1.t), a, c1.n, c1.t)


def chart_arrow_distance(w: ChartArrow, v: ChartArrow) -> float:
    parts = [(w.n2, v.n2), (w.t2, v.t2), (w.a, v.a), (w.n1, v.n1), (w.t1, v.t1)]
    return float(max(np.linalg.norm(x - y) / max(1.0, np.linalg.norm(x)) for x, y in parts))


# -- orbit reduction ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CosetLabel:
    """g H_I = w n a H_I in chart w; ``log_a`` holds the coordinates of log a."""

    chart: int
    n: np.ndarray
    log_a: np.ndarray


@dataclass(frozen=True, eq=False)
class OrbitReduction:
    I: tuple
    target_label: CosetLabel
    source_label: CosetLabel
    isotropy: bool


def _a_I_projector(G, I):
    """Orthogonal projector (a-coordinates, trace form) onto a_I = ker of alpha in I."""
    from .linalg import null_space

    S = G.roots.simple_matrix()
    gram = np.einsum("iab,jba->ij", G.a_basis, G.a_basis)
    ker = null_space(S[list(I)]) if I else np.eye(G.dim_a)
    if ker.shape[0] == 0:
        return np.zeros((G.dim_a, G.dim_a))
    # projector P with range ker, orthogonal for gram
    M = ker.T
    return M @ np.linalg.solve(M.T @ gram @ M, M.T @ gram)


def coset_label(G, g, I, chart):
    w = charts(G)[chart]
    n, a, _ = nah_I(G, w.T @ g, I)
    return CosetLabel(chart, n, G.a_coords(a))


def orbit_reduction(G, A: Arrow, I=None) -> OrbitReduction:
    """Labels ([gamma g1'], [g1']) in G/H_I x G/H_I modulo the diagonal A_I action."""
    t = as_t(G, A.base.t)
    I_base = support(t)
    if I is not None and tuple(I) != I_base:
        raise WrongOrbit(f"base lies in the orbit of {I_base}, not {tuple(I)}")
    I = I_base
    g1 = A.base.g @ section(G, t)
    g2 = A.gamma @ g1
    P = _a_I_projector(G, I)
    for c in range(len(charts(G))):
        try:
            l1 = coset_label(G, g1, I, c)
            l2 = coset_label(G, g2, I, c)
        except NotInCell:
            continue
        shift = P @ l1.log_a
        l1 = CosetLabel(c, l1.n, l1.log_a - shift)
        l2 = CosetLabel(c, l2.n, l2.log_a - shift)
        iso = point_distance(G, A.base, target(A)) <= G.tol.fact * 10
        return OrbitReduction(I, l2, l1, bool(iso))
    raise NotInChart("no chart contains both coset representatives")


def labels_equal(r1: OrbitReduction, r2: OrbitReduction, tol=1e-8) -> bool:
    """Same pair of cosets modulo the diagonal A_I action (labels already normalized)."""
    if r1.I != r2.I:
        return False
    for x, y in ((r1.target_label, r2.target_label), (r1.source_label, r2.source_label)):
        if x.chart != y.chart:
            return False
        if np.linalg.norm(x.n - y.n) > tol * max(1.0, np.linalg.norm(x.n)):
            return False
        if np.linalg.norm(x.log_a - y.log_a) > tol * max(1.0, np.linalg.norm(x.log_a)):
            return False
    return True


# -- openness witness ---------------------------------------------------------


def openness_witness(G, rng, points=20, deltas=(1e-2, 1e-3, 1e-4)):
    """Lift perturbed source units at boundary points to nearby arrows.

    For an arrow w from a degenerate point and a perturbed source (n1', t1'),
    the chart arrow with the same a has source (n1', t1') and target
    (n2, a . t1'); returns max over samples of |target shift| / delta, which
    stays bounded when source and target maps are open near the boundary.
    """
    from .oshima import random_n

    rank = G.roots.rank
    worst = 0.0
    for k in range(points):
        t1 = rng.uniform(0.3, 2.0, size=rank) * rng.choice([-1.0, 1.0], size=rank)
        t1[k % rank] = 0.0
        n1, n2 = random_n(G, rng), random_n(G, rng)
        a = G.a_from_coords(rng.uniform(-1, 1, size=G.dim_a))
        w = ChartArrow(n2, a_action(G, a, t1), a, n1, t1)
        A = chart_iso(G, w)
        for d in deltas:
            dn = np.triu(rng.uniform(-d, d, size=(G.n, G.n)), 1)
            dt = rng.uniform(-d, d, size=rank)
            lifted = chart_iso(G, ChartArrow(n2, a_action(G, a, t1 + dt), a, n1 + dn, t1 + dt))
            shift = point_distance(G, target(lifted), target(A))
            src = point_distance(G, source(lifted), source(A))
            if src > 0:
                worst = max(worst, shift / d)
    return worst


def random_integer_sl(n, rng, steps=4, bound=2):
    """Product of elementary integer matrices; an exact element of SL(n, Z)."""
    g = np.eye(n)
    for _ in range(steps):
        i, j = rng.choice(n, size=2, replace=False)
        e = np.eye(n)
        e[i, j] = float(rng.integers(-bound, bound + 1))
        g = g @ e
    return g


__all__ = [
    "Arrow",
    "ChartArrow",
    "CosetLabel",
    "OrbitReduction",
    "source",
    "target",
    "unit",
    "inverse",
    "compose",
    "arrow_eq",
    "chart_iso",
    "chart_iso_inv",
    "chart_compose",
    "chart_inverse",
    "chart_unit",
    "chart_arrow_distance",
    "coset_label",
    "inverse_exact",
    "random_integer_sl",
    "orbit_reduction",
    "labels_equal",
    "openness_witness",
    "isotropy_subalgebra",
]
