"""Points [[g, t]] of the Oshima space, chart coordinates and orbit data.

[[g, t]] is the class of (g, t) under (g, t) ~ (g h a, a^{-1} t) for h in H_t
and a in A.  On the big cell U = {[[n, t]] : n in N} the coordinates (n, t)
are unique; translates w U by Weyl representatives serve as further charts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .degeneration import a_action, a_with_weights, as_t, nah_factorize, section, support
from .errors import NotInCell, NotInChart, Unsupported, WrongGroup
from .lie import kak


@dataclass(frozen=True, eq=False)
class OshimaPoint:
    g: np.ndarray
    t: np.ndarray

    @classmethod
    def make(cls, G, g, t):
        g = np.asarray(g, dtype=float)
        if g.shape != (G.n, G.n):
            raise ValueError(f"expected a {G.n}x{G.n} matrix")
        return cls(g, as_t(G, t))


@dataclass(frozen=True)
class OrbitClass:
    s: tuple

    @property
    def I(self):
        return tuple(i for i, v in enumerate(self.s) if v != 0)

    def label(self):
        return "".join({1: "+", -1: "-", 0: "0"}[v] for v in self.s)


@dataclass(frozen=True, eq=False)
class ChartCoordinates:
    """[[g, t]] = w . [[n, t]] with w = charts[chart]."""

    chart: int
    n: np.ndarray
    t: np.ndarray


def charts(G):
    """Identity first, then the remaining Weyl-group representatives."""
    return G.weyl_reps


def chart_coordinates(G, p: OshimaPoint, chart=0) -> ChartCoordinates:
    """Coordinates of p in the chart w U, w = charts(G)[chart]."""
    if not G.is_sl:
        raise Unsupported("chart coordinates need an SL(n,R) backend")
    w = charts(G)[chart]
    try:
        n, a, _ = nah_factorize(G, w.T @ p.g, p.t)
    except NotInCell as exc:
        raise NotInChart(f"point is outside chart {chart}") from exc
    return ChartCoordinates(chart, n, a_action(G, a, p.t))


def canonicalize(G, p: OshimaPoint, chart=None) -> ChartCoordinates:
    """Chart coordinates in the first chart (or the given one) containing p."""
    if chart is not None:
        return chart_coordinates(G, p, chart)
    for c in range(len(charts(G))):
        try:
            return chart_coordinates(G, p, c)
        except NotInChart:
            continue
    raise NotInChart("point lies in none of the charts")


def coordinate_distance(c1: ChartCoordinates, c2: ChartCoordinates) -> float:
    """Relative distance between coordinates in the same chart."""
    dn = np.linalg.norm(c1.n - c2.n) / max(1.0, np.linalg.norm(c1.n))
    dt = np.linalg.norm(c1.t - c2.t) / max(1.0, np.linalg.norm(c1.t))
    return float(max(dn, dt))


def point_distance(G, p: OshimaPoint, q: OshimaPoint) -> float:
    """Coordinate distance in the first chart containing both points."""
    for c in range(len(charts(G))):
        try:
            cp = chart_coordinates(G, p, c)
            cq = chart_coordinates(G, q, c)
        except NotInChart:
            continue
        return coordinate_distance(cp, cq)
    raise NotInChart("no chart contains both points")


def points_equal(G, p: OshimaPoint, q: OshimaPoint, tol=None) -> bool:
    tol = G.tol.fact * 10 if tol is None else tol
    return point_distance(G, p, q) <= tol


def from_chart(G, c: ChartCoordinates) -> OshimaPoint:
    return OshimaPoint(charts(G)[c.chart] @ c.n, np.array(c.t, dtype=float))


def act(g, p: OshimaPoint) -> OshimaPoint:
    return OshimaPoint(np.asarray(g, dtype=float) @ p.g, p.t)


def right_a(G, p: OshimaPoint, a) -> OshimaPoint:
    """[[g a, t]] = [[g, a . t]]: rewrite with the A-factor moved into t."""
    return OshimaPoint(p.g, a_action(G, a, p.t))


def orbit_class(p: OshimaPoint) -> OrbitClass:
    return OrbitClass(tuple(int(v) for v in np.sign(p.t)))


def all_orbit_classes(rank):
    import itertools

    return [OrbitClass(s) for s in itertools.product((-1, 0, 1), repeat=rank)]


def satake_member(p: OshimaPoint) -> bool:
    """True iff [[g, t]] lies in the closure of M_+ (all t_alpha >= 0)."""
    return bool(np.all(np.asarray(p.t) >= 0.0))


def z2_flip(s, p: OshimaPoint) -> OshimaPoint:
    s = np.asarray(s, dtype=float)
    if not np.all(np.abs(s) == 1.0):
        raise ValueError("flip entries must be +1 or -1")
    return OshimaPoint(p.g, s * p.t)


def t_I(G, I, signs=None):
    """Orbit representative: entries 1 (or the given sign) on I and 0 off I."""
    t = np.zeros(G.roots.rank)
    for i in I:
        t[i] = 1.0 if signs is None else float(signs[i])
    return t


def orbit_closure_classes(cls: OrbitClass):
    """Sign classes in the closure: zero out any subset of the nonzero entries."""
    import itertools

    nz = [i for i, v in enumerate(cls.s) if v]
    out = []
    for keep in itertools.product((True, False), repeat=len(nz)):
        s = [0] * len(cls.s)
        for i, k in zip(nz, keep):
            if k:
                s[i] = cls.s[i]
        out.append(OrbitClass(tuple(s)))
    return out


def stabilizer_a_I(G, I, weights_off):
    """a in A_I with a^alpha = 1 on I and the given weights off I."""
    w = np.ones(G.roots.rank)
    off = [k for k in range(G.roots.rank) if k not in I]
    w[off] = weights_off
    return a_with_weights(G, w)


def compactness_witness(G, p: OshimaPoint):
    """Rewrite a dense-orbit point as [[k, t']] with k in K and |t'_alpha| <= 1.

    [[g, t]] = [[g s, sign t]] with s = a_{|t|}; KAK gives g s = k a k' with
    a in the closed negative chamber and k' in K = H_{sign t}, so
    [[g, t]] = [[k, a . sign t]].
    """
    t = as_t(G, p.t)
    if support(t) != tuple(range(G.roots.rank)):
        raise ValueError("compactness witness needs nondegenerate t")
    s = section(G, t)
    k, a, _ = kak(p.g @ s)
    q = OshimaPoint(k, a_action(G, a, np.sign(t)))
    return q, point_distance(G, p, q)


# -- SL(2, R) sphere model ----------------------------------------------------

INF = complex(np.inf, 0.0)


def mobius(g, z):
    a, b, c, d = np.asarray(g, dtype=float).ravel()
    if z == INF or np.isinf(abs(z)):
        return INF if c == 0 else complex(a / c)
    den = c * z + d
    if den == 0:
        return INF
    return complex((a * z + b) / den)


def sl2_sphere(G, p: OshimaPoint) -> complex:
    """[[g, t]] -> g . (i t) in the Riemann sphere."""
    if not (G.is_sl and G.n == 2):
        raise WrongGroup("the sphere model is only defined for SL(2,R)")
    return mobius(p.g, 1j * float(p.t[0]))


def chordal(z, w) -> float:
    """Chordal distance on the Riemann sphere (infinity allowed)."""
    zi, wi = np.isinf(abs(z)), np.isinf(abs(w))
    if zi and wi:
        return 0.0
    if zi:
        return 2.0 / np.sqrt(1.0 + abs(w) ** 2)
    if wi:
        return 2.0 / np.sqrt(1.0 + abs(z) ** 2)
    return 2.0 * abs(z - w) / np.sqrt((1.0 + abs(z) ** 2) * (1.0 + abs(w) ** 2))


def sphere_region(z, tol=1e-12) -> str:
    if np.isinf(abs(z)):
        return "real"
    if z.imag > tol:
        return "upper"
    if z.imag < -tol:
        return "lower"
    return "real"


def random_point(G, rng, pattern=None, scale=1.0):
    from .degeneration import random_t
    from .lie import random_sl

    return OshimaPoint(random_sl(G.n, rng, scale), random_t(rng, G.roots.rank, pattern))


def random_n(G, rng, scale=1.0):
    n = np.eye(G.n)
    iu = np.triu_indices(G.n, 1)
    n[iu] = rng.uniform(-scale, scale, size=len(iu[0]))
    return n
