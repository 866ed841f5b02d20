"""The model b-groupoid R^p_+ x| R^n and its comparison with chart arrows.

In the big cell the hyperplanes {t_alpha = 0} are the boundary faces and the
N-coordinates are tangential.  A chart arrow ((n2, t2), a, (n1, t1)) maps to
the pair (x2, x1) of N-coordinates together with the model arrow
(t2, (a^alpha)_alpha, t1) of the transformation groupoid R^Sigma_+ x| R^Sigma.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .degeneration import as_t
from .errors import NotComposable, NotInCell, NotInChart, SignMismatch
from .oshima import OshimaPoint, chart_coordinates


@dataclass(frozen=True, eq=False)
class ModelBArrow:
    """(m2, a, m1) with m2_j = a_j m1_j for j < p and m2_j = m1_j for j >= p."""

    m2: np.ndarray
    a: np.ndarray
    m1: np.ndarray

    @property
    def p(self):
        return int(len(self.a))

    def residual(self):
        p = self.p
        head = np.abs(self.m2[:p] - self.a * self.m1[:p])
        tail = np.abs(self.m2[p:] - self.m1[p:])
        return float(max(head.max(initial=0.0), tail.max(initial=0.0)))


def model_arrow(m2, a, m1):
    m2, a, m1 = (np.asarray(v, dtype=float) for v in (m2, a, m1))
    if np.any(a <= 0):
        raise ValueError("model factors must be positive")
    return ModelBArrow(m2, a, m1)


def model_unit(m, p=None):
    m = np.asarray(m, dtype=float)
    p = len(m) if p is None else p
    return ModelBArrow(m, np.ones(p), m)


def model_compose(B2: ModelBArrow, B1: ModelBArrow) -> ModelBArrow:
    """(m'', a', m') o (m', a, m) = (m'', a' a, m)."""
    if B2.p != B1.p or not np.array_equal(B2.m1, B1.m2):
        d = float(np.max(np.abs(B2.m1 - B1.m2))) if B2.m1.shape == B1.m2.shape else float("inf")
        raise NotComposable("source of the second arrow differs from target of the first", distance=d)
    return ModelBArrow(B2.m2, B2.a * B1.a, B1.m1)


def model_inverse(B: ModelBArrow) -> ModelBArrow:
    return ModelBArrow(B.m1, 1.0 / B.a, B.m2)


def model_equal(B1: ModelBArrow, B2: ModelBArrow, tol=0.0) -> bool:
    pairs = ((B1.m2, B2.m2), (B1.a, B2.a), (B1.m1, B2.m1))
    return all(x.shape == y.shape and np.all(np.abs(x - y) <= tol * np.maximum(1.0, np.abs(x))) for x, y in pairs)


def a_of_T(m2, T, m1, p=None):
    """a(T)_j = T_j where m_j = 0 and m'_j / m_j otherwise.

    ``T`` is a sequence indexed like the first p coordinates (entries off
    the hyperplanes are ignored) or a dict {j: T_j}.
    """
    m2 = np.asarray(m2, dtype=float)
    m1 = np.asarray(m1, dtype=float)
    p = len(m1) if p is None else p
    if isinstance(T, dict):
        Tv = np.full(p, np.nan)
        for j, v in T.items():
            Tv[int(j)] = float(v)
    else:
        Tv = np.asarray(T, dtype=float)
        if Tv.shape[0] < p:
            Tv = np.concatenate([Tv, np.full(p - Tv.shape[0], np.nan)])
    a = np.empty(p)
    for j in range(p):
        if np.sign(m2[j]) != np.sign(m1[j]):
            raise SignMismatch(f"coordinate {j}: endpoints lie on different sides of the hyperplane")
        if m1[j] == 0.0:
            if not np.isfinite(Tv[j]) or Tv[j] <= 0:
                raise ValueError(f"normal frame map must be positive on hyperplane {j}")
            a[j] = Tv[j]
        else:
            a[j] = m2[j] / m1[j]
    if not np.array_equal(m2[p:], m1[p:]):
        raise SignMismatch("tangential coordinates differ")
    return a


# -- chart arrows ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ChartBArrow:
    """Pair-groupoid part on N-coordinates and the model part on t."""

    x2: np.ndarray
    x1: np.ndarray
    model: ModelBArrow


def n_coordinates(n):
    n = np.asarray(n, dtype=float)
    return n[np.triu_indices(n.shape[0], 1)]


def sl_weights(a):
    """(a^alpha_i)_i = a_ii / a_{i+1,i+1} for the standard simple roots of sl(n)."""
    d = np.diag(np.asarray(a, dtype=float))
    return d[:-1] / d[1:]


def oshima_to_b(G, w) -> ChartBArrow:
    """((n2, t2), a, (n1, t1)) -> ((x2, x1), (t2, (a^alpha), t1))."""
    if G.is_sl:
        weights = sl_weights(w.a)
    else:
        from .degeneration import a_weights

        weights = a_weights(G, w.a)
    return ChartBArrow(
        n_coordinates(w.n2),
        n_coordinates(w.n1),
        ModelBArrow(np.asarray(w.t2, dtype=float), weights, np.asarray(w.t1, dtype=float)),
    )


def chart_b_compose(C2: ChartBArrow, C1: ChartBArrow, tol=1e-12) -> ChartBArrow:
    d = float(max(np.max(np.abs(C2.x1 - C1.x2), initial=0.0), np.max(np.abs(C2.model.m1 - C1.model.m2))))
    if d > tol * max(1.0, float(np.max(np.abs(C1.x2), initial=0.0))):
        raise NotComposable("chart b-arrows do not match", distance=d)
    model = ModelBArrow(C2.model.m2, C2.model.a * C1.model.a, C1.model.m1)
    return ChartBArrow(C2.x2, C1.x1, model)


def chart_b_distance(C1: ChartBArrow, C2: ChartBArrow) -> float:
    parts = [(C1.x2, C2.x2), (C1.x1, C2.x1), (C1.model.m2, C2.model.m2), (C1.model.a, C2.model.a), (C1.model.m1, C2.model.m1)]
    return float(max(np.max(np.abs(x - y) / np.maximum(1.0, np.abs(x)), initial=0.0) for x, y in parts))


# -- normal derivatives ---------------------------------------------------------


def _normal_coordinate(G, x, base_n, t0, alpha, tau):
    t = np.array(t0, dtype=float)
    t[alpha] += tau
    try:
        c = chart_coordinates(G, OshimaPoint(x @ base_n, t), 0)
    except (NotInChart, NotInCell) as exc:
        raise NotInChart("the action leaves the chart for this step") from exc
    return c.t[alpha]


def normal_derivative(G, x, t0, alpha, base_n=None, step=1e-4, tol=1e-5):
    """d t'_alpha / d t_alpha at tau = 0 for [[x n, t0 + tau e_alpha]] in chart coordinates.

    Central difference with step ``step``; when halving the step changes the
    estimate by more than ``tol`` a Richardson extrapolation is returned.
    """
    t0 = as_t(G, t0)
    x = np.asarray(x, dtype=float)
    base_n = np.eye(G.n) if base_n is None else np.asarray(base_n, dtype=float)

    def central(h):
        f_plus = _normal_coordinate(G, x, base_n, t0, alpha, h)
        f_minus = _normal_coordinate(G, x, base_n, t0, alpha, -h)
        return (f_plus - f_minus) / (2.0 * h)

    d1 = central(step)
    d2 = central(step / 2.0)
    if abs(d1 - d2) > tol:
        return (4.0 * d2 - d1) / 3.0
    return d2


def normal_frame_from_arrow(G, w, alpha, **kw):
    """T_alpha for the chart arrow w, read off from the normal derivative of its gamma."""
    from .groupoid import chart_iso

    A = chart_iso(G, w)
    return normal_derivative(G, A.gamma, w.t1, alpha, base_n=w.n1, **kw)


def a_from_normal_frames(G, w, **kw):
    """a(T) built from normal derivatives on the hyperplanes through t1."""
    t1 = np.asarray(w.t1, dtype=float)
    T = {j: normal_frame_from_arrow(G, w, j, **kw) for j in np.flatnonzero(t1 == 0.0)}
    return a_of_T(w.t2, T, t1)


__all__ = [
    "ModelBArrow",
    "ChartBArrow",
    "model_arrow",
    "model_unit",
    "model_compose",
    "model_inverse",
    "model_equal",
    "a_of_T",
    "oshima_to_b",
    "chart_b_compose",
    "chart_b_distance",
    "n_coordinates",
    "sl_weights",
    "normal_derivative",
    "normal_frame_from_arrow",
    "a_from_normal_frames",
]
