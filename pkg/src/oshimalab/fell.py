"""Sampled closed subsets of G and window distances between them.

The Fell topology is approximated by Hausdorff distance (operator norm) on
the radius-R window; results are labelled "window distance" and make no
metrization claim.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import EmptySample, IncompatibleWindows
from .linalg import subspace_distance

DEFAULT_R = 10.0
DEFAULT_EPS = 0.05
DEFAULT_SEED = 42


def op_norms(mats):
    """Spectral norms of a stack of matrices (any leading batch shape)."""
    mats = np.asarray(mats, dtype=float)
    if mats.size == 0:
        return np.zeros(mats.shape[:-2])
    gram = np.swapaxes(mats, -1, -2) @ mats
    return np.sqrt(np.maximum(np.linalg.eigvalsh(gram)[..., -1], 0.0))


def dedupe(points, resolution):
    """Greedy thinning: keep a point unless a kept point is within ``resolution`` (Frobenius)."""
    points = np.asarray(points, dtype=float)
    if points.shape[0] == 0:
        return points
    flat = points.reshape(points.shape[0], -1)
    tree = cKDTree(flat)
    keep = np.ones(len(flat), dtype=bool)
    for i, nbrs in enumerate(tree.query_ball_point(flat, resolution)):
        if keep[i]:
            for j in nbrs:
                if j > i:
                    keep[j] = False
    return points[keep]


@dataclass(frozen=True, eq=False)
class SampledClosedSet:
    """Finite net of a closed subset of G.

    ``points`` holds every sample with operator norm <= R * (1 + collar);
    the collar lets window distances see neighbours just outside the ball.
    """

    points: np.ndarray
    R: float
    eps: float
    seed: int = DEFAULT_SEED
    collar: float = 0.1

    @property
    def outer_radius(self):
        return self.R * (1.0 + self.collar)

    def window(self):
        return self.points[op_norms(self.points) <= self.R]

    def __len__(self):
        return int(self.points.shape[0])

    def transform(self, left=None, right=None, R=None):
        """The set left * X * right, re-windowed at radius R (defaults to self.R)."""
        pts = self.points
        if left is not None:
            pts = np.asarray(left) @ pts
        if right is not None:
            pts = pts @ np.asarray(right)
        return make_closed_set(pts, self.R if R is None else R, self.eps, self.seed, self.collar)

    def contains(self, x, tol=None):
        tol = self.eps if tol is None else tol
        return nearest_distance(np.asarray(x, dtype=float)[None], self.points)[0] <= tol


def make_closed_set(points, R, eps, seed=DEFAULT_SEED, collar=0.1):
    points = np.asarray(points, dtype=float)
    points = points[op_norms(points) <= R * (1.0 + collar)]
    points = dedupe(points, eps / 2.0)
    return SampledClosedSet(points, float(R), float(eps), int(seed), float(collar))


def sample_subgroup(H, R=DEFAULT_R, eps=DEFAULT_EPS, seed=DEFAULT_SEED, collar=0.1):
    """Deterministic net of the sampled subgroup ``H`` inside the (collared) R-ball."""
    if R <= 0 or eps <= 0:
        raise ValueError("R and eps must be positive")
    outer = R * (1.0 + collar)
    raw = H.raw_points(radius=outer + 1.0, step=eps, seed=seed)
    out = make_closed_set(raw, R, eps, seed, collar)
    n = raw.shape[-1]
    if len(out) == 0 or nearest_distance(np.eye(n)[None], out.points)[0] > 1e-12:
        raise EmptySample("sample does not contain the identity")
    return out


def nearest_distance(P, Q, k=16):
    """For each p in P, min_q |p - q|_op, computed exactly.

    Frobenius neighbours from a KD-tree give candidates; since
    |x|_F <= sqrt(n) |x|_op, a candidate whose op distance is below
    d_k / sqrt(n) (d_k = k-th Frobenius distance) is the true minimizer.
    Remaining points fall back to a ball query of radius sqrt(n) d_F.
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if P.shape[0] == 0:
        return np.zeros(0)
    if Q.shape[0] == 0:
        return np.full(P.shape[0], np.inf)
    n = P.shape[-1]
    fp, fq = P.reshape(len(P), -1), Q.reshape(len(Q), -1)
    tree = cKDTree(fq)
    k = min(k, len(fq))
    dist, idx = tree.query(fp, k=k)
    dist, idx = dist.reshape(len(fp), k), idx.reshape(len(fp), k)
    diffs = P[:, None] - Q[idx]
    ops = op_norms(diffs)
    best = ops.min(axis=1)
    bound = dist[:, -1] / np.sqrt(n) if k < len(fq) else np.full(len(fp), np.inf)
    for i in np.flatnonzero(best > bound):
        cand = tree.query_ball_point(fp[i], np.sqrt(n) * dist[i, 0] * (1 + 1e-12) + 1e-15)
        best[i] = op_norms(P[i] - Q[cand]).min()
    return best


def directed_hausdorff(P, Q, k=6):
    """max_p min_q |p - q|_op, exact, with pruning of points that cannot raise the max."""
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if P.shape[0] == 0:
        return 0.0
    if Q.shape[0] == 0:
        return float("inf")
    n = P.shape[-1]
    root_n = np.sqrt(n)
    fp, fq = P.reshape(len(P), -1), Q.reshape(len(Q), -1)
    tree = cKDTree(fq)
    k = min(k, len(fq))
    dist, idx = tree.query(fp, k=k)
    dist, idx = dist.reshape(len(fp), k), idx.reshape(len(fp), k)
    ub = op_norms(P[:, None] - Q[idx]).min(axis=1)
    resolved = (ub <= dist[:, -1] / root_n) | (k == len(fq))
    cmax = float(ub[resolved].max(initial=0.0))
    for i in np.argsort(-ub):
        if resolved[i] or ub[i] <= cmax:
            continue
        best, kk = ub[i], k
        while True:
            kk = min(4 * kk, len(fq))
            d, j = tree.query(fp[i], k=kk)
            best = min(best, op_norms(P[i] - Q[np.atleast_1d(j)]).min())
            if best <= cmax or kk == len(fq) or np.atleast_1d(d)[-1] / root_n >= best:
                break
        cmax = max(cmax, float(best))
    return cmax


def directed_window_distance(X: SampledClosedSet, Y: SampledClosedSet):
    """sup over window points of X of the distance to Y (including Y's collar)."""
    return directed_hausdorff(X.window(), Y.points)


def local_hausdorff(X: SampledClosedSet, Y: SampledClosedSet) -> float:
    """Symmetric window distance between two sampled closed sets."""
    if not np.isclose(X.R, Y.R):
        raise IncompatibleWindows(f"window radii differ: {X.R} vs {Y.R}")
    return max(directed_window_distance(X, Y), directed_window_distance(Y, X))


def hausdorff(P, Q) -> float:
    """Plain Hausdorff distance (operator norm) between two finite point sets."""
    return max(directed_hausdorff(P, Q), directed_hausdorff(Q, P))


def grassmannian_distance(V, W) -> float:
    return subspace_distance(V, W)


def sample_h_t(G, t, R=DEFAULT_R, eps=DEFAULT_EPS, seed=DEFAULT_SEED, conjugator=None, **kw):
    from .degeneration import sampled_subgroup

    return sample_subgroup(sampled_subgroup(G, t, conjugator=conjugator, **kw), R=R, eps=eps, seed=seed)


def distance_table(G, path, t_limit, R=DEFAULT_R, eps=DEFAULT_EPS, seed=DEFAULT_SEED):
    """Window distances from H_{t_k} to H_{t_limit} along a path of parameters."""
    limit = sample_h_t(G, t_limit, R=R, eps=eps, seed=seed)
    rows = []
    for k, t in enumerate(path):
        X = sample_h_t(G, t, R=R, eps=eps, seed=seed)
        rows.append({"step": k, "t": [float(v) for v in np.atleast_1d(t)], "window_distance": local_hausdorff(X, limit)})
    return rows


def sl2_h_t_oracle(t, R=DEFAULT_R, eps=DEFAULT_EPS):
    """Explicit net of H_t in SL(2,R) from {[[c, -t^2 s], [s, c]] : c^2 + t^2 s^2 = 1}.

    Built independently of the Lie algebra code: for t != 0 the set is an
    ellipse in (c, s); for t = 0 it is {c = +-1} with s free.
    """
    t = float(t)
    pts = []
    if t == 0.0:
        s = np.arange(-R * 1.2, R * 1.2 + eps / 4, eps / 4)
        for c in (1.0, -1.0):
            pts.append(np.stack([np.stack([np.full_like(s, c), np.zeros_like(s)], -1), np.stack([s, np.full_like(s, c)], -1)], 1))
    else:
        scale = max(1.0, 1.0 / abs(t))
        m = int(np.ceil(2 * np.pi * scale * (1 + t * t) / (eps / 4))) + 8
        phi = np.linspace(0.0, 2 * np.pi, m, endpoint=False)
        c, s = np.cos(phi), np.sin(phi) / abs(t)
        pts.append(np.stack([np.stack([c, -t * t * s], -1), np.stack([s, c], -1)], 1))
    return make_closed_set(np.concatenate(pts), R, eps)
