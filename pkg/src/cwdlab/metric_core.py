"""Finite metric spaces, nested nets, and empirical doubling/perfectness/distortion estimates."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .errors import Degenerate, EmptySpace, MetricInvariantError, MetricMismatch, ScaleError

# relative slack for separation tests, so that grid coordinates such as
# 0.3 - 0.2 count as 0.1-separated
SEP_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """Points indexed 0..n-1 (the scan order) with labels `ids` and a distance matrix."""

    ids: tuple
    dist: np.ndarray
    coords: np.ndarray | None = None

    def __post_init__(self):
        d = np.asarray(self.dist, dtype=float)
        object.__setattr__(self, "dist", d)
        if len(self.ids) == 0:
            raise EmptySpace("metric space has no points")
        if d.shape != (len(self.ids), len(self.ids)):
            raise MetricInvariantError("distance matrix shape does not match the point list")

    @classmethod
    def from_coords(cls, coords, ids=None):
        x = np.asarray(coords, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if len(x) == 0:
            raise EmptySpace("no coordinates given")
        ids = tuple(range(len(x))) if ids is None else tuple(ids)
        return cls(ids, cdist(x, x), x)

    @classmethod
    def from_matrix(cls, matrix, ids=None, check=True):
        d = np.asarray(matrix, dtype=float)
        if d.size == 0:
            raise EmptySpace("empty distance matrix")
        ids = tuple(range(len(d))) if ids is None else tuple(ids)
        space = cls(ids, d)
        if check:
            space.validate()
        return space

    @property
    def n(self):
        return len(self.ids)

    @property
    def diameter(self):
        return float(self.dist.max())

    def validate(self, samples=200_000, seed=0, rtol=1e-12):
        """Check the metric axioms; exhaustive triangle test up to 200 points."""
        d = self.dist
        scale = max(self.diameter, 1.0)
        if np.any(np.abs(np.diag(d)) > 0):
            raise MetricInvariantError("dist(x,x) must be 0")
        if not np.allclose(d, d.T, rtol=0, atol=rtol * scale):
            i, j = np.unravel_index(np.argmax(np.abs(d - d.T)), d.shape)
            raise MetricInvariantError(f"asymmetric distance at ({self.ids[i]}, {self.ids[j]})")
        off = d + np.eye(self.n)
        if np.any(off <= 0):
            i, j = np.argwhere(off <= 0)[0]
            raise MetricInvariantError(f"non-positive distance between {self.ids[i]} and {self.ids[j]}")
        if self.n <= 200:
            for z in range(self.n):
                via = d[:, z, None] + d[None, z, :]
                if np.any(d > via + rtol * scale):
                    i, j = np.argwhere(d > via + rtol * scale)[0]
                    raise MetricInvariantError(
                        f"triangle inequality fails for ({self.ids[i]}, {self.ids[j]}) via {self.ids[z]}"
                    )
        else:
            rng = np.random.default_rng(seed)
            x, y, z = rng.integers(0, self.n, size=(3, samples))
            bad = d[x, y] > d[x, z] + d[z, y] + rtol * scale
            if np.any(bad):
                k = int(np.argmax(bad))
                raise MetricInvariantError(
                    f"triangle inequality fails for ({self.ids[x[k]]}, {self.ids[y[k]]}) via {self.ids[z[k]]}"
                )
        return True

    def scaled(self, c):
        coords = None if self.coords is None else c * self.coords
        return FiniteMetricSpace(self.ids, c * self.dist, coords)

    def ball(self, x, r):
        """Indices of the open ball B(x, r)."""
        return np.flatnonzero(self.dist[x] < r)


def normalize_diameter(space, target=0.5):
    """Rescale so that the diameter equals `target` (1/2 is the filling convention)."""
    diam = space.diameter
    if diam <= 0:
        return space
    return space.scaled(target / diam)


@dataclass(frozen=True, eq=False)
class NetHierarchy:
    """Nested a^{-k}-nets N_0 ⊆ N_1 ⊆ ... with predecessor maps."""

    space: FiniteMetricSpace
    a: float
    levels: list  # level k -> sorted array of point indices
    predecessor: list  # level k -> array parallel to levels[k]; None at level 0

    @property
    def max_level(self):
        return len(self.levels) - 1

    def scale(self, k):
        return self.a ** (-k)

    def check(self):
        """Exhaustively verify nesting, separation, maximality and predecessor minimality."""
        d = self.space.dist
        for k, net in enumerate(self.levels):
            s = self.scale(k) * (1 - SEP_RTOL)
            sub = np.where(np.eye(len(net), dtype=bool), np.inf, d[np.ix_(net, net)])
            if len(net) > 1 and sub.min() < s:
                return False
            if d[:, net].min(axis=1).max() >= s and len(net) < self.space.n:
                return False
            if k:
                prev = self.levels[k - 1]
                if not np.isin(prev, net).all():
                    return False
                best = d[np.ix_(net, prev)].min(axis=1)
                got = d[net, self.predecessor[k]]
                if np.any(got > best):
                    return False
        return True


def build_net_hierarchy(space, a, max_level):
    """Greedy nested nets: scan points in index order, keep those a^{-k}-separated."""
    if space.n == 0:
        raise EmptySpace("metric space has no points")
    if a <= 1:
        raise ScaleError(f"base scale a must exceed 1, got {a}")
    d = space.dist
    levels, preds = [], []
    accepted = np.zeros(space.n, dtype=bool)
    mind = np.full(space.n, np.inf)
    for k in range(max_level + 1):
        s = a ** (-k) * (1 - SEP_RTOL)
        for p in range(space.n):
            if not accepted[p] and mind[p] >= s:
                accepted[p] = True
                mind = np.minimum(mind, d[p])
        net = np.flatnonzero(accepted)
        levels.append(net)
        if k == 0:
            preds.append(None)
        else:
            prev = levels[k - 1]
            preds.append(prev[np.argmin(d[np.ix_(net, prev)], axis=1)])
    return NetHierarchy(space, float(a), levels, preds)


def _greedy_cover(member, ball):
    """Greedy set cover of `ball` using rows of the boolean matrix `member`."""
    uncovered = np.zeros(member.shape[1], dtype=bool)
    uncovered[ball] = True
    count = 0
    while uncovered.any():
        gain = (member & uncovered).sum(axis=1)
        c = int(np.argmax(gain))
        if gain[c] == 0:
            raise Degenerate("cover made no progress")
        uncovered &= ~member[c]
        count += 1
    return count


def doubling_constant_estimate(space, radii, centers=None, cover_centers=None):
    """Max over (x, r) of the greedy number of r/2-balls covering B(x, r).

    Covering balls are centred at `cover_centers` (all points by default).
    """
    if space.n == 0:
        raise EmptySpace("metric space has no points")
    radii = [float(r) for r in radii]
    if not radii or min(radii) <= 0:
        raise ScaleError("radii must be nonempty and positive")
    centers = range(space.n) if centers is None else centers
    d = space.dist
    best = 1
    cover = np.arange(space.n) if cover_centers is None else np.asarray(cover_centers)
    for r in radii:
        member = d[cover] < r / 2
        for x in centers:
            ball = np.flatnonzero(d[x] < r)
            best = max(best, _greedy_cover(member, ball))
    return best


def uniform_perfectness_estimate(space, grid_ratio=1.05):
    """Smallest K = grid_ratio^j with B(x,r) \\ B(x,r/K) nonempty for all relevant balls.

    A ball B(x, r) is relevant when it has nonempty complement and holds a point
    besides x. For fixed x the worst radius sits at a gap between consecutive
    distances, so the supremum over all r is max_j d_{j+1}/d_j and is computed exactly.
    """
    if space.n < 2:
        raise Degenerate("uniform perfectness needs at least two points")
    worst = 1.0
    for x in range(space.n):
        ds = np.unique(space.dist[x][space.dist[x] > 0])
        if len(ds) == 0:
            raise Degenerate("all points coincide")
        if len(ds) > 1:
            worst = max(worst, float(np.max(ds[1:] / ds[:-1])))
    j = math.ceil(math.log(worst) / math.log(grid_ratio) - 1e-9) if worst > 1 else 0
    return grid_ratio**j


@dataclass(frozen=True)
class DistortionProfile:
    t: np.ndarray  # sorted sampled d1-ratios
    eta: np.ndarray  # running max of d2-ratios
    n_triples: int
    exhaustive: bool
    meta: dict = field(default_factory=dict)

    def __call__(self, t):
        """Envelope value: max observed d2-ratio over samples with d1-ratio <= t."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.t, t, side="right") - 1
        return np.where(idx >= 0, self.eta[np.maximum(idx, 0)], 0.0)

    def power_fit(self):
        """Least-squares exponents of log eta against log t below and above t = 1."""
        out = {}
        for name, mask in (("below", (self.t > 0) & (self.t < 1)), ("above", self.t > 1)):
            if mask.sum() >= 2:
                slope, icpt = np.polyfit(np.log(self.t[mask]), np.log(self.eta[mask]), 1)
                out[name] = (float(slope), float(np.exp(icpt)))
        return out


def quasisymmetry_distortion_estimate(space, d2, max_triples=200_000, seed=0):
    """Empirical distortion envelope of the identity map (X, d1) -> (X, d2)."""
    if isinstance(d2, FiniteMetricSpace):
        if tuple(d2.ids) != tuple(space.ids):
            raise MetricMismatch("the two metrics are defined on different point sets")
        D2 = d2.dist
    else:
        D2 = np.asarray(d2, dtype=float)
        if D2.shape != space.dist.shape:
            raise MetricMismatch("second metric has the wrong shape")
    D1 = space.dist
    n = space.n
    total = n * (n - 1) * (n - 1)
    exhaustive = n < 100 or total <= max_triples
    if exhaustive:
        ts, vs = [], []
        for x in range(n):
            others = np.delete(np.arange(n), x)
            num1, num2 = D1[x, others], D2[x, others]
            ts.append((num1[:, None] / num1[None, :]).ravel())
            vs.append((num2[:, None] / num2[None, :]).ravel())
        t = np.concatenate(ts)
        v = np.concatenate(vs)
    else:
        rng = np.random.default_rng(seed)
        flat = rng.choice(total, size=max_triples, replace=False)
        x, rest = np.divmod(flat, (n - 1) * (n - 1))
        ai, bi = np.divmod(rest, n - 1)
        a = ai + (ai >= x)
        b = bi + (bi >= x)
        t = D1[x, a] / D1[x, b]
        v = D2[x, a] / D2[x, b]
    order = np.argsort(t, kind="stable")
    t, v = t[order], v[order]
    env = np.maximum.accumulate(v)
    # collapse equal t values onto their last (largest) envelope value
    keep = np.ones(len(t), dtype=bool)
    keep[:-1] = t[1:] != t[:-1]
    return DistortionProfile(t[keep], env[keep], len(order), exhaustive)
