"""Capacities and Harnack-type diagnostics on weighted graphs and 1-D densities."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy import integrate
from scipy.sparse.csgraph import connected_components

from ._linalg import solve_spd
from ._parallel import ordered_map
from .errors import (
    Degenerate,
    EmptyInterior,
    MassError,
    Overlap,
    ParamError,
    ScaleError,
)


# ---------------------------------------------------------------------------
# carriers


@dataclass(frozen=True, eq=False)
class GraphForm:
    """E(u, u) = sum over edges of c_e (u_x - u_y)^2 with a positive vertex measure."""

    n: int
    edges: np.ndarray
    conductance: np.ndarray
    measure: np.ndarray
    ids: tuple | None = None

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        c = np.asarray(self.conductance, dtype=float).reshape(-1)
        m = np.asarray(self.measure, dtype=float).reshape(-1)
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "conductance", c)
        object.__setattr__(self, "measure", m)
        if len(c) != len(e):
            raise ParamError("one conductance per edge is required")
        if np.any(c < 0) or not np.all(np.isfinite(c)):
            raise ParamError("conductances must be finite and nonnegative")
        if m.shape != (self.n,) or np.any(m <= 0):
            raise MassError("vertex measure must be positive on every vertex")
        if len(e) and (e.min() < 0 or e.max() >= self.n):
            raise ParamError("edge endpoint out of range")
        if np.any(e[:, 0] == e[:, 1]):
            raise ParamError("self-loops are not allowed")

    @classmethod
    def path(cls, n_vertices, conductance=1.0, measure=1.0):
        e = np.column_stack([np.arange(n_vertices - 1), np.arange(1, n_vertices)])
        return cls(
            n_vertices,
            e,
            np.full(n_vertices - 1, float(conductance)),
            np.full(n_vertices, float(measure)),
        )

    @classmethod
    def from_matrix(cls, Q, measure=None):
        """Form from a symmetric energy matrix whose off-diagonal entries are -c_xy."""
        Q = sp.coo_matrix(Q)
        mask = (Q.row < Q.col) & (Q.data != 0)
        n = Q.shape[0]
        m = np.ones(n) if measure is None else measure
        return cls(n, np.column_stack([Q.row[mask], Q.col[mask]]), -Q.data[mask], m)

    @property
    def adjacency(self):
        e, c = self.edges, self.conductance
        W = sp.coo_matrix(
            (np.concatenate([c, c]), (np.concatenate([e[:, 0], e[:, 1]]), np.concatenate([e[:, 1], e[:, 0]]))),
            shape=(self.n, self.n),
        ).tocsr()
        W.sum_duplicates()
        return W

    @property
    def laplacian(self):
        W = self.adjacency
        return (sp.diags(np.asarray(W.sum(axis=1)).ravel()) - W).tocsr()

    def energy(self, u, v=None):
        u = np.asarray(u, dtype=float)
        v = u if v is None else np.asarray(v, dtype=float)
        du = u[self.edges[:, 0]] - u[self.edges[:, 1]]
        dv = v[self.edges[:, 0]] - v[self.edges[:, 1]]
        return float(np.sum(self.conductance * du * dv))

    def components(self):
        return connected_components(self.adjacency, directed=False)


@dataclass(frozen=True)
class BallSpec:
    center: int
    radius: float
    vertices: np.ndarray

    @classmethod
    def realize(cls, dist, center, radius):
        return cls(int(center), float(radius), np.flatnonzero(np.asarray(dist)[center] < radius))

    def check(self, dist):
        return np.array_equal(self.vertices, np.flatnonzero(np.asarray(dist)[self.center] < self.radius))


def _as_set(x, n):
    idx = np.unique(np.asarray(list(x) if not isinstance(x, np.ndarray) else x, dtype=np.int64))
    if len(idx) and (idx.min() < 0 or idx.max() >= n):
        raise ParamError("vertex index out of range")
    return idx


# ---------------------------------------------------------------------------
# capacity


@dataclass(frozen=True)
class CapacityResult:
    value: float
    potential: np.ndarray
    connected: bool
    flags: tuple = ()


def capacity(form, A, B, rtol=1e-10):
    """Cap(A, B) with the equilibrium potential (1 on A, 0 on B, harmonic elsewhere).

    Interior components touching only A are set to 1 and those touching neither
    to 0; neither choice carries energy.
    """
    A = _as_set(A, form.n)
    B = _as_set(B, form.n)
    if len(A) == 0 or len(B) == 0:
        raise ParamError("A and B must be nonempty")
    if np.intersect1d(A, B).size:
        raise Overlap("A and B intersect")
    u = np.zeros(form.n)
    u[A] = 1.0
    free = np.ones(form.n, dtype=bool)
    free[A] = False
    free[B] = False
    I = np.flatnonzero(free)
    W = form.adjacency
    flags = []
    if len(I):
        WI = W[I][:, I]
        ncomp, lab = connected_components(WI, directed=False)
        toA = np.asarray(W[I][:, A].sum(axis=1)).ravel()
        toB = np.asarray(W[I][:, B].sum(axis=1)).ravel()
        compB = np.bincount(lab, weights=toB, minlength=ncomp) > 0
        compA = np.bincount(lab, weights=toA, minlength=ncomp) > 0
        solve = compB[lab]
        u[I[compA[lab] & ~compB[lab]]] = 1.0
        S = I[solve]
        if len(S):
            L = form.laplacian
            LSS = L[S][:, S]
            rhs = -(L[S][:, A] @ np.ones(len(A)))
            u[S] = solve_spd(LSS, rhs, rtol=rtol)
    value = form.energy(u)
    u = np.clip(u, 0.0, 1.0)
    ncomp, lab = form.components()
    connected = bool(np.intersect1d(lab[A], lab[B]).size)
    if not connected:
        flags.append("no path between A and B")
        value = 0.0
    return CapacityResult(float(value), u, connected, tuple(flags))


# ---------------------------------------------------------------------------
# elliptic Harnack


def _ball_boundary(form, inside):
    W = form.adjacency
    mask = np.zeros(form.n, dtype=bool)
    mask[inside] = True
    touch = np.asarray(W[inside].sum(axis=0)).ravel() > 0
    return np.flatnonzero(touch & ~mask)


@dataclass(frozen=True)
class EHIResult:
    worst: float
    per_ball: list  # (center, radius, ratio)
    lower_bound: bool = True


def harmonic_measure_basis(form, inside, boundary):
    """Columns: harmonic extensions of boundary-vertex indicators into `inside`."""
    L = form.laplacian
    LVV = L[inside][:, inside]
    LVb = L[inside][:, boundary]
    ncomp, lab = connected_components(form.adjacency[inside][:, inside], directed=False)
    touches = np.bincount(lab, weights=-np.asarray(LVb.sum(axis=1)).ravel(), minlength=ncomp) > 0
    if not touches.all():
        raise Degenerate("part of the ball is not connected to its boundary")
    return solve_spd(LVV, -LVb.toarray())


def ehi_constant_probe(form, dist, balls, delta, n_random=64, seed=0):
    """Lower bound on the EHI constant: sup/inf ratios of nonnegative harmonic functions."""
    if not 0 < delta < 1:
        raise ParamError("delta must lie in (0, 1)")
    dist = np.asarray(dist)

    def one(ball):
        inside = ball.vertices
        if len(inside) == form.n:
            raise ParamError(f"ball at {ball.center} has empty complement")
        boundary = _ball_boundary(form, inside)
        if len(boundary) == 0:
            raise ParamError(f"ball at {ball.center} has no boundary vertices")
        small = np.flatnonzero(dist[ball.center, inside] < delta * ball.radius)
        if len(small) == 0:
            raise EmptyInterior(f"the delta-ball at {ball.center} has no vertices")
        H = harmonic_measure_basis(form, inside, boundary)[small]
        rng = np.random.default_rng([seed, ball.center])
        combos = rng.exponential(size=(len(boundary), n_random))
        vals = np.hstack([H, H @ combos])
        lo = vals.min(axis=0)
        hi = vals.max(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(lo > 0, hi / lo, np.where(hi > 0, np.inf, 1.0))
        return float(r.max())

    ratios = ordered_map(one, balls)
    rows = [(b.center, b.radius, r) for b, r in zip(balls, ratios)]
    return EHIResult(max(ratios) if ratios else 1.0, rows)


# ---------------------------------------------------------------------------
# volume doubling


def dyadic_radii(top, bottom):
    """top, top/2, ... down to the last value >= bottom."""
    if top <= 0 or bottom <= 0:
        raise ScaleError("radii must be positive")
    out = []
    r = float(top)
    while r >= bottom * (1 - 1e-12):
        out.append(r)
        r /= 2
    return out


@dataclass(frozen=True)
class VDResult:
    C_D: float
    c_D: float
    alpha: float
    octaves: int
    flags: tuple
    rows: list  # (center, r, m(B(x,r)), m(B(x,2r)))


def vd_rvd_check(dist, measure, centers=None, C2=4.0, radii=None):
    """Doubling constant, reverse-doubling constant and fitted volume exponent.

    Radii are dyadic from diam/C2 down to the smallest positive distance. C_D is
    the largest doubling ratio, c_D the smallest one, and alpha the common slope
    of log m(B(x, r)) against log r with one intercept per centre.
    """
    dist = np.asarray(dist, dtype=float)
    m = np.asarray(measure, dtype=float)
    n = len(m)
    centers = range(n) if centers is None else centers
    diam = dist.max()
    if radii is None:
        pos = dist[dist > 0]
        if len(pos) == 0:
            raise Degenerate("all points coincide")
        radii = dyadic_radii(diam / C2, pos.min())
    radii = sorted(float(r) for r in radii)
    rows, ratios, xs, ys, groups = [], [], [], [], []
    for gi, x in enumerate(centers):
        for r in radii:
            m1 = float(m[dist[x] < r].sum())
            m2 = float(m[dist[x] < 2 * r].sum())
            rows.append((int(x), r, m1, m2))
            if m1 > 0:
                ratios.append(m2 / m1)
                xs.append(math.log(r))
                ys.append(math.log(m1))
                groups.append(gi)
            elif m2 > 0:
                ratios.append(math.inf)
    flags = []
    octaves = len(radii)
    if octaves < 4:
        flags.append("insufficient scales")
    C_D = max(ratios) if ratios else math.nan
    c_D = min(ratios) if ratios else math.nan
    alpha = _pooled_slope(np.array(xs), np.array(ys), np.array(groups))
    if np.count_nonzero(m) == 1:
        flags.append("point mass")
    if not alpha > 0.1:
        flags.append("reverse doubling fails")
    if not math.isfinite(C_D):
        flags.append("doubling fails")
    return VDResult(C_D, c_D, alpha, octaves, tuple(flags), rows)


def _pooled_slope(x, y, g):
    """Least-squares slope shared by all groups, each with its own intercept."""
    if len(x) < 2:
        return math.nan
    xc, yc = x.copy(), y.copy()
    for k in np.unique(g):
        s = g == k
        xc[s] -= x[s].mean()
        yc[s] -= y[s].mean()
    den = float(np.dot(xc, xc))
    return float(np.dot(xc, yc) / den) if den > 0 else math.nan


# ---------------------------------------------------------------------------
# cap(beta)


@dataclass(frozen=True)
class CapBetaResult:
    C1: float
    scales: list  # radius per scale
    scale_ratio: list  # geometric mean of Cap R^beta / m(B) per scale
    rows: list  # (center, R, cap, m(B), ratio)
    slope: float
    trend: bool


def _trend(xs, ys, min_scales=4, tol=0.25):
    """Monotone over >= min_scales points and |slope of log y vs log x| > tol."""
    if len(xs) < 2:
        return math.nan, False
    lx, ly = np.log(xs), np.log(ys)
    slope = float(np.polyfit(lx, ly, 1)[0])
    order = np.argsort(lx)
    d = np.diff(ly[order])
    mono = bool(np.all(d > 0) or np.all(d < 0))
    return slope, mono and len(xs) >= min_scales and abs(slope) > tol


def cap_beta_check(form, dist, measure, beta, A1=2.0, centers=(), radii=()):
    """Two-sided constant in Cap(B(x,R), B(x,A1 R)^c) ~ m(B(x,R)) / R^beta."""
    dist = np.asarray(dist, dtype=float)
    m = np.asarray(measure, dtype=float)
    jobs = [(int(x), float(R)) for R in radii for x in centers]

    def one(job):
        x, R = job
        inner = np.flatnonzero(dist[x] < R)
        outer = np.flatnonzero(dist[x] >= A1 * R)
        if len(outer) == 0:
            return None
        c = capacity(form, inner, outer).value
        mb = float(m[inner].sum())
        return (x, R, c, mb, c * R**beta / mb)

    rows = [r for r in ordered_map(one, jobs) if r is not None]
    if not rows:
        raise ParamError("no annulus had a nonempty exterior")
    scales, per = [], []
    for R in sorted({r[1] for r in rows}):
        vals = [r[4] for r in rows if r[1] == R]
        scales.append(R)
        per.append(float(np.exp(np.mean(np.log(vals)))))
    allr = np.array([r[4] for r in rows])
    C1 = float(max(allr.max(), 1 / allr.min()))
    slope, trend = _trend(np.array(scales), np.array(per))
    return CapBetaResult(C1, scales, per, rows, slope, trend)


# ---------------------------------------------------------------------------
# Poincare


@dataclass(frozen=True)
class PoincareResult:
    C_P: float
    per_ball: list  # (center, radius, value)
    flags: tuple


def _variance_matrix(n, idx, m):
    """fᵀ M f = sum_{z in idx} m_z (f_z - mean)^2 with the m-weighted mean over idx."""
    M = np.zeros((n, n))
    mv = m[idx]
    tot = mv.sum()
    M[np.ix_(idx, idx)] = np.diag(mv) - np.outer(mv, mv) / tot
    return M


def _rayleigh_max_dense(L, M, tol=1e-10):
    lam, U = np.linalg.eigh(L)
    scale = max(lam.max(), 1.0)
    null = lam <= tol * scale
    N = U[:, null]
    if N.size and np.abs(M @ N).max() > tol * max(np.abs(M).max(), 1e-300):
        return math.inf
    R = U[:, ~null] / np.sqrt(lam[~null])
    if R.shape[1] == 0:
        return 0.0
    return float(max(np.linalg.eigvalsh(R.T @ M @ R).max(), 0.0))


def _rayleigh_max_power(L, idx_local, m_local, iters=200, tol=1e-10, seed=0):
    """Inverse power iteration for max fᵀMf / fᵀLf on a connected graph."""
    n = L.shape[0]
    keep = np.arange(1, n)
    Lg = L[keep][:, keep]
    tot = m_local.sum()
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(n)

    def apply_M(f):
        out = np.zeros(n)
        fm = np.dot(m_local, f[idx_local]) / tot
        out[idx_local] = m_local * (f[idx_local] - fm)
        return out

    val = 0.0
    for _ in range(iters):
        g = apply_M(f)
        x = np.zeros(n)
        x[keep] = solve_spd(Lg, g[keep])
        x -= x.mean()
        num = float(x @ apply_M(x))
        den = float(x @ (L @ x))
        new = num / den if den > 0 else math.inf
        f = x / np.linalg.norm(x)
        if abs(new - val) <= tol * abs(new):
            return new
        val = new
    return val


def poincare_constant_estimate(form, dist, balls, A=2.0, gamma=2.0, method="auto"):
    """max over balls of s^{-gamma} sup_f Var_{m,B}(f) / E_{B(y,As)}(f, f).

    Energy counts edges with both endpoints in the inflated ball.
    """
    dist = np.asarray(dist, dtype=float)
    flags = []

    def one(ball):
        if len(ball.vertices) <= 1:
            return 0.0
        W_idx = np.flatnonzero(dist[ball.center] < A * ball.radius)
        pos = np.searchsorted(W_idx, ball.vertices)
        e = form.edges
        inW = np.zeros(form.n, dtype=bool)
        inW[W_idx] = True
        keep = inW[e[:, 0]] & inW[e[:, 1]]
        sub = GraphForm(
            len(W_idx),
            np.searchsorted(W_idx, e[keep]),
            form.conductance[keep],
            form.measure[W_idx],
        )
        L = sub.laplacian
        use_dense = method == "dense" or (method == "auto" and len(W_idx) <= 2000)
        if use_dense:
            M = _variance_matrix(len(W_idx), pos, form.measure[W_idx])
            q = _rayleigh_max_dense(L.toarray(), M)
        else:
            ncomp, _ = sub.components()
            if ncomp > 1:
                return math.inf
            q = _rayleigh_max_power(L, pos, form.measure[ball.vertices])
        return q * ball.radius ** (-gamma)

    vals = ordered_map(one, balls)
    if any(math.isinf(v) for v in vals):
        flags.append("inflated ball disconnected: zero energy with positive variance")
    rows = [(b.center, b.radius, v) for b, v in zip(balls, vals)]
    return PoincareResult(max(vals) if vals else 0.0, rows, tuple(flags))


# ---------------------------------------------------------------------------
# reverse Holder / A-infinity


@dataclass(frozen=True)
class ReverseHolderResult:
    C_p: float
    C_sqrt: float
    p: float
    rows: list  # (label, C_p, C_sqrt)


def _rh_pair(mw, ww, p):
    """(p-form ratio, sqrt-form ratio) for weights ww with base masses mw."""
    if np.ptp(ww) == 0:
        return 1.0, 1.0
    tot = mw.sum()
    a1 = np.dot(mw, ww) / tot
    ap = (np.dot(mw, ww**p) / tot) ** (1 / p)
    ah = np.dot(mw, np.sqrt(ww)) / tot
    cp = ap / a1 if a1 > 0 else math.inf
    cs = a1 / ah**2 if ah > 0 else math.inf
    return float(cp), float(cs)


def reverse_holder_check(dist, m, w, p=2.0, balls=()):
    """Discrete reverse-Hölder constants over realized balls."""
    if p <= 1:
        raise ParamError("p must exceed 1")
    m = np.asarray(m, dtype=float)
    w = np.asarray(w, dtype=float)
    if np.any(w < 0):
        raise ParamError("weight must be nonnegative")
    rows = []
    for b in balls:
        v = b.vertices
        cp, cs = _rh_pair(m[v], w[v], p)
        rows.append(((b.center, b.radius), cp, cs))
    return ReverseHolderResult(
        max(r[1] for r in rows), max(r[2] for r in rows), p, rows
    )


@dataclass(frozen=True, eq=False)
class WeightedMeasure1D:
    """Density samples g >= 0 on a grid; g is interpolated linearly between nodes.

    Integrals of g^q are exact for the interpolant, so q = 1 is the trapezoid rule.
    """

    x: np.ndarray
    g: np.ndarray
    _cum: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        g = np.asarray(self.g, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "g", g)
        if x.ndim != 1 or x.shape != g.shape or len(x) < 2:
            raise ParamError("need matching 1-D grid and samples with at least two points")
        if np.any(np.diff(x) <= 0):
            raise ParamError("grid must be strictly increasing")
        if np.any(g < 0) or not np.all(np.isfinite(g)):
            raise ParamError("density samples must be finite and nonnegative")

    @classmethod
    def from_function(cls, f, lo, hi, n):
        x = np.linspace(lo, hi, n)
        return cls(x, f(x))

    def cumulative(self, q=1.0):
        if q not in self._cum:
            seg = _power_segment(self.g[:-1], self.g[1:], np.diff(self.x), q)
            self._cum[q] = np.concatenate([[0.0], np.cumsum(seg)])
        return self._cum[q]

    def _F(self, t, q):
        c = self.cumulative(q)
        t = np.clip(np.asarray(t, dtype=float), self.x[0], self.x[-1])
        i = np.clip(np.searchsorted(self.x, t, side="right") - 1, 0, len(self.x) - 2)
        h = t - self.x[i]
        y0 = self.g[i]
        yt = y0 + (self.g[i + 1] - y0) / (self.x[i + 1] - self.x[i]) * h
        return c[i] + _power_segment(y0, yt, h, q)

    def integral(self, a, b, q=1.0):
        """Integral of (interpolated g^q) over [a, b]."""
        return self._F(b, q) - self._F(a, q)

    def intrinsic_distance(self, a, b):
        return np.abs(self.integral(a, b, 0.5))

    @property
    def total(self):
        return float(self.cumulative(1.0)[-1])


def _power_segment(y0, y1, h, q):
    """Integral of y^q over a segment of length h on which y is linear from y0 to y1."""
    y0, y1, h = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (y0, y1, h)))
    d = y1 - y0
    close = np.abs(d) <= 1e-9 * np.maximum(np.maximum(y0, y1), 1e-300)
    with np.errstate(divide="ignore", invalid="ignore"):
        exact = h * (y1 ** (q + 1) - y0 ** (q + 1)) / ((q + 1) * d)
    return np.where(close, h * ((y0 + y1) / 2) ** q, exact)


def dyadic_intervals(lo, hi, levels):
    """All dyadic subintervals of [lo, hi] at generations 0..levels."""
    out = []
    for j in range(levels + 1):
        edges = np.linspace(lo, hi, 2**j + 1)
        out.extend(zip(edges[:-1], edges[1:]))
    return out


def reverse_holder_1d(wm, intervals, p=2.0):
    if p <= 1:
        raise ParamError("p must exceed 1")
    rows = []
    for a, b in intervals:
        L = b - a
        i1 = wm.integral(a, b, 1.0) / L
        ip = (wm.integral(a, b, p) / L) ** (1 / p)
        ih = wm.integral(a, b, 0.5) / L
        seg = wm.g[(wm.x >= a) & (wm.x <= b)]
        if len(seg) and np.ptp(seg) == 0 and i1 > 0:
            cp = cs = 1.0
        else:
            cp = ip / i1 if i1 > 0 else (1.0 if ip == 0 else math.inf)
            cs = i1 / ih**2 if ih > 0 else (1.0 if i1 == 0 else math.inf)
        rows.append(((float(a), float(b)), float(cp), float(cs)))
    return ReverseHolderResult(max(r[1] for r in rows), max(r[2] for r in rows), p, rows)


def power_weight_grid(t, lo=-1.0, hi=1.0, n=2**14):
    """Samples of |x|^t; for t < 0 the grid is shifted by half a cell so it avoids 0."""
    if t < 0:
        h = (hi - lo) / n
        x = np.linspace(lo + h / 2, hi - h / 2, n)
        x = np.concatenate([[lo], x, [hi]])
    else:
        x = np.linspace(lo, hi, n + 1)
    return WeightedMeasure1D(x, np.abs(x) ** t)


def power_weight_rh_closed_form(t, p, a, b):
    """Exact (p-form, sqrt-form) ratios of |x|^t on [a, b] (a, b same sign or one zero)."""

    def I(s):  # integral of |x|^s over [a, b]
        if s <= -1 and a <= 0 <= b:
            return math.inf
        f = lambda x: math.copysign(abs(x) ** (s + 1) / (s + 1), x)
        return f(b) - f(a)

    L = b - a
    i1 = I(t) / L
    ip = I(p * t) / L
    ih = I(t / 2) / L
    return ip ** (1 / p) / i1, i1 / ih**2


# ---------------------------------------------------------------------------
# maximal semi-metric


def max_semimetric(H):
    """Largest semi-metric below h, via Floyd-Warshall on min(h, hᵀ)."""
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ParamError("h must be a square matrix")
    if np.any(H < 0):
        raise ParamError("h must be nonnegative")
    D = np.minimum(H, H.T).copy()
    np.fill_diagonal(D, 0.0)
    for k in range(len(D)):
        np.minimum(D, D[:, k, None] + D[None, k, :], out=D)
    return D


def power_weight_disc_mass(c1, r, t):
    """Integral of |y_1|^t over the disc of radius r whose centre has first coordinate c1."""
    c1 = abs(float(c1))
    if r <= 0:
        return 0.0
    f = lambda u: abs(c1 + u) ** t * 2 * math.sqrt(max(r * r - u * u, 0.0))
    brk = [-c1] if -r < -c1 < r else None
    val, _ = integrate.quad(f, -r, r, points=brk, limit=200, epsabs=0, epsrel=1e-11)
    return val


def defh_matrix(points, t=1.0, gamma=2.0):
    """h(x, y) = sqrt(mu(B(x, d)) d^gamma / m(B(x, d))) for mu = |x_1|^t dm on the plane."""
    P = np.asarray(points, dtype=float)
    d = np.sqrt(((P[:, None, :] - P[None, :, :]) ** 2).sum(-1))
    n = len(P)
    H = np.zeros((n, n))
    cache = {}
    for i in range(n):
        c1 = round(abs(P[i, 0]), 12)
        for j in range(n):
            if i == j:
                continue
            r = round(d[i, j], 12)
            key = (c1, r)
            if key not in cache:
                cache[key] = power_weight_disc_mass(c1, r, t) / (math.pi * r * r)
            H[i, j] = math.sqrt(cache[key] * d[i, j] ** gamma)
    return H


def grid_2d(k, width=0.25, height=1.0):
    """Points of a 2^{-k} grid on [-width, width] x [0, height]."""
    s = 2.0**-k
    xs = np.arange(-round(width / s), round(width / s) + 1) * s
    ys = np.arange(0, round(height / s) + 1) * s
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    return np.column_stack([X.ravel(), Y.ravel()])


# ---------------------------------------------------------------------------
# 1-D Gaussian uniformization criterion


@dataclass(frozen=True)
class Gaussian1DResult:
    C: float
    per_scale: list  # (window length, max C over windows)
    slope: float
    admissible: bool
    d_int_total: float
    measure: WeightedMeasure1D

    def d_int(self, a, b):
        return float(self.measure.intrinsic_distance(a, b))


def gaussian_1d_check(wm, min_cells=2, max_constant=1e6, slope_tol=0.25):
    """sup over windows of sqrt(|I| int_I g) / int_I sqrt(g), scale by scale.

    Windows of length |X| 2^{-j} start at every grid node; 0/0 counts as 1.
    Admissible iff every constant is finite, the largest stays below
    max_constant, and log C has no trend in log |I| beyond slope_tol over the
    scales j >= 1.
    """
    x = wm.x
    L = x[-1] - x[0]
    hmin = np.diff(x).min()
    per = []
    j = 0
    while L * 2.0**-j >= min_cells * hmin * (1 - 1e-12):
        s = L * 2.0**-j
        a = x[x + s <= x[-1] + 1e-12 * L]
        b = np.minimum(a + s, x[-1])
        g1 = wm.integral(a, b, 1.0)
        gh = wm.integral(a, b, 0.5)
        num = np.sqrt(np.maximum(s * g1, 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            c = np.where(gh > 0, num / gh, np.where(num > 0, np.inf, 1.0))
        per.append((float(s), float(c.max())))
        j += 1
    Cs = np.array([c for _, c in per])
    C = float(Cs.max())
    finite = bool(np.all(np.isfinite(Cs)))
    # the full-length window cannot slide, so it is left out of the trend fit
    sliding = [(s, c) for s, c in per if s <= L / 2 * (1 + 1e-12)]
    if finite and len(sliding) >= 2:
        slope = float(np.polyfit(np.log([s for s, _ in sliding]), np.log([c for _, c in sliding]), 1)[0])
    else:
        slope = math.nan if not finite else 0.0
    admissible = finite and C < max_constant and abs(slope) < slope_tol
    return Gaussian1DResult(C, per, slope, admissible, float(wm.intrinsic_distance(x[0], x[-1])), wm)
