"""Hyperbolic fillings over net hierarchies, weight functions and their synthesis.

Vertices are balls B = B(x_B, 2 a^{-k}) indexed by integers in construction
order: level by level, and within a level in point-index order of the net.
Genealogy products pi are stored as logarithms throughout.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from .errors import (
    CompatibilityDrift,
    DepthError,
    Disconnected,
    MassError,
    NoNonPeripheralChild,
    ParamError,
    S1Violated,
    S2Violated,
    SigmaRangeError,
    SubadditivityViolated,
)
from .metric_core import uniform_perfectness_estimate

ALPHA = 2.0


# ---------------------------------------------------------------------------
# graph


@dataclass(frozen=True, eq=False)
class FillingGraph:
    nets: object
    lam: float
    K_P: float
    strict: bool
    level: np.ndarray
    center: np.ndarray
    radius: np.ndarray
    parent: np.ndarray
    offsets: np.ndarray  # vertices of level k are offsets[k]..offsets[k+1]-1
    h_edges: np.ndarray  # (E, 2), i < j
    neighbors: list  # per vertex, horizontal neighbours (self excluded)
    children: list
    degree_bound: float | None = None

    @property
    def a(self):
        return self.nets.a

    @property
    def space(self):
        return self.nets.space

    @property
    def n_vertices(self):
        return len(self.level)

    @property
    def max_level(self):
        return len(self.offsets) - 2

    @property
    def root(self):
        return 0

    def level_vertices(self, k):
        return np.arange(self.offsets[k], self.offsets[k + 1])

    def vertex_at(self, k, point):
        net = self.nets.levels[k]
        pos = int(np.searchsorted(net, point))
        if pos >= len(net) or net[pos] != point:
            raise ParamError(f"point {point} is not in the level-{k} net")
        return int(self.offsets[k] + pos)

    @property
    def D_h(self):
        """Max number of horizontal neighbours including the vertex itself."""
        return 1 + max((len(n) for n in self.neighbors), default=0)

    @property
    def D_v(self):
        return max((len(c) for c in self.children), default=0)

    def hop_reach(self, k):
        return 2 * self.lam * 2 * self.a ** (-k)

    @property
    def nonperipheral(self):
        """True where every horizontal neighbour has the same parent (the root counts as True)."""
        out = np.ones(self.n_vertices, dtype=bool)
        for v in range(1, self.n_vertices):
            nb = self.neighbors[v]
            out[v] = bool(np.all(self.parent[nb] == self.parent[v])) if len(nb) else True
        return out

    def genealogy(self, v):
        out = [v]
        while self.parent[out[-1]] >= 0:
            out.append(int(self.parent[out[-1]]))
        return out[::-1]

    def descendants_at(self, v, n):
        """Vertices of level n descending from v."""
        cur = np.array([v])
        for _ in range(int(self.level[v]), n):
            cur = np.concatenate([self.children[u] for u in cur]) if len(cur) else cur
        return cur

    def to_json(self):
        return {
            "a": self.a,
            "lambda": self.lam,
            "K_P": self.K_P,
            "strict": self.strict,
            "vertices": [
                {
                    "id": int(v),
                    "level": int(self.level[v]),
                    "center": int(self.center[v]),
                    "radius": float(self.radius[v]),
                    "parent": int(self.parent[v]),
                }
                for v in range(self.n_vertices)
            ],
            "edges": [{"u": int(i), "v": int(j), "kind": "h"} for i, j in self.h_edges]
            + [
                {"u": int(v), "v": int(self.parent[v]), "kind": "v"}
                for v in range(1, self.n_vertices)
            ],
        }


def degree_bound(K_D, lam):
    """Bound on |{B' ~ B}| from doubling: a 4*lam*s ball meets at most K_D^m s-separated centres."""
    m = math.floor(math.log2(8 * lam)) + 1
    return float(K_D) ** m


def build_filling(nets, lam, strict=False, K_P=None, K_D=None):
    """Filling graph with horizontal edges d(x_B, x_B') < lam (r_B + r_B')."""
    if lam < 3:
        raise ParamError(f"lambda must be at least 3, got {lam}")
    if len(nets.levels[0]) != 1:
        raise ParamError("level 0 must be a single point; normalise the diameter below 1")
    a = nets.a
    if K_P is None:
        K_P = uniform_perfectness_estimate(nets.space) if nets.space.n > 1 else 1.0
    if strict and (lam < 32 or a < 24 * max(lam, K_P)):
        raise ParamError(
            f"strict mode needs lambda >= 32 and a >= 24 max(lambda, K_P); "
            f"got lambda={lam}, a={a}, K_P={K_P:.4g}"
        )
    d = nets.space.dist
    levels, centers, radii, parents = [], [], [], []
    offsets = [0]
    for k, net in enumerate(nets.levels):
        levels.append(np.full(len(net), k))
        centers.append(net)
        radii.append(np.full(len(net), 2 * a ** (-k)))
        if k == 0:
            parents.append(np.array([-1]))
        else:
            prev = nets.levels[k - 1]
            parents.append(offsets[k - 1] + np.searchsorted(prev, nets.predecessor[k]))
        offsets.append(offsets[-1] + len(net))
    level = np.concatenate(levels)
    center = np.concatenate(centers)
    radius = np.concatenate(radii)
    parent = np.concatenate(parents).astype(np.int64)
    nv = len(level)
    neighbors = [None] * nv
    edges = []
    for k, net in enumerate(nets.levels):
        reach = lam * 2 * (2 * a ** (-k))
        close = d[np.ix_(net, net)] < reach
        np.fill_diagonal(close, False)
        base = offsets[k]
        for i in range(len(net)):
            neighbors[base + i] = base + np.flatnonzero(close[i])
        ii, jj = np.nonzero(np.triu(close, 1))
        edges.append(np.column_stack([base + ii, base + jj]))
    children = [[] for _ in range(nv)]
    for v in range(1, nv):
        children[parent[v]].append(v)
    children = [np.array(c, dtype=np.int64) for c in children]
    g = FillingGraph(
        nets=nets,
        lam=float(lam),
        K_P=float(K_P),
        strict=strict,
        level=level,
        center=center,
        radius=radius,
        parent=parent,
        offsets=np.array(offsets),
        h_edges=np.concatenate(edges).astype(np.int64) if edges else np.zeros((0, 2), int),
        neighbors=neighbors,
        children=children,
        degree_bound=None if K_D is None else degree_bound(K_D, lam),
    )
    if g.degree_bound is not None and g.D_h > g.degree_bound:
        raise ParamError(f"horizontal degree {g.D_h} exceeds the doubling bound {g.degree_bound}")
    return g


# ---------------------------------------------------------------------------
# weights


@dataclass(eq=False)
class WeightFunction:
    graph: FillingGraph
    rho: np.ndarray
    log_pi: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    @classmethod
    def from_rho(cls, graph, rho, diagnostics=None):
        rho = np.asarray(rho, dtype=float)
        if rho.shape != (graph.n_vertices,):
            raise ParamError("rho must have one value per vertex")
        if np.any(rho <= 0):
            raise ParamError("rho must be positive")
        log_rho = np.log(rho)
        log_pi = np.empty_like(log_rho)
        log_pi[0] = log_rho[0]
        for v in range(1, graph.n_vertices):  # parents precede children
            log_pi[v] = log_pi[graph.parent[v]] + log_rho[v]
        return cls(graph, rho, log_pi, diagnostics or {})

    @classmethod
    def constant(cls, graph, c):
        return cls.from_rho(graph, np.full(graph.n_vertices, float(c)))

    @property
    def pi(self):
        return np.exp(self.log_pi)


@dataclass(frozen=True)
class H1Result:
    eta_minus: float
    eta_plus: float

    @property
    def passed(self):
        return self.eta_minus > 0 and self.eta_plus < 1

    def __iter__(self):
        return iter((self.eta_minus, self.eta_plus))


def check_H1(w):
    return H1Result(float(w.rho.min()), float(w.rho.max()))


def check_H2(w):
    """K0 = max pi-ratio across horizontal edges (1 when there are none)."""
    e = w.graph.h_edges
    if len(e) == 0:
        return 1.0
    return float(np.exp(np.abs(w.log_pi[e[:, 0]] - w.log_pi[e[:, 1]]).max()))


def rho_star(graph, rho):
    out = np.array(rho, dtype=float)
    for v in range(graph.n_vertices):
        nb = graph.neighbors[v]
        if len(nb):
            out[v] = min(out[v], rho[nb].min())
    return out


@dataclass(frozen=True)
class CrossingRegion:
    """Level-(k+1) vertices split by their position relative to B and 2B."""

    B: int
    start: np.ndarray
    inside: np.ndarray  # boolean over the level, centres in 2B
    outside: np.ndarray  # boolean over the level, centres outside 2B
    level_vertices: np.ndarray


def crossing_region(graph, B):
    k = int(graph.level[B])
    if k + 1 > graph.max_level:
        return None
    verts = graph.level_vertices(k + 1)
    dd = graph.space.dist[graph.center[B], graph.center[verts]]
    r = graph.radius[B]
    return CrossingRegion(B, verts[dd < r], dd < 2 * r, dd >= 2 * r, verts)


def _min_crossing(graph, region, start_cost, step_cost):
    """Dijkstra over Gamma_{k+1}(B): paths expand only from centres inside 2B.

    start_cost(v) is charged for the first vertex, step_cost(u, v) for each step.
    Returns (min cost, end vertex) or (inf, None) if no path leaves 2B.
    """
    base = int(region.level_vertices[0])
    inside = region.inside
    outside = region.outside
    if not outside.any():
        return math.inf, None
    best = {}
    heap = []
    for v in region.start:
        c = start_cost(int(v))
        if c < best.get(int(v), math.inf):
            best[int(v)] = c
            heapq.heappush(heap, (c, int(v)))
    done = set()
    while heap:
        c, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if outside[u - base]:
            return c, u
        for v in graph.neighbors[u]:
            v = int(v)
            nc = c + step_cost(u, v)
            if nc < best.get(v, math.inf):
                best[v] = nc
                heapq.heappush(heap, (nc, v))
    return math.inf, None


def enumerate_crossing_paths(graph, B, limit=100_000):
    """All simple paths of Gamma_{k+1}(B) (exhaustive; small graphs only)."""
    region = crossing_region(graph, B)
    if region is None:
        return []
    base = int(region.level_vertices[0])
    out = []

    def extend(path, seen):
        if len(out) >= limit:
            return
        u = path[-1]
        for v in graph.neighbors[u]:
            v = int(v)
            if v in seen:
                continue
            if region.outside[v - base]:
                out.append(path + [v])
            elif region.inside[v - base]:
                seen.add(v)
                extend(path + [v], seen)
                seen.discard(v)

    for s in region.start:
        extend([int(s)], {int(s)})
    return out


@dataclass(frozen=True)
class H3Result:
    min_cost: float
    witness: int | None
    vacuous: bool
    checked: int

    @property
    def passed(self):
        return self.vacuous or self.min_cost >= 1 - 1e-12


def check_H3prime(graph, w, levels=None):
    """min over B (level >= 1) and gamma in Gamma_{k+1}(B) of L_h(gamma, rho)."""
    rs = rho_star(graph, w.rho)
    best, arg, checked = math.inf, None, 0
    levels = range(1, graph.max_level) if levels is None else levels
    for k in levels:
        for B in graph.level_vertices(k):
            region = crossing_region(graph, B)
            if region is None or not region.outside.any():
                continue
            checked += 1
            c, _ = _min_crossing(graph, region, lambda v: 0.0, lambda u, v: min(rs[u], rs[v]))
            if c < best:
                best, arg = c, int(B)
    return H3Result(best, arg, best == math.inf, checked)


def crossing_sum_min(graph, sigma_values, levels=None):
    """Minimal vertex sum of sigma over crossing paths (the S1 quantity), with argmin B."""
    best, arg = math.inf, None
    levels = range(0, graph.max_level) if levels is None else levels
    for k in levels:
        for B in graph.level_vertices(k):
            region = crossing_region(graph, B)
            if region is None or not region.outside.any():
                continue
            c, _ = _min_crossing(
                graph, region, lambda v: sigma_values[v], lambda u, v: sigma_values[v]
            )
            if c < best:
                best, arg = c, int(B)
    return best, arg


@dataclass(frozen=True)
class BoundaryDistance:
    theta: float
    level: int
    unseparated: bool


def boundary_metric_estimate(graph, w, alpha=ALPHA, pairs=()):
    """theta_hat(x, y) = max pi over the deepest vertices B with x, y in alpha B."""
    if not 2 <= alpha <= max(2.0, graph.lam / 4):
        raise ParamError(f"alpha must lie in [2, lambda/4], got {alpha}")
    deepest = set(graph.nets.levels[graph.max_level].tolist())
    d = graph.space.dist
    out = {}
    for x, y in pairs:
        if x not in deepest or y not in deepest:
            raise DepthError(f"pair ({x}, {y}) not in the deepest net level")
        for k in range(graph.max_level, -1, -1):
            verts = graph.level_vertices(k)
            c = graph.center[verts]
            ok = (d[c, x] < alpha * graph.radius[verts]) & (d[c, y] < alpha * graph.radius[verts])
            if ok.any():
                theta = float(np.exp(w.log_pi[verts[ok]].max()))
                out[(x, y)] = BoundaryDistance(theta, k, k == graph.max_level)
                break
    return out


def filling_metric_Drho(graph, w, v1, v2):
    """Shortest-path distance in the filling with the rho-dependent edge lengths."""
    eta_m, eta_p = check_H1(w)
    K0 = check_H2(w)
    h_len = 2 * max(-math.log(eta_p), -math.log(eta_m), math.log(K0))
    nv = graph.n_vertices
    rows, cols, vals = [], [], []
    if len(graph.h_edges):
        rows.append(graph.h_edges[:, 0])
        cols.append(graph.h_edges[:, 1])
        vals.append(np.full(len(graph.h_edges), h_len))
    child = np.arange(1, nv)
    rows.append(child)
    cols.append(graph.parent[1:])
    vals.append(np.abs(w.log_pi[child] - w.log_pi[graph.parent[1:]]))
    G = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(nv, nv)
    )
    dist = dijkstra(G, directed=False, indices=v1)[v2]
    if not np.isfinite(dist):
        raise Disconnected(f"no path between {v1} and {v2}")
    return float(dist)


# ---------------------------------------------------------------------------
# gentle function and enhanced subadditivity


def ball_masses(graph, point_measure):
    """m(B) = sum of point masses inside the open ball of each vertex."""
    m = np.asarray(point_measure, dtype=float)
    d = graph.space.dist
    out = np.empty(graph.n_vertices)
    for v in range(graph.n_vertices):
        out[v] = m[d[graph.center[v]] < graph.radius[v]].sum()
    return out


@dataclass(eq=False)
class GentleFunction:
    graph: FillingGraph
    C: np.ndarray
    gamma: float
    K_h: float
    K_v: float
    delta: float  # min over parents of 1 - C(B)/sum over non-peripheral children
    worst_parent: int | None
    missing_nonperipheral: list

    @property
    def E_holds(self):
        return not self.missing_nonperipheral and self.delta > 0


def _edge_ratio(C, pairs):
    if len(pairs) == 0:
        return 1.0
    lc = np.log(C)
    return float(np.exp(np.abs(lc[pairs[:, 0]] - lc[pairs[:, 1]]).max()))


def gentle_capacity_function(graph, cell_masses, gamma):
    """C(B) = m(B) / r_B^gamma with measured gentleness and the (E) margin."""
    m = np.asarray(cell_masses, dtype=float)
    if m.shape != (graph.n_vertices,):
        raise MassError("need one ball mass per vertex")
    if np.any(m <= 0):
        v = int(np.argmax(m <= 0))
        raise MassError(f"ball of vertex {v} has non-positive mass")
    C = m / graph.radius**gamma
    K_h = _edge_ratio(C, graph.h_edges)
    vpairs = np.column_stack([np.arange(1, graph.n_vertices), graph.parent[1:]])
    K_v = _edge_ratio(C, vpairs)
    npf = graph.nonperipheral
    delta, worst, missing = math.inf, None, []
    for B in range(graph.n_vertices):
        ch = graph.children[B]
        if len(ch) == 0:
            continue
        good = ch[npf[ch]]
        if len(good) == 0:
            missing.append(B)
            continue
        d = 1 - C[B] / C[good].sum()
        if d < delta:
            delta, worst = d, B
    return GentleFunction(graph, C, float(gamma), K_h, K_v, delta, worst, missing)


# ---------------------------------------------------------------------------
# sigma


@dataclass(eq=False)
class SigmaFunction:
    graph: FillingGraph
    values: np.ndarray
    support: np.ndarray
    source: int | None = None
    vacuous: bool = False
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.any(self.values < 0) or np.any(self.values >= 0.25):
            raise SigmaRangeError(
                f"sigma must take values in [0, 1/4); max is {float(self.values.max()):.4g}"
            )


def discrete_gradient_sigma(graph, form, B, gentle=None, clip=False):
    """Local sigma_B from the equilibrium potential between 1.1 r_B and 1.9 r_B.

    `form` is a GraphForm whose vertices are the points of the underlying space.
    With clip=True values are capped just below 1/4 and the cap is recorded.
    """
    from .harnack import capacity

    B = int(B)
    k = int(graph.level[B])
    nv = graph.n_vertices
    d = graph.space.dist
    xB, rB = graph.center[B], graph.radius[B]
    values = np.zeros(nv)
    if k + 1 > graph.max_level:
        return SigmaFunction(graph, values, np.zeros(0, int), B, True, {"reason": "deepest level"})
    inner = np.flatnonzero(d[xB] < 1.1 * rB)
    outer = np.flatnonzero(d[xB] >= 1.9 * rB)
    if len(outer) == 0:
        return SigmaFunction(graph, values, np.zeros(0, int), B, True, {"reason": "no exterior"})
    cap = capacity(form, inner, outer)
    u = cap.potential
    mvec = form.measure
    verts = graph.level_vertices(k + 1)
    reach = graph.hop_reach(k + 1)
    near = verts[d[xB, graph.center[verts]] < 3 * rB + graph.radius[verts] + reach]
    ud = {}
    for v in near:
        pts = np.flatnonzero(d[graph.center[v]] < graph.radius[v])
        ud[int(v)] = float(np.dot(mvec[pts], u[pts]) / mvec[pts].sum())
    support = near[d[xB, graph.center[near]] < 3 * rB + graph.radius[near]]
    for v in support:
        nb = graph.neighbors[v]
        values[v] = sum(abs(ud[int(b)] - ud[int(v)]) for b in nb)
    info = {"capacity": cap.value, "max_raw": float(values.max())}
    if clip:
        cap_val = np.nextafter(0.25, 0)
        info["clipped"] = int(np.sum(values >= 0.25))
        values = np.minimum(values, cap_val)
    if gentle is not None:
        info["energy_ratio"] = float(np.sum(values**2 * gentle.C) / gentle.C[B])
    return SigmaFunction(graph, values, support, B, False, info)


def local_sigmas(graph, form, gentle=None, levels=None, clip=False):
    levels = range(1, graph.max_level) if levels is None else levels
    return [
        discrete_gradient_sigma(graph, form, B, gentle=gentle, clip=clip)
        for k in levels
        for B in graph.level_vertices(k)
    ]


def patch_sigma(locals_, gentle=None, beta=None):
    """Pointwise maximum of local sigmas; optionally the patching constants."""
    if not locals_:
        raise ParamError("need at least one local sigma")
    graph = locals_[0].graph
    values = np.max(np.stack([s.values for s in locals_]), axis=0)
    support = np.unique(np.concatenate([s.support for s in locals_]))
    info = {"n_locals": len(locals_)}
    if gentle is not None and beta is not None:
        C = gentle.C
        eta1 = 0.0
        for s in locals_:
            if s.source is not None and not s.vacuous:
                eta1 = max(eta1, float(np.sum(s.values**beta * C) / C[s.source]))
        worst = 0.0
        for B in range(graph.n_vertices):
            ch = graph.children[B]
            if len(ch):
                worst = max(worst, float(np.sum(values[ch] ** beta * C[ch]) / C[B]))
        info.update(
            eta1=eta1,
            C_patch=worst / eta1 if eta1 > 0 else 0.0,
            bound=graph.D_h * gentle.K_h,
        )
    return SigmaFunction(graph, values, support, None, False, info)


# ---------------------------------------------------------------------------
# synthesis


def radius2_neighbourhood_max(graph, tau):
    """tau_tilde(B) = 2 max{tau(B') : B' within horizontal graph distance 2}."""
    one = tau.copy()
    for v in range(graph.n_vertices):
        nb = graph.neighbors[v]
        if len(nb):
            one[v] = max(one[v], tau[nb].max())
    two = one.copy()
    for v in range(graph.n_vertices):
        nb = graph.neighbors[v]
        if len(nb):
            two[v] = max(two[v], one[nb].max())
    return 2 * two


def _balance(rho_hat, C, target, good, beta, tol):
    """omega in [0, 1) with sum over children of rho^beta C = target (rho = omega v rho_hat on good)."""

    def total(omega):
        r = np.where(good, np.maximum(omega, rho_hat), rho_hat)
        return float(np.sum(r**beta * C))

    lo, hi = 0.0, 1.0
    f_lo, f_hi = total(lo) - target, total(hi) - target
    if f_lo > tol * target:
        return None, f_lo / target
    if f_hi <= 0:
        return math.nan, f_hi / target
    if f_lo >= 0:
        return 0.0, 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if total(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-17:
            break
    omega = hi
    return omega, (total(omega) - target) / target


def synthesize_weight(graph, gentle, sigma, beta, strict=True, tol=1e-10):
    """Weight rho with H1, H2 (K0 <= eta_-^-3), H3' and exact (beta, C)-compatibility.

    strict=True raises when (S1) or (S2) fail. strict=False records the failures
    in the diagnostics and continues as long as every parent can be balanced.
    """
    if beta <= 0:
        raise ParamError("beta must be positive")
    C = gentle.C
    s = np.asarray(sigma.values if isinstance(sigma, SigmaFunction) else sigma, dtype=float)
    if np.any(s < 0) or np.any(s >= 0.25):
        raise SigmaRangeError("sigma must take values in [0, 1/4)")
    diag = {"beta": beta, "strict": strict, "flags": []}
    if beta <= 2:
        diag["flags"].append("beta <= 2: the (S2) margin has no a^{-(beta-2)eta} gain")

    s1_min, s1_arg = crossing_sum_min(graph, s)
    diag["S1_min"] = s1_min
    if s1_min < 1 - 1e-12:
        if strict:
            raise S1Violated(s1_min, s1_arg)
        diag["flags"].append(f"S1 fails: min crossing sum {s1_min:.4g} at vertex {s1_arg}")

    D_h, D_v = graph.D_h, max(graph.D_v, 1)
    eta0 = 0.5 / (2 ** (beta + 1) * gentle.K_h**3 * D_h**3)
    eta_minus = min((eta0 / (gentle.K_v * D_v)) ** (1 / beta), 0.25)
    diag.update(eta0=eta0, eta_minus=eta_minus, D_h=D_h, D_v=D_v, K_h=gentle.K_h, K_v=gentle.K_v)

    s2_worst, s2_arg = 0.0, None
    for B in range(graph.n_vertices):
        ch = graph.children[B]
        if len(ch):
            ratio = float(np.sum(s[ch] ** beta * C[ch]) / C[B])
            if ratio > s2_worst:
                s2_worst, s2_arg = ratio, B
    diag["S2_ratio"] = s2_worst
    if s2_worst > eta0:
        if strict:
            raise S2Violated(eta0, s2_worst, s2_arg)
        diag["flags"].append(f"S2 fails: child ratio {s2_worst:.4g} > eta0 {eta0:.4g}")

    tau = np.maximum(s, eta_minus)
    tau_t = radius2_neighbourhood_max(graph, tau)
    K = 1 / eta_minus

    rho_hat = np.empty(graph.n_vertices)
    rho_hat[0] = 0.5
    log_pi0 = np.empty(graph.n_vertices)
    log_pi0[0] = math.log(0.5)
    for k in range(1, graph.max_level + 1):
        verts = graph.level_vertices(k)
        par = graph.parent[verts]
        log_pi1 = np.log(tau_t[verts]) + log_pi0[par]
        base = int(verts[0])
        corrected = log_pi1.copy()
        for i, v in enumerate(verts):
            nb = graph.neighbors[v]
            if len(nb):
                corrected[i] = max(corrected[i], log_pi1[nb - base].max() - math.log(K))
        rho_hat[verts] = np.exp(corrected - log_pi0[par])
        log_pi0[verts] = corrected
    diag["rho_hat_max"] = float(rho_hat.max())
    if rho_hat.max() >= 1:
        raise ParamError(f"propagated weight reached {rho_hat.max():.4g} >= 1")

    npf = graph.nonperipheral
    rho = rho_hat.copy()
    worst_residual, omegas = 0.0, {}
    for B in range(graph.n_vertices):
        ch = graph.children[B]
        if len(ch) == 0:
            continue
        good = npf[ch]
        if not good.any():
            raise NoNonPeripheralChild(B)
        omega, resid = _balance(rho_hat[ch], C[ch], C[B], good, beta, tol)
        if omega is None:
            raise S2Violated(eta0, resid + 1, B)
        if math.isnan(omega):
            raise SubadditivityViolated(B, 1 / (1 + resid) if resid > -1 else math.inf)
        omegas[B] = omega
        rho[ch] = np.where(good, np.maximum(omega, rho_hat[ch]), rho_hat[ch])
        worst_residual = max(worst_residual, abs(resid))
    delta = gentle.delta
    diag["balance_residual"] = worst_residual
    diag["omega_max"] = max(omegas.values(), default=0.0)
    diag["eta_plus_formula"] = max(0.5, (1 - delta) ** (1 / beta)) if delta > 0 else 1.0
    diag["K0_bound"] = eta_minus**-3
    return WeightFunction.from_rho(graph, rho, diag)


# ---------------------------------------------------------------------------
# measures


def compatibility_check(graph, w, gentle, beta):
    """K2: worst symmetric ratio between descendant mass at any depth and pi(B)^beta C(B)."""
    own = beta * w.log_pi + np.log(gentle.C)
    worst = 0.0
    for n in range(1, graph.max_level + 1):
        acc = np.full(graph.n_vertices, -np.inf)
        lv = graph.level_vertices(n)
        acc[lv] = own[lv]
        for k in range(n - 1, -1, -1):
            for B in graph.level_vertices(k):
                ch = graph.children[B]
                if len(ch):
                    acc[B] = np.logaddexp.reduce(acc[ch])
        upper = np.arange(graph.offsets[n])
        upper = upper[np.isfinite(acc[upper])]
        if len(upper):
            worst = max(worst, float(np.abs(acc[upper] - own[upper]).max()))
    return float(math.exp(worst))


@dataclass(eq=False)
class LevelMeasure:
    graph: FillingGraph
    masses: np.ndarray  # pi^beta C per vertex
    level_totals: np.ndarray
    drift: float

    def atoms(self, k=None):
        k = self.graph.max_level if k is None else k
        lv = self.graph.level_vertices(k)
        return self.graph.center[lv], self.masses[lv]

    def ball_mass(self, x, r, k=None):
        pts, m = self.atoms(k)
        return float(m[self.graph.space.dist[x, pts] < r].sum())

    def descendant_mass(self, B, n):
        return float(self.masses[self.graph.descendants_at(B, n)].sum())

    def doubling_ratios(self, centers, radii):
        """Array (len(centers), len(radii)) of mu(B(x, 2r)) / mu(B(x, r))."""
        out = np.empty((len(centers), len(radii)))
        for i, x in enumerate(centers):
            for j, r in enumerate(radii):
                out[i, j] = self.ball_mass(x, 2 * r) / self.ball_mass(x, r)
        return out


def measure_from_weights(graph, w, gentle, beta, tol=1e-8):
    masses = np.exp(beta * w.log_pi) * gentle.C
    totals = np.array([masses[graph.level_vertices(k)].sum() for k in range(graph.max_level + 1)])
    drift = float(np.abs(totals / totals[0] - 1).max())
    if drift > tol:
        raise CompatibilityDrift(f"level masses drift by {drift:.3g} (tolerance {tol:g})")
    return LevelMeasure(graph, masses, totals, drift)


# ---------------------------------------------------------------------------
# standard examples


def interval_space(n_points=1000, length=0.5):
    from .metric_core import FiniteMetricSpace

    return FiniteMetricSpace.from_coords(np.linspace(0.0, length, n_points))


def interval_form(space):
    """Path-graph form on a sorted 1-D grid: conductance 1/h, trapezoid vertex weights."""
    from .harnack import GraphForm

    x = space.coords[:, 0]
    h = np.diff(x)
    edges = np.column_stack([np.arange(len(x) - 1), np.arange(1, len(x))])
    meas = np.zeros(len(x))
    meas[:-1] += h / 2
    meas[1:] += h / 2
    return GraphForm(len(x), edges, 1.0 / h, meas)
