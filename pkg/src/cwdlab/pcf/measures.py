"""Word-indexed cell measures, diameters, and the M2 surrogate constant."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from ..errors import ParamError, ZeroMass
from .harmonic import HarmonicFunction, boundary_energy, hausdorff_weight_dimension
from .structures import cell_weights, index_to_word, word_str, word_to_index, words


@dataclass(frozen=True, eq=False)
class CellMeasure:
    """Masses of the level-n cells, lexicographic; coarser levels by summation."""

    n_letters: int
    level: int
    masses: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=float)
        object.__setattr__(self, "masses", m)
        if m.shape != (self.n_letters**self.level,):
            raise ParamError("mass array does not match the number of cells")
        if np.any(m < 0) or not np.all(np.isfinite(m)):
            raise ParamError("cell masses must be finite and nonnegative")

    def at_level(self, k):
        if k > self.level:
            raise ParamError(f"measure only resolved to level {self.level}")
        m = self.masses
        for _ in range(self.level - k):
            m = m.reshape(-1, self.n_letters).sum(axis=1)
        return m

    def mass(self, word):
        return float(self.at_level(len(word))[word_to_index(word, self.n_letters)])

    @property
    def total(self):
        return float(self.masses.sum())

    def scaled(self, c):
        return CellMeasure(self.n_letters, self.level, c * self.masses)

    def rows(self, k=None):
        k = self.level if k is None else k
        return [(word_str(w), float(m)) for w, m in zip(words(self.n_letters, k), self.at_level(k))]


@dataclass(frozen=True, eq=False)
class CellDiameters:
    """Candidate diameters of K_w for all words up to a given level."""

    n_letters: int
    diam: dict  # level -> array over words of that length

    @property
    def level(self):
        return max(self.diam)

    def at_level(self, k):
        return self.diam[k]

    def of(self, word):
        return float(self.diam[len(word)][word_to_index(word, self.n_letters)])

    def scaled(self, c):
        return CellDiameters(self.n_letters, {k: c * v for k, v in self.diam.items()})

    def monotone_violations(self, tol=1e-9):
        bad = 0
        for k in range(min(self.diam) + 1, self.level + 1):
            parent = np.repeat(self.diam[k - 1], self.n_letters)
            bad += int(np.sum(self.diam[k] > parent * (1 + tol)))
        return bad


def cell_energy_measure(ss, hs, h, n):
    """Gamma(h,h)(K_w) = r_w^{-1} E^(0)(h o F_w|V0) for |w| = n."""
    if not isinstance(h, HarmonicFunction):
        h = HarmonicFunction(ss, hs, h)
    vals = h.restrictions(n)
    e = boundary_energy(hs, vals) / cell_weights(hs, n)
    return CellMeasure(ss.n_letters, n, np.maximum(e, 0.0))


def kusuoka_pair_measure(ss, hs, h1, h2, n):
    """Gamma(h1,h1) + Gamma(h2,h2) after normalizing E(h1)+E(h2) = 1."""
    h1 = h1 if isinstance(h1, HarmonicFunction) else HarmonicFunction(ss, hs, h1)
    h2 = h2 if isinstance(h2, HarmonicFunction) else HarmonicFunction(ss, hs, h2)
    total = h1.energy() + h2.energy()
    if total <= 0:
        raise ZeroMass("both harmonic functions are constant")
    c = 1.0 / np.sqrt(total)
    m = cell_energy_measure(ss, hs, h1.scaled(c), n).masses
    m = m + cell_energy_measure(ss, hs, h2.scaled(c), n).masses
    return CellMeasure(ss.n_letters, n, m)


def orthonormal_harmonic_pair(ss, hs):
    """Two E-orthonormal non-constant 0-harmonic functions (needs |V0| >= 3)."""
    nb = ss.n_boundary
    if nb < 3:
        raise ParamError("need at least three boundary points")
    Q = -hs.D
    basis = []
    for k in range(nb):
        v = np.eye(nb)[k] - 1.0 / nb
        for b in basis:
            v = v - (b @ Q @ v) * b
        e = v @ Q @ v
        if e > 1e-12:
            basis.append(v / np.sqrt(e))
        if len(basis) == 2:
            break
    return HarmonicFunction(ss, hs, basis[0]), HarmonicFunction(ss, hs, basis[1])


def self_similar_measure(hs, n_letters, n):
    """m(K_w) = r_w^{d_H}."""
    d = hausdorff_weight_dimension(hs)
    return CellMeasure(n_letters, n, cell_weights(hs, n) ** d)


def _subtree(arr, n_letters, level, word):
    """Entries of a level array below the prefix `word`, as a level-(level-|w|) array."""
    k = len(word)
    block = n_letters ** (level - k)
    start = word_to_index(word, n_letters) * block
    return arr[start : start + block]


def rescale_cell_pair(theta, mu, hs, word):
    """Pullbacks theta_w = theta(w.)/sqrt(r_w mu(K_w)) and mu_w = mu(w.)/mu(K_w)."""
    word = tuple(word)
    mw = mu.mass(word)
    if mw <= 0:
        raise ZeroMass(f"cell {word_str(word)} has zero mass")
    rw = float(np.prod(hs.r[list(word)])) if word else 1.0
    s = np.sqrt(rw * mw)
    k = len(word)
    mu_w = CellMeasure(mu.n_letters, mu.level - k, _subtree(mu.masses, mu.n_letters, mu.level, word) / mw)
    diam = {}
    for lev, arr in theta.diam.items():
        if lev >= k:
            diam[lev - k] = _subtree(arr, theta.n_letters, lev, word) / s
    return CellDiameters(theta.n_letters, diam), mu_w


@dataclass(frozen=True, eq=False)
class CellGraphMetric:
    diameters: CellDiameters
    distances: np.ndarray  # vertex metric on V_n
    level: int
    zero_mass_cells: int
    flags: list = field(default_factory=list)


def cell_graph_metric(ss, hs, mu, n):
    """Shortest-path metric on V_n built from cell sizes sqrt(r_w mu(K_w)).

    Each level-n cell w joins every pair of its boundary vertices by an edge of
    length sqrt(r_w mu(K_w)); diam(K_w) for |w| <= n is the largest distance
    between boundary vertices of K_w.
    """
    if mu.level < n:
        raise ParamError("measure must be resolved at least to the metric level")
    masses = mu.at_level(n)
    size = np.sqrt(cell_weights(hs, n) * masses)
    ids = ss.cell_vertices(n)
    nb = ss.n_boundary
    nv = ss.n_vertices(n)
    ii, jj = np.triu_indices(nb, 1)
    rows = ids[:, ii].ravel()
    cols = ids[:, jj].ravel()
    w = np.repeat(size, len(ii))
    flags = []
    zero = int(np.sum(masses <= 0))
    if zero:
        flags.append(f"{zero} zero-mass cells: degenerate pseudo-metric")
    # zero-length edges are represented by a tiny positive value so the sparse
    # graph keeps them; distances are then rounded back
    eps = np.finfo(float).tiny
    w = np.where(w > 0, w, eps)
    G = _sym_min(rows, cols, w, nv)
    dist = dijkstra(G, directed=False)
    dist[dist < 1e-300] = 0.0
    diam = {}
    for k in range(n + 1):
        cells = ss.cell_vertices(k)
        sub = dist[cells[:, ii], cells[:, jj]]
        diam[k] = sub.max(axis=1)
    return CellGraphMetric(CellDiameters(ss.n_letters, diam), dist, n, zero, flags)


def _sym_min(rows, cols, w, nv):
    """Sparse symmetric adjacency keeping the minimum weight of parallel edges."""
    a = np.minimum(rows, cols)
    b = np.maximum(rows, cols)
    key = a * nv + b
    order = np.lexsort((w, key))
    key, w = key[order], w[order]
    first = np.ones(len(key), dtype=bool)
    first[1:] = key[1:] != key[:-1]
    key, w = key[first], w[first]
    a, b = np.divmod(key, nv)
    return sp.csr_matrix((w, (a, b)), shape=(nv, nv))


@dataclass(frozen=True)
class M2Result:
    c_star: float
    level_max: list  # max ratio over words of exactly length k, k = 0..max_level
    argmax: str
    zero_mass_cells: int
    overflow: bool

    def running(self):
        """C* restricted to |w| <= k, for each k."""
        return list(np.maximum.accumulate(self.level_max))


def m2_constant(theta, mu, hs, max_level):
    """C* = max over |w| <= max_level of max(r_w mu/diam^2, diam^2/(r_w mu)).

    Cells with zero mass or zero diameter count as infinite ratio.
    """
    best, arg = -1.0, ""
    level_max = []
    zero = 0
    for k in range(max_level + 1):
        if k not in theta.diam or k > mu.level:
            raise ParamError(f"level {k} not resolved")
        d2 = theta.diam[k] ** 2
        rm = cell_weights(hs, k) * mu.at_level(k)
        degenerate = (rm <= 0) | (d2 <= 0)
        zero += int(np.sum(rm <= 0))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(degenerate, np.inf, np.maximum(rm / d2, d2 / rm))
        i = int(np.argmax(ratio))
        level_max.append(float(ratio[i]))
        if ratio[i] > best:
            best, arg = float(ratio[i]), word_str(index_to_word(i, theta.n_letters, k))
    return M2Result(best, level_max, arg, zero, bool(np.isinf(best)))
