"""Self-similar structures, harmonic structures and the built-in examples."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import DimensionError, ParamError

FLOAT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Similitude:
    """F(x) = q + ratio * L (x - q); L defaults to the identity."""

    fixed_point: tuple
    ratio: Fraction | float
    linear: tuple | None = None

    def __call__(self, x):
        q = self.fixed_point
        c = self.ratio
        if self.linear is None:
            return tuple(qi + c * (xi - qi) for qi, xi in zip(q, x))
        d = [xi - qi for xi, qi in zip(x, q)]
        return tuple(
            qi + c * sum(row[j] * d[j] for j in range(len(d)))
            for qi, row in zip(q, self.linear)
        )

    @property
    def exact(self):
        vals = list(self.fixed_point) + [self.ratio]
        return self.linear is None and all(isinstance(v, (Fraction, int)) for v in vals)


@dataclass(frozen=True, eq=False)
class SelfSimilarStructure:
    """Maps F_i, boundary V0, and lazily built level-n vertex identifications.

    Vertex ids are nested: the ids of V_m form the prefix 0..|V_m|-1 of the
    ids of V_n for every n >= m, with V0 occupying 0..|V0|-1.
    """

    name: str
    maps: tuple
    V0: tuple
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if len(self.maps) < 2:
            raise ParamError("a self-similar structure needs at least two maps")
        if not self.V0:
            raise ParamError("V0 must be nonempty")

    @property
    def n_letters(self):
        return len(self.maps)

    @property
    def n_boundary(self):
        return len(self.V0)

    @property
    def exact(self):
        return all(f.exact for f in self.maps) and all(
            isinstance(c, (Fraction, int)) for p in self.V0 for c in p
        )

    def _key(self, p):
        if self.exact:
            return tuple(p)
        return tuple(int(round(float(c) / FLOAT_TOL)) for c in p)

    def _level_data(self, n):
        """Return (coords list, cell_vertex_ids array) with cells in lexicographic order."""
        levels = self._cache.setdefault("levels", [])
        index = self._cache.setdefault("index", {})
        coords = self._cache.setdefault("coords", [])
        if not levels:
            for p in self.V0:
                k = self._key(p)
                if k in index:
                    raise ParamError("V0 contains repeated points")
                index[k] = len(coords)
                coords.append(p)
            cell_pts = [list(self.V0)]
            levels.append((cell_pts, np.arange(len(self.V0))[None, :]))
        while len(levels) <= n:
            prev_pts, _ = levels[-1]
            pts = []
            for f in self.maps:
                for cell in prev_pts:
                    pts.append([f(p) for p in cell])
            ids = np.empty((len(pts), self.n_boundary), dtype=np.int64)
            for c, cell in enumerate(pts):
                for j, p in enumerate(cell):
                    k = self._key(p)
                    vid = index.get(k)
                    if vid is None:
                        vid = len(coords)
                        index[k] = vid
                        coords.append(p)
                    ids[c, j] = vid
            levels.append((pts, ids))
        return levels[n]

    def cell_vertices(self, n):
        """Array (|S|^n, |V0|) of global vertex ids of F_w(V0), words lexicographic."""
        return self._level_data(n)[1]

    def n_vertices(self, n):
        return int(self.cell_vertices(n).max()) + 1

    def coordinates(self, n):
        """Float coordinates of the vertices of V_n in id order."""
        self._level_data(n)
        coords = self._cache["coords"][: self.n_vertices(n)]
        return np.array([[float(c) for c in p] for p in coords])

    def cell_points(self, word):
        """Exact images F_w(q) for q in V0."""
        pts = list(self.V0)
        for i in reversed(word):
            pts = [self.maps[i](p) for p in pts]
        return pts


@dataclass(frozen=True, eq=False)
class HarmonicStructure:
    """Boundary matrix D and resistance weights r."""

    D: np.ndarray
    r: np.ndarray
    validated: bool = False

    def __post_init__(self):
        D = np.asarray(self.D, dtype=float)
        r = np.asarray(self.r, dtype=float)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "r", r)
        if D.ndim != 2 or D.shape[0] != D.shape[1]:
            raise ParamError("D must be square")
        scale = max(1.0, np.abs(D).max())
        if not np.allclose(D, D.T, atol=1e-14 * scale):
            raise ParamError("D must be symmetric")
        if np.abs(D.sum(axis=1)).max() > 1e-12 * scale:
            raise ParamError("D must annihilate constants")
        off = D - np.diag(np.diag(D))
        if off.min() < 0:
            raise ParamError("off-diagonal entries of D must be nonnegative")
        if np.any(r <= 0) or np.any(r >= 1):
            raise ParamError("resistance weights must lie in (0, 1)")

    @property
    def n_boundary(self):
        return self.D.shape[0]

    def with_validation(self, flag=True):
        return HarmonicStructure(self.D, self.r, validated=flag)


def _unit(k, dim):
    return tuple(Fraction(1) if j == k else Fraction(0) for j in range(dim))


def make_sierpinski_gasket(N=2):
    """N-dimensional level Sierpinski gasket on the standard simplex in R^{N+1}."""
    if N < 2:
        raise DimensionError("SG_N needs N >= 2")
    dim = N + 1
    V0 = tuple(_unit(k, dim) for k in range(dim))
    half = Fraction(1, 2)
    maps = tuple(Similitude(q, half) for q in V0)
    D = np.ones((dim, dim)) - dim * np.eye(dim)
    r = np.full(dim, (N + 1) / (N + 3))
    return SelfSimilarStructure(f"SG{N}", maps, V0), HarmonicStructure(D, r)


VICSEK_POINTS = (
    (Fraction(0), Fraction(0)),
    (Fraction(1), Fraction(1)),
    (Fraction(-1), Fraction(1)),
    (Fraction(-1), Fraction(-1)),
    (Fraction(1), Fraction(-1)),
)


def make_vicsek(r=1 / 3):
    """Vicsek set: centre map plus four corner maps of ratio 1/3."""
    if not 0 < r < 0.5:
        raise ParamError("Vicsek weight r must lie in (0, 1/2)")
    third = Fraction(1, 3)
    maps = tuple(Similitude(q, third) for q in VICSEK_POINTS)
    D = np.ones((4, 4)) - 4 * np.eye(4)
    weights = np.array([1 - 2 * r, r, r, r, r])
    return SelfSimilarStructure(f"Vicsek({r:g})", maps, VICSEK_POINTS[1:]), HarmonicStructure(D, weights)


def make_interval():
    """[0, 1] as two halves; the standard Dirichlet energy with r = (1/2, 1/2)."""
    half = Fraction(1, 2)
    V0 = ((Fraction(0),), (Fraction(1),))
    maps = (Similitude(V0[0], half), Similitude(V0[1], half))
    D = np.array([[-1.0, 1.0], [1.0, -1.0]])
    return SelfSimilarStructure("I", maps, V0), HarmonicStructure(D, np.array([0.5, 0.5]))


def make_structure(kind, N=2, r=1 / 3):
    if kind in ("sg", "SG"):
        return make_sierpinski_gasket(N)
    if kind in ("vicsek", "V"):
        return make_vicsek(r)
    if kind in ("interval", "I"):
        return make_interval()
    raise ParamError(f"unknown fractal kind {kind!r}")


# word helpers ------------------------------------------------------------

def word_to_index(word, n_letters):
    idx = 0
    for c in word:
        idx = idx * n_letters + c
    return idx


def index_to_word(idx, n_letters, level):
    out = []
    for _ in range(level):
        idx, c = divmod(idx, n_letters)
        out.append(c)
    return tuple(reversed(out))


def word_str(word):
    if all(c < 10 for c in word):
        return "".join(str(c) for c in word)
    return ".".join(str(c) for c in word)


def parse_word(text):
    text = text.strip()
    if not text:
        return ()
    if "." in text:
        return tuple(int(c) for c in text.split("."))
    return tuple(int(c) for c in text)


def words(n_letters, level):
    """All words of the given length in lexicographic order."""
    return [index_to_word(i, n_letters, level) for i in range(n_letters**level)]


def cell_weights(hs, n):
    """r_w for all words of length n (lexicographic)."""
    out = np.ones(1)
    for _ in range(n):
        out = np.outer(out, hs.r).ravel()
    return out
