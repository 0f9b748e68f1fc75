"""Graph energies, harmonic extension, resistance and F_w^* spectra."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .._linalg import solve_spd
from ..errors import ParamError, SingularInterior
from .structures import cell_weights


def _hs_key(hs):
    return hs.D.tobytes(), hs.r.tobytes()


def _level1(ss, hs):
    """Dense level-1 energy matrix Q1 with E^(1)(u,u) = u^T Q1 u."""
    ids = ss.cell_vertices(1)
    nv = ss.n_vertices(1)
    Q = np.zeros((nv, nv))
    for i, cell in enumerate(ids):
        Q[np.ix_(cell, cell)] -= hs.D / hs.r[i]
    return Q


def _split(ss):
    nb = ss.n_boundary
    nv = ss.n_vertices(1)
    return np.arange(nb), np.arange(nb, nv)


def _interior_solve(Qii, rhs):
    try:
        L = np.linalg.cholesky(Qii)
    except np.linalg.LinAlgError as exc:
        raise SingularInterior("interior block of the level-1 network is singular") from exc
    y = np.linalg.solve(L, rhs)
    return np.linalg.solve(L.T, y)


def validate_harmonic_structure(ss, hs):
    """Max-abs residual between the level-1 trace onto V0 and D."""
    Q = _level1(ss, hs)
    b, i = _split(ss)
    if len(i) == 0:
        trace = Q
    else:
        trace = Q[np.ix_(b, b)] - Q[np.ix_(b, i)] @ _interior_solve(Q[np.ix_(i, i)], Q[np.ix_(i, b)])
    return float(np.abs(-trace - hs.D).max())


def is_harmonic_structure(ss, hs, rtol=1e-12):
    return validate_harmonic_structure(ss, hs) <= rtol * np.abs(hs.D).max()


def extension_matrices(ss, hs):
    """A_i with (H u0) o F_i |V0 = A_i u0, from one level-1 elimination."""
    key = ("ext", _hs_key(hs))
    if key in ss._cache:
        return ss._cache[key]
    Q = _level1(ss, hs)
    b, i = _split(ss)
    H = np.zeros((ss.n_vertices(1), ss.n_boundary))
    H[b] = np.eye(ss.n_boundary)
    if len(i):
        H[i] = -_interior_solve(Q[np.ix_(i, i)], Q[np.ix_(i, b)])
    A = [H[cell] for cell in ss.cell_vertices(1)]
    ss._cache[key] = A
    return A


def word_matrix(ss, hs, word):
    """A_w = A_{w_n} ... A_{w_1}, so that h o F_w|V0 = A_w h|V0."""
    A = extension_matrices(ss, hs)
    M = np.eye(ss.n_boundary)
    for c in word:
        M = A[c] @ M
    return M


def cell_restrictions(ss, hs, u0, n):
    """Array (|S|^n, |V0|) of h o F_w|V0 for all words of length n."""
    A = extension_matrices(ss, hs)
    vals = np.asarray(u0, dtype=float)[None, :]
    for _ in range(n):
        vals = np.stack([vals @ Ai.T for Ai in A], axis=1).reshape(-1, ss.n_boundary)
    return vals


def boundary_energy(hs, vals):
    """E^(0)(v,v) = -v^T D v, row-wise.

    Evaluated as (1/2) sum_{p,q} D_pq (v_p - v_q)^2, which equals -v^T D v because
    D kills constants and does not cancel catastrophically for nearly constant v.
    """
    vals = np.atleast_2d(np.asarray(vals, dtype=float))
    diff = vals[:, :, None] - vals[:, None, :]
    return 0.5 * np.einsum("ijk,jk->i", diff**2, hs.D)


def harmonic_extension(ss, hs, u0, n):
    vals = cell_restrictions(ss, hs, u0, n)
    out = np.empty(ss.n_vertices(n))
    out[ss.cell_vertices(n).ravel()] = vals.ravel()
    return out


def energy_matrix(ss, hs, n):
    """Sparse symmetric matrix Q_n with E^(n)(u,u) = u^T Q_n u."""
    key = ("Q", _hs_key(hs), n)
    if key in ss._cache:
        return ss._cache[key]
    ids = ss.cell_vertices(n)
    rw = cell_weights(hs, n)
    nb = ss.n_boundary
    rows = np.repeat(ids, nb, axis=1).ravel()
    cols = np.tile(ids, (1, nb)).ravel()
    data = (-hs.D.ravel()[None, :] / rw[:, None]).ravel()
    nv = ss.n_vertices(n)
    Q = sp.csr_matrix((data, (rows, cols)), shape=(nv, nv))
    Q.sum_duplicates()
    ss._cache[key] = Q
    return Q


def graph_energy(ss, hs, n, u, v=None):
    Q = energy_matrix(ss, hs, n)
    u = np.asarray(u, dtype=float)
    if u.shape != (Q.shape[0],):
        raise ParamError(f"expected a vector on V_{n} of length {Q.shape[0]}")
    v = u if v is None else np.asarray(v, dtype=float)
    return float(u @ (Q @ v))


def resistance_metric(ss, hs, n, v1, v2, rtol=1e-12):
    """Effective resistance between two vertices of the level-n network."""
    if v1 == v2:
        return 0.0
    Q = energy_matrix(ss, hs, n)
    keep = np.ones(Q.shape[0], dtype=bool)
    keep[v2] = False
    idx = np.flatnonzero(keep)
    rhs = (idx == v1).astype(float)
    x = solve_spd(Q[idx][:, idx], rhs, rtol=rtol)
    return float(x[np.searchsorted(idx, v1)])


def resistance_matrix(ss, hs, n):
    """All-pairs effective resistance on V_n via the pseudo-inverse (small n only)."""
    Q = energy_matrix(ss, hs, n).toarray()
    P = np.linalg.pinv(Q, hermitian=True)
    d = np.diag(P)
    R = d[:, None] + d[None, :] - 2 * P
    np.fill_diagonal(R, 0.0)
    return np.maximum(R, 0.0)


def hausdorff_weight_dimension(hs, tol=1e-12):
    """Solve sum_i r_i^s = 1 by bisection."""
    r = hs.r

    def f(s):
        return np.sum(r**s) - 1.0

    lo, hi = 0.0, 1.0
    while f(hi) > 0:
        hi *= 2
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    d = 0.5 * (lo + hi)
    if d < 1 - 1e-9:
        raise ParamError(f"weight dimension {d} < 1 for a regular harmonic structure")
    return d


@dataclass(frozen=True)
class Spectrum:
    word: tuple
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, lifted to V0-vectors


def fw_star_spectrum(ss, hs, word):
    """Eigen-decomposition of F_w^* on H_0 modulo constants."""
    A = word_matrix(ss, hs, tuple(word))
    nb = ss.n_boundary
    ones = np.ones((nb, 1)) / np.sqrt(nb)
    # orthonormal complement of constants
    U = np.linalg.qr(np.hstack([ones, np.eye(nb)[:, : nb - 1]]))[0][:, 1:]
    Aq = U.T @ A @ U
    vals, vecs = np.linalg.eig(Aq)
    if np.abs(vals.imag).max(initial=0) < 1e-12:
        vals, vecs = vals.real, vecs.real
    order = np.argsort(-np.abs(vals), kind="stable")
    vals, vecs = vals[order], vecs[:, order]
    lifted = U @ vecs
    for k, lam in enumerate(vals):
        if abs(lam - 1) > 1e-12:
            v = lifted[:, k]
            t = np.mean(A @ v - lam * v) / (lam - 1)
            lifted[:, k] = v + t
    return Spectrum(tuple(word), A, vals, lifted)


@dataclass(eq=False)
class HarmonicFunction:
    """0-harmonic function given by its boundary values, with cached restrictions."""

    ss: object
    hs: object
    boundary_values: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.boundary_values = np.asarray(self.boundary_values, dtype=float)
        if self.boundary_values.shape != (self.ss.n_boundary,):
            raise ParamError("boundary values must be a vector on V0")

    def restrictions(self, n):
        if n not in self._cache:
            self._cache[n] = cell_restrictions(self.ss, self.hs, self.boundary_values, n)
        return self._cache[n]

    def restriction(self, word):
        return word_matrix(self.ss, self.hs, tuple(word)) @ self.boundary_values

    def energy(self):
        return float(boundary_energy(self.hs, self.boundary_values)[0])

    def values(self, n):
        return harmonic_extension(self.ss, self.hs, self.boundary_values, n)

    def scaled(self, c):
        return HarmonicFunction(self.ss, self.hs, c * self.boundary_values)
