"""Attainment and non-attainment witnesses: the Vicsek diagonals and SG_N degeneration."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionError
from .harmonic import HarmonicFunction, boundary_energy, resistance_matrix, word_matrix
from .measures import cell_energy_measure
from .structures import index_to_word, make_sierpinski_gasket, make_vicsek

# Vicsek -----------------------------------------------------------------

DIAGONAL_13 = frozenset({0, 1, 3})
DIAGONAL_24 = frozenset({0, 2, 4})


def vicsek_diagonal_mask(n):
    """True for level-n words whose cell lies along one of the two diagonals."""
    out = np.zeros(5**n, dtype=bool)
    for i in range(5**n):
        w = set(index_to_word(i, 5, n))
        out[i] = w <= DIAGONAL_13 or w <= DIAGONAL_24
    return out


def vicsek_cell_square(ss, word):
    """Exact centre and half-width of the square spanned by F_w(V0)."""
    pts = ss.cell_points(word)
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    cx = (min(xs) + max(xs)) / 2
    cy = (min(ys) + max(ys)) / 2
    return (cx, cy), (max(xs) - min(xs)) / 2


def square_meets_diagonals(center, half):
    """Whether the closed square meets y = x or y = -x in a segment of positive length."""
    cx, cy = center
    return abs(cx - cy) < 2 * half or abs(cx + cy) < 2 * half


@dataclass(frozen=True)
class VicsekReport:
    r: float
    level: int
    energies: list
    off_diagonal_mass: list
    relative: list

    @property
    def worst(self):
        return max(self.relative)


def vicsek_offdiagonal_report(r=0.25, n=6):
    """Energy-measure mass carried by level-n cells off both diagonals."""
    ss, hs = make_vicsek(r)
    off = ~vicsek_diagonal_mask(n)
    energies, masses, rel = [], [], []
    for k in range(3):
        u0 = np.zeros(4)
        u0[k] = 1.0
        h = HarmonicFunction(ss, hs, u0)
        mu = cell_energy_measure(ss, hs, h, n)
        e = h.energy()
        m = float(mu.masses[off].sum())
        energies.append(e)
        masses.append(m)
        rel.append(m / e)
    return VicsekReport(r, n, energies, masses, rel)


# SG_N degeneration -------------------------------------------------------

@dataclass(frozen=True)
class DegenerationReport:
    N: int
    depth: int
    informational: bool
    phi_scaling_error: dict  # j -> max |A_j phi - phi/(N+3)|
    psi_eigen_error: float
    convergence_errors: list  # E(psi - h_{0^n}), n = 1..depth
    convergence_rates: list
    expected_rate: float
    diam_estimate: float
    chain_sums: list  # n = 0..depth
    chain_ratios: list
    expected_ratio: float
    closed_form: list


def sg_degeneration_probe(N=3, depth=8, informational=False, diam_level=3, h0=None):
    """Numerical record of the three computations behind SG_N non-attainment."""
    if N < 3 and not (informational and N == 2):
        raise DimensionError("the degeneration argument needs N >= 3")
    ss, hs = make_sierpinski_gasket(N)
    nb = N + 1
    e = np.eye(nb)
    phi = (e[0] - e[1]) / (np.sqrt(N) * (N + 3))
    psi = e[0] / np.sqrt(N)

    scaling = {}
    for j in range(2, nb):
        scaling[j] = float(np.abs(word_matrix(ss, hs, (j,)) @ phi - phi / (N + 3)).max())

    A0 = word_matrix(ss, hs, (0,))
    d = A0 @ psi - (N + 1) / (N + 3) * psi
    psi_err = float(np.abs(d - d.mean()).max())

    h = np.asarray(h0 if h0 is not None else e[0] + 0.5 * e[1] - 0.25 * e[2], dtype=float)
    errors = []
    v = h.copy()
    for _ in range(depth):
        v = A0 @ v
        hn = v / np.sqrt(boundary_energy(hs, v)[0])
        errors.append(float(boundary_energy(hs, psi - hn)[0]))
    rates = [b / a if a > 0 else 0.0 for a, b in zip(errors, errors[1:])]

    R = resistance_matrix(ss, hs, diam_level)
    diam = float(R.max())
    e_phi = float(boundary_energy(hs, phi)[0])
    # letters 2 and 3; SG2 only has letter 2, so its chain is a single word per level
    letters = [j for j in (2, 3) if j < nb]
    k = len(letters)
    sums = [np.sqrt(diam * e_phi)]
    for n in range(1, depth + 1):
        total = 0.0
        for i in range(k**n):
            w = tuple(letters[b] for b in index_to_word(i, k, n))
            total += np.sqrt(diam * boundary_energy(hs, word_matrix(ss, hs, w) @ phi)[0])
        sums.append(float(total))
    ratios = [b / a for a, b in zip(sums, sums[1:])]
    closed = [float(k**n * (N + 3.0) ** (-n) * np.sqrt(diam * e_phi)) for n in range(depth + 1)]
    return DegenerationReport(
        N=N,
        depth=depth,
        informational=N < 3,
        phi_scaling_error=scaling,
        psi_eigen_error=psi_err,
        convergence_errors=errors,
        convergence_rates=rates,
        expected_rate=(1.0 / (N + 1)) ** 2,
        diam_estimate=diam,
        chain_sums=sums,
        chain_ratios=ratios,
        expected_ratio=k / (N + 3.0),
        closed_form=closed,
    )

