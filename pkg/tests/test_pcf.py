import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cwdlab.errors import DimensionError, ParamError, ZeroMass
from cwdlab.pcf import (
    CellDiameters,
    CellMeasure,
    HarmonicFunction,
    HarmonicStructure,
    cell_energy_measure,
    cell_graph_metric,
    energy_matrix,
    fw_star_spectrum,
    graph_energy,
    harmonic_extension,
    hausdorff_weight_dimension,
    kusuoka_pair_measure,
    m2_constant,
    make_interval,
    make_sierpinski_gasket,
    make_vicsek,
    orthonormal_harmonic_pair,
    parse_word,
    rescale_cell_pair,
    resistance_matrix,
    resistance_metric,
    self_similar_measure,
    sg_degeneration_probe,
    validate_harmonic_structure,
    vicsek_cell_square,
    vicsek_diagonal_mask,
    vicsek_offdiagonal_report,
    word_str,
)
from cwdlab.pcf.attainment import square_meets_diagonals
from cwdlab.pcf.structures import cell_weights, index_to_word, word_to_index, words


def perturbed(hs, eps):
    return HarmonicStructure(hs.D, hs.r + eps)


# --- structures ------------------------------------------------------------


@pytest.mark.parametrize("N, r", [(2, 3 / 5), (3, 2 / 3), (4, 5 / 7)])
def test_gasket_weights_and_D(N, r):
    ss, hs = make_sierpinski_gasket(N)
    assert ss.n_letters == N + 1 and ss.n_boundary == N + 1
    assert np.allclose(hs.r, r)
    assert np.abs(hs.D @ np.ones(N + 1)).max() == 0
    assert np.all(np.diag(hs.D) == -N)


def test_vicsek_weights():
    _, hs = make_vicsek(1 / 3)
    assert np.allclose(hs.r, 1 / 3)
    _, hs = make_vicsek(0.25)
    assert np.allclose(hs.r, [0.5, 0.25, 0.25, 0.25, 0.25])


@pytest.mark.parametrize("r", [0.5, 0.6, 0.0])
def test_vicsek_rejects_out_of_range(r):
    with pytest.raises(ParamError):
        make_vicsek(r)


def test_word_round_trip():
    for n in range(4):
        for i, w in enumerate(words(3, n)):
            assert word_to_index(w, 3) == i
            assert index_to_word(i, 3, n) == w
            assert parse_word(word_str(w)) == w
    assert parse_word("10.2") == (10, 2)


def test_vertex_ids_nested():
    ss, _ = make_sierpinski_gasket(2)
    c2 = ss.coordinates(2)
    c4 = ss.coordinates(4)
    assert np.array_equal(c4[: len(c2)], c2)
    assert [ss.n_vertices(n) for n in range(4)] == [3, 6, 15, 42]


# --- harmonic structures -------------------------------------------------------


@pytest.mark.parametrize("N", [2, 3, 4])
def test_gasket_residual(N):
    ss, hs = make_sierpinski_gasket(N)
    assert validate_harmonic_structure(ss, hs) <= 1e-12
    assert validate_harmonic_structure(ss, perturbed(hs, 1e-2)) > 1e-4


def test_sg2_wrong_r_fails():
    ss, hs = make_sierpinski_gasket(2)
    assert validate_harmonic_structure(ss, HarmonicStructure(hs.D, np.full(3, 0.5))) > 1e-3


@pytest.mark.parametrize("r", [0.1, 0.25, 0.4])
def test_vicsek_residual(r):
    ss, hs = make_vicsek(r)
    assert validate_harmonic_structure(ss, hs) <= 1e-12


# --- energies and extension -------------------------------------------------


def test_graph_energy_examples():
    ss, hs = make_sierpinski_gasket(2)
    assert graph_energy(ss, hs, 2, np.ones(ss.n_vertices(2))) == pytest.approx(0, abs=1e-14)
    u0 = np.array([1.0, 0, 0])
    assert graph_energy(ss, hs, 0, u0) == pytest.approx(2)
    assert graph_energy(ss, hs, 1, harmonic_extension(ss, hs, u0, 1)) == pytest.approx(2, rel=1e-12)


def test_sg2_midpoint_values():
    ss, hs = make_sierpinski_gasket(2)
    u = harmonic_extension(ss, hs, [1.0, 0, 0], 1)
    x = ss.coordinates(1)
    q = ss.coordinates(0)
    for p, val in ((q[0] + q[1], 0.4), (q[0] + q[2], 0.4), (q[1] + q[2], 0.2)):
        i = np.flatnonzero(np.abs(x - p / 2).max(axis=1) < 1e-12)[0]
        assert u[i] == pytest.approx(val, abs=1e-14)


def test_constant_extension():
    ss, hs = make_vicsek(0.3)
    assert np.allclose(harmonic_extension(ss, hs, np.full(4, 2.5), 3), 2.5)


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.floats(-2, 2), min_size=3, max_size=3),
    st.lists(st.floats(-1, 1), min_size=12, max_size=12),
)
def test_extension_minimizes_energy(u0, noise):
    ss, hs = make_sierpinski_gasket(2)
    n = 2
    h = harmonic_extension(ss, hs, u0, n)
    e_h = graph_energy(ss, hs, n, h)
    assert e_h == pytest.approx(float(HarmonicFunction(ss, hs, u0).energy()), rel=1e-9, abs=1e-12)
    v = h.copy()
    v[3:] += np.array(noise)
    assert graph_energy(ss, hs, n, v) >= e_h - 1e-12


def test_energy_matrix_kernel_is_constants():
    ss, hs = make_vicsek(0.25)
    Q = energy_matrix(ss, hs, 2).toarray()
    w = np.linalg.eigvalsh(Q)
    assert abs(w[0]) < 1e-10 and w[1] > 1e-6


# --- energy measures ---------------------------------------------------------


@pytest.mark.parametrize("u0", [[1.0, 0, 0], [0.3, -1.2, 0.5], [2.0, 1.0, -0.7]])
def test_energy_measure_additivity(u0):
    ss, hs = make_sierpinski_gasket(2)
    h = HarmonicFunction(ss, hs, u0)
    e = h.energy()
    for n in range(1, 7):
        mu = cell_energy_measure(ss, hs, h, n)
        assert abs(mu.total - e) <= 1e-10 * e
        # coarser levels by summation agree with direct evaluation
        assert np.allclose(mu.at_level(n - 1), cell_energy_measure(ss, hs, h, n - 1).masses, rtol=1e-10)


def test_constant_h_gives_zero_measure():
    ss, hs = make_sierpinski_gasket(2)
    mu = cell_energy_measure(ss, hs, HarmonicFunction(ss, hs, [1.0, 1.0, 1.0]), 3)
    assert mu.total <= 1e-25


def test_vicsek_off_diagonal_mass_zero():
    rep = vicsek_offdiagonal_report(0.25, 5)
    assert rep.worst <= 1e-12


def test_vicsek_diagonal_mask_matches_geometry():
    ss, _ = make_vicsek(0.25)
    n = 3
    mask = vicsek_diagonal_mask(n)
    for i, w in enumerate(words(5, n)):
        c, half = vicsek_cell_square(ss, w)
        assert square_meets_diagonals(tuple(float(v) for v in c), float(half)) == mask[i]


# --- resistance --------------------------------------------------------------


def test_resistance_boundary_pair():
    ss, hs = make_sierpinski_gasket(2)
    for n in (0, 3):
        assert resistance_metric(ss, hs, n, 0, 1) == pytest.approx(2 / 3, abs=1e-10)


def test_resistance_stable_across_levels():
    ss, hs = make_sierpinski_gasket(2)
    r2 = resistance_matrix(ss, hs, 2)
    r4 = resistance_matrix(ss, hs, 4)
    m = ss.n_vertices(2)
    assert np.abs(r4[:m, :m] - r2).max() <= 1e-10


def test_resistance_scaling_on_cells():
    ss, hs = make_sierpinski_gasket(2)
    n = 4
    R = resistance_matrix(ss, hs, n)
    base = 2 / 3
    for w in [(0,), (1, 2), (2, 0, 1)]:
        ids = ss.cell_vertices(len(w))[word_to_index(w, 3)]
        rw = np.prod(hs.r[list(w)])
        # the outside of the cell only adds parallel paths
        assert 0 < R[ids[0], ids[1]] <= rw * base * (1 + 1e-9)


def test_resistance_symmetric_and_zero():
    ss, hs = make_vicsek(0.25)
    assert resistance_metric(ss, hs, 2, 3, 3) == 0.0
    a = resistance_metric(ss, hs, 2, 1, 7)
    b = resistance_metric(ss, hs, 2, 7, 1)
    assert a == pytest.approx(b, rel=1e-10)


# --- dimension and spectra ---------------------------------------------------


def test_hausdorff_dimensions():
    _, hs = make_sierpinski_gasket(2)
    assert hausdorff_weight_dimension(hs) == pytest.approx(math.log(3) / math.log(5 / 3), abs=1e-10)
    _, hs = make_vicsek(1 / 3)
    assert hausdorff_weight_dimension(hs) == pytest.approx(math.log(5) / math.log(3), abs=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 6), st.floats(0.05, 0.95))
def test_hausdorff_single_weight(k, rho):
    D = np.ones((2, 2)) - 2 * np.eye(2)
    hs = HarmonicStructure(D, np.full(k, rho))
    expected = math.log(k) / math.log(1 / rho)
    if expected < 1:
        with pytest.raises(ParamError):
            hausdorff_weight_dimension(hs)
    else:
        assert hausdorff_weight_dimension(hs) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_f0_spectrum(N):
    ss, hs = make_sierpinski_gasket(N)
    sp = fw_star_spectrum(ss, hs, (0,))
    expected = [(N + 1) / (N + 3)] + [1 / (N + 3)] * (N - 1)
    assert np.allclose(sp.eigenvalues, expected, atol=1e-10)
    # the leading eigenvector is symmetric, supported on q0 modulo constants
    v = sp.eigenvectors[:, 0]
    assert np.allclose(v[1:], v[1])
    assert np.allclose(sp.matrix @ v, sp.eigenvalues[0] * v, atol=1e-10)


def test_empty_word_spectrum():
    ss, hs = make_sierpinski_gasket(3)
    sp = fw_star_spectrum(ss, hs, ())
    assert np.allclose(sp.matrix, np.eye(4))
    assert np.allclose(sp.eigenvalues, 1)


# --- measures, pullbacks, M2 ------------------------------------------------------


def test_rescale_empty_word_is_identity():
    ss, hs = make_sierpinski_gasket(2)
    mu = self_similar_measure(hs, 3, 4)
    theta = CellDiameters(3, {k: np.sqrt(cell_weights(hs, k) * mu.at_level(k)) for k in range(5)})
    t2, m2 = rescale_cell_pair(theta, mu, hs, ())
    assert np.allclose(m2.masses, mu.masses)
    assert all(np.allclose(t2.diam[k], theta.diam[k]) for k in range(5))


def test_rescale_self_similar_measure():
    ss, hs = make_sierpinski_gasket(2)
    mu = self_similar_measure(hs, 3, 5)
    theta = CellDiameters(3, {k: np.ones(3**k) for k in range(6)})
    _, mw = rescale_cell_pair(theta, mu, hs, (1, 2))
    assert np.allclose(mw.masses, self_similar_measure(hs, 3, 3).masses, rtol=1e-12)


def test_rescale_energy_measure_is_pullback_measure():
    ss, hs = make_sierpinski_gasket(2)
    h = HarmonicFunction(ss, hs, [1.0, -0.4, 0.2])
    w = (2, 0)
    mu = cell_energy_measure(ss, hs, h, 4)
    theta = CellDiameters(3, {k: np.ones(3**k) for k in range(5)})
    _, mw = rescale_cell_pair(theta, mu, hs, w)
    hw = HarmonicFunction(ss, hs, h.restriction(w))
    ref = cell_energy_measure(ss, hs, hw, 2)
    assert np.allclose(mw.masses, ref.masses / ref.total, rtol=1e-10)


def test_rescale_zero_mass():
    mu = CellMeasure(2, 1, np.array([0.0, 1.0]))
    theta = CellDiameters(2, {0: np.ones(1), 1: np.ones(2)})
    _, hs = make_interval()
    with pytest.raises(ZeroMass):
        rescale_cell_pair(theta, mu, hs, (0,))


def test_m2_tautological_pair():
    _, hs = make_sierpinski_gasket(2)
    mu = self_similar_measure(hs, 3, 4)
    theta = CellDiameters(3, {k: np.sqrt(cell_weights(hs, k) * mu.at_level(k)) for k in range(5)})
    assert m2_constant(theta, mu, hs, 4).c_star == pytest.approx(1.0, rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.01, 100))
def test_m2_joint_rescaling(c):
    ss, hs = make_sierpinski_gasket(2)
    h1, h2 = orthonormal_harmonic_pair(ss, hs)
    mu = kusuoka_pair_measure(ss, hs, h1, h2, 3)
    theta = cell_graph_metric(ss, hs, mu, 3).diameters
    a = m2_constant(theta, mu, hs, 3)
    b = m2_constant(theta.scaled(c), mu.scaled(c * c), hs, 3)
    assert b.c_star == pytest.approx(a.c_star, rel=1e-9)
    assert b.argmax == a.argmax


def test_kusuoka_measure_properties():
    ss, hs = make_sierpinski_gasket(2)
    h1, h2 = orthonormal_harmonic_pair(ss, hs)
    assert h1.energy() == pytest.approx(1) and h2.energy() == pytest.approx(1)
    mu = kusuoka_pair_measure(ss, hs, h1, h2, 5)
    assert mu.total == pytest.approx(1, rel=1e-12)
    assert np.all(mu.masses > 0)
    swapped = kusuoka_pair_measure(ss, hs, h2, h1, 5)
    assert np.allclose(mu.masses, swapped.masses, rtol=1e-13)
    zero = HarmonicFunction(ss, hs, np.zeros(3))
    single = kusuoka_pair_measure(ss, hs, h1, zero, 3)
    ref = cell_energy_measure(ss, hs, h1, 3)
    assert np.allclose(single.masses, ref.masses / ref.total)


def test_cell_graph_metric_on_interval_is_euclidean():
    ss, hs = make_interval()
    n = 6
    mu = self_similar_measure(hs, 2, n)
    cg = cell_graph_metric(ss, hs, mu, n)
    x = ss.coordinates(n)[:, 0]
    euclid = np.abs(x[:, None] - x[None, :])
    off = ~np.eye(len(x), dtype=bool)
    ratio = cg.distances[off] / euclid[off]
    assert ratio.max() / ratio.min() == pytest.approx(1.0, abs=1e-9)


def test_cell_graph_metric_flags_zero_subtree():
    ss, hs = make_sierpinski_gasket(2)
    m = np.ones(27)
    m[:9] = 0.0
    cg = cell_graph_metric(ss, hs, CellMeasure(3, 3, m), 3)
    assert cg.zero_mass_cells == 9 and cg.flags
    assert cg.diameters.of((0,)) == 0.0


def test_m2_sg2_bounded_vicsek_overflows():
    ss, hs = make_sierpinski_gasket(2)
    h1, h2 = orthonormal_harmonic_pair(ss, hs)
    cs = []
    for L in range(2, 6):
        mu = kusuoka_pair_measure(ss, hs, h1, h2, L)
        cs.append(m2_constant(cell_graph_metric(ss, hs, mu, L).diameters, mu, hs, L).c_star)
    assert all(np.isfinite(cs))
    assert max(b / a for a, b in zip(cs, cs[1:])) <= 1.2

    ss, hs = make_vicsek(0.25)
    h = HarmonicFunction(ss, hs, [1.0, 0, 0, 0])
    mu = cell_energy_measure(ss, hs, h, 3)
    res = m2_constant(cell_graph_metric(ss, hs, mu, 3).diameters, mu, hs, 3)
    assert res.overflow and res.zero_mass_cells > 0


# --- SG_N degeneration ---------------------------------------------------------


def test_sg3_degeneration():
    d = sg_degeneration_probe(3, 8)
    assert max(d.phi_scaling_error.values()) <= 1e-10
    assert d.psi_eigen_error <= 1e-12
    assert all(abs(r - 1 / 3) <= 1e-6 for r in d.chain_ratios)
    assert np.allclose(d.chain_sums, d.closed_form, rtol=1e-9)
    assert d.convergence_rates[-1] == pytest.approx(d.expected_rate, rel=0.05)


def test_sg_degeneration_dimension_guard():
    with pytest.raises(DimensionError):
        sg_degeneration_probe(2, 3)
    d = sg_degeneration_probe(2, 3, informational=True)
    assert d.informational
    assert all(abs(r - d.expected_ratio) <= 1e-9 for r in d.chain_ratios)
    assert d.expected_ratio == pytest.approx(1 / 5)
