"""Dirichlet forms on post-critically finite self-similar sets."""
from .attainment import (
    sg_degeneration_probe,
    vicsek_cell_square,
    vicsek_diagonal_mask,
    vicsek_offdiagonal_report,
)
from .harmonic import (
    HarmonicFunction,
    boundary_energy,
    energy_matrix,
    extension_matrices,
    fw_star_spectrum,
    graph_energy,
    harmonic_extension,
    hausdorff_weight_dimension,
    resistance_matrix,
    resistance_metric,
    validate_harmonic_structure,
    word_matrix,
)
from .measures import (
    CellDiameters,
    CellMeasure,
    cell_energy_measure,
    cell_graph_metric,
    kusuoka_pair_measure,
    m2_constant,
    orthonormal_harmonic_pair,
    rescale_cell_pair,
    self_similar_measure,
)
from .structures import (
    HarmonicStructure,
    SelfSimilarStructure,
    Similitude,
    cell_weights,
    make_interval,
    make_sierpinski_gasket,
    make_structure,
    make_vicsek,
    parse_word,
    word_str,
)
