"""hdx: spectral and isoperimetric analysis of finite simplicial complexes.

Builds complexes, assembles boundary/coboundary operators and Laplacians,
and computes spectral gaps, Cheeger constants, mixing-bound audits,
geometric overlap estimates, and random-complex expansion experiments.
"""

from .complexes import (
    Cell,
    CellError,
    Link,
    OrientedCell,
    SimplicialComplex,
    bowtie,
    complete_complex,
    cycle_graph,
    from_top_cells,
    mobius_band,
    octahedron_with_pendant,
    path_graph,
)
from .expansion import (
    BudgetError,
    ExpansionReport,
    MixingAudit,
    PartitionError,
    cheeger_exact,
    cheeger_local_search,
    cheeger_test_form,
    cheeger_tilde,
    count_F,
    isolated_cell_witness,
    link_cheeger_bound,
    mixing_audit,
)
from .operators import (
    boundary_matrix,
    coboundary_matrix,
    cochain_basis,
    cycle_space,
    degree_operator,
    full_laplacian,
    hodge_subspaces,
    localized_upper_laplacian,
    lower_laplacian,
    restriction_to_cycles,
    upper_laplacian,
)
from .overlap import (
    DepthResult,
    max_depth,
    overlap_upper_bound,
    sample_depth,
    spectral_overlap_bound,
)
from .random_complexes import (
    LMParams,
    ParameterError,
    cheeger_lower_bound_experiment,
    concentration_experiment,
    isolated_cell_check,
    linial_meshulam,
)
from .rng import DEFAULT_SEED, derive_rng
from .spectral import (
    SpectralReport,
    betti_numbers,
    density_identity,
    rho_alpha,
    spectral_gap,
    spectral_report,
    symmetric_spectrum,
)

__version__ = "0.1.0"
