"""Numerical laboratory for spectral-cluster bounds on the flat torus."""

__version__ = "0.1.0"

from .errors import (
    BandlabError,
    CapacityError,
    DomainError,
    InvalidConfigError,
    NumericError,
    RangeError,
    ShapeError,
    SubspaceValidationError,
)
from .lattice import (
    FrequencyVector,
    SpectralBand,
    SpectralCluster,
    TorusConfig,
    band_norm_range,
    brute_force_band_oracle,
    count_ball,
    count_band,
    enumerate_band,
    shell_counts,
    shell_multiplicity,
    unit_ball_volume,
    weyl_remainder,
)
from .exponents import (
    ExponentProfile,
    alpha,
    corollary_rhs,
    critical_p,
    eps_power,
    profile_table,
    shrink_rate,
    sigma,
)
from .mollifier import CutoffFunction, Mollifier, standard_bump
from .cluster import (
    ClusterSubspace,
    DensityFunction,
    density,
    lp_norm,
    make_subspace,
    random_subspace,
    sup_norm_bracket,
    theorem1_ratio,
)
from .kernels import (
    KernelDiagonalReport,
    PeriodizationReport,
    decompose_diagonal,
    mollified_diagonal,
    negative_branch_diagonal,
    periodized_diagonal_check,
    sphere_ft,
    sphere_ft_envelope,
    sphere_surface_area,
    translate_term,
)
from .schatten import (
    GramMatrix,
    SchattenReport,
    TestFunction,
    constant_function,
    dual_pairing_check,
    gram_matrix,
    opine_chain_check,
    random_test_function,
    schatten_norm,
    theorem23_check,
)
from .experiments import (
    FitResult,
    SweepResult,
    SweepRow,
    SweepSpec,
    corollary_suite,
    fit_constant,
    run_sweep,
    write_csv,
    write_json,
    write_svg,
)

__all__ = [name for name in dir() if not name.startswith("_")]
