"""Gap-p three-term recurrences, banded Hessenberg minors and their
block-Toeplitz symbol: star-like zero attractors, equilibrium measures,
interlacing, closed-form branch sums and the one-signed residue hierarchy.
"""

from ._kernels import USING_NUMBA
from .errors import (
    AdmissibilityFail,
    BoundaryCollision,
    ConfigError,
    ConsistencyFail,
    CountMismatchWarning,
    DegenerateX,
    DegreeOverflow,
    IllConditionedWarning,
    InfeasiblePrefix,
    MopError,
    NumericalError,
    ParityViolation,
    RootCollision,
    SizeGuard,
    SizeMismatch,
    Stagnation,
)
from .scaled import ScaledScalar
from .recurrence import (
    PolyCoeffs,
    RecurrenceSpec,
    eval_poly,
    eval_poly_exact,
    poly_coeffs,
    poly_zeros,
)
from .hessenberg import (
    BandedHessenberg,
    CyclicProductForm,
    DeflatedPoly,
    MinorSelect,
    check_interlacing,
    corner_bidiagonal_minor_sign,
    cyclic_product_form,
    deflate,
    minor_det,
    minor_det_exact,
    minor_det_recursive,
    minor_zeros,
    monomial_order,
    parity_ray,
    sample_contiguous_minors,
    signed_interlaces,
    weakly_interlaces,
)
from .patterns import (
    Pattern,
    complete_pattern,
    enumerate_patterns,
    is_pattern,
    pattern_expansion,
    pattern_terms,
    window_counts_ok,
)
from .symbol import RootBundle, Symbol, TransferData
from .geometry import (
    StarSet,
    expected_interval_count,
    forced_membership,
    interior_tie_error,
    ray_point,
    star_set,
)
from .measures import (
    CountingMeasure,
    DensitySample,
    energy,
    log_potential,
    mu_density,
    mutual_log_energy,
    perturbed_density,
    star_energy,
    weak_convergence_report,
)
from .asymptotics import (
    HierarchyValue,
    PoincareReport,
    ResidueReport,
    branch_asymptotics_check,
    branch_constants_check,
    cauchy_nu,
    cauchy_ratio,
    degree_asymptotics_check,
    hierarchy,
    hierarchy_jump_check,
    hierarchy_recursive,
    hierarchy_slope,
    hierarchy_surrogate,
    is_product_ordered,
    nikishin_sign_test,
    poincare_iterate,
    ratio_limit,
    strong_limit_table,
    widom_eval,
    widom_vs_recurrence,
)

__version__ = "0.1.0"
