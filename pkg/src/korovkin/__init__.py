"""Quantitative error bounds for weakly nonlinear monotone operators.

The package measures, entirely on finite sampled function spaces, how
far an operator T is from a reference A using only their disagreement on
the quadratic test set {1, -pr_1, ..., -pr_N, sum pr_k^2}, and verifies
the resulting sup-norm error bounds for Bernstein-type operator families
that are sublinear and monotone without being linear.
"""

__version__ = "0.1.0"

from .function_space import (
    Domain,
    SampledFunction,
    TestFunctionSet,
    corpus_function,
    corpus_names,
    grid_tolerance,
    lipschitz_estimate,
    modulus_of_continuity,
    product_grid,
    read_sampled_function,
    sup_norm,
    test_functions,
    uniform_grid,
    write_sampled_function,
)
from .operators import (
    ALL_FLAGS,
    CA,
    FAMILIES,
    LINEAR,
    M,
    SL,
    TR,
    TR_STAR,
    UNITAL,
    OperatorHandle,
    WarpFunction,
    bernstein_weight_matrix,
    bernstein_weights,
    build_operator,
    build_warp,
    composition_from_indices,
    grid_divisor,
    identity_warp,
    make_bernstein,
    make_composition,
    make_max_bernstein,
    make_sup_bernstein,
    make_square_negative_control,
    make_yosida_kakutani,
    operator_from_config,
    quadratic_warp,
    registry_grid,
    scale_operator,
    snap_warp,
    table_warp,
)
from .axioms import (
    DEFAULT_AXIOM_TOL,
    AxiomReport,
    Witness,
    check_axiom,
    random_piecewise_linear,
    verify_lipschitz_bound,
)
from .bounds import (
    DEFAULT_GRID_POINTS,
    BoundReport,
    BoundViolationError,
    ConvergenceTable,
    PositivityError,
    bound_tolerance,
    compute_M,
    compute_delta,
    compute_mu,
    convergence_sweep,
    error_bound_report_1d,
    decomposition_identity_check,
    error_bound_report,
)
from .harness import (
    ConfigError,
    ExperimentConfig,
    RunManifest,
    emit_plot_data,
    list_registry,
    load_config,
    run,
)
