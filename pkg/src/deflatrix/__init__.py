"""Top-K PCA by Hotelling deflation with an inexact power-iteration
sub-routine, instrumented to measure error propagation and to evaluate the
matching theoretical bounds."""

from .bounds import (
    BoundInputs,
    BoundRow,
    SpectrumGaps,
    affine_recurrence_closed_form,
    agnostic_bound,
    agnostic_bound_condition,
    build_bound_report,
    directional_gap_bound,
    eigengaps,
    eigvec_drift_bound,
    geometric_tail_bound,
    linear_rate_iteration_budget,
    per_step_error_budget,
    power_iter_bound,
    power_iter_bound_conditions,
    power_iter_iteration_budget,
    sum_recurrence_closed_form,
)
from .clustering import (
    Dataset,
    SimilarityGraph,
    build_rnn_graph,
    kmeans,
    mutual_information,
    normalized_laplacian,
    run_clustering_experiment,
    spectral_embed,
    synthetic_blobs,
)
from .deflate import (
    DeflationRun,
    GroundTruthTrace,
    aligned_top_eigenvector,
    deflate_step,
    ideal_deflation,
    run_inexact_deflation,
)
from .diagnostics import (
    InequalityCheck,
    StepDiagnostics,
    Verdict,
    alignment_lower_bound_check,
    diagnose_run,
    eigvec_inner_identity_check,
    matrix_gap_recurrence_check,
)
from .errors import (
    DeflatrixError,
    DegenerateGapError,
    DegenerateIterateError,
    DimensionMismatchError,
    InvalidSpectrumError,
    IsolatedNodeError,
    JacobiConvergenceError,
    PreconditionError,
    SchemaError,
)
from .linalg import (
    ExplicitSpectrum,
    ExponentialSpectrum,
    PowerLawSpectrum,
    RandomSource,
    Spectrum,
    SymMatrix,
    build_test_sigma,
    frobenius_norm,
    jacobi_eigendecomposition,
    mat_vec,
    random_orthogonal_basis,
    sample_unit_sphere,
    spectral_norm,
    spectrum_eigenvalues,
)
from .powerit import (
    PowerIterResult,
    check_init_alignment,
    pi_alignment_bound,
    pi_error_bound,
    power_iterate,
    random_init_threshold,
)

__version__ = "0.1.0"
