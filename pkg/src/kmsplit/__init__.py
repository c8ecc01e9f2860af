"""kmsplit: strongly convergent fixed-point and forward-backward splitting
with Tikhonov regularization, on Euclidean and quadrature-discretized L2
spaces, plus the two benchmark experiments and their oracles.

The array kernels run on a compiled Cython core when available and on a
NumPy fallback otherwise; see :func:`backend_name`.
"""

from ._backend import backend_name
from .errors import (
    ConfigError,
    DivergenceError,
    DomainError,
    ScheduleValidationError,
    SpaceMismatchError,
    UnknownFunctionError,
)
from .hilbert import (
    EuclideanSpace,
    HilbertElement,
    L2Space,
    QuadratureGrid,
    catalog_names,
    combine,
    inner,
    integrate,
    norm,
    sample_catalog_function,
)
from .iteration import (
    IterationTrace,
    StoppingRule,
    TraceSummary,
    forward_backward_var,
    km_tikhonov_averaged,
    km_tikhonov_family,
    max_iterations_rule,
    proximal_gradient_var,
    residual_rule,
    step_norm_rule,
    trace_summary,
    wall_clock_rule,
)
from .operators import (
    OperatorFamily,
    OperatorHandle,
    ResolventHandle,
    fixed_point_residual,
    forward_backward_map,
    gradient_reconstruction_data,
    gradient_reconstruction_full,
    gradient_sfp,
    project_integral_constraint,
    project_ray,
    prox_scaled_squared_norm,
    resolvent_stepsize_inequality,
    sfp_L_apply,
    volterra_adjoint_apply,
    volterra_apply,
)
from .problems import (
    OracleSolution,
    ReconstructionProblem,
    SfpProblem,
    build_reconstruction,
    build_sfp,
    finite_dim_problem,
    oracle_reconstruction,
    oracle_sfp_min_norm,
    reconstruction_problem,
    run_reconstruction,
    run_sfp,
    sfp_feasibility_residual,
    sfp_problem,
)
from .schedules import (
    ScheduleSet,
    SequenceDescriptor,
    ValidationReport,
    alpha_from_gamma,
    constant,
    harmonic_approach,
    oscillating,
    table,
    tikhonov_beta,
    validate_fb,
    validate_km,
    validate_km_averaged,
)

__version__ = "0.1.0"
