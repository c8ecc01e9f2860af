"""The two quadrature-discretized benchmark experiments plus independent
oracles for their solutions.

Reconstruction problem on L2(0, 1):
    minimize  weight/2 * ||K u - b||^2 + 1/2 * ||u||^2
with K the cumulative-integral (Volterra) operator, solved either as a pure
gradient run (full-gradient mode) or by activating the quadratic term
through its proximal map (prox-gradient mode).  The oracle solves the dense
normal equations (I + weight*K'K) u = weight*K'b.

Split feasibility problem on L2(0, 2*pi):
    find x with integral(x) <= 1 and L x in Q,
solved as a proximal-gradient run on  delta_C + 1/2*dist(Lx, Q)^2.  Two
target sets Q are supported: ``zero`` (Q = {0}, the default; the reference
iteration counts asserted by the acceptance suite were produced with this
target) and ``ray`` (Q = nonnegative multiples of t^2, with its closed-form
projection).  The minimum-norm solution is 0 for both targets.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .hilbert import (
    TWO_PI,
    EuclideanSpace,
    HilbertElement,
    L2Space,
    QuadratureGrid,
    inner,
    norm,
    sample_catalog_function,
)
from .iteration import proximal_gradient_var
from .operators import (
    OperatorFamily,
    OperatorHandle,
    box_projection,
    gradient_reconstruction_data,
    gradient_reconstruction_full,
    gradient_sfp,
    identity_resolvent,
    project_integral_constraint,
    project_ray,
    projection_resolvent,
    scaled_squared_norm_resolvent,
    sfp_L_apply,
    volterra_adjoint_matrix,
    volterra_apply,
    volterra_matrix,
)
from .schedules import ScheduleSet, constant, harmonic_approach, oscillating, tikhonov_beta

__all__ = [
    "ReconstructionProblem",
    "SfpProblem",
    "OracleSolution",
    "reconstruction_problem",
    "sfp_problem",
    "build_reconstruction",
    "oracle_reconstruction",
    "reconstruction_objective",
    "build_sfp",
    "sfp_feasibility_residual",
    "sfp_distance_objective",
    "oracle_sfp_min_norm",
    "run_reconstruction",
    "run_sfp",
    "reference_sfp_schedules",
    "reference_reconstruction_schedules",
    "FiniteDimProblem",
    "finite_dim_problem",
]

RECONSTRUCTION_MODES = ("prox-gradient", "full-gradient")
SFP_TARGETS = ("zero", "ray")

ORACLE_RESIDUAL_TOLERANCE = 1e-10


@dataclass(frozen=True)
class ReconstructionProblem:
    """Deblurring-type quadratic problem on a [0, 1] grid.

    ``mode`` selects the operator split: ``prox-gradient`` pairs the data
    gradient weight*K'(Ku - b) with the proximal map u/(1+gamma) of the
    quadratic term; ``full-gradient`` differentiates the whole objective and
    uses the identity resolvent.
    """

    grid: QuadratureGrid
    data_name: str
    weight: float = 1.0
    mode: str = "prox-gradient"

    def __post_init__(self):
        if not self.weight > 0.0:
            raise ValueError("regularization weight must be positive")
        if self.mode not in RECONSTRUCTION_MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if abs(self.grid.a) > 1e-12 or abs(self.grid.b - 1.0) > 1e-12:
            raise ValueError("reconstruction grid must cover [0, 1]")

    @property
    def space(self):
        return L2Space(self.grid)

    def data_element(self):
        return sample_catalog_function(self.data_name, self.grid)

    def start(self, name):
        return sample_catalog_function(name, self.grid)

    def cocoercivity(self):
        """Declared modulus of the forward operator, from ||K||^2 <= 1/2."""
        if self.mode == "prox-gradient":
            return 2.0 / self.weight
        return 2.0 / (self.weight + 2.0)

    def objective(self, u):
        return reconstruction_objective(self, u)


@dataclass(frozen=True)
class SfpProblem:
    """Split feasibility experiment on a [0, 2*pi] grid."""

    grid: QuadratureGrid
    start_name: str = "t"
    q_set: str = "zero"

    def __post_init__(self):
        if self.q_set not in SFP_TARGETS:
            raise ValueError(f"unknown target set {self.q_set!r}")
        if abs(self.grid.a) > 1e-12 or abs(self.grid.b - TWO_PI) > 1e-12:
            raise ValueError("split-feasibility grid must cover [0, 2*pi]")

    @property
    def space(self):
        return L2Space(self.grid)

    def start(self, name=None):
        return sample_catalog_function(name or self.start_name, self.grid)

    def feasibility_residual(self, x):
        return sfp_feasibility_residual(x, target=self.q_set)

    def objective(self, x):
        return sfp_distance_objective(x, target=self.q_set)


@dataclass(frozen=True)
class OracleSolution:
    """Independently computed solution with its optimality residual."""

    minimizer: HilbertElement
    residual: float
    method: str


def reconstruction_problem(data_name, mode="prox-gradient", n=4096, weight=1.0):
    return ReconstructionProblem(QuadratureGrid(0.0, 1.0, n), data_name,
                                 weight, mode)


def sfp_problem(start_name="t", n=4096, q_set="zero"):
    return SfpProblem(QuadratureGrid(0.0, TWO_PI, n), start_name, q_set)


# --- reconstruction ----------------------------------------------------------

def build_reconstruction(problem):
    """Driver inputs (prox resolvent, declared-cocoercive gradient handle)."""
    b = problem.data_element()
    weight = problem.weight
    beta_coc = problem.cocoercivity()
    if problem.mode == "prox-gradient":
        prox = scaled_squared_norm_resolvent()
        grad = OperatorHandle(
            lambda u: gradient_reconstruction_data(u, weight, b),
            "cocoercive", beta=beta_coc, name="data-term-gradient")
    else:
        prox = identity_resolvent()
        grad = OperatorHandle(
            lambda u: gradient_reconstruction_full(u, weight, b),
            "cocoercive", beta=beta_coc, name="full-gradient")
    return prox, grad


def reconstruction_objective(problem, u):
    """weight/2 * ||K u - b||^2 + 1/2 * ||u||^2 on the problem grid."""
    r = volterra_apply(u) - problem.data_element()
    return 0.5 * problem.weight * inner(r, r) + 0.5 * inner(u, u)


def oracle_reconstruction(problem):
    """Dense normal-equations solve (I + weight*K'K) u = weight*K'b.

    The system matrix is the identity plus a positive-semidefinite term, so
    the minimizer is unique; the weighted-norm residual must come out below
    1e-10 * (1 + ||b||).
    """
    grid = problem.grid
    b = problem.data_element()
    k = volterra_matrix(grid)
    k_adj = volterra_adjoint_matrix(grid)
    system = np.eye(grid.n) + problem.weight * (k_adj @ k)
    rhs = problem.weight * (k_adj @ b.values)
    u = np.linalg.solve(system, rhs)
    space = problem.space
    residual_vec = space.element(system @ u - rhs)
    residual = norm(residual_vec)
    tol = ORACLE_RESIDUAL_TOLERANCE * (1.0 + norm(b))
    if residual > tol:
        raise RuntimeError(
            f"oracle residual {residual:.3e} above tolerance {tol:.3e}")
    return OracleSolution(space.element(u), residual, "dense-normal-equations")


# --- split feasibility --------------------------------------------------------

def build_sfp(problem):
    """Driver inputs: the integral-constraint projection as the resolvent of
    the constraint's normal cone, and the distance gradient with modulus 1
    (from ||L|| <= 1)."""
    prox = projection_resolvent(project_integral_constraint,
                                name="integral-constraint")
    if problem.q_set == "ray":
        fn = gradient_sfp
    else:
        def fn(x):
            return sfp_L_apply(sfp_L_apply(x))
    grad = OperatorHandle(fn, "cocoercive", beta=1.0,
                          name=f"sfp-distance-gradient[{problem.q_set}]")
    return prox, grad


def sfp_feasibility_residual(x, target="ray"):
    """0.5*||P_C x - x||^2 + 0.5*||P_Q(Lx) - Lx||^2.

    ``target`` picks Q: the t^2 ray with its closed-form projection, or {0}
    (whose projection is the zero map, leaving 0.5*||Lx||^2).
    """
    if target not in SFP_TARGETS:
        raise DomainError(f"unknown target set {target!r}")
    pc = project_integral_constraint(x)
    d = pc - x
    out = 0.5 * inner(d, d)
    return out + sfp_distance_objective(x, target=target)


def sfp_distance_objective(x, target="ray"):
    """The smooth half of the feasibility residual, 0.5*||Lx - P_Q(Lx)||^2."""
    y = sfp_L_apply(x)
    if target == "ray":
        y = y - project_ray(y)
    return 0.5 * inner(y, y)


def oracle_sfp_min_norm(problem):
    """The zero element: it satisfies both constraints (integral 0 <= 1 and
    L0 = 0 in Q) and trivially minimizes the norm over any set containing it."""
    zero = problem.space.zero()
    return OracleSolution(zero, problem.feasibility_residual(zero), "analytic")


# --- canned experiment runs ---------------------------------------------------

def reference_sfp_schedules(variable_step=False, variable_relaxation=False):
    """The benchmark schedule grid: Tikhonov beta with start 1/4, relaxation
    0.4 or 1/2 + 1/(2+n), step 0.5 or 1 - 0.5/(1+n)."""
    lam = harmonic_approach(0.5, -1.0, offset=2.0) if variable_relaxation \
        else constant(0.4)
    gamma = harmonic_approach(1.0, 0.5) if variable_step else constant(0.5)
    return ScheduleSet(tikhonov_beta(), lam, gamma, beta_coc=1.0)


def reference_reconstruction_schedules(variable_step=False):
    """Benchmark schedules for the reconstruction runs: relaxation 0.9 and
    step 1.3 (or the 2-periodic 1.3 - 0.1*(-1)^n, which fails the step
    summability hypothesis and needs a forced run)."""
    gamma = oscillating(1.3, 0.1) if variable_step else constant(1.3)
    return ScheduleSet(tikhonov_beta(), constant(0.9), gamma)


def run_reconstruction(problem, schedules, stop, start_name, **kwargs):
    """Run the reconstruction experiment; the trace monitor records the
    objective value."""
    prox, grad = build_reconstruction(problem)
    x0 = problem.start(start_name)
    return proximal_gradient_var(
        prox, grad, schedules.gamma, schedules.beta, schedules.lam, x0, stop,
        monitor=lambda u: reconstruction_objective(problem, u),
        monitor_id="objective", **kwargs)


def run_sfp(problem, schedules, stop, start_name=None, **kwargs):
    """Run the split-feasibility experiment; the trace monitor records the
    feasibility residual."""
    prox, grad = build_sfp(problem)
    x0 = problem.start(start_name)
    return proximal_gradient_var(
        prox, grad, schedules.gamma, schedules.beta, schedules.lam, x0, stop,
        monitor=problem.feasibility_residual,
        monitor_id="feasibility", **kwargs)


# --- finite-dimensional closed-form problems -----------------------------------

@dataclass(frozen=True)
class FiniteDimProblem:
    """A small Euclidean test problem with a known minimum-norm solution."""

    name: str
    driver: str                 # 'km' | 'fb'
    space: EuclideanSpace
    solution: HilbertElement
    family: object = None       # OperatorFamily for km problems
    prox: object = None         # ResolventHandle for fb problems
    operator: object = None     # cocoercive OperatorHandle for fb problems


def finite_dim_problem(name, dim=2, x0=None, point=None):
    """Catalog of closed-form checks.

    line-projection  T = projection onto {x : x_1 = 1} in R^2; the
                     minimum-norm fixed point is (1, 0).
    constant-map     T maps everything onto ``point``; fixed point = point.
    identity         T = Id; the minimum-norm fixed point is 0.
    box-fb           A = normal cone of [1, 2]^dim, B = Id; the only zero of
                     A + B is the corner of all ones.
    """
    if name == "line-projection":
        space = EuclideanSpace(2)

        def project_line(x):
            return space.element([1.0, x.values[1]])

        fam = OperatorFamily.constant(OperatorHandle(
            project_line, "firmly-nonexpansive", name="line-projection"))
        return FiniteDimProblem(name, "km", space,
                                space.element([1.0, 0.0]), family=fam)
    if name == "constant-map":
        space = EuclideanSpace(dim)
        target = space.element(point if point is not None
                               else [0.3] + [-0.7] * (dim - 1))
        fam = OperatorFamily.constant(OperatorHandle(
            lambda x: target, "nonexpansive", name="constant-map"))
        return FiniteDimProblem(name, "km", space, target, family=fam)
    if name == "identity":
        space = EuclideanSpace(dim)
        fam = OperatorFamily.constant(OperatorHandle(
            lambda x: x, "firmly-nonexpansive", name="identity"))
        return FiniteDimProblem(name, "km", space, space.zero(), family=fam)
    if name == "box-fb":
        space = EuclideanSpace(dim)
        box = box_projection(1.0, 2.0)
        prox = projection_resolvent(box, name="box[1,2]")
        ident = OperatorHandle(lambda x: x, "cocoercive", beta=1.0,
                               name="identity")
        return FiniteDimProblem(name, "fb", space,
                                space.element(np.ones(dim)),
                                prox=prox, operator=ident)
    raise ValueError(f"unknown finite-dimensional problem {name!r}")
