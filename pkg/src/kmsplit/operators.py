"""Operator catalog: projections, proximal maps, the Volterra operator pair,
the rank-one split-feasibility operator, gradient maps, and the
forward-backward composition.

Operator handles are immutable and evaluations are pure, so handles can be
shared freely between concurrent runs.  Linear operators are evaluated
matrix-free; dense materializations exist only for the oracle solves.
"""

import math
import warnings

import numpy as np

from ._backend import kernels
from .errors import DomainError
from .hilbert import TWO_PI, L2Space, _wrap, combine, norm

__all__ = [
    "OperatorHandle",
    "OperatorFamily",
    "ResolventHandle",
    "volterra_apply",
    "volterra_adjoint_apply",
    "volterra_matrix",
    "volterra_adjoint_matrix",
    "sfp_L_apply",
    "project_integral_constraint",
    "project_ray",
    "prox_scaled_squared_norm",
    "gradient_reconstruction_full",
    "gradient_reconstruction_data",
    "gradient_sfp",
    "forward_backward_map",
    "resolvent_stepsize_inequality",
    "fixed_point_residual",
    "identity_resolvent",
    "scaled_squared_norm_resolvent",
    "projection_resolvent",
    "box_projection",
    "RAY_BRANCH_TOLERANCE",
]

REGULARITY_CLASSES = (
    "nonexpansive", "firmly-nonexpansive", "averaged", "cocoercive", "linear",
)

# Values of the ray-projection branch integral inside [-tol, tol] take the
# zero branch, so behavior is deterministic near the branch point.
RAY_BRANCH_TOLERANCE = 1e-14


class OperatorHandle:
    """A single operator: evaluation rule plus declared regularity class.

    Parameters
    ----------
    fn : callable
        ``fn(x) -> HilbertElement``.
    regularity : str
        One of ``nonexpansive``, ``firmly-nonexpansive``, ``averaged``,
        ``cocoercive``, ``linear``.
    alpha : float, optional
        Averagedness constant in (0, 1); required when regularity is
        ``averaged``.
    beta : float, optional
        Cocoercivity modulus (> 0); required when regularity is
        ``cocoercive``.
    """

    __slots__ = ("fn", "regularity", "alpha", "beta", "name")

    def __init__(self, fn, regularity, *, alpha=None, beta=None, name=""):
        if regularity not in REGULARITY_CLASSES:
            raise ValueError(f"unknown regularity class {regularity!r}")
        if regularity == "averaged":
            if alpha is None or not 0.0 < float(alpha) < 1.0:
                raise ValueError("averaged operators need alpha in (0, 1)")
            alpha = float(alpha)
        if regularity == "cocoercive":
            if beta is None or not float(beta) > 0.0:
                raise ValueError("cocoercive operators need beta > 0")
            beta = float(beta)
        self.fn = fn
        self.regularity = regularity
        self.alpha = alpha
        self.beta = beta
        self.name = name

    def __call__(self, x):
        return self.fn(x)

    def __repr__(self):
        tag = self.name or "operator"
        return f"OperatorHandle({tag!r}, {self.regularity})"


class OperatorFamily:
    """Indexed source of operator evaluations n -> T_n.

    The convergence theory additionally requires the family to be
    asymptotically closed: weak cluster points of sequences on which the
    per-index fixed-point residual vanishes must be common fixed points.
    That is a contract on the family, not mechanically checkable; the
    convergence test suites exercise it indirectly.
    """

    __slots__ = ("evaluate", "regularity", "alpha", "varies_with_index", "name")

    def __init__(self, evaluate, regularity="nonexpansive", *, alpha=None,
                 varies_with_index=True, name=""):
        if regularity not in REGULARITY_CLASSES:
            raise ValueError(f"unknown regularity class {regularity!r}")
        self.evaluate = evaluate
        self.regularity = regularity
        self.alpha = alpha  # float or SequenceDescriptor for averaged families
        self.varies_with_index = varies_with_index
        self.name = name

    @classmethod
    def constant(cls, handle):
        """Family with T_n = handle for every n."""
        return cls(lambda n, x: handle(x), handle.regularity,
                   alpha=handle.alpha, varies_with_index=False,
                   name=handle.name)

    def __call__(self, n, x):
        return self.evaluate(n, x)

    def __repr__(self):
        tag = self.name or "family"
        return f"OperatorFamily({tag!r}, {self.regularity})"


class ResolventHandle:
    """Step-indexed resolvent family gamma -> J_{gamma A}.

    ``fn(x, gamma)`` must evaluate the resolvent of ``gamma * A`` for a fixed
    maximally monotone ``A``; each such map is firmly nonexpansive.
    """

    __slots__ = ("fn", "name")

    def __init__(self, fn, name=""):
        self.fn = fn
        self.name = name

    def __call__(self, x, gamma):
        if not gamma > 0.0:
            raise ValueError(f"resolvent step must be positive, got {gamma}")
        return self.fn(x, gamma)

    def __repr__(self):
        return f"ResolventHandle({self.name or 'A'!r})"


# --- domain guards ----------------------------------------------------------

def _require_l2(x, a, b, what):
    space = x.space
    if not isinstance(space, L2Space):
        raise DomainError(f"{what} needs an L2 element")
    grid = space.grid
    if abs(grid.a - a) > 1e-12 or abs(grid.b - b) > 1e-12:
        raise DomainError(
            f"{what} is defined on [{a}, {b}], got grid [{grid.a}, {grid.b}]")
    return space


# --- Volterra operator on L2(0, 1) ------------------------------------------

def volterra_apply(u):
    """Cumulative integral (Ku)(x) = integral of u over [0, x]."""
    space = _require_l2(u, 0.0, 1.0, "volterra_apply")
    return _wrap(space, kernels.cumint_forward(u.values, space.weights))


def volterra_adjoint_apply(u):
    """Adjoint (K*u)(x) = integral of u over [x, 1]."""
    space = _require_l2(u, 0.0, 1.0, "volterra_adjoint_apply")
    return _wrap(space, kernels.cumint_reverse(u.values, space.weights))


def volterra_matrix(grid):
    """Dense matrix of the discretized Volterra operator (oracle use)."""
    w = grid.weights
    m = np.tril(np.broadcast_to(w, (grid.n, grid.n)).copy(), -1)
    np.fill_diagonal(m, 0.5 * w)
    return m


def volterra_adjoint_matrix(grid):
    """Dense matrix of the adjoint; the weighted-space adjoint of K.

    With uniform midpoint weights this equals the plain transpose.
    """
    w = grid.weights
    return (volterra_matrix(grid).T * w[None, :]) / w[:, None]


# --- split-feasibility operator on L2(0, 2*pi) -------------------------------

def sfp_L_apply(x):
    """Rank-one self-adjoint map (Lx)(t) = (3t / 8 pi^3) * integral(s x(s))."""
    space = _require_l2(x, 0.0, TWO_PI, "sfp_L_apply")
    t = space.grid.nodes
    c = 3.0 / (8.0 * math.pi ** 3) * kernels.dot_w(space.weights, t, x.values)
    return _wrap(space, kernels.scale(c, t))


def project_integral_constraint(x):
    """Projection onto {x : integral(x) <= 1} over [0, 2*pi].

    Shifts by the constant (1 - integral(x)) / (2*pi) when the constraint is
    violated, otherwise returns x unchanged.
    """
    space = _require_l2(x, 0.0, TWO_PI, "project_integral_constraint")
    total = kernels.weighted_sum(space.weights, x.values)
    if total > 1.0:
        return _wrap(space, kernels.add_scalar(x.values, (1.0 - total) / TWO_PI))
    return x


def project_ray(y):
    """Projection onto the ray of nonnegative multiples of t^2 on [0, 2*pi].

    Closed form: ((5 / 32 pi^5) * integral(s^2 y(s)))_+ times t^2; branch
    integrals within RAY_BRANCH_TOLERANCE of zero take the zero branch.
    """
    space = _require_l2(y, 0.0, TWO_PI, "project_ray")
    t = space.grid.nodes
    d = kernels.dot_w(space.weights, t * t, y.values)
    if d > RAY_BRANCH_TOLERANCE:
        coeff = 5.0 * d / (32.0 * math.pi ** 5)
        return _wrap(space, coeff * t * t)
    return _wrap(space, np.zeros(space.dim))


# --- proximal maps and resolvents -------------------------------------------

def prox_scaled_squared_norm(u, gamma):
    """Proximal map of f = 0.5*||.||^2: u / (1 + gamma)."""
    if not gamma > 0.0:
        raise ValueError(f"prox step must be positive, got {gamma}")
    return _wrap(u.space, kernels.scale(1.0 / (1.0 + gamma), u.values))


def identity_resolvent():
    """Resolvent of A = 0 (the identity for every step)."""
    return ResolventHandle(lambda x, gamma: x, name="zero-operator")


def scaled_squared_norm_resolvent():
    """Resolvent family of the subdifferential of 0.5*||.||^2."""
    return ResolventHandle(prox_scaled_squared_norm, name="half-squared-norm")


def projection_resolvent(projection, name="projection"):
    """Resolvent of a normal cone: the (step-independent) projection."""
    return ResolventHandle(lambda x, gamma: projection(x), name=name)


def box_projection(lo, hi):
    """Componentwise clip onto the box [lo, hi]^d as an OperatorHandle."""
    def fn(x):
        return _wrap(x.space, np.clip(x.values, lo, hi))
    return OperatorHandle(fn, "firmly-nonexpansive", name=f"box[{lo},{hi}]")


# --- gradient maps -----------------------------------------------------------

def gradient_reconstruction_full(u, weight, b):
    """Gradient of weight/2*||Ku - b||^2 + 0.5*||u||^2:  weight*K*(Ku - b) + u."""
    if not weight > 0.0:
        raise ValueError("regularization weight must be positive")
    residual = volterra_apply(u) - b
    return combine(weight, volterra_adjoint_apply(residual), 1.0, u)


def gradient_reconstruction_data(u, weight, b):
    """Gradient of the data term weight/2*||Ku - b||^2:  weight*K*(Ku - b)."""
    if not weight > 0.0:
        raise ValueError("regularization weight must be positive")
    residual = volterra_apply(u) - b
    return weight * volterra_adjoint_apply(residual)


def gradient_sfp(x):
    """Gradient of 0.5*||Lx - P_ray(Lx)||^2:  L(Lx - P_ray(Lx)), L self-adjoint."""
    y = sfp_L_apply(x)
    return sfp_L_apply(y - project_ray(y))


# --- compositions and residuals ----------------------------------------------

def forward_backward_map(x, gamma, resolvent, operator):
    """One forward-backward evaluation J_{gamma A}(x - gamma*Bx).

    The composition is averaged (hence nonexpansive) for gamma < 2*beta when
    ``operator`` declares cocoercivity beta; out-of-range steps are evaluated
    anyway for diagnostics, with a warning.
    """
    if not gamma > 0.0:
        raise ValueError(f"step must be positive, got {gamma}")
    beta = operator.beta
    if beta is not None and gamma >= 2.0 * beta:
        warnings.warn(
            f"step {gamma} is not below 2*beta = {2.0 * beta}; averagedness "
            "of the forward-backward map is not guaranteed", stacklevel=2)
    return resolvent(combine(1.0, x, -gamma, operator(x)), gamma)


def resolvent_stepsize_inequality(x, gamma_n, gamma_m, resolvent, operator=None):
    """Both sides of the resolvent step-comparison inequality.

    lhs = ||J_{gn A}(x - gn Bx) - J_{gm A}(x - gm Bx)||,
    rhs = |1 - gm/gn| * ||J_{gn A}(x - gn Bx) - x||.
    Callers assert lhs <= rhs + tolerance.  ``operator=None`` means B = 0.
    """
    if not (gamma_n > 0.0 and gamma_m > 0.0):
        raise ValueError("step sizes must be positive")
    if operator is None:
        bx = 0.0 * x
    else:
        bx = operator(x)
    rn = resolvent(combine(1.0, x, -gamma_n, bx), gamma_n)
    rm = resolvent(combine(1.0, x, -gamma_m, bx), gamma_m)
    lhs = norm(rn - rm)
    rhs = abs(1.0 - gamma_m / gamma_n) * norm(rn - x)
    return lhs, rhs


def fixed_point_residual(operator, x, n=0):
    """||x - T x||; accepts an OperatorHandle or an OperatorFamily (at index n)."""
    if isinstance(operator, OperatorFamily):
        tx = operator(n, x)
    else:
        tx = operator(x)
    return kernels.diff_norm_w(x.space.weights, x.values, tx.values)
