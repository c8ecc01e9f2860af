"""Iteration drivers with stopping rules and trace recording.

All four drivers share one recursion core
    x_{n+1} = z_n + lambda_n * (T_n(z_n) - z_n),   z_n = beta_n * x_n,
differing only in how the family member T_n is evaluated.  Stopping is
checked after each new iterate, so a run whose first iterate already meets a
residual tolerance reports one iteration.  A single run is strictly
sequential; drivers share no mutable state, so independent runs may execute
concurrently.
"""

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .errors import DivergenceError, ScheduleValidationError
from .hilbert import combine, norm
from .operators import forward_backward_map
from .schedules import validate_fb, validate_km, validate_km_averaged, ScheduleSet

__all__ = [
    "StoppingRule",
    "step_norm_rule",
    "residual_rule",
    "max_iterations_rule",
    "wall_clock_rule",
    "IterationTrace",
    "TraceSummary",
    "km_tikhonov_family",
    "km_tikhonov_averaged",
    "forward_backward_var",
    "proximal_gradient_var",
    "trace_summary",
]

DEFAULT_MAX_ITERATIONS = 100_000


@dataclass(frozen=True)
class StoppingRule:
    """One stopping criterion; pass several to a driver for first-to-fire."""

    kind: str                      # step-norm | residual | max-iterations | wall-clock
    tolerance: float | None = None
    max_iterations: int | None = None
    seconds: float | None = None

    def __post_init__(self):
        if self.kind in ("step-norm", "residual"):
            if self.tolerance is None or not self.tolerance > 0.0:
                raise ValueError(f"{self.kind} rule needs a positive tolerance")
        elif self.kind == "max-iterations":
            if self.max_iterations is None or self.max_iterations < 1:
                raise ValueError("max-iterations rule needs a count >= 1")
        elif self.kind == "wall-clock":
            if self.seconds is None or not self.seconds > 0.0:
                raise ValueError("wall-clock rule needs a positive duration")
        else:
            raise ValueError(f"unknown stopping rule {self.kind!r}")


def step_norm_rule(tolerance):
    """Stop once ||x_{n+1} - x_n|| <= tolerance."""
    return StoppingRule("step-norm", tolerance=float(tolerance))


def residual_rule(tolerance):
    """Stop once the run's monitor value at the new iterate <= tolerance."""
    return StoppingRule("residual", tolerance=float(tolerance))


def max_iterations_rule(count):
    return StoppingRule("max-iterations", max_iterations=int(count))


def wall_clock_rule(seconds):
    return StoppingRule("wall-clock", seconds=float(seconds))


@dataclass
class IterationTrace:
    """Per-iteration record of a run; row k describes the iterate x_k.

    ``step_norm[k]`` is ||x_k - x_{k-1}|| (nan at k = 0); ``fp_residual[k]``
    is ||x_k - T_k x_k||; ``monitor[k]`` is the problem's feasibility or
    objective value when one was attached; the schedule columns hold the
    sequence values at index k.  Rows = iterations performed + 1.
    """

    iterate_norm: np.ndarray
    step_norm: np.ndarray
    fp_residual: np.ndarray
    monitor: np.ndarray
    beta: np.ndarray
    lam: np.ndarray
    gamma: np.ndarray
    termination_reason: str
    monitor_id: str
    wall_time: float
    final: object
    initial: object
    iterates: list = field(default_factory=list)

    @property
    def iterations(self):
        return len(self.iterate_norm) - 1


@dataclass(frozen=True)
class TraceSummary:
    iterations: int
    termination_reason: str
    final_iterate_norm: float
    final_step_norm: float
    final_fp_residual: float
    final_monitor: float
    monitor_id: str
    wall_time: float
    fp_residuals: np.ndarray
    monitor_values: np.ndarray


def trace_summary(trace):
    """Condense a trace to its end state plus the residual series."""
    if len(trace.iterate_norm) == 0:
        raise ValueError("empty trace")
    return TraceSummary(
        iterations=trace.iterations,
        termination_reason=trace.termination_reason,
        final_iterate_norm=float(trace.iterate_norm[-1]),
        final_step_norm=float(trace.step_norm[-1]),
        final_fp_residual=float(trace.fp_residual[-1]),
        final_monitor=float(trace.monitor[-1]),
        monitor_id=trace.monitor_id,
        wall_time=trace.wall_time,
        fp_residuals=trace.fp_residual.copy(),
        monitor_values=trace.monitor.copy(),
    )


def _normalize_rules(stop):
    rules = [stop] if isinstance(stop, StoppingRule) else list(stop)
    if not rules:
        raise ValueError("at least one stopping rule is required")
    if not any(r.kind == "max-iterations" for r in rules):
        rules.append(max_iterations_rule(DEFAULT_MAX_ITERATIONS))
    if any(r.kind == "residual" for r in rules):
        return rules, True
    return rules, False


def _apply_validation(report, force):
    if report.passed:
        return
    if force:
        warnings.warn("schedule validation overridden: " + report.summary(),
                      stacklevel=3)
        return
    raise ScheduleValidationError(report)


def _run(member, x0, beta, lam, gamma, stop, *, monitor=None, monitor_id="",
         keep_iterates=False, record_fp_residual=True, per_step_check=None):
    """Shared recursion core; ``member(n, z)`` evaluates T_n(z)."""
    rules, needs_monitor = _normalize_rules(stop)
    if needs_monitor and monitor is None:
        raise ValueError("a residual stopping rule needs a monitor function")

    w = x0.space.weights
    cap = 1e6 * (1.0 + norm(x0))
    gamma_at = (lambda n: gamma(n)) if gamma is not None else (lambda n: math.nan)

    cols = {k: [] for k in ("iterate_norm", "step_norm", "fp_residual",
                            "monitor", "beta", "lam", "gamma")}

    def record(n, x, step):
        cols["iterate_norm"].append(norm(x))
        cols["step_norm"].append(step)
        if record_fp_residual:
            tx = member(n, x)
            cols["fp_residual"].append(
                kernels.diff_norm_w(w, x.values, tx.values))
        else:
            cols["fp_residual"].append(math.nan)
        cols["monitor"].append(monitor(x) if monitor is not None else math.nan)
        cols["beta"].append(beta(n))
        cols["lam"].append(lam(n))
        cols["gamma"].append(gamma_at(n))

    t0 = time.monotonic()
    x = x0
    iterates = [x0] if keep_iterates else []
    record(0, x0, math.nan)

    n = 0
    reason = None
    while reason is None:
        bn, ln = beta(n), lam(n)
        if per_step_check is not None:
            per_step_check(n, ln)
        z = bn * x
        x_next = combine(1.0 - ln, z, ln, member(n, z))

        vals = x_next.values
        if not np.all(np.isfinite(vals)):
            raise DivergenceError(f"non-finite iterate at n={n + 1}")
        step = kernels.diff_norm_w(w, vals, x.values)
        n += 1
        record(n, x_next, step)
        if keep_iterates:
            iterates.append(x_next)
        if cols["iterate_norm"][-1] > cap:
            raise DivergenceError(
                f"iterate norm {cols['iterate_norm'][-1]:.3e} exceeded the "
                f"divergence guard {cap:.3e} at n={n}")

        elapsed = time.monotonic() - t0
        for rule in rules:
            if rule.kind == "step-norm" and step <= rule.tolerance:
                reason = "step-norm"
            elif rule.kind == "residual" and cols["monitor"][-1] <= rule.tolerance:
                reason = "residual"
            elif rule.kind == "max-iterations" and n >= rule.max_iterations:
                reason = "max-iterations"
            elif rule.kind == "wall-clock" and elapsed >= rule.seconds:
                reason = "wall-clock"
            if reason:
                break
        x = x_next

    return IterationTrace(
        iterate_norm=np.asarray(cols["iterate_norm"]),
        step_norm=np.asarray(cols["step_norm"]),
        fp_residual=np.asarray(cols["fp_residual"]),
        monitor=np.asarray(cols["monitor"]),
        beta=np.asarray(cols["beta"]),
        lam=np.asarray(cols["lam"]),
        gamma=np.asarray(cols["gamma"]),
        termination_reason=reason,
        monitor_id=monitor_id,
        wall_time=time.monotonic() - t0,
        final=x,
        initial=x0,
        iterates=iterates,
    )


_NONEXPANSIVE_OK = ("nonexpansive", "firmly-nonexpansive", "averaged")


def km_tikhonov_family(family, beta, lam, x0, stop, *, monitor=None,
                       monitor_id="", force=False, keep_iterates=False,
                       record_fp_residual=True):
    """Regularized fixed-point iteration over a nonexpansive family.

    Runs x_{n+1} = beta_n x_n + lambda_n (T_n(beta_n x_n) - beta_n x_n) and
    converges strongly to the minimum-norm common fixed point when the
    schedule hypotheses and the family's asymptotic closedness hold.
    """
    if family.regularity not in _NONEXPANSIVE_OK:
        raise ValueError(
            f"family must be declared nonexpansive, got {family.regularity!r}")
    _apply_validation(validate_km(beta, lam), force)
    return _run(family, x0, beta, lam, None, stop, monitor=monitor,
                monitor_id=monitor_id, keep_iterates=keep_iterates,
                record_fp_residual=record_fp_residual)


def km_tikhonov_averaged(family, alpha, beta, lam, x0, stop, *, monitor=None,
                         monitor_id="", force=False, keep_iterates=False,
                         record_fp_residual=True):
    """Regularized fixed-point iteration over an alpha_n-averaged family.

    Identical recursion; the relaxation bound widens to lambda_n <= 1/alpha_n,
    which is enforced per step (the boundary value is accepted).
    """
    if family.regularity != "averaged":
        raise ValueError("km_tikhonov_averaged expects an averaged family")
    _apply_validation(validate_km_averaged(beta, lam, alpha), force)

    def per_step_check(n, ln):
        bound = 1.0 / alpha(n)
        if ln > bound:
            raise ScheduleValidationError(
                validate_km_averaged(beta, lam, alpha),
                f"lambda_{n}={ln} exceeds 1/alpha_{n}={bound}")

    return _run(family, x0, beta, lam, None, stop, monitor=monitor,
                monitor_id=monitor_id, keep_iterates=keep_iterates,
                record_fp_residual=record_fp_residual,
                per_step_check=per_step_check)


def forward_backward_var(resolvent, operator, gamma, beta, lam, x0, stop, *,
                         monitor=None, monitor_id="", force=False,
                         keep_iterates=False, record_fp_residual=True):
    """Variable-step forward-backward iteration
    x_{n+1} = (1-lambda_n) beta_n x_n
              + lambda_n J_{gamma_n A}(beta_n x_n - gamma_n B(beta_n x_n)),
    converging strongly to the minimum-norm zero of A + B.

    ``operator`` must declare its cocoercivity modulus.
    """
    if operator.beta is None:
        raise ValueError("the forward operator must declare a cocoercivity "
                         "modulus (beta)")
    _apply_validation(
        validate_fb(ScheduleSet(beta, lam, gamma), operator.beta), force)

    def member(n, z):
        return forward_backward_map(z, gamma(n), resolvent, operator)

    return _run(member, x0, beta, lam, gamma, stop, monitor=monitor,
                monitor_id=monitor_id, keep_iterates=keep_iterates,
                record_fp_residual=record_fp_residual)


def proximal_gradient_var(prox, grad, gamma, beta, lam, x0, stop, **kwargs):
    """Variable-step proximal-gradient iteration: the forward-backward run
    with A the subdifferential of f (prox) and B a declared-cocoercive
    gradient map, converging strongly to the minimum-norm minimizer."""
    return forward_backward_var(prox, grad, gamma, beta, lam, x0, stop, **kwargs)
