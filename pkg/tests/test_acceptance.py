"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (add ``-s`` to always see the
per-criterion lines).
"""

import math
import time

import numpy as np

from kmsplit.hilbert import EuclideanSpace, inner, norm
from kmsplit.iteration import (
    forward_backward_var,
    km_tikhonov_family,
    max_iterations_rule,
    residual_rule,
    step_norm_rule,
)
from kmsplit.operators import (
    OperatorHandle,
    forward_backward_map,
    gradient_reconstruction_data,
    gradient_reconstruction_full,
    gradient_sfp,
    project_integral_constraint,
    project_ray,
    projection_resolvent,
    prox_scaled_squared_norm,
    resolvent_stepsize_inequality,
    scaled_squared_norm_resolvent,
    sfp_L_apply,
    volterra_adjoint_apply,
    volterra_apply,
)
from kmsplit.problems import (
    finite_dim_problem,
    oracle_reconstruction,
    reconstruction_problem,
    reference_reconstruction_schedules,
    reference_sfp_schedules,
    run_reconstruction,
    run_sfp,
    sfp_problem,
)
from kmsplit.schedules import ScheduleSet, constant, oscillating, tikhonov_beta, validate_fb, validate_km

from conftest import TWO_PI, assert_gradient_matches, l2, random_element, random_unit

GRID_N = 4096
SFP_STARTS = ("t", "t^2", "t^3", "sin", "cos", "exp", "log", "sqrt")
REFERENCE_COUNTS = {"t": 8, "t^2": 12, "t^3": 17, "sin": 3, "cos": 1,
                    "exp": 19, "log": 5, "sqrt": 6}
COUNT_BAND = 3


def report(num, ok, detail=""):
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, f"criterion {num} failed: {detail}"


def sfp_counts(variable_step=False, variable_relaxation=False):
    problem = sfp_problem(n=GRID_N)
    schedules = reference_sfp_schedules(variable_step, variable_relaxation)
    counts = {}
    for start in SFP_STARTS:
        trace = run_sfp(problem, schedules, residual_rule(1e-3),
                        start_name=start, record_fp_residual=False)
        assert trace.termination_reason == "residual"
        counts[start] = trace.iterations
    return counts


def test_criterion_1_sfp_iteration_counts():
    t0 = time.time()
    counts = sfp_counts()
    deviations = {s: counts[s] - REFERENCE_COUNTS[s] for s in SFP_STARTS}
    ok = all(abs(d) <= COUNT_BAND for d in deviations.values())
    ok = ok and counts["cos"] == 1
    report(1, ok, f"counts={counts} deviations={deviations} "
                  f"elapsed={time.time() - t0:.2f}s")


def test_criterion_2_variable_step_superiority():
    t0 = time.time()
    rows = []
    ok = True
    for variable_relaxation in (False, True):
        const_counts = sfp_counts(False, variable_relaxation)
        var_counts = sfp_counts(True, variable_relaxation)
        for start in SFP_STARTS:
            good = var_counts[start] <= const_counts[start]
            ok = ok and good
            rows.append((start, variable_relaxation, const_counts[start],
                         var_counts[start]))
    report(2, ok, f"(start, variable_lambda, constant, variable): {rows} "
                  f"elapsed={time.time() - t0:.2f}s")


def test_criterion_3_strong_convergence_to_minimum_norm():
    t0 = time.time()
    problem = sfp_problem(n=GRID_N)
    failures = []
    for variable_step in (False, True):
        schedules = reference_sfp_schedules(variable_step)
        for start in SFP_STARTS:
            trace = run_sfp(problem, schedules, max_iterations_rule(500),
                            start_name=start, record_fp_residual=False)
            tail_mean = float(np.mean(trace.iterate_norm[-50:]))
            x0_norm = float(trace.iterate_norm[0])
            final_residual = float(trace.monitor[-1])
            if not (tail_mean < 0.5 * x0_norm and final_residual < 1e-4):
                failures.append((start, variable_step, tail_mean / x0_norm,
                                 final_residual))
    report(3, not failures,
           f"failures={failures} elapsed={time.time() - t0:.2f}s")


def test_criterion_4_reconstruction_oracle_equivalence():
    t0 = time.time()
    schedules = reference_reconstruction_schedules()
    results = []
    for data_name in ("x", "x^2", "sin"):
        oracle = None
        for mode in ("prox-gradient", "full-gradient"):
            problem = reconstruction_problem(data_name, mode=mode, n=GRID_N)
            if oracle is None:  # the oracle is mode-independent
                oracle = oracle_reconstruction(problem)
            trace = run_reconstruction(problem, schedules,
                                       step_norm_rule(1e-4), "t^2/10",
                                       record_fp_residual=False)
            err = norm(trace.final - oracle.minimizer)
            results.append((data_name, mode, trace.iterations, err))
    detail = "; ".join(f"b={b} {m}: iterations={it} |u-u*|={e:.3e}"
                       for b, m, it, e in results)
    ok = all(err <= 1e-3 for *_, err in results)
    report(4, ok, detail + f" elapsed={time.time() - t0:.2f}s")


# --- criterion 5: randomized invariant suites ---------------------------------

SFP_SPACE = l2(0.0, TWO_PI, 512)
UNIT_SPACE = l2(0.0, 1.0, 512)


def test_criterion_5a_nonexpansiveness_and_firm_nonexpansiveness(rng):
    failures = 0
    b_op = OperatorHandle(lambda x: x, "cocoercive", beta=1.0)
    prox = scaled_squared_norm_resolvent()
    for _ in range(100):
        x, y = (random_element(SFP_SPACE, rng, 2.0) for _ in range(2))
        for op in (project_integral_constraint, project_ray):
            tx, ty = op(x), op(y)
            fne = norm(tx - ty) ** 2 + norm((x - tx) - (y - ty)) ** 2
            if fne > norm(x - y) ** 2 * (1 + 1e-10):
                failures += 1
        u, v = (random_element(UNIT_SPACE, rng) for _ in range(2))
        gamma = float(rng.uniform(0.05, 3.0))
        pu, pv = (prox_scaled_squared_norm(z, gamma) for z in (u, v))
        fne = norm(pu - pv) ** 2 + norm((u - pu) - (v - pv)) ** 2
        if fne > norm(u - v) ** 2 * (1 + 1e-10):
            failures += 1
        gamma_fb = float(rng.uniform(0.05, 1.95))  # below 2*beta
        fu = forward_backward_map(u, gamma_fb, prox, b_op)
        fv = forward_backward_map(v, gamma_fb, prox, b_op)
        if norm(fu - fv) > norm(u - v) * (1 + 1e-10):
            failures += 1
    report("5a", failures == 0, f"{failures} violations in 400 cases")


def test_criterion_5b_adjoint_identities(rng):
    worst = 0.0
    for _ in range(100):
        u, v = (random_element(UNIT_SPACE, rng) for _ in range(2))
        worst = max(worst, abs(inner(volterra_apply(u), v)
                               - inner(u, volterra_adjoint_apply(v))))
        x, y = (random_element(SFP_SPACE, rng) for _ in range(2))
        worst = max(worst, abs(inner(sfp_L_apply(x), y)
                               - inner(x, sfp_L_apply(y))))
    report("5b", worst <= 1e-8, f"worst adjoint mismatch {worst:.3e}")


def test_criterion_5c_operator_norm_bounds(rng):
    bound_k = math.sqrt(0.5)
    worst_k = worst_l = 0.0
    # near-extremal directions: the slowest cosine mode almost attains the
    # cumulative-integral operator norm 2/pi, and t is an eigenvector of the
    # rank-one operator with eigenvalue 1
    extremal_k = [UNIT_SPACE.sample(lambda t: np.cos(0.5 * math.pi * t)),
                  UNIT_SPACE.element(np.ones(UNIT_SPACE.dim))]
    extremal_l = [SFP_SPACE.sample(lambda t: t),
                  SFP_SPACE.sample(lambda t: t + 0.05 * np.sin(t))]
    for u in extremal_k:
        worst_k = max(worst_k, norm(volterra_apply(u)) / norm(u))
    for x in extremal_l:
        worst_l = max(worst_l, norm(sfp_L_apply(x)) / norm(x))
    assert worst_k > 0.6           # the extremal directions bite
    assert worst_l > 0.99
    for _ in range(100):
        u = random_unit(UNIT_SPACE, rng)
        worst_k = max(worst_k, norm(volterra_apply(u)))
        x = random_unit(SFP_SPACE, rng)
        worst_l = max(worst_l, norm(sfp_L_apply(x)))
    ok = worst_k <= bound_k * (1 + 1e-12) and worst_l <= 1.0 + 1e-12
    report("5c", ok, f"max ||Ku||={worst_k:.6f} (bound {bound_k:.6f}), "
                     f"max ||Lx||={worst_l:.6f} (bound 1)")


def test_criterion_5d_resolvent_stepsize_inequality(rng):
    b_op = OperatorHandle(lambda x: x, "cocoercive", beta=1.0)
    cases = []
    cases += [(UNIT_SPACE, scaled_squared_norm_resolvent(), None)] * 34
    cases += [(SFP_SPACE, projection_resolvent(project_integral_constraint),
               None)] * 33
    cases += [(UNIT_SPACE, scaled_squared_norm_resolvent(), b_op)] * 33
    worst = -math.inf
    for space, resolvent, op in cases:
        x = random_element(space, rng, 2.0)
        gn, gm = rng.uniform(0.05, 1.9, size=2)
        lhs, rhs = resolvent_stepsize_inequality(x, float(gn), float(gm),
                                                 resolvent, op)
        worst = max(worst, lhs - rhs)
    report("5d", worst <= 1e-10, f"worst lhs-rhs = {worst:.3e} in 100 cases")


def test_criterion_5e_gradients_match_finite_differences(rng):
    space_sfp = l2(0.0, TWO_PI, 2048)
    b = UNIT_SPACE.sample(lambda t: t)
    lam = 1.0

    def f_full(u):
        r = volterra_apply(u) - b
        return 0.5 * lam * inner(r, r) + 0.5 * inner(u, u)

    def f_data(u):
        r = volterra_apply(u) - b
        return 0.5 * lam * inner(r, r)

    def f_sfp_ray(x):
        y = sfp_L_apply(x)
        d = y - project_ray(y)
        return 0.5 * inner(d, d)

    def f_sfp_zero(x):
        y = sfp_L_apply(x)
        return 0.5 * inner(y, y)

    checks = 0
    for _ in range(25):
        x, h = (random_element(UNIT_SPACE, rng) for _ in range(2))
        assert_gradient_matches(
            f_full, lambda u: gradient_reconstruction_full(u, lam, b), x, h)
        assert_gradient_matches(
            f_data, lambda u: gradient_reconstruction_data(u, lam, b), x, h)
        z, k = (random_element(space_sfp, rng) for _ in range(2))
        assert_gradient_matches(f_sfp_ray, gradient_sfp, z, k)
        assert_gradient_matches(
            f_sfp_zero, lambda v: sfp_L_apply(sfp_L_apply(v)), z, k)
        checks += 4
    report("5e", True, f"{checks} directional-derivative checks at 1e-5")


def _contraction_violations(trace, solution, contraction_tol=1e-10,
                            bounded_tol=1e-8):
    """Check the per-step contraction and boundedness estimates on a run."""
    x_star = solution
    bound = max(norm(trace.iterates[0] - x_star), norm(x_star))
    bad = []
    for n in range(len(trace.iterates) - 1):
        xn, xn1 = trace.iterates[n], trace.iterates[n + 1]
        lhs = norm(xn1 - x_star)
        rhs = norm(trace.beta[n] * xn - x_star)
        if lhs > rhs + contraction_tol:
            bad.append(("contraction", n, lhs - rhs))
    for n, xn in enumerate(trace.iterates):
        if norm(xn - x_star) > bound + bounded_tol:
            bad.append(("bounded", n, norm(xn - x_star) - bound))
    return bad


def test_criterion_5f_contraction_and_boundedness():
    bad = []

    space = EuclideanSpace(2)
    line = finite_dim_problem("line-projection")
    trace = km_tikhonov_family(line.family, tikhonov_beta(), constant(0.9),
                               space.element([4.0, 3.0]),
                               max_iterations_rule(200), keep_iterates=True)
    for x_star in ([1.0, 0.0], [1.0, 5.0]):  # any common fixed point works
        bad += _contraction_violations(trace, space.element(x_star))

    box = finite_dim_problem("box-fb")
    trace = forward_backward_var(box.prox, box.operator, constant(0.5),
                                 tikhonov_beta(), constant(0.9),
                                 space.element([5.0, -2.0]),
                                 max_iterations_rule(200), keep_iterates=True)
    bad += _contraction_violations(trace, box.solution)

    problem = sfp_problem(n=1024)
    for start in ("t", "exp"):
        for variable in (False, True):
            trace = run_sfp(problem, reference_sfp_schedules(variable),
                            max_iterations_rule(120), start_name=start,
                            keep_iterates=True, record_fp_residual=False)
            bad += _contraction_violations(trace, problem.space.zero())

    recon = reconstruction_problem("x", n=512)
    oracle = oracle_reconstruction(recon)
    trace = run_reconstruction(recon, reference_reconstruction_schedules(),
                               max_iterations_rule(120), "t^2/10",
                               keep_iterates=True, record_fp_residual=False)
    bad += _contraction_violations(trace, oracle.minimizer)

    report("5f", not bad, f"violations: {bad[:5]} (of {len(bad)})")


def test_criterion_6_finite_dimensional_closed_forms():
    t0 = time.time()
    space = EuclideanSpace(2)
    results = {}

    line = finite_dim_problem("line-projection")
    trace = km_tikhonov_family(line.family, tikhonov_beta(), constant(0.9),
                               space.element([4.0, 3.0]),
                               max_iterations_rule(3000))
    results["line"] = norm(trace.final - line.solution)

    const = finite_dim_problem("constant-map", point=(0.3, -0.7))
    trace = km_tikhonov_family(const.family, tikhonov_beta(), constant(0.9),
                               space.element([5.0, 5.0]),
                               max_iterations_rule(3000))
    results["constant"] = norm(trace.final - const.solution)

    ident = finite_dim_problem("identity")
    trace = km_tikhonov_family(ident.family, tikhonov_beta(), constant(0.9),
                               space.element([0.7, 0.2]),
                               max_iterations_rule(3000))
    results["identity"] = norm(trace.final - ident.solution)

    box = finite_dim_problem("box-fb")
    trace = forward_backward_var(box.prox, box.operator, constant(0.5),
                                 tikhonov_beta(), constant(0.9),
                                 space.element([5.0, 1.7]),
                                 max_iterations_rule(3000))
    results["box"] = norm(trace.final - box.solution)

    ok = all(err < 1e-3 for err in results.values())
    report(6, ok, f"distances={ {k: f'{v:.2e}' for k, v in results.items()} } "
                  f"elapsed={time.time() - t0:.2f}s")


def test_criterion_7_validator_correctness(tmp_path):
    from kmsplit.cli import main

    checks = []

    # reference variable schedules: every condition proved
    report_var = validate_fb(reference_sfp_schedules(True, True), beta_coc=1.0)
    checks.append(("sfp variable schedules proved", report_var.passed))

    # oscillating step schedule: violated exactly in group (iii)
    report_osc = validate_fb(ScheduleSet(tikhonov_beta(), constant(0.9),
                                         oscillating(1.3, 0.1)), beta_coc=2.0)
    bad_groups = {c.group for c in report_osc.failures()}
    checks.append(("oscillating gamma violates (iii)", bad_groups == {"iii"}))

    # constant Tikhonov sequence: condition (i) fails
    report_beta = validate_km(constant(0.5), constant(0.9))
    checks.append(("constant beta violates (i)",
                   any(c.group == "i" for c in report_beta.failures())))

    # exit codes through the CLI
    good = tmp_path / "good.cfg"
    good.write_text(
        "problem.kind = sfp\nproblem.start = t\ngrid.n = 256\n"
        "schedules.beta = kind=harmonic-approach limit=1 coeff=1 first=0.25\n"
        "schedules.lambda = kind=harmonic-approach limit=0.5 coeff=-1 offset=2\n"
        "schedules.gamma = kind=harmonic-approach limit=1 coeff=0.5\n"
        "stop.rule = residual\nstop.tolerance = 1e-3\n")
    checks.append(("validate exit 0", main(["validate", "--config", str(good)]) == 0))
    checks.append(("run exit 0", main(["run", "--config", str(good)]) == 0))

    capped = tmp_path / "capped.cfg"
    capped.write_text(good.read_text().replace(
        "stop.rule = residual\nstop.tolerance = 1e-3\n",
        "stop.rule = step-norm\nstop.tolerance = 1e-300\n"
        "stop.max_iterations = 3\n"))
    checks.append(("guard exit 2", main(["run", "--config", str(capped)]) == 2))

    bad = tmp_path / "bad.cfg"
    bad.write_text(good.read_text().replace(
        "kind=harmonic-approach limit=1 coeff=1 first=0.25",
        "kind=constant value=0.5"))
    checks.append(("invalid beta run exit 1", main(["run", "--config", str(bad)]) == 1))
    checks.append(("invalid beta validate exit 1",
                   main(["validate", "--config", str(bad)]) == 1))
    checks.append(("empty config exit 1",
                   main(["validate", "--config", str(tmp_path / "missing.cfg")]) == 1))

    failures = [name for name, ok in checks if not ok]
    report(7, not failures, f"failed checks: {failures}" if failures
           else f"{len(checks)} checks")
