"""Command-line front end: run experiments, validate schedules, compute
oracles, and sweep configurations.

Exit codes: 0 when a run converged by its tolerance (or a validation fully
proved, or an oracle was written), 2 when a run terminated on the
max-iteration or wall-clock guard, 1 on configuration or validation errors.
"""

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import parse_config
from .errors import ConfigError, DivergenceError, ScheduleValidationError
from .hilbert import norm
from .iteration import (
    forward_backward_var,
    km_tikhonov_family,
    max_iterations_rule,
    residual_rule,
    step_norm_rule,
    trace_summary,
    wall_clock_rule,
)
from .problems import (
    finite_dim_problem,
    oracle_reconstruction,
    oracle_sfp_min_norm,
    reconstruction_problem,
    run_reconstruction,
    run_sfp,
    sfp_problem,
)
from .schedules import ScheduleSet, validate_fb, validate_km

__all__ = ["main", "write_trace_csv", "read_trace_csv"]

_CONVERGED = ("step-norm", "residual")

TRACE_COLUMNS = ("n", "iterate_norm", "step_norm", "fp_residual",
                 "feasibility_or_objective", "beta_n", "lambda_n", "gamma_n")


def _fmt(x):
    return f"{x:.17g}"


def write_trace_csv(trace, path):
    """One row per iterate, 17 significant digits (round-trip exact)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for k in range(len(trace.iterate_norm)):
            writer.writerow([
                k, _fmt(trace.iterate_norm[k]), _fmt(trace.step_norm[k]),
                _fmt(trace.fp_residual[k]), _fmt(trace.monitor[k]),
                _fmt(trace.beta[k]), _fmt(trace.lam[k]), _fmt(trace.gamma[k]),
            ])


def read_trace_csv(path):
    """Read a trace CSV back into a dict of float arrays."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != TRACE_COLUMNS:
            raise ConfigError(f"unexpected trace columns in {path}: {header}")
        rows = [[float(v) for v in row] for row in reader]
    data = np.asarray(rows, dtype=np.float64)
    return {name: data[:, i] for i, name in enumerate(TRACE_COLUMNS)}


def _summary_dict(trace, extra=None):
    s = trace_summary(trace)
    out = {
        "iterations": s.iterations,
        "termination_reason": s.termination_reason,
        "final_iterate_norm": s.final_iterate_norm,
        "final_step_norm": s.final_step_norm,
        "final_fp_residual": s.final_fp_residual,
        "final_monitor": s.final_monitor,
        "monitor_id": s.monitor_id,
        "wall_time_s": s.wall_time,
    }
    if extra:
        out.update(extra)
    return out


def _stop_rules(cfg):
    if cfg.stop_rule is None:
        raise ConfigError("config is missing stop.rule")
    rules = []
    if cfg.stop_rule == "step-norm":
        rules.append(step_norm_rule(cfg.stop_tolerance or _missing_tol()))
    elif cfg.stop_rule == "residual":
        rules.append(residual_rule(cfg.stop_tolerance or _missing_tol()))
    elif cfg.stop_rule == "wall-clock":
        if cfg.stop_seconds is None:
            raise ConfigError("wall-clock rule needs stop.seconds")
        rules.append(wall_clock_rule(cfg.stop_seconds))
    rules.append(max_iterations_rule(cfg.stop_max_iterations))
    if cfg.stop_seconds is not None and cfg.stop_rule != "wall-clock":
        rules.append(wall_clock_rule(cfg.stop_seconds))
    return rules


def _missing_tol():
    raise ConfigError("this stop.rule needs stop.tolerance")


def _schedules(cfg, need_gamma):
    if cfg.beta is None or cfg.lam is None:
        raise ConfigError("config needs schedules.beta and schedules.lambda")
    if need_gamma and cfg.gamma is None:
        raise ConfigError("this problem needs schedules.gamma")
    return ScheduleSet(cfg.beta, cfg.lam, cfg.gamma)


def _run_one(cfg, start=None, gamma=None, lam=None):
    """Execute a single configured run, returning its trace."""
    if cfg.kind == "sfp":
        problem = sfp_problem(start or cfg.start, n=cfg.grid_n, q_set=cfg.q_set)
        sched = _schedules(cfg, need_gamma=gamma is None)
    elif cfg.kind == "reconstruction":
        problem = reconstruction_problem(cfg.data, mode=cfg.mode, n=cfg.grid_n,
                                         weight=cfg.weight)
        sched = _schedules(cfg, need_gamma=gamma is None)
        if cfg.stop_rule == "residual":
            raise ConfigError("reconstruction runs stop on step-norm (or on "
                              "the max-iteration/wall-clock guards)")
    else:
        return _run_finite_dim(cfg)
    if gamma is not None:
        sched = replace(sched, gamma=gamma)
    if lam is not None:
        sched = replace(sched, lam=lam)
    stop = _stop_rules(cfg)
    if cfg.kind == "sfp":
        return run_sfp(problem, sched, stop, start_name=start or cfg.start,
                       force=cfg.force)
    return run_reconstruction(problem, sched, stop, start or cfg.start,
                              force=cfg.force)


def _run_finite_dim(cfg):
    problem = finite_dim_problem(cfg.fd_name, dim=cfg.dim,
                                 point=cfg.point or None)
    if not cfg.x0:
        raise ConfigError("custom-finite-dim needs problem.x0")
    if len(cfg.x0) != problem.space.dim:
        raise ConfigError(f"problem.x0 needs {problem.space.dim} components")
    x0 = problem.space.element(cfg.x0)
    stop = _stop_rules(cfg)
    if cfg.stop_rule == "residual":
        raise ConfigError("finite-dimensional runs stop on step-norm (or on "
                          "the max-iteration/wall-clock guards)")
    sched = _schedules(cfg, need_gamma=problem.driver == "fb")
    if problem.driver == "km":
        return km_tikhonov_family(problem.family, sched.beta, sched.lam, x0,
                                  stop, force=cfg.force)
    return forward_backward_var(problem.prox, problem.operator, sched.gamma,
                                sched.beta, sched.lam, x0, stop, force=cfg.force)


def _out_dir(cfg, args):
    out = args.out or cfg.output_dir
    if out is None:
        return None
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _apply_overrides(cfg, args):
    if getattr(args, "force", False):
        cfg = replace(cfg, force=True)
    if getattr(args, "grid_n", None):
        cfg = replace(cfg, grid_n=args.grid_n)
    if getattr(args, "workers", None):
        cfg = replace(cfg, workers=args.workers)
    return cfg


def cmd_run(args):
    cfg = _apply_overrides(parse_config(args.config), args)
    trace = _run_one(cfg)
    out = _out_dir(cfg, args)
    summary = _summary_dict(trace)
    if out is not None:
        write_trace_csv(trace, out / "trace.csv")
        with open(out / "summary.json", "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2)
    for key, value in summary.items():
        print(f"{key} = {value}")
    return 0 if trace.termination_reason in _CONVERGED else 2


def cmd_validate(args):
    cfg = _apply_overrides(parse_config(args.config), args)
    if cfg.kind == "sfp":
        report = validate_fb(_schedules(cfg, True), beta_coc=1.0)
    elif cfg.kind == "reconstruction":
        problem = reconstruction_problem(cfg.data, mode=cfg.mode, n=2,
                                         weight=cfg.weight)
        report = validate_fb(_schedules(cfg, True),
                             beta_coc=problem.cocoercivity())
    else:
        problem = finite_dim_problem(cfg.fd_name, dim=cfg.dim,
                                     point=cfg.point or None)
        if problem.driver == "fb":
            report = validate_fb(_schedules(cfg, True), beta_coc=1.0)
        else:
            sched = _schedules(cfg, False)
            report = validate_km(sched.beta, sched.lam)
    print(report.format())
    return 0 if report.passed else 1


def cmd_oracle(args):
    cfg = _apply_overrides(parse_config(args.config), args)
    if cfg.kind == "reconstruction":
        problem = reconstruction_problem(cfg.data, mode=cfg.mode, n=cfg.grid_n,
                                         weight=cfg.weight)
        solution = oracle_reconstruction(problem)
        nodes = problem.grid.nodes
    elif cfg.kind == "sfp":
        problem = sfp_problem(cfg.start, n=cfg.grid_n, q_set=cfg.q_set)
        solution = oracle_sfp_min_norm(problem)
        nodes = problem.grid.nodes
    else:
        raise ConfigError(f"no oracle for problem kind {cfg.kind!r}")
    out = _out_dir(cfg, args)
    if out is not None:
        with open(out / "oracle.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "u"])
            for t, u in zip(nodes, solution.minimizer.values):
                writer.writerow([_fmt(t), _fmt(u)])
    print(f"method = {solution.method}")
    print(f"residual = {_fmt(solution.residual)}")
    print(f"norm = {_fmt(norm(solution.minimizer))}")
    return 0


def cmd_sweep(args):
    cfg = _apply_overrides(parse_config(args.config), args)
    if cfg.kind not in ("sfp", "reconstruction"):
        raise ConfigError("sweep supports the sfp and reconstruction kinds")
    starts = cfg.sweep_starts or ((cfg.start,) if cfg.start else ())
    if not starts:
        raise ConfigError("sweep needs sweep.starts (or problem.start)")
    gammas = cfg.sweep_gammas or (cfg.gamma,)
    lambdas = cfg.sweep_lambdas or (cfg.lam,)
    if any(g is None for g in gammas) or any(l is None for l in lambdas):
        raise ConfigError("sweep needs gamma and lambda schedules")

    base = _schedules(cfg, need_gamma=not cfg.sweep_gammas)
    beta_coc = 1.0 if cfg.kind == "sfp" else reconstruction_problem(
        cfg.data, mode=cfg.mode, n=2, weight=cfg.weight).cocoercivity()
    # validate every schedule combination before any run starts
    for lam in lambdas:
        for gamma in gammas:
            report = validate_fb(replace(base, gamma=gamma, lam=lam), beta_coc)
            if not report.passed and not cfg.force:
                print("sweep aborted; schedule validation failed:\n"
                      + report.format(), file=sys.stderr)
                return 1

    if args.dimension == "schedules":
        jobs = [(start, gamma, lam) for lam in lambdas for gamma in gammas
                for start in starts]
    else:
        jobs = [(start, gamma, lam) for start in starts for lam in lambdas
                for gamma in gammas]

    def execute(job):
        start, gamma, lam = job
        return _run_one(cfg, start=start, gamma=gamma, lam=lam)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            traces = list(pool.map(execute, jobs))
    else:
        traces = [execute(job) for job in jobs]

    rows = []
    for (start, gamma, lam), trace in zip(jobs, traces):
        s = trace_summary(trace)
        rows.append({
            "start": start,
            "gamma": gamma.describe(),
            "lambda": lam.describe(),
            "iterations": s.iterations,
            "termination": s.termination_reason,
            "final_residual": s.final_monitor,
            "wall_time_s": s.wall_time,
        })

    out = _out_dir(cfg, args)
    if out is not None:
        with open(out / "sweep.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
    width = max(len(r["start"]) for r in rows)
    for r in rows:
        print(f"{r['start']:<{width}}  it={r['iterations']:<6d} "
              f"{r['termination']:<14s} residual={r['final_residual']:.3e} "
              f"wall={r['wall_time_s']:.3f}s  gamma[{r['gamma']}] "
              f"lambda[{r['lambda']}]")
    return 0 if all(r["termination"] in _CONVERGED for r in rows) else 2


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="kmsplit",
        description="Tikhonov-regularized fixed-point and forward-backward "
                    "runs on quadrature-discretized function spaces.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("run", cmd_run), ("validate", cmd_validate),
                     ("oracle", cmd_oracle), ("sweep", cmd_sweep)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="config file path")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--force", action="store_true",
                       help="run despite failed schedule validation")
        p.add_argument("--grid-n", type=int, default=None,
                       help="override the grid node count")
        p.add_argument("--workers", type=int, default=None,
                       help="concurrent sweep workers")
        if name == "sweep":
            p.add_argument("--dimension", default="starting-points",
                           choices=("starting-points", "schedules"),
                           help="primary grouping of the sweep rows")
        p.set_defaults(handler=fn)
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ConfigError, ScheduleValidationError, DivergenceError,
            ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
