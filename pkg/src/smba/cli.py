"""Command-line driver: instance generation, single solves, schedule sweeps.

Subcommands
-----------
``gen-nsdp``  write a random NSDP instance to a JSON problem file
``solve``     solve one problem file, emitting a CSV trace and a JSON report
``bench``     sweep (seed, rbar, sbar) cells, one trace per cell plus a summary CSV
``selftest``  run the built-in invariant checks

Exit status: 0 on success, 1 for usage or file errors, 2 when the solver
reports a numeric failure (partial outputs are kept).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .errors import InfeasibleStartError, NumericError
from .nsdp import generate_nsdp, load_instance, nsdp_problem, save_instance
from .schedules import ramped_log_schedule
from .solver import SolveReport, SolveStatus, SolverConfig, TRACE_COLUMNS, TraceRow, run


def write_trace(report: SolveReport, path) -> None:
    """CSV trace with the fixed 14-column schema; floats use shortest
    round-trip decimals so parsing reproduces them exactly."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for row in report.trace:
            writer.writerow([
                repr(v) if isinstance(v, float) else str(v) for v in row.as_tuple()
            ])


def read_trace(path):
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != TRACE_COLUMNS:
            raise ValueError(f"unexpected trace header in {path}")
        for rec in reader:
            vals = [float(v) for v in rec]
            rows.append(TraceRow(
                k=int(vals[0]), psi=vals[1], g_mu=vals[2], sigma_B=vals[3],
                mu=vals[4], lam=vals[5], Lf=vals[6], Lg=vals[7],
                i_k=int(vals[8]), j_k=int(vals[9]), term_step=vals[10],
                term_slack=vals[11], rho=vals[12], elapsed_s=vals[13],
            ))
    return rows


def write_report(report: SolveReport, cfg: SolverConfig, path, problem_name="") -> None:
    doc = report.to_dict()
    doc["problem"] = problem_name
    doc["config"] = cfg.to_dict()
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _load_config(path, eps=None) -> SolverConfig:
    if path:
        with open(path) as fh:
            cfg = SolverConfig.from_dict(json.load(fh))
    else:
        cfg = SolverConfig()
    if eps is not None:
        cfg = SolverConfig.from_dict({**cfg.to_dict(), "eps": eps})
    return cfg


def _cmd_gen_nsdp(args) -> int:
    inst = generate_nsdp(args.n, args.m, args.seed)
    save_instance(inst, args.out)
    print(f"wrote nsdp instance n={args.n} m={args.m} seed={args.seed} to {args.out}")
    return 0


def _cmd_solve(args) -> int:
    inst = load_instance(args.problem)
    cfg = _load_config(args.config, eps=args.eps)
    prob = nsdp_problem(inst)
    report = run(prob, cfg, np.zeros(inst.n))
    if args.trace:
        write_trace(report, args.trace)
    if args.report:
        write_report(report, cfg, args.report, problem_name=prob.name)
    print(
        f"{prob.name}: {report.status.value} after {report.iterations} iterations, "
        f"objective {report.objective:.9g}, {report.wall_time:.2f}s"
    )
    if report.status in (SolveStatus.NUMERIC_FAILURE, SolveStatus.INNER_CAP_EXCEEDED):
        print(f"solver failure: {report.reason}", file=sys.stderr)
        return 2
    return 0


def _parse_seed_range(text):
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(s) for s in text.split(",") if s]


def _parse_float_list(text):
    return [float(s) for s in text.split(",") if s]


def _bench_cell(cell):
    """One (seed, rbar, sbar) cell; module-level so it pickles for workers."""
    n, m, seed, rbar, sbar, eps, max_outer, out_dir = cell
    inst = generate_nsdp(n, m, seed)
    cfg = SolverConfig(eps=eps, max_outer=max_outer,
                       schedule=ramped_log_schedule(rbar, sbar))
    report = run(nsdp_problem(inst), cfg, np.zeros(n))
    trace_name = f"trace_n{n}_m{m}_seed{seed}_r{rbar:g}_s{sbar:g}.csv"
    write_trace(report, os.path.join(out_dir, trace_name))
    return {
        "n": n, "m": m, "seed": seed, "rbar": rbar, "sbar": sbar, "eps": eps,
        "status": report.status.value, "iterations": report.iterations,
        "objective": report.objective, "wall_time": report.wall_time,
        "term_step": report.term_step, "term_slack": report.term_slack,
        "trace_file": trace_name,
    }


SUMMARY_COLUMNS = ("n", "m", "seed", "rbar", "sbar", "eps", "status", "iterations",
                   "objective", "wall_time", "term_step", "term_slack", "trace_file")


def _cmd_bench(args) -> int:
    seeds = _parse_seed_range(args.seeds)
    rbars = _parse_float_list(args.rbar)
    sbars = _parse_float_list(args.sbar)
    os.makedirs(args.out, exist_ok=True)
    cells = [
        (args.n, args.m, seed, rbar, sbar, args.eps, args.max_outer, args.out)
        for seed in seeds for rbar in rbars for sbar in sbars
    ]
    workers = int(os.environ.get("SMBA_WORKERS", "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_bench_cell, cells))
    else:
        rows = [_bench_cell(cell) for cell in cells]

    rows.sort(key=lambda r: (r["seed"], r["rbar"], r["sbar"]))
    summary_path = os.path.join(args.out, "summary.csv")
    with open(summary_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)

    failures = [r for r in rows if r["status"] != SolveStatus.CONVERGED.value]
    print(f"bench: {len(rows)} cells -> {summary_path} ({len(failures)} not converged)")
    return 2 if failures else 0


def _cmd_selftest(args) -> int:
    ok = True
    for name, fn in _SELFTESTS:
        try:
            fn()
            print(f"[ok]   {name}")
        except Exception as exc:  # noqa: BLE001 - report and keep going
            ok = False
            print(f"[FAIL] {name}: {exc}")
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# built-in invariant checks (fast, seeded)
# ---------------------------------------------------------------------------


def _families(rng, alpha4=1e-5):
    from .cones import NegSemidef, NonposOrthant, PCone

    def orthant_sample():
        return rng.normal(0, 3, 5)

    def psd_sample():
        y = rng.normal(0, 3, (4, 4))
        return 0.5 * (y + y.T)

    def pcone_sample():
        return rng.normal(0, 3, 6)

    return [
        (NonposOrthant(5, alpha4=alpha4), orthant_sample),
        (NegSemidef(4, alpha4=alpha4), psd_sample),
        (PCone(5, alpha4=alpha4), pcone_sample),
    ]


def _check_sandwich():
    rng = np.random.default_rng(0)
    for oracle, sample in _families(rng):
        for _ in range(200):
            y = sample()
            mu = 10.0 ** rng.uniform(-6, 1)
            sig = oracle.support_value(y)
            val = oracle.msa_value(y, mu)
            tol = 1e-12 * (1.0 + abs(sig))
            if not (sig - tol <= val <= sig + oracle.cert.alpha3 * mu + tol):
                raise AssertionError(f"sandwich violated for {oracle.family}")


def _check_gradients():
    rng = np.random.default_rng(1)
    for oracle, sample in _families(rng):
        for _ in range(20):
            y = sample()
            mu = 10.0 ** rng.uniform(-3, 1)
            d = sample()
            grad = oracle.msa_gradient(y, mu)
            h = 1e-6
            fd = (oracle.msa_value(y + h * d, mu) - oracle.msa_value(y - h * d, mu)) / (2 * h)
            exact = float(np.vdot(grad, d))
            if abs(fd - exact) > 1e-6 * (1.0 + abs(exact)):
                raise AssertionError(f"gradient mismatch for {oracle.family}")


def _check_ball_prox():
    from .ball_prox import BallConstraint, solve_ball_prox
    from .oracles import exact_ball_projection
    from .problems import ZeroRegularizer

    rng = np.random.default_rng(2)
    for _ in range(50):
        n = rng.integers(1, 6)
        center = rng.normal(0, 2, n)
        ball = BallConstraint(center=center, radius=float(rng.uniform(0.5, 3)),
                              curvature=float(rng.uniform(0.2, 5)))
        x_k = rng.normal(0, 2, n)
        q = rng.normal(0, 2, n)
        L_f = float(rng.uniform(0.2, 4))
        res = solve_ball_prox(ZeroRegularizer(), x_k, q, L_f, ball)
        want = exact_ball_projection(x_k - q / L_f, ball.center, ball.radius)
        if float(np.linalg.norm(res.x - want)) > 1e-10:
            raise AssertionError("ball prox disagrees with the closed form")


def _check_schedules():
    from .schedules import blockwise_schedule, mu_values, power_schedule

    ks = np.arange(2001)
    for spec in (power_schedule(0.5, mu0=1.0),
                 blockwise_schedule(0.9, mu0=1.0),
                 ramped_log_schedule(0.9, 3.0, mu0=1.0)):
        mus = mu_values(spec, ks)
        if not np.all(np.diff(mus) < 0):
            raise AssertionError(f"schedule {spec.variant} is not strictly decreasing")


def _check_toy_solve():
    from .oracles import analytic_box_solution
    from .problems import box_problem
    from .schedules import power_schedule

    prob = box_problem(c=[2.0, -1.0], b=[1.0, 1.0])
    cfg = SolverConfig(eps=1e-7, max_outer=2000, schedule=power_schedule(0.9))
    report = run(prob, cfg, np.zeros(2))
    target = analytic_box_solution([2.0, -1.0], [1.0, 1.0])
    if report.status is not SolveStatus.CONVERGED:
        raise AssertionError(f"toy solve ended with {report.status.value}")
    if float(np.linalg.norm(report.x - target)) > 1e-5:
        raise AssertionError("toy solve missed the analytic solution")


_SELFTESTS = [
    ("smoothing sandwich and shift", _check_sandwich),
    ("kernel gradients vs finite differences", _check_gradients),
    ("ball prox vs closed-form projection", _check_ball_prox),
    ("schedule strict decrease", _check_schedules),
    ("analytic toy solve", _check_toy_solve),
]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="smba", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-nsdp", help="generate a random NSDP problem file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_gen_nsdp)

    p = sub.add_parser("solve", help="solve a problem file")
    p.add_argument("--problem", required=True)
    p.add_argument("--config", default=None, help="JSON solver configuration")
    p.add_argument("--trace", default=None, help="CSV trace output path")
    p.add_argument("--report", default=None, help="JSON report output path")
    p.add_argument("--eps", type=float, default=None, help="override termination eps")
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("bench", help="sweep schedule cells over seeded instances")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--m", type=int, default=10)
    p.add_argument("--seeds", default="0..4", help="range S1..S2 or comma list")
    p.add_argument("--rbar", default="0.33,0.9")
    p.add_argument("--sbar", default="0,3")
    p.add_argument("--eps", type=float, default=1e-5)
    p.add_argument("--max-outer", type=int, default=5000)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_bench)

    p = sub.add_parser("selftest", help="run the built-in invariant checks")
    p.set_defaults(fn=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except FileNotFoundError as exc:
        print(f"error: missing file {exc.filename}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InfeasibleStartError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
