#!/usr/bin/env python3
"""Solve one random NSDP instance end to end and compare two tolerances.

Generates the instance, solves from the origin at eps = 1e-5 and 1e-7 with
the default ramped schedule, prints both reports, and writes the problem
file, traces, and JSON reports next to each other.

Usage: python scripts/desk_nsdp.py --out run_out [--n 20 --m 10 --seed 1]
"""

import argparse
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from smba.cli import write_report, write_trace
from smba.nsdp import generate_nsdp, nsdp_problem, save_instance
from smba.solver import SolverConfig, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--m", type=int, default=10)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", default="nsdp_out")
    args = ap.parse_args()

    os.makedirs(args.out, exist_ok=True)
    inst = generate_nsdp(args.n, args.m, args.seed)
    save_instance(inst, os.path.join(args.out, "problem.json"))
    prob = nsdp_problem(inst)

    results = {}
    for eps in (1e-5, 1e-7):
        cfg = SolverConfig(eps=eps)
        report = run(prob, cfg, np.zeros(args.n))
        tag = f"eps{eps:g}"
        write_trace(report, os.path.join(args.out, f"trace_{tag}.csv"))
        write_report(report, cfg, os.path.join(args.out, f"report_{tag}.json"),
                     problem_name=prob.name)
        results[eps] = report
        kkt = report.final_kkt
        print(f"eps={eps:g}: {report.status.value} after {report.iterations} iterations "
              f"({report.wall_time:.2f}s)")
        print(f"  objective      {report.objective:.9f}")
        print(f"  stop metrics   step={report.term_step:.3e} slack={report.term_slack:.3e}")
        if kkt is not None:
            print(f"  kkt residuals  rho={kkt.rho:.3e} comp={kkt.complementarity:.3e} "
                  f"step={kkt.step:.3e}")

    lo, hi = results[1e-7], results[1e-5]
    rel = abs(hi.objective - lo.objective) / max(1.0, abs(lo.objective))
    print(f"\nobjective agreement between tolerances: {rel:.2e} relative")


if __name__ == "__main__":
    main()
