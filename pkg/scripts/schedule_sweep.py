#!/usr/bin/env python3
"""Desk-scale schedule comparison on random NSDP instances.

Sweeps the decay-rate pairs (rbar, sbar) over seeded instances, writes one
trace per cell plus a summary CSV, and prints how many iterations each
schedule needs to come within 1e-6 relative of the best objective seen for
the instance.  Steeper schedules should win on instances that run past the
first schedule block.

Usage: python scripts/schedule_sweep.py --out results/ [--n 20 --m 10 --seeds 1,6,10]
"""

import argparse
import math
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from smba.cli import write_trace
from smba.nsdp import generate_nsdp, nsdp_problem
from smba.schedules import ramped_log_schedule
from smba.solver import SolverConfig, run

PAIRS = [(0.33, 0.0), (0.6, 0.0), (0.9, 0.0), (0.33, 3.0), (0.6, 3.0), (0.9, 3.0)]


def iterations_to_reach(trace, best, rel=1e-6):
    scale = max(1.0, abs(best))
    for row in trace:
        if (row.psi - best) / scale <= rel:
            return row.k + 1
    return math.inf


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--m", type=int, default=10)
    ap.add_argument("--seeds", default="1,6,10,15,16")
    ap.add_argument("--eps", type=float, default=1e-7)
    ap.add_argument("--out", default="sweep_out")
    args = ap.parse_args()

    os.makedirs(args.out, exist_ok=True)
    seeds = [int(s) for s in args.seeds.split(",")]

    for seed in seeds:
        prob = nsdp_problem(generate_nsdp(args.n, args.m, seed))
        reports = {}
        for rbar, sbar in PAIRS:
            cfg = SolverConfig(eps=args.eps, schedule=ramped_log_schedule(rbar, sbar))
            report = run(prob, cfg, np.zeros(args.n))
            reports[(rbar, sbar)] = report
            write_trace(report, os.path.join(
                args.out, f"trace_seed{seed}_r{rbar:g}_s{sbar:g}.csv"))

        best = min(r.objective for r in reports.values())
        print(f"\nseed {seed} (n={args.n}, m={args.m}), best objective {best:.9f}")
        print(f"  {'(rbar, sbar)':>14} {'status':>20} {'iters':>6} {'objective':>15} {'to-best':>8}")
        for (rbar, sbar), rep in reports.items():
            reach = iterations_to_reach(rep.trace, best)
            print(f"  {f'({rbar:g}, {sbar:g})':>14} {rep.status.value:>20} "
                  f"{rep.iterations:>6} {rep.objective:>15.9f} {reach:>8}")


if __name__ == "__main__":
    main()
