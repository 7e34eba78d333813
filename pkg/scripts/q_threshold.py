"""Sweep the Bernoulli seeding probability q across 1/2 in the dense regime.

    python3 scripts/q_threshold.py --n 20000 --np 200 --runs 100 --out results/q
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from bootperc.harness import (ExperimentConfig, dump_json, summary_json, sweep_transition,
                              write_sweep_csv)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20000)
    ap.add_argument("--np", type=float, default=200.0, dest="mean_degree")
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--lo", type=float, default=0.40)
    ap.add_argument("--hi", type=float, default=0.60)
    ap.add_argument("--points", type=int, default=11)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/q")
    args = ap.parse_args()

    grid = tuple(round(v, 6) for v in np.linspace(args.lo, args.hi, args.points))
    cfg = ExperimentConfig(n=args.n, p=args.mean_degree / args.n, runs=args.runs, q=grid[0],
                           base_seed=args.seed, sweep_param="q", sweep_values=grid)
    res = sweep_transition(cfg)
    for pt in res.points:
        print(f"q={pt.param_value:.3f}  almost={pt.frac_almost_perc:.2f}  "
              f"mean A*/n={pt.mean_Astar_frac:.4f}")
    print(f"crossing: {res.crossing} ({res.status})")

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(res.points, f"{out}.csv")
    doc = summary_json(cfg, res.points, res.crossing)
    doc["crossing_status"] = res.status
    dump_json(doc, f"{out}.json")


if __name__ == "__main__":
    main()
