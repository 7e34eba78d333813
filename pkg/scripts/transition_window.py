"""Empirical width of the dense-regime transition in A0 as n grows.

For each n (mean degree fixed), A0 is swept over n/2 + k*sqrt(n/p) and the
10% and 90% almost-percolation crossings are located.  The width between
them, divided by sqrt(n/p), is reported; a flat ratio is what a sqrt(n/p)
window would look like.  No pass/fail claim is attached.

    python3 scripts/transition_window.py --ns 5000 10000 20000 --runs 60
"""

from __future__ import annotations

import argparse
import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from bootperc.harness import ExperimentConfig, estimate_crossing, sweep_transition


@dataclass(frozen=True)
class WindowConfig:
    ns: tuple[int, ...]
    mean_degree: float
    runs: int
    k_lo: float = -3.0
    k_hi: float = 3.0
    points: int = 13
    seed: int = 0


def window(cfg: WindowConfig, n: int) -> dict:
    p = cfg.mean_degree / n
    scale = math.sqrt(n / p)
    ks = np.linspace(cfg.k_lo, cfg.k_hi, cfg.points)
    a0s = tuple(float(min(n, max(0, round(n / 2 + k * scale)))) for k in ks)
    ec = ExperimentConfig(n=n, p=p, runs=cfg.runs, a0=int(a0s[0]), base_seed=cfg.seed,
                          sweep_param="a0", sweep_values=a0s)
    res = sweep_transition(ec)  # crossings below are read off in k units
    frac = [pt.frac_almost_perc for pt in res.points]
    lo = estimate_crossing(list(ks), frac, 0.1)
    hi = estimate_crossing(list(ks), frac, 0.9)
    mid = estimate_crossing(list(ks), frac, 0.5)
    width = None if lo is None or hi is None else hi - lo
    return {"n": n, "p": p, "sqrt_n_over_p": scale, "k10": lo, "k50": mid, "k90": hi,
            "width_in_scale_units": width}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ns", type=int, nargs="+", default=[5000, 10000, 20000])
    ap.add_argument("--np", type=float, default=200.0, dest="mean_degree")
    ap.add_argument("--runs", type=int, default=60)
    ap.add_argument("--out", default="results/window.csv")
    args = ap.parse_args()
    cfg = WindowConfig(tuple(args.ns), args.mean_degree, args.runs)

    rows = [window(cfg, n) for n in cfg.ns]
    for r in rows:
        print(r)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\r\n")
        w.writeheader()
        w.writerows(rows)


if __name__ == "__main__":
    main()
