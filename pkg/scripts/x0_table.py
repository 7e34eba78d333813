"""Tabulate x0(c, theta) from the n -> infinity form of f, plus g(c).

    python3 scripts/x0_table.py --out results/x0.csv
"""

from __future__ import annotations

import argparse
import csv
from pathlib import Path

import numpy as np

from bootperc.analytics import AnalyticParams, find_x0, g_of_c


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cs", type=float, nargs="+", default=[0.5, 1.0, 1.618, 2.0, 3.0, 5.0])
    ap.add_argument("--thetas", type=float, nargs="+",
                    default=list(np.round(np.arange(0.05, 1.0, 0.05), 2)))
    ap.add_argument("--n", type=int, default=10**6, help="only used to turn c into p")
    ap.add_argument("--out", default="results/x0.csv")
    args = ap.parse_args()

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(["c", "g_c", "theta", "x0", "sign_change", "double_root_suspected"])
        for c in args.cs:
            for th in args.thetas:
                r = find_x0(AnalyticParams.from_c(args.n, c, float(th)), limit=True)
                w.writerow([c, g_of_c(c), th, r.x0, r.sign_change, r.double_root_suspected])
                print(f"c={c:<6g} theta={th:<5g} x0={r.x0:.6f}")


if __name__ == "__main__":
    main()
