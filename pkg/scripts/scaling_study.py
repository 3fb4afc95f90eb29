"""Threshold sweeps over eps for one kernel, with all four scaling fits.

    python3 scripts/scaling_study.py --kernel cauchy --out out/scaling
"""
import argparse
import csv
import json
from pathlib import Path

import numpy as np

from threshlab.criteria import Nonlinearity
from threshlab.errors import InsufficientData
from threshlab.kernels import make_kernel
from threshlab.thresholds import BisectOptions, MODELS, fit_scaling, sweep

KERNELS = {"cauchy": {"family": "cauchy", "scale": 1.0}, "laplace": {"family": "laplace", "rate": 1.0},
           "gaussian": {"family": "gaussian", "sigma": 1.0}}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kernel", choices=sorted(KERNELS), default="cauchy")
    ap.add_argument("--theta", type=float, default=0.3)
    ap.add_argument("--eps-max", type=float, default=0.1)
    ap.add_argument("--eps-min", type=float, default=1e-3)
    ap.add_argument("--points", type=int, default=7)
    ap.add_argument("--tol", type=float, default=0.05)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("out/scaling"))
    args = ap.parse_args()

    k = make_kernel(KERNELS[args.kernel])
    f = Nonlinearity("cubic", args.theta, 1.0)
    eps = np.geomspace(args.eps_max, args.eps_min, args.points)
    rows = sweep(k, f, eps, bisect_opts=BisectOptions(tol=args.tol), threads=args.threads)

    args.out.mkdir(parents=True, exist_ok=True)
    table = [{**r.to_row(), "sandwich_ok": r.sandwich_ok()} for r in rows]
    with open(args.out / f"sweep_{args.kernel}.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(table[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(table)

    fits = {}
    for col in ("L_ext_hi", "L_prop_hi", "criterion_L_ext_lower", "criterion_L_prop_upper"):
        for model in MODELS:
            try:
                fit = fit_scaling(eps, [r[col] for r in table], model)
                fits[f"{col}/{model}"] = {**fit.fitted, "r_squared": fit.r_squared}
            except InsufficientData as exc:
                fits[f"{col}/{model}"] = {"error": str(exc)}
    (args.out / f"fits_{args.kernel}.json").write_text(json.dumps(fits, indent=2, sort_keys=True) + "\n")
    for r in table:
        print(f"eps={r['eps']:.3e}  L_ext in [{r['L_ext_lo']:.4g}, {r['L_ext_hi']:.4g}]  "
              f"criterion [{r['criterion_L_ext_lower']:.4g}, {r['criterion_L_prop_upper']:.4g}]")
    best = fits["L_ext_hi/PowerOfInvEps"]
    if "exponent" in best:
        print(f"L_ext_hi ~ eps^-p with p = {best['exponent']:.4f} (r^2 {best['r_squared']:.4f})")


if __name__ == "__main__":
    main()
