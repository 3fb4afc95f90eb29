"""Compare criterion verdicts with simulation around the certified bounds.

    python3 scripts/consistency_study.py --out out/consistency.csv
"""
import argparse
import csv
import math
from pathlib import Path

from threshlab.criteria import CriterionOptions, Nonlinearity, auto_grid, extinction_holds, propagation_T, \
    propagation_holds
from threshlab.kernels import Cauchy, Laplace
from threshlab.simulator import SimOptions
from threshlab.thresholds import BisectOptions, SimOracle, criterion_bounds

FACTORS = (0.25, 0.5, 0.99, 1.01, 2.0, 4.0)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eps", type=float, nargs="+", default=[0.1, 0.05, 0.02])
    ap.add_argument("--out", type=Path, default=Path("out/consistency.csv"))
    args = ap.parse_args()

    f = Nonlinearity("cubic", 0.3, 1.0)
    crit = CriterionOptions()
    alpha = crit.alpha_for(f)
    rows = []
    for k in (Laplace(1.0), Cauchy(1.0)):
        for eps in args.eps:
            lo, hi = criterion_bounds(k, f, eps, crit)
            T = max(propagation_T(eps, alpha, f.r_minus), math.log(f.theta / eps) / f.r_plus)
            oracle = SimOracle(k, f, eps, SimOptions(), BisectOptions(), crit)
            for factor in FACTORS:
                L = factor * (lo if factor < 1 else hi)
                g = auto_grid(k, 2.0 * L, T, mass_tol=1e-3 * eps)
                ext = extinction_holds(k, f, eps, L, g, crit).satisfied
                prop = propagation_holds(k, f, eps, L, g, crit).satisfied
                verdict = oracle(L)
                bad = (ext and verdict != "Extinction") or (prop and verdict != "Propagation")
                rows.append({"kernel": k.family, "eps": eps, "L": L, "extinction_certified": ext,
                             "propagation_certified": prop, "simulated": verdict, "contradiction": bad})
                print(f"{k.family:8s} eps={eps:<6g} L={L:<10.4g} ext={ext!s:5s} prop={prop!s:5s} -> {verdict}")
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    print(f"{sum(r['contradiction'] for r in rows)} contradictions in {len(rows)} configurations")


if __name__ == "__main__":
    main()
