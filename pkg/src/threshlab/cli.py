"""Command-line entry point: ``threshlab <command> --config FILE [--out DIR]``.

Each command writes CSV/JSON artifacts, the resolved config and a manifest.
Exit status is 0 on success, 1 on invalid input and 2 when a numerical guard
trips; errors are also reported as a JSON object on stderr.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import tailtheory as tt
from .config import ExperimentConfig, load_config
from .convops import tail_mass_i
from .criteria import extinction_holds, propagation_holds
from .errors import NumericalGuard, ThreshlabError, ValidationError
from .simulator import initial_plateau, simulate
from .thresholds import MODELS, criterion_bounds, find_thresholds, fit_scaling, sweep
from .waves import (WaveOptions, build_subsolution, check_grid, check_subsolution, extract_profile,
                    integrability_margins, profile_residual)

log = logging.getLogger("threshlab")

COMMANDS = ("analyze-kernel", "tails", "check-criteria", "simulate", "find-threshold", "sweep", "wave")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="threshlab", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="INI experiment file")
    p.add_argument("--out", default=None, help="output directory (overrides [output] dir)")
    p.add_argument("--threads", type=int, default=None, help="worker processes for sweeps")
    p.add_argument("--verbose", action="store_true")
    return p


# ---------------------------------------------------------------------------
# output helpers


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return ""
    return str(v)


def _json_safe(v):
    if isinstance(v, dict):
        return {str(k): _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return v


class Writer:
    def __init__(self, out: Path, cfg: ExperimentConfig, command: str):
        self.out, self.cfg, self.command = out, cfg, command
        self.sha = cfg.sha256()
        self.files = []
        out.mkdir(parents=True, exist_ok=True)

    def csv(self, name: str, rows: list[dict]):
        cols = []
        for r in rows:
            cols.extend(c for c in r if c not in cols)
        path = self.out / name
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(f"# config_sha256: {self.sha}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for r in rows:
                w.writerow([_cell(r.get(c)) for c in cols])
        self.files.append(name)

    def json(self, name: str, obj: dict):
        with open(self.out / name, "w", encoding="utf-8") as fh:
            json.dump({"config_sha256": self.sha, **_json_safe(obj)}, fh, indent=2, sort_keys=True)
            fh.write("\n")
        self.files.append(name)

    def finish(self):
        (self.out / "resolved_config.ini").write_text(self.cfg.to_ini(), encoding="utf-8")
        manifest = {"command": self.command, "config_sha256": self.sha, "config": self.cfg.to_dict(),
                    "outputs": sorted(self.files)}
        with open(self.out / "manifest.json", "w", encoding="utf-8") as fh:
            json.dump(_json_safe(manifest), fh, indent=2, sort_keys=True)
            fh.write("\n")


# ---------------------------------------------------------------------------
# commands


def cmd_analyze_kernel(cfg: ExperimentConfig, w: Writer):
    k = cfg.build_kernel()
    beta, a = k.expansion()
    rows = []
    for xi in cfg.tails["xi_list"]:
        omf = float(k.one_minus_fourier(xi))
        rows.append({"xi": xi, "fourier": 1.0 - omf, "one_minus_fourier": omf,
                     "expansion": a * abs(xi) ** beta, "beta": beta, "a": a})
    w.csv("kernel_fourier.csv", rows)
    summary = {"kernel": k.params(), "beta": beta, "a": a, "m1": k.m1, "m2": k.m2,
               "exp_bounded": k.exp_bounded, "spread": k.spread()}
    if k.exp_bounded:
        lam_max = k.lambda_max
        lams = [0.1 * j * lam_max for j in range(1, 10)] if math.isfinite(lam_max) else [0.25, 0.5, 1.0, 2.0, 4.0]
        ldp = [{"lam": lam, "log_mgf": k.log_mgf(lam)} for lam in lams]
        for x in (0.25, 0.5, 1.0, 2.0, 4.0):
            ldp.append({"x": x, "rate_function": k.rate_function(x)})
        w.csv("kernel_ldp.csv", ldp)
    w.json("kernel_summary.json", summary)


def cmd_tails(cfg: ExperimentConfig, w: Writer):
    k = cfg.build_kernel()
    g = cfg.build_grid()
    beta, _ = k.expansion()
    i_list = [int(i) for i in cfg.tails["i_list"]]
    L_list = list(cfg.tails["L_list"])
    lattice = [(i, L) for i in i_list for L in L_list]
    C_stable = tt.fit_stable_constant(k) if beta < 2 else None
    try:
        C_nag = tt.calibrate_nagaev(k, g, lattice)
    except ThreshlabError as exc:
        log.info("Nagaev calibration skipped: %s", exc)
        C_nag = None
    try:
        tc = k.tail_class() if hasattr(k, "tail_class") else None
    except ValidationError as exc:
        log.info("no admissible tail class: %s", exc)
        tc = None
    rows = []
    for i, L in lattice:
        emp = tail_mass_i(k, i, L, g)
        reps = [tt.TailBoundReport("Durrett", i, L, tt.durrett_bound(k, i, L), emp)]
        if k.exp_bounded and i * L <= 0.5 * g.X:
            reps.append(tt.TailBoundReport("Cramer", i, L, tt.cramer_bound(k, i, L),
                                           tail_mass_i(k, i, i * L, g)))
        if C_nag is not None:
            reps.append(tt.TailBoundReport("Nagaev", i, L, tt.nagaev_bound(i, L, k.tail_mass(0.5 * L), C_nag),
                                           emp, {"C": C_nag}))
        if C_stable is not None:
            reps.append(tt.TailBoundReport("StableAsymptotic", i, L,
                                           tt.stable_asymptotic(k, i, L, C_stable), emp, {"C": C_stable}))
        if tc is not None:
            try:
                reps.append(tt.mikosch_regime_check(k, tc, i, L, g))
            except ThreshlabError as exc:
                log.info("Mikosch check skipped at (%d, %g): %s", i, L, exc)
        for r in reps:
            is_bound = r.bound_name in ("Durrett", "Cramer", "Nagaev")
            rows.append({**r.to_row(), "dominates": r.dominates if is_bound else None})
    w.csv("tails.csv", rows)


def cmd_check_criteria(cfg: ExperimentConfig, w: Writer):
    k, f, g, opts = cfg.build_kernel(), cfg.build_nonlinearity(), cfg.build_grid(), cfg.criterion_options()
    rows = []
    for eps in cfg.criterion["eps_list"]:
        for L in cfg.criterion["L_list"]:
            for fn in (extinction_holds, propagation_holds):
                try:
                    rows.append(fn(k, f, eps, L, g, opts).to_row())
                except ThreshlabError as exc:
                    kind = "Extinction" if fn is extinction_holds else "Propagation"
                    rows.append({"kind": kind, "eps": eps, "L": L, "error": f"{type(exc).__name__}: {exc}"})
    w.csv("criteria.csv", rows)


def cmd_simulate(cfg: ExperimentConfig, w: Writer):
    k, f, g = cfg.build_kernel(), cfg.build_nonlinearity(), cfg.build_grid()
    eps, L = cfg.sim["eps"], cfg.sim["L"]
    u0 = initial_plateau(f.theta, eps, L, g)
    traj, out = simulate(k, f, u0, cfg.sim["t_end"], cfg.sim_options())
    w.csv("trajectory.csv", traj.rows())
    w.csv("outcome.csv", [{"eps": eps, "L": L, "verdict": out.verdict, "t_decided": out.t_decided,
                           **{k_: v for k_, v in sorted(out.evidence.items())}}])
    log.info("verdict %s at t = %g", out.verdict, out.t_decided)


def cmd_find_threshold(cfg: ExperimentConfig, w: Writer):
    k, f = cfg.build_kernel(), cfg.build_nonlinearity()
    eps = cfg.sim["eps"]
    crit = cfg.criterion_options()
    est = find_thresholds(k, f, eps, cfg.sim_options(), cfg.bisect_options(), crit)
    lo, hi = criterion_bounds(k, f, eps, crit, strict=False)
    est.criterion_L_ext_lower, est.criterion_L_prop_upper = lo, hi
    w.csv("threshold.csv", [{**est.to_row(), "sandwich_ok": est.sandwich_ok()}])
    w.csv("verdicts.csv", [{"L": L, "verdict": v} for L, v in est.verdicts])


def cmd_sweep(cfg: ExperimentConfig, w: Writer):
    k, f = cfg.build_kernel(), cfg.build_nonlinearity()
    rows = sweep(k, f, cfg.sweep["eps_list"], cfg.sim_options(), cfg.bisect_options(),
                 cfg.criterion_options(), threads=cfg.run["threads"])
    w.csv("sweep.csv", [{**r.to_row(), "sandwich_ok": r.sandwich_ok()} for r in rows])
    eps = [r.eps for r in rows]
    fits = {}
    for col, vals in (("L_ext_hi", [r.L_ext[1] for r in rows]),
                      ("L_prop_lo", [r.L_prop[0] for r in rows]),
                      ("criterion_L_ext_lower", [r.criterion_L_ext_lower for r in rows]),
                      ("criterion_L_prop_upper", [r.criterion_L_prop_upper for r in rows])):
        fits[col] = {}
        for model in MODELS:
            try:
                fit = fit_scaling(eps, vals, model)
                fits[col][model] = {"fitted": fit.fitted, "r_squared": fit.r_squared}
            except ThreshlabError as exc:
                fits[col][model] = {"error": f"{type(exc).__name__}: {exc}"}
    w.json("fits.json", fits)


def cmd_wave(cfg: ExperimentConfig, w: Writer):
    k, f = cfg.build_kernel(), cfg.build_nonlinearity()
    wc = cfg.wave
    opts = WaveOptions(sim_X=wc["sim_X"], sim_n=wc["sim_n"], profile_Z=wc["profile_Z"], profile_n=wc["profile_n"])
    wp = extract_profile(k, f, opts=opts)
    w.csv("profile.csv", wp.to_rows())
    left, right = integrability_margins(wp)
    summary = {"c": wp.c, "residual": profile_residual(k, f, wp), "integral_left": left,
               "integral_right": right, **wp.info}
    sp = build_subsolution(wp, f, wc["alpha"], t_max=wc["t_max"])
    xg = check_grid(wp, sp, wc["t_max"])
    t_grid = np.linspace(0.0, wc["t_max"], 21)
    summary["subsolution"] = {"mu": sp.mu, "delta": sp.delta, "b": sp.b, "C": sp.C,
                              "vartheta": sp.vartheta, "s0": sp.s0, "xi0": sp.xi0, "eta0": sp.eta0,
                              "q0": sp.q0, "q1": sp.q1, "max_N": check_subsolution(k, f, wp, sp, t_grid, xg)}
    w.json("wave.json", summary)


HANDLERS = {
    "analyze-kernel": cmd_analyze_kernel,
    "tails": cmd_tails,
    "check-criteria": cmd_check_criteria,
    "simulate": cmd_simulate,
    "find-threshold": cmd_find_threshold,
    "sweep": cmd_sweep,
    "wave": cmd_wave,
}


def run(command: str, cfg: ExperimentConfig, out: Path) -> None:
    w = Writer(Path(out), cfg, command)
    HANDLERS[command](cfg, w)
    w.finish()


def _report(exc: Exception, code: int) -> int:
    err = {"error": type(exc).__name__, "category": "validation" if code == 1 else "numerical",
           "message": str(exc), "exit_code": code}
    print(json.dumps(err), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if args.threads is not None:
            if args.threads < 1:
                raise ValidationError("--threads must be at least 1")
            cfg.run["threads"] = args.threads
        if args.out is not None:
            cfg.output["dir"] = args.out
        run(args.command, cfg, Path(cfg.output["dir"]))
    except ValidationError as exc:
        return _report(exc, 1)
    except NumericalGuard as exc:
        return _report(exc, 2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
