import csv
import json

import pytest
from hypothesis import given, settings, strategies as st

from threshlab.cli import main
from threshlab.config import parse_config
from threshlab.errors import InvalidNonlinearity, ParseError

MINIMAL = """\
[kernel]
family = laplace
rate = 1.0

[nonlinearity]
kind = cubic
theta = 0.3
"""


def _write(tmp_path, text, name="exp.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def _read_csv(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# config_sha256: ")
    return lines[0].split(": ")[1], list(csv.DictReader(lines[1:]))


# -- config ---------------------------------------------------------------------------


def test_minimal_config_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.kernel == {"family": "laplace", "rate": 1.0}
    assert cfg.grid == {"X": 100.0, "n": 4096}
    assert cfg.sim["dt"] is None and cfg.sim["t_end"] == 200.0
    assert cfg.run["seed"] == 0
    assert cfg.build_nonlinearity().r == 1.0


@pytest.mark.parametrize("text, where", [
    (MINIMAL + "theta = 0.2\n", "exp.ini:8:"),
    (MINIMAL + "[grid]\nX = 1\n[grid]\nn = 8\n", "exp.ini:10:"),
])
def test_duplicates_are_rejected_with_line(text, where):
    with pytest.raises(ParseError, match=where):
        parse_config(text, "exp.ini")


@pytest.mark.parametrize("text", [
    MINIMAL + "[grids]\nX = 1\n",
    MINIMAL + "[grid]\nwidth = 1\n",
    MINIMAL + "[grid]\nn = many\n",
    "[nonlinearity]\nkind = cubic\n",
    "[kernel]\nfamily = laplace\n",
])
def test_malformed_configs(text):
    with pytest.raises(ParseError):
        parse_config(text)


def test_config_validation_errors_keep_their_type():
    with pytest.raises(InvalidNonlinearity):
        parse_config(MINIMAL.replace("0.3", "0.7"))


@settings(max_examples=30)
@given(theta=st.floats(0.05, 0.45), X=st.floats(1.0, 1e4), n=st.integers(8, 2**15).map(lambda h: 2 * h),
       eps=st.lists(st.floats(1e-6, 1.0), min_size=1, max_size=6), dt=st.none() | st.floats(1e-4, 0.5))
def test_round_trip(theta, X, n, eps, dt):
    cfg = parse_config(MINIMAL)
    cfg.nonlinearity["theta"] = theta
    cfg.grid.update(X=X, n=n)
    cfg.sweep["eps_list"] = tuple(eps)
    cfg.sim["dt"] = dt
    again = parse_config(cfg.to_ini())
    assert again == cfg
    assert again.sha256() == cfg.sha256()


def test_hash_ignores_output_dir_and_threads():
    a = parse_config(MINIMAL)
    b = parse_config(MINIMAL + "[output]\ndir = elsewhere\n[run]\nthreads = 4\n")
    c = parse_config(MINIMAL + "[run]\nseed = 1\n")
    assert a.sha256() == b.sha256() != c.sha256()


# -- cli ------------------------------------------------------------------------------


def test_analyze_kernel_cauchy(tmp_path):
    cfg = _write(tmp_path, "[kernel]\nfamily = cauchy\nscale = 1\n[nonlinearity]\nkind = cubic\n")
    assert main(["analyze-kernel", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    summary = json.loads((tmp_path / "o" / "kernel_summary.json").read_text())
    assert summary["beta"] == pytest.approx(1.0) and summary["a"] == pytest.approx(1.0)
    sha, rows = _read_csv(tmp_path / "o" / "kernel_fourier.csv")
    assert sha == summary["config_sha256"]
    assert all(float(r["beta"]) == pytest.approx(1.0) for r in rows)
    assert not (tmp_path / "o" / "kernel_ldp.csv").exists()  # heavy tails have no rate function
    manifest = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert manifest["command"] == "analyze-kernel"
    assert parse_config((tmp_path / "o" / "resolved_config.ini").read_text()).sha256() == sha


def test_simulate_at_threshold_is_undecided(tmp_path):
    cfg = _write(tmp_path, MINIMAL + "[sim]\neps = 0\nL = 50\nt_end = 20\n")
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    _, rows = _read_csv(tmp_path / "o" / "outcome.csv")
    assert rows[0]["verdict"] == "Undecided"


def test_validation_failure_exits_1(tmp_path, capsys):
    cfg = _write(tmp_path, MINIMAL + "theta = 0.2\n")
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
    report = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert report["error"] == "ParseError" and report["exit_code"] == 1
    assert report["category"] == "validation"


def test_numerical_guard_exits_2(tmp_path, capsys):
    cfg = _write(tmp_path, MINIMAL + "[sim]\ndt = 5\nt_end = 10\n")
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    report = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert report["error"] == "CFLViolation" and report["category"] == "numerical"


def test_bad_arguments_exit_1(tmp_path):
    cfg = _write(tmp_path, MINIMAL)
    with pytest.raises(SystemExit) as exc:
        main(["explode", "--config", cfg])
    assert exc.value.code == 1
    assert main(["simulate", "--config", str(tmp_path / "missing.ini")]) == 1
    assert main(["simulate", "--config", cfg, "--threads", "0"]) == 1


def test_tails_and_criteria_tables(tmp_path):
    cfg = _write(tmp_path, MINIMAL + "[grid]\nX = 60\nn = 4096\n[criterion]\neps_list = 0.1\nL_list = 0.5, 40\n")
    out = tmp_path / "o"
    assert main(["tails", "--config", cfg, "--out", str(out)]) == 0
    _, rows = _read_csv(out / "tails.csv")
    assert {r["bound_name"] for r in rows} >= {"Durrett", "Cramer"}
    assert all(r["dominates"] in ("true", "") for r in rows)
    assert main(["check-criteria", "--config", cfg, "--out", str(out)]) == 0
    _, rows = _read_csv(out / "criteria.csv")
    by = {(r["kind"], float(r["L"])): r["satisfied"] for r in rows}
    assert by[("Extinction", 0.5)] == "true" and by[("Propagation", 40.0)] == "true"


def test_sweep_is_deterministic(tmp_path):
    text = MINIMAL + "[sweep]\neps_list = 0.2, 0.1\nbisect_tol = 0.1\n"
    cfg = _write(tmp_path, text)
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "a")]) == 0
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "b"), "--threads", "2"]) == 0
    # the thread count is recorded in resolved_config.ini but is not part of the hash
    for name in ("sweep.csv", "fits.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
