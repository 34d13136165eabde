import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from gcdeform.cli import (EXIT_CONFIG, EXIT_NONCONVERGENCE, EXIT_OK, EXIT_PRECONDITION,
                          ConfigError, ExperimentConfig, emit_trace, main, read_trace)
from gcdeform.gauge_solver import TRACE_COLUMNS, GaugeTrace

SMALL = {"geometry": {"n": 2, "N": 8, "K": 2}}


def _cfg(tmp_path, extra=None, name="cfg.json"):
    data = json.loads(json.dumps(SMALL))
    for k, v in (extra or {}).items():
        data.setdefault(k, {}).update(v) if isinstance(v, dict) else data.__setitem__(k, v)
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def _trace(rows, seed=0):
    rng = np.random.default_rng(seed)
    t = GaugeTrace()
    for i in range(rows):
        r = {c: float(rng.standard_normal()) * 10.0 ** rng.integers(-15, 3) for c in TRACE_COLUMNS}
        r["iter"] = i + 1
        r["t_i"] = float("nan") if seed % 2 else 2.0 ** (1.5 ** (i + 1))
        t.rows.append(r)
    return t


def test_empty_trace_is_header_only(tmp_path):
    p = tmp_path / "t.csv"
    emit_trace(GaugeTrace(), p)
    assert p.read_text().splitlines() == [",".join(TRACE_COLUMNS)]


def test_eight_iteration_trace_has_nine_lines(tmp_path):
    p = tmp_path / "t.csv"
    emit_trace(_trace(8), p)
    lines = p.read_text().splitlines()
    assert len(lines) == 9
    assert lines[0] == "iter,t_i,eps1_c0,eps2_c0,eps3_c0,eps3_sobolev_l,xi_norm,harmonic_mag,mc_residual"


@pytest.mark.parametrize("seed", [0, 1])
def test_trace_round_trip(tmp_path, seed):
    t = _trace(8, seed)
    p = tmp_path / "t.csv"
    emit_trace(t, p)
    back = read_trace(p)
    assert len(back) == 8
    for a, b in zip(t.rows, back):
        for c in TRACE_COLUMNS:
            assert (a[c] == b[c]) or (math.isnan(a[c]) and math.isnan(b[c]))


def test_config_rejects_unknown_key():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"geometry": {"n": 2, "N": 8, "K": 2, "bogus": 1}})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"geometry": {"n": 3}})


def test_exit_config_error(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["levi", "--config", str(p), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert main(["levi", "--seed", str(2 ** 64), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    assert main(["levi", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG


def test_levi_summary(tmp_path):
    out = tmp_path / "levi"
    assert main(["levi", "--out", str(out)]) == EXIT_OK
    s = json.loads((out / "summary.json").read_text())
    assert s["pass"] is True
    assert s["results"]["ball_q_convex"] == {"1": True, "2": True}
    assert s["results"]["types"] == {"complex": 2, "symplectic": 0, "hol_poisson": 0}


def test_axioms_deterministic(tmp_path):
    cfg = _cfg(tmp_path, {"axioms": {"trials": 2, "graded_trials": 1, "bandwidth": 1}})
    outs = []
    for k in range(2):
        out = tmp_path / f"a{k}"
        assert main(["axioms", "--config", cfg, "--seed", "42", "--out", str(out)]) == EXIT_OK
        outs.append((out / "summary.json").read_bytes())
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["pass"] is True


def test_gauge_fix_outputs(tmp_path):
    out = tmp_path / "gf"
    assert main(["gauge-fix", "--config", _cfg(tmp_path), "--out", str(out)]) == EXIT_OK
    rows = read_trace(out / "trace.csv")
    assert rows[-1]["eps3_c0"] < 1e-10
    s = json.loads((out / "summary.json").read_text())
    assert s["results"]["iterations"] == len(rows)
    for stem in ("input", "gauge"):
        for k in (1, 2, 3):
            assert (out / f"{stem}.eps{k}").exists()


def test_gauge_fix_from_snapshot(tmp_path):
    out = tmp_path / "gf"
    assert main(["gauge-fix", "--config", _cfg(tmp_path), "--out", str(out)]) == EXIT_OK
    cfg = _cfg(tmp_path, {"deformation": {"snapshot": str(out / "input")}}, "snap.json")
    out2 = tmp_path / "gf2"
    assert main(["gauge-fix", "--config", cfg, "--out", str(out2)]) == EXIT_OK
    assert (out / "trace.csv").read_text() == (out2 / "trace.csv").read_text()


def test_exit_nonconvergence(tmp_path):
    cfg = _cfg(tmp_path, {"solver": {"method": "newton", "max_iter": 1}})
    assert main(["gauge-fix", "--config", cfg, "--out", str(tmp_path / "o")]) == EXIT_NONCONVERGENCE
    assert len(read_trace(tmp_path / "o" / "trace.csv")) == 1


def test_exit_precondition(tmp_path):
    cfg = _cfg(tmp_path, {"solver": {"method": "newton", "eps2_max": 1e-4}})
    assert main(["gauge-fix", "--config", cfg, "--out", str(tmp_path / "o")]) == EXIT_PRECONDITION
    s = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert s["pass"] is False and "precondition" in s["error"]


def test_method_flag(tmp_path):
    out = tmp_path / "nm"
    code = main(["gauge-fix", "--method", "nash-moser", "--config", _cfg(tmp_path), "--out", str(out)])
    assert code == EXIT_OK
    s = json.loads((out / "summary.json").read_text())
    assert s["results"]["method"] == "nash_moser"


def test_console_script(tmp_path):
    r = subprocess.run([sys.executable, "-m", "gcdeform.cli", "levi", "--out", str(tmp_path / "l")],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["pass"] is True
