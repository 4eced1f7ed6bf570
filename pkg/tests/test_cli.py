import json
import subprocess
import sys

import numpy as np
import pytest

from fracwave.cli import main
from fracwave.symexpr import parse, to_poly

EVAL_ARGS = [
    "eval", "burgers", "--family", "T2tanh", "--alpha", "1", "--beta", "1", "--k", "1", "--A", "1",
    "--p", "-1", "--q", "1", "--grid", "x:-5:5:101,t:0:1:11",
]


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_fracderiv(capsys):
    code, out, _ = run(["fracderiv", "--alpha", "0.5", "--power", "1", "--z", "1"], capsys)
    assert code == 0
    assert abs(float(out) - 1.1283791671) < 1e-6
    code, out2, _ = run(["fracderiv", "--alpha", "0.5", "--power", "1", "--z", "1", "--method", "power-rule"], capsys)
    assert abs(float(out2) - float(out)) < 1e-6


def test_fracderiv_domain_error(capsys):
    code, out, err = run(["fracderiv", "--alpha", "0.5", "--power", "1", "--z", "-1"], capsys)
    assert code == 1 and out == ""
    assert json.loads(err)["error"] == "domain"


def test_derive_burgers(capsys):
    code, out, _ = run(["derive", "burgers"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["N"] == 1
    want = [
        "c*A0 - A*k^2*A1*q + k*A0^2",
        "c*A1 + 2*k*A0*A1 - A*k^2*A1*r",
        "k*A1^2 - A*k^2*A1*p",
    ]
    assert len(rep["system"]) == 3
    for row, text in zip(rep["system"], want):
        assert (to_poly(parse(row["expr"])) - to_poly(parse(text))).is_zero()
    derived = next(ps for ps in rep["param_sets"] if ps["label"] == "derived")
    assert derived["assignments"]["A1"] == "A*k*p"
    assert derived["verification"]["verdict"] == "pass"
    printed = next(ps for ps in rep["param_sets"] if ps["label"] == "burgers-printed")
    assert printed["verification"]["verdict"] == "fail"
    assert all(r["status"] == "equal" for r in rep["printed_system_comparison"])


def test_derive_sk_is_verification_only(capsys):
    code, out, _ = run(["derive", "sawada-kotera"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["solver"] == "verification-only" and rep["N"] == 2


def test_derive_unknown_equation(capsys):
    code, _, err = run(["derive", "kdv"], capsys)
    assert code == 1
    assert json.loads(err)["error"] == "validation"


def test_eval_csv(capsys, tmp_path):
    out_file = tmp_path / "u.csv"
    code, out, _ = run(EVAL_ARGS + ["-o", str(out_file)], capsys)
    assert code == 0 and out == ""
    raw = out_file.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "x,t,u"
    assert lines[-1] == "# omitted: 0"
    rows = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:-1]])
    assert rows.shape == (1111, 3)
    assert np.all(np.isfinite(rows))
    for t in np.unique(rows[:, 1]):
        u = rows[rows[:, 1] == t][:, 2]
        d = np.diff(u)
        assert np.all(d > 0) or np.all(d < 0)
    assert len(lines[1].split(",")[2].replace("-", "").replace(".", "").split("e")[0]) <= 17


def test_eval_omits_poles(capsys):
    argv = ["eval", "burgers", "--family", "T3", "--k", "1", "--A", "1", "--p", "1", "--q", "0", "--r", "0",
            "--grid", "x:-1:1:21,t:0:1:3"]
    code, out, _ = run(argv, capsys)
    assert code == 0
    lines = out.splitlines()
    omitted = int(lines[-1].split(":")[1])
    assert omitted >= 1 and len(lines) - 2 + omitted == 63
    assert "nan" not in out and "inf" not in out


def test_eval_constraint_violation(capsys):
    argv = [a if a != "-1" else "1" for a in EVAL_ARGS]
    code, out, err = run(argv, capsys)
    assert code == 1 and out == ""
    assert json.loads(err)["error"] == "constraint"


def test_eval_bad_grid(capsys):
    code, _, err = run(EVAL_ARGS[:-1] + ["x:0:1"], capsys)
    assert code == 1 and json.loads(err)["error"] == "validation"


def test_eval_unknown_family(capsys):
    argv = list(EVAL_ARGS)
    argv[argv.index("T2tanh")] = "T7"
    code, _, err = run(argv, capsys)
    assert code == 1 and json.loads(err)["error"] == "validation"


def test_list(capsys):
    code, out, _ = run(["list", "foam-drainage"], capsys)
    fams = json.loads(out)["families"]
    assert code == 0 and len(fams) == 9
    assert {f["equation"] for f in fams} == {"foam-drainage"}


def test_verify_deterministic_and_seeded(capsys, monkeypatch):
    _, a, _ = run(["verify", "burgers"], capsys)
    _, b, _ = run(["verify", "burgers"], capsys)
    assert a == b
    assert json.loads(a)["seed"] == 20150601
    monkeypatch.setenv("FRACWAVE_SEED", "5")
    _, c, _ = run(["verify", "burgers"], capsys)
    assert json.loads(c)["seed"] == 5
    _, d, _ = run(["verify", "burgers", "--seed", "6"], capsys)
    assert json.loads(d)["seed"] == 6


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"family": "T2tanh", "k": 1, "A": 1, "p": -1, "q": 1, "grid": "x:0:1:5,t:0:1:3"}))
    code, out, _ = run(["eval", "burgers", "--config", str(cfg)], capsys)
    assert code == 0 and len(out.splitlines()) == 17
    cfg.write_text(json.dumps({"bogus": 1}))
    code, _, err = run(["eval", "burgers", "--config", str(cfg)], capsys)
    assert code == 1 and json.loads(err)["error"] == "config"


def test_usage_error_exit_code():
    proc = subprocess.run([sys.executable, "-m", "fracwave", "eval"], capture_output=True, text=True)
    assert proc.returncode == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "fracwave", "fracderiv", "--alpha", "0.5", "--power", "2", "--z", "1"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert float(proc.stdout) == pytest.approx(2 / (0.75 * np.sqrt(np.pi)), rel=1e-6)
