import json
import math
import subprocess
import sys

import jsonschema
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rodwaves import reports
from rodwaves.cli import main

SCHEMA = reports.load_schema()


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _report(capsys, *argv):
    code, out, err = _run(capsys, *argv)
    assert code == 0, err
    rep = json.loads(out)
    jsonschema.validate(rep, SCHEMA)
    return reports.decode(rep)


def test_eval_i(capsys):
    rep = _report(capsys, "eval-i", "--alpha", "2", "--beta", "0")
    assert rep["command"] == "eval-i"
    assert rep["results"]["value"] == pytest.approx(1.737, abs=1e-3)


def test_eval_i_unbounded_is_tagged(capsys):
    code, out, _ = _run(capsys, "eval-i", "--alpha", "-7", "--beta", "2.1639534137386525")
    assert code == 0
    assert '"nonfinite": "-inf"' in out
    assert reports.loads(out)["results"]["value"] == -math.inf


def test_beta_gamma(capsys):
    rep = _report(capsys, "beta-gamma", "--gamma", "1")
    assert rep["results"]["beta_gamma"] == pytest.approx(0.513, abs=1e-3)
    rep = _report(capsys, "beta-gamma", "--gamma", "-0.539")
    assert rep["results"]["finite"] is False


def test_constants_and_bounds(capsys):
    rep = _report(capsys, "constants")
    assert rep["results"]["alpha0"] == pytest.approx(-6.113, abs=1e-3)
    rep = _report(capsys, "bounds", "--gamma", "1")
    assert rep["results"]["upper_bound"] == pytest.approx(0.5156, abs=1e-3)


def test_check_command(capsys, tmp_path):
    path = tmp_path / "datum.json"
    path.write_text(json.dumps({"domain": "circle", "family": "sine", "params": {"a": 1.0}}))
    rep = _report(capsys, "check", "--datum", str(path), "--gamma", "1")
    assert rep["results"]["status"] == "triggered"
    assert rep["results"]["tstar_bound"] == pytest.approx(1 / math.pi, abs=1e-9)


def test_simulate_command(capsys, tmp_path):
    path = tmp_path / "datum.json"
    path.write_text(json.dumps({"domain": "circle", "family": "sine", "params": {"a": 1.0}}))
    prefix = tmp_path / "sim"
    rep = _report(capsys, "simulate", "--datum", str(path), "--gamma", "0", "--modes", "128",
                  "--tmax", "0.2", "--out", str(prefix))
    assert rep["results"]["stop_reason"] == "t_max"
    assert (tmp_path / "sim.csv").exists() and (tmp_path / "sim.json").exists()


def test_scan_and_materials(capsys):
    rep = _report(capsys, "scan", "--gamma-min", "-1", "--gamma-max", "0.5", "--step", "0.5")
    assert rep["results"]["gamma_endpoints"][0] == pytest.approx(-0.817, abs=5e-3)
    rep = _report(capsys, "materials")
    assert rep["results"]["all_pass"]


def test_fig_data(capsys, tmp_path):
    code, out, _ = _run(capsys, "fig-data", "--which", "i2beta", "--points", "5")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 6
    target = tmp_path / "curve.csv"
    rep = _report(capsys, "fig-data", "--which", "courbe", "--points", "5", "--out", str(target))
    # gamma samples on both sides of zero
    assert rep["results"]["rows"] == 10
    assert target.read_text().count("\n") == 11


@pytest.mark.parametrize("argv", [
    ("beta-gamma", "--gamma", "0"),
    ("eval-i", "--alpha", "1", "--beta", "3"),
    ("check", "--datum", "/nonexistent.json", "--gamma", "1"),
])
def test_domain_errors_exit_2(capsys, argv):
    code, out, err = _run(capsys, *argv)
    assert code == 2
    assert out == ""
    assert json.loads(err)["exit_code"] == 2


def test_reports_are_deterministic(capsys):
    a = _run(capsys, "beta-gamma", "--gamma", "2")[1]
    b = _run(capsys, "beta-gamma", "--gamma", "2")[1]
    assert a == b


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rodwaves", "eval-i", "--alpha", "0", "--beta", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["value"] == pytest.approx(0.0, abs=1e-9)


finite_or_not = st.one_of(st.floats(allow_nan=True, allow_infinity=True), st.integers(), st.text(max_size=5))


@given(st.dictionaries(st.text(max_size=5), st.lists(finite_or_not, max_size=4), max_size=4))
def test_encode_decode_round_trip(obj):
    back = reports.loads(reports.dumps(reports.encode(obj)))
    assert back.keys() == obj.keys()
    for k in obj:
        for x, y in zip(obj[k], back[k]):
            if isinstance(x, float) and math.isnan(x):
                assert math.isnan(y)
            else:
                assert x == y
