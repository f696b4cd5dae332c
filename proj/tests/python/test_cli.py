import csv
import io
import json
import os
import subprocess

import pytest

CLI = os.environ.get("FWLAB_CLI")
pytestmark = pytest.mark.skipif(not CLI, reason="FWLAB_CLI not set")


def run(*args, env=None):
    full = dict(os.environ)
    full.pop("FWLAB_SEED", None)
    full.pop("FWLAB_WORKERS", None)
    full.update(env or {})
    return subprocess.run([CLI, *args], capture_output=True, text=True, env=full)


def test_params_table():
    r = run("params", "--n", "3", "--s", "1.25", "--p", "1.6", "--a", "0.25")
    assert r.returncode == 0
    doc = json.loads(r.stdout)
    assert sorted(doc) == ["config", "results", "timing", "warnings"]
    values = doc["results"][0]["values"]
    assert values["p_star_s"] == pytest.approx(4.8)
    assert values["p_lorentz"] == pytest.approx(9.6)


def test_configuration_errors_exit_2():
    assert run("params", "--s", "2.5").returncode == 2
    assert run("norm", "bump", "bogus").returncode == 2
    assert run("verify", "nope").returncode == 2
    assert run("params", "--format", "xml").returncode == 2
    assert run("rearrange", "not_a_function").returncode == 2
    assert run("params", "--config", "/nonexistent.cfg").returncode == 2


def test_config_file_env_and_flags(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# base\nseed = 5\nsamples = 5000\nworkers = 2\n")
    r = run("params", "--config", str(cfg), env={"FWLAB_SEED": "9"})
    conf = json.loads(r.stdout)["config"]
    assert conf["seed"] == 9 and conf["samples"] == 5000 and conf["workers"] == 2
    r = run("params", "--config", str(cfg), "--seed", "11", env={"FWLAB_SEED": "9", "FWLAB_WORKERS": "3"})
    conf = json.loads(r.stdout)["config"]
    assert conf["seed"] == 11 and conf["workers"] == 3


def test_csv_rows_and_out_file(tmp_path):
    out = tmp_path / "e.csv"
    r = run("verify", "elementary", "--trials", "200", "--format", "csv", "--out", str(out))
    assert r.returncode == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 20
    assert all(row["verdict"] == "holds" for row in rows)
    assert all(row["diagnostics.violations_upper"] == "0.0" for row in rows)


def test_zero_function_inequalities():
    r = run("verify", "inequalities", "--functions", "zero", "--samples", "5000")
    assert r.returncode == 0
    doc = json.loads(r.stdout)
    assert doc["results"]
    for res in doc["results"]:
        assert res["verdict"] == "holds"
        assert res["lhs"]["value"] == 0 and res["rhs"]["value"] == 0


def test_same_config_same_payload():
    args = ("report", "--suite", "probes", "--functions", "bump", "--samples", "5000")
    a = json.loads(run(*args).stdout)
    b = json.loads(run(*args, "--workers", "2").stdout)
    for doc in (a, b):
        doc.pop("timing")
        doc["config"].pop("workers")
    assert a == b
