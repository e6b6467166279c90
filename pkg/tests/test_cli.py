import json
import subprocess
import sys

import jsonschema
import pytest

from qpuf import cli, config

SMALL = """
seed = 3

[code]
n = 16
r = 2
s = 4
list_size = 4

[budgets]
construction_frames = 2000
fer_frames = 300

[output]
dir = "{out}"

[[leakage.rows]]
p0 = 0.25
r = 0
s = 6

[[leakage.rows]]
p0 = 0.3
r = 2
s = 4

[[leakage.rows]]
masses = [0.4, 0.3, 0.2, 0.1]
r = 2
s = 4

[[leakage.rows]]
p0 = 0.3
r = 20
s = 0
"""


@pytest.fixture
def cfg_path(tmp_path):
    out = tmp_path / "out"
    path = tmp_path / "small.toml"
    path.write_text(SMALL.format(out=out))
    return str(path), out


def run(*argv):
    return cli.main(list(argv))


def test_construct_is_deterministic(cfg_path, capsys):
    path, out = cfg_path
    assert run("construct", "--config", path) == 0
    first = (out / "profile.json").read_bytes()
    assert run("construct", "--config", path) == 0
    assert (out / "profile.json").read_bytes() == first
    man = json.loads((out / "profile.json.manifest.json").read_text())
    assert man["command"] == "construct" and len(man["manifest_hash"]) == 64
    assert "construction hash" in capsys.readouterr().out


def test_enroll_reconstruct_zero_noise(cfg_path, capsys):
    path, out = cfg_path
    assert run("construct", "--config", path) == 0
    assert run("enroll", "--config", path) == 0
    key = [ln for ln in capsys.readouterr().out.splitlines() if ln.startswith("key:")][0]
    assert (out / "helper.qfe1").exists() and (out / "puf.bin").exists()
    assert run("reconstruct", "--config", path, "--zero-noise") == 0
    again = [ln for ln in capsys.readouterr().out.splitlines() if ln.startswith("key:")][0]
    assert again == key


def test_profile_from_other_config_refused(cfg_path, capsys):
    path, out = cfg_path
    assert run("construct", "--config", path) == 0
    assert run("enroll", "--config", path, "--seed", "4") == 1
    assert "different config" in capsys.readouterr().err


def test_fer_zero_noise(cfg_path):
    path, out = cfg_path
    assert run("construct", "--config", path) == 0
    assert run("fer", "--config", path, "--zero-noise", "--frames", "200") == 0
    rep = json.loads((out / "fer.json").read_text())
    jsonschema.validate(rep, config.load_schema("fer_report"))
    assert rep["frames"] == 200 and rep["failures"] == 0


def test_leakage_report(cfg_path, capsys):
    path, out = cfg_path
    assert run("construct", "--config", path) == 0
    assert run("leakage", "--config", path) == 0
    rep = json.loads((out / "leakage.json").read_text())
    jsonschema.validate(rep, config.load_schema("leakage_report"))
    statuses = [r["status"] for r in rep["rows"]]
    assert statuses == ["ok", "ok", "not applicable", "not applicable"]
    assert rep["rows"][0]["bound_bits"] == 0.0
    assert rep["rows"][1]["bound_bits"] > 0
    capsys.readouterr()
    assert run("report", "--config", path) == 0
    assert "leakage bounds" in capsys.readouterr().out


def test_report_without_results(cfg_path):
    path, _ = cfg_path
    assert run("report", "--config", path) == 1


def test_bad_block_length_is_a_config_error(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("seed = 1\n[code]\nn = 32\nr = 2\ns = 4\n")
    proc = subprocess.run([sys.executable, "-m", "qpuf.cli", "construct", "--config", str(path)],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert "config" in proc.stderr and "power of 4" in proc.stderr


def test_missing_config_and_bad_overrides(cfg_path):
    path, _ = cfg_path
    assert run("construct") == 2
    assert run("construct", "--config", path + ".missing") == 2
    assert run("fer", "--config", path, "--frames", "0") == 2
    assert run("construct", "--config", path, "--seed", "-1") == 2


def test_fer_long_run_gate(cfg_path):
    path, _ = cfg_path
    assert run("fer", "--config", path, "--frames", "2000000") == 2
