import csv
import io
import json
import subprocess
import sys

import httpx
import pytest
from fastapi.testclient import TestClient

from multiport import cli
from multiport.api import app

PHASES = "1.5707963,-0.5235988,-0.5235988"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_simulate_json(capsys):
    code, out, _ = run(capsys, "simulate", "--phases", PHASES)
    doc = json.loads(out)
    assert code == 0
    assert doc["command"] == "simulate" and doc["input"]["d"] == 3
    assert doc["result"]["probabilities"] == pytest.approx([1 / 3] * 3, abs=1e-9)


def test_exit_codes(capsys):
    assert run(capsys, "check", "--target", "1/3,1/3,1/3")[0] == 0
    assert run(capsys, "check", "--target", "0.9,0.09,0.01")[0] == 3
    assert run(capsys, "synthesize", "--target", "0,0.1,0.2,0.2,0.5", "--restarts", "4")[0] == 4
    code, _, err = run(capsys, "simulate", "--d", "3", "--phases", "0,0")
    assert code == 2 and "error" in err
    assert run(capsys, "check", "--target", "a,b")[0] == 2
    assert run(capsys, "simulate", "--phases-complex", "1,0.5")[0] == 2


def test_two_photon_check_infers_d(capsys):
    code, out, _ = run(capsys, "check", "--two-photon-same-port", "--target", "1/9,1/9,1/9,2/9,2/9,2/9", "--convention", "monomial")
    assert code == 3
    assert "2*sqrt" in json.loads(out)["result"]["notes"][0]


def test_csv_and_pretty(capsys):
    _, out, _ = run(capsys, "synthesize", "--target", "0.5,0,0.5,0", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["key", "value"]
    assert ["result.status", "success"] in rows
    _, out, _ = run(capsys, "check", "--target", "0.25,0.25,0.25,0.25", "--format", "pretty")
    assert "verdict: necessary-passed" in out


def test_sweep_csv_header(capsys):
    code, out, _ = run(capsys, "sweep", "--kind", "magnitudes", "--d", "4", "--step", "0.25", "--restarts", "8")
    header = out.splitlines()[0].split(",")
    assert code == 0
    assert header[:4] == ["p0", "p1", "p2", "p3"] and "gap" in header and "seed" in header


def test_byte_stable(capsys):
    args = ("synthesize", "--target", "0.1,0.2,0.3,0.4", "--restarts", "8", "--seed", "5")
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("d: 3\ntarget: [0.9, 0.09, 0.01]\n")
    assert run(capsys, "check", "--config", str(cfg))[0] == 3
    assert run(capsys, "check", "--config", str(cfg), "--target", "1/3,1/3,1/3")[0] == 0
    js = tmp_path / "run.json"
    js.write_text(json.dumps({"d": 2, "target": [0.3, 0.7]}))
    assert run(capsys, "synthesize", "--config", str(js))[0] == 0
    assert run(capsys, "check", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_output_file(tmp_path, capsys):
    out = tmp_path / "o.json"
    assert run(capsys, "simulate", "--phases", PHASES, "-o", str(out))[0] == 0
    assert json.loads(out.read_text())["command"] == "simulate"


def test_server_mode_matches_local(monkeypatch, capsys):
    client = TestClient(app)

    def fake_post(url, json=None, timeout=None):
        return client.post(url.replace("http://svc", ""), json=json)

    monkeypatch.setattr(httpx, "post", fake_post)
    args = ["check", "--target", "0.9,0.09,0.01"]
    local = run(capsys, *args)
    remote = run(capsys, *args, "--server", "http://svc")
    assert remote[0] == local[0] == 3
    assert remote[1] == local[1]
    assert run(capsys, "simulate", "--phases", "0,0", "--d", "3", "--server", "http://svc")[0] == 2


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "multiport.cli", "check", "--d", "4", "--two-modes", "0,2"], capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["result"]["verdict"] == "possible"
