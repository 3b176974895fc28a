from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from kcutlab import cli
from kcutlab.certify import Report
from kcutlab.graph import complete_graph, cycle_graph, read_graph, write_graph

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def files(tmp_path):
    write_graph(complete_graph(3), tmp_path / "k3.txt")
    write_graph(cycle_graph(5), tmp_path / "c5.txt")
    return tmp_path


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve(files, capsys):
    for method in ("bnb", "brute"):
        code, out, _ = run(capsys, "solve", files / "c5.txt", "--k", 2, "--method", method, "--json")
        data = json.loads(out)
        assert code == 0 and data["value"] == 4 and data["status"] == "optimal"


def test_relax(files, capsys):
    expected = {"vmilo": 3.0, "emilo": 2.0, "remilo": 2.0, "bqo": 2.0}
    for method, want in expected.items():
        code, out, _ = run(capsys, "relax", files / "k3.txt", "--k", 2, "--method", method, "--json")
        assert code == 0 and json.loads(out)["bound"] == pytest.approx(want)
    code, out, _ = run(capsys, "relax", files / "c5.txt", "--k", 3, "--method", "emilo", "--lazy")
    assert code == 0 and out.strip() == "emilo bound 5"


def test_lift_check(files, capsys):
    code, out, _ = run(capsys, "lift-check", "--n", 5, "--k", 3, "--samples", 20, "--json")
    assert code == 0 and not any(json.loads(out)["failures"].values())
    (files / "x.csv").write_text("0.5,0.5\n0.2,0.8\n1,0\n")
    code, out, _ = run(capsys, "lift-check", "--x", files / "x.csv", "--graph", files / "k3.txt")
    assert code == 0 and "vmilo   1/1 inside" in out


def test_certify_exit_codes(capsys, monkeypatch, tmp_path):
    code, out, _ = run(capsys, "certify", "--theorem", "lemma1", "--samples", 500,
                       "--out", tmp_path / "r.json")
    assert code == 0 and "theorem lemma1: PASS" in out
    assert json.loads((tmp_path / "r.json").read_text())["passed"] is True

    def failing(theorem, samples=None, seed=0):
        rep = Report(theorem, 1, seed)
        rep.check("forced").record(1.0, True, "injected failure")
        return rep

    monkeypatch.setattr(cli, "certify", failing)
    code, out, _ = run(capsys, "certify", "--theorem", "2")
    assert code == 2 and "FAIL forced" in out


def test_export_goldens(files, capsys, tmp_path):
    for form, fmt, golden in [("bqo", "lp", "bqo_k3_k2.lp"), ("vmilo", "lp", "vmilo_k3_k2.lp"),
                              ("misdo1", "sdpa", "misdo1_k3_k2.dat-s")]:
        out_file = tmp_path / golden
        code, _, _ = run(capsys, "export", files / "k3.txt", "--k", 2, "--formulation", form,
                         "--format", fmt, "-o", out_file)
        assert code == 0 and out_file.read_bytes() == (GOLDEN / golden).read_bytes()


def test_export_error_exit(files, capsys):
    code, _, err = run(capsys, "export", files / "k3.txt", "--k", 2, "--formulation", "misdo1",
                       "--format", "lp")
    assert code == 1 and "PSD" in err
    code, _, err = run(capsys, "solve", files / "missing.txt", "--k", 2)
    assert code == 1


def test_bench_and_gen(files, capsys):
    code, out, _ = run(capsys, "gen", "band", "--param", "n=6", "--param", "b=2", "-o", files / "b.txt")
    assert code == 0 and read_graph(files / "b.txt").m == 9
    cfg = {"instances": ["k3.txt", "c5.txt", "b.txt"], "k": [2], "methods": ["exact", "vmilo-relax"],
           "time_cap": 10, "csv": "bench.csv", "workers": 1}
    (files / "cfg.json").write_text(json.dumps(cfg))
    code, out, _ = run(capsys, "bench", "--config", files / "cfg.json")
    assert code == 0 and "vmilo-relax" in out
    assert (files / "bench.csv").exists()


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "kcutlab", "solve", str(files / "k3.txt"), "--k", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("value 3")
