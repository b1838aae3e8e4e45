"""End-to-end checks of the command-line harness.

Commands run in-process through ``main(argv)``; outputs are compared as
raw bytes to pin the reproducibility contract: same config, same rows.
"""

import json

import pytest

from isinglab.cli import main
from isinglab.graph import read_graph

SCAN_INI = """\
[scan]
kind = er
n = 60 90
beta = 0.2
d = 1.5
seeds = 3
cap = 500000
"""

DECAY_INI = """\
[model]
kind = er
n = 120
d = 1.8
beta = 0.4
seed = 3

[scan]
radii = 2 3
vertices = 4
"""

SAMPLE_INI = """\
[model]
kind = cycle
n = 7
beta = 0.4

[sample]
L = 8
draws = 2
"""

GEN_INI = """\
[graph]
kind = er
n = 25
d = 2.0
beta = 0.6
seed = 5
h = uniform -0.5 0.5
"""

GW_INI = """\
[gw]
d = 2.0
radii = 3 4
seeds = 60
"""

VERIFY_INI = """\
[verify]
trees = 40
max_len = 4
"""


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def run(argv):
    return main(argv)


def test_coupling_scan_round_trip(tmp_path, monkeypatch):
    cfg = write(tmp_path, "scan.ini", SCAN_INI)
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    monkeypatch.setenv("ISINGLAB_WORKERS", "1")
    assert run(["coupling-scan", "-c", cfg, "-o", str(out1)]) == 0
    monkeypatch.setenv("ISINGLAB_WORKERS", "2")
    assert run(["coupling-scan", "-c", cfg, "-o", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    lines = out1.read_text().splitlines()
    comments = [l for l in lines if l.startswith("#")]
    assert any("scan.beta" in c for c in comments)
    header = [l for l in lines if not l.startswith("#")][0]
    assert header == "n,d,beta,seed,coupled,steps"
    data = [l for l in lines if not l.startswith("#")][1:]
    assert len(data) == 2 * 1 * 3  # sizes x betas x seeds
    for row in data:
        n, d, beta, seed, coupled, steps = row.split(",")
        assert int(n) in (60, 90)
        assert coupled in ("0", "1")
        assert int(steps) >= 1


def test_decay_scan_rows(tmp_path, monkeypatch):
    monkeypatch.setenv("ISINGLAB_WORKERS", "1")
    cfg = write(tmp_path, "decay.ini", DECAY_INI)
    out = tmp_path / "decay.csv"
    assert run(["decay-scan", "-c", cfg, "-o", str(out)]) == 0
    lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert lines[0] == "v,l,influence,sphere_size,bound,status"
    assert len(lines[1:]) == 4 * 2  # vertices x radii
    for row in lines[1:]:
        v, l, infl, sphere, bound, status = row.split(",")
        assert status == "ok"
        assert 0.0 <= float(infl) <= 1.0


def test_decay_scan_budget_rows_continue(tmp_path, monkeypatch):
    monkeypatch.setenv("ISINGLAB_WORKERS", "1")
    text = DECAY_INI.replace("radii = 2 3", "radii = 2 9").replace(
        "[scan]", "[scan]\nmax_nodes = 40"
    )
    cfg = write(tmp_path, "decay2.ini", text)
    out = tmp_path / "decay2.csv"
    assert run(["decay-scan", "-c", cfg, "-o", str(out)]) == 0
    rows = [l for l in out.read_text().splitlines() if not l.startswith("#")][1:]
    statuses = [r.split(",")[-1] for r in rows]
    assert "budget" in statuses
    assert len(rows) == 4 * 2  # flagged rows do not abort the scan


def test_sample_json(tmp_path):
    cfg = write(tmp_path, "sample.ini", SAMPLE_INI)
    out1, out2 = tmp_path / "s1.json", tmp_path / "s2.json"
    assert run(["sample", "-c", cfg, "-o", str(out1)]) == 0
    assert run(["sample", "-c", cfg, "-o", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    doc = json.loads(out1.read_text())
    assert doc["model"] == "cycle:n=7"
    assert len(doc["runs"]) == 2
    run0 = doc["runs"][0]
    assert set(run0) == {"L", "order", "p", "spins", "saw_sizes"}
    assert run0["L"] == 8
    assert len(run0["spins"]) == 7
    assert all(s in (-1, 1) for s in run0["spins"])
    # distinct draws use distinct streams
    assert doc["runs"][0] != doc["runs"][1]


def test_graph_gen_output_parses(tmp_path):
    cfg = write(tmp_path, "gen.ini", GEN_INI)
    out = tmp_path / "g.graph"
    assert run(["graph-gen", "-c", cfg, "-o", str(out)]) == 0
    g = read_graph(str(out))
    assert g.n == 25
    assert g.h.min() >= -0.5 and g.h.max() <= 0.5
    assert g.h.std() > 0  # uniform fields actually applied
    out2 = tmp_path / "g2.graph"
    assert run(["graph-gen", "-c", cfg, "-o", str(out2)]) == 0
    assert out.read_bytes() == out2.read_bytes()


def test_gw_stats_csv(tmp_path):
    cfg = write(tmp_path, "gw.ini", GW_INI)
    out = tmp_path / "gw.csv"
    assert run(["gw-stats", "-c", cfg, "-o", str(out)]) == 0
    lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert lines[0].startswith("r,seeds,mean_sphere,d_pow_r")
    assert len(lines) == 3
    r3 = lines[1].split(",")
    assert r3[0] == "3" and r3[1] == "60"
    # mean sphere size should be within a factor ~2 of d^r at d=2
    assert 0.4 * 8 <= float(r3[2]) <= 2.5 * 8


def test_verify_command(tmp_path):
    cfg = write(tmp_path, "verify.ini", VERIFY_INI)
    out = tmp_path / "report.txt"
    code = run(["verify", "tree-bounds", "-c", cfg, "-o", str(out)])
    assert code == 0
    text = out.read_text()
    assert "PASS" in text


def test_exit_codes(tmp_path, capsys):
    assert run(["verify", "no-such-suite"]) == 2
    bad = write(tmp_path, "bad.ini", "[scan]\nkind = er\n")
    assert run(["coupling-scan", "-c", bad, "-o", "/dev/null"]) == 2
    assert run(["coupling-scan", "-c", str(tmp_path / "missing.ini"), "-o", "/dev/null"]) == 2
    nonsense = write(tmp_path, "nonsense.ini", "[model]\nkind = blob\n\n[scan]\n")
    assert run(["decay-scan", "-c", nonsense, "-o", "/dev/null"]) == 2
    capsys.readouterr()


def test_config_keys_are_case_sensitive(tmp_path):
    cfg = write(tmp_path, "lcase.ini", SAMPLE_INI.replace("L = 8", "l = 8"))
    assert run(["sample", "-c", cfg, "-o", "/dev/null"]) == 2
