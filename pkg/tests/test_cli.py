import json

import numpy as np
import pytest

from carnotlab import cli
from carnotlab import io as cio
from carnotlab import splitting as sp


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_builtins(capsys):
    code, out, _ = run(capsys, "classify", "--builtin", "g752")
    rep = json.loads(out)
    assert code == 0 and rep["plentiful"] == "yes" and rep["htype"] == "no"
    code, out, _ = run(capsys, "classify", "--builtin", "h1")
    rep = json.loads(out)
    assert code == 0 and rep["plentiful"] == "no" and rep["witness_v"] is not None


def test_classify_lie_file_and_parse_error(tmp_path, capsys):
    good = tmp_path / "g.json"
    good.write_text(json.dumps({"m1": 3, "m2": 3, "brackets":
                                [[1, 2, 1, 1], [1, 3, 2, 1], [2, 3, 3, 1]]}))
    code, out, _ = run(capsys, "classify", "--lie", str(good))
    assert code == 0 and json.loads(out)["plentiful"] == "no"
    bad = tmp_path / "bad.json"
    bad.write_text('{"m1": 3,\n"m2": 3, "brackets": [[1, 2, 1 1]]}')
    code, _, err = run(capsys, "classify", "--lie", str(bad))
    assert code == 1 and "line 2" in err


def test_validation_and_usage_errors(tmp_path, capsys):
    dep = tmp_path / "dep.json"
    dep.write_text(json.dumps({"m1": 2, "m2": 2, "brackets": [[1, 2, 1, 1], [1, 2, 2, 1]]}))
    assert run(capsys, "classify", "--lie", str(dep))[0] == 2
    assert run(capsys, "frobnicate")[0] == 1
    assert run(capsys, "check", "--samples", "many")[0] == 1


def test_outputs_need_force(tmp_path, capsys):
    out = tmp_path / "rep.json"
    assert run(capsys, "classify", "--builtin", "h2", "--out", str(out))[0] == 0
    assert run(capsys, "classify", "--builtin", "h2", "--out", str(out))[0] == 2
    assert run(capsys, "classify", "--builtin", "h2", "--out", str(out), "--force")[0] == 0


def test_catalog(capsys):
    code, out, _ = run(capsys, "catalog")
    rows = [ln.split(",") for ln in out.strip().splitlines()]
    assert code == 0 and len(rows) == 7
    for r in rows[1:]:
        assert r[6] == r[8] and r[7] == r[9]


def test_calibrate(capsys):
    code, out, _ = run(capsys, "calibrate", "--group", "h1", "--trials", "20000")
    assert code == 0 and json.loads(out)["violations"] == 0


def test_check_deterministic_across_threads(tmp_path, capsys):
    args = ["check", "--seed", "7", "--samples", "300", "--suite", "triangle",
            "--suite", "cone_iii", "--suite", "projections"]
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert run(capsys, *args, "--out", str(a))[0] == 0
    assert run(capsys, *args, "--threads", "4", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_check_fault_injection(monkeypatch, capsys):
    real = sp.in_cone
    monkeypatch.setattr(sp, "in_cone", lambda split, cone, p: ~real(split, cone, p))
    code, out, err = run(capsys, "check", "--seed", "3", "--samples", "100",
                         "--suite", "cone_ii", "--group", "h1")
    assert code == 4
    assert "seed=3" in err and "suite=cone_ii" in err and "group=h1" in err and "index=" in err


def test_extend_command(tmp_path, capsys):
    samples = tmp_path / "s.csv"
    samples.write_text("w1,w2,w3,t,phi\n0.1,0,0,0,0.05\n-0.5,0.4,0.1,0.1,0\n0,-0.4,0.6,-0.5,-0.05\n")
    out = tmp_path / "e.csv"
    code, _, err = run(capsys, "extend", "--group", "h2", "--L", "0.3", "--samples", str(samples),
                       "--box=-1,1", "--resolution", "5", "--out", str(out))
    assert code == 0
    consts = json.loads(err.strip().splitlines()[-1])
    assert set(consts) >= {"alpha", "beta", "gamma", "lip_bound"}
    header = json.loads(out.read_text().splitlines()[0][1:])
    assert header["gamma"] == consts["gamma"] and header["L"] == 0.3
    g = cio.read_graph(str(out))
    assert g.values.shape == (5, 5, 5, 5) and np.max(np.abs(g.values)) <= 0.05
    # not Lipschitz enough at L = 0.01
    code, _, _ = run(capsys, "extend", "--group", "h2", "--L", "0.01", "--samples", str(samples),
                     "--box=-1,1", "--resolution", "3")
    assert code == 2


def test_minimize_and_excess(tmp_path, capsys):
    g = tmp_path / "m.csv"
    code, _, _ = run(capsys, "minimize", "--group", "h2", "--box=-1.5,1.5", "--resolution", "8",
                     "--init-noise", "0.1", "--tol", "1e-9", "--out", str(g))
    assert code == 0
    graph = cio.read_graph(str(g))
    assert np.max(np.abs(graph.values)) <= 1e-5
    _, names, trace = cio.read_csv(str(g) + ".trace.csv")
    assert names == ["iter", "energy", "grad_norm", "step"]
    assert np.all(np.diff(trace[:, 1]) <= 0)
    code, out, _ = run(capsys, "excess", "--graph", str(g), "--radii", "0.25,0.5")
    lines = out.strip().splitlines()
    assert code == 0 and lines[1] == "r,excess_half,excess_sq"
    vals = np.array([[float(v) for v in ln.split(",")] for ln in lines[2:]])
    assert np.all(vals[:, 1:] <= 1e-9)
    code, _, err = run(capsys, "excess", "--graph", str(g), "--radii", "2")
    assert code == 5 and "coverage" in err


def test_minimize_affine_boundary_file_round_trip(tmp_path, capsys):
    g = tmp_path / "a.csv"
    code, _, _ = run(capsys, "minimize", "--group", "h2", "--box=-1,1", "--resolution", "6",
                     "--boundary", "affine 0.2,-0.1,0.1,0.05", "--out", str(g))
    assert code == 0
    g2 = tmp_path / "b.csv"
    code, _, _ = run(capsys, "minimize", "--group", "h2", "--box=-1,1", "--resolution", "6",
                     "--boundary", str(g), "--max-iters", "3", "--out", str(g2))
    assert code == 0
    a, b = cio.read_graph(str(g)), cio.read_graph(str(g2))
    ring = np.ones(a.grid.shape, bool)
    ring[1:-1, 1:-1, 1:-1, 1:-1] = False
    np.testing.assert_array_equal(a.values[ring], b.values[ring])


def test_excess_form_selection(tmp_path, capsys):
    g = tmp_path / "m.csv"
    run(capsys, "minimize", "--group", "h1", "--box=-2.5,2.5", "--resolution", "9",
        "--boundary", "affine 0.1,0.05", "--out", str(g))
    code, out, _ = run(capsys, "excess", "--graph", str(g), "--radii", "1", "--form",
                       "one-minus-square")
    assert code == 0 and out.splitlines()[1] == "r,excess_sq"
