from __future__ import annotations

import json
import subprocess
import sys

import pytest

from conftest import cycle, path
from vckernel.cli import main
from vckernel.io import emit_pace, parse_edge_list, parse_solution, read_graph
from vckernel.solver import tau, verify_cover


@pytest.fixture
def p4(tmp_path):
    f = tmp_path / "p4.gr"
    f.write_text(emit_pace(path(4)))
    return f


@pytest.fixture
def c7(tmp_path):
    f = tmp_path / "c7.gr"
    f.write_text(emit_pace(cycle(7)))
    return f


def test_kernelize_writes_graph_trace_and_manifest(tmp_path, p4, capsys):
    out, trace = tmp_path / "k.txt", tmp_path / "t.jsonl"
    assert main(["kernelize", "--in", str(p4), "--out", str(out), "--trace", str(trace), "--rules", "Deg1"]) == 0
    assert parse_edge_list(out.read_text()).n == 0
    assert len(trace.read_text().splitlines()) == 2
    manifest = json.loads((tmp_path / "k.txt.manifest.json").read_text())
    assert manifest["start"] == {"n": 4, "m": 3, "k": 0} and manifest["end"] == {"n": 0, "m": 0, "k": -2}
    assert manifest["outputs"] == {"graph": str(out), "trace": str(trace)}
    assert manifest["seed"] == 0 and len(manifest["input"]["sha256"]) == 64
    assert "after:  n=0 m=0 k=-2" in capsys.readouterr().out


def test_kernelize_solve_lift_flow(tmp_path, c7):
    kernel, trace, sol, lifted = (tmp_path / x for x in ("k.txt", "t.jsonl", "k.sol", "g.sol"))
    assert main(["kernelize", "--in", str(c7), "--out", str(kernel), "--trace", str(trace), "--rules", "Deg2Fold"]) == 0
    k = parse_edge_list(kernel.read_text())
    assert k.n == 3 and k.m == 3
    assert main(["solve", "--in", str(kernel), "--out", str(sol)]) == 0
    assert len(parse_solution(sol.read_text())) == 2
    assert main(["lift", "--in", str(c7), "--trace", str(trace), "--solution", str(sol), "--out", str(lifted)]) == 0
    cover = parse_solution(lifted.read_text())
    assert verify_cover(cycle(7), cover) and len(cover) == tau(cycle(7)) == 4


def test_lift_rejects_bad_inputs(tmp_path, c7, capsys):
    kernel, trace, sol = tmp_path / "k.txt", tmp_path / "t.jsonl", tmp_path / "s.sol"
    main(["kernelize", "--in", str(c7), "--out", str(kernel), "--trace", str(trace), "--rules", "Deg2Fold"])
    sol.write_text("1\n0\n")
    assert main(["lift", "--in", str(c7), "--trace", str(trace), "--solution", str(sol)]) == 1
    assert "not a vertex cover" in capsys.readouterr().err
    sol.write_text("1\n9\n")
    assert main(["lift", "--in", str(c7), "--trace", str(trace), "--solution", str(sol)]) == 1
    assert "out of range" in capsys.readouterr().err


def test_solve_methods_agree(tmp_path, c7, capsys):
    for method in ("brute", "bnr"):
        assert main(["solve", "--in", str(c7), "--method", method, "--manifest", str(tmp_path / "m.json")]) == 0
        assert capsys.readouterr().out.splitlines()[0] == "4"
        assert json.loads((tmp_path / "m.json").read_text())["tau"] == 4


def test_find_and_far(tmp_path, p4, capsys):
    report, dot = tmp_path / "r.json", tmp_path / "r.dot"
    args = ["find", "--in", str(p4), "--depth", "1", "--report", str(report), "--dot", str(dot)]
    assert main(args + ["--manifest", str(tmp_path / "m.json")]) == 0
    seqs = json.loads(report.read_text())["sequences"]
    assert seqs and int(capsys.readouterr().out.splitlines()[-1].split()[1]) == len(seqs)
    assert dot.read_text().startswith("graph seq0 {")
    out, log = tmp_path / "far.txt", tmp_path / "far.log"
    assert main(["far", "--in", str(p4), "--out", str(out), "--log", str(log), "--time-limit", "10"]) == 0
    assert parse_edge_list(out.read_text()).n == 0
    assert "seconds" not in log.read_text()


def test_id_and_lid(tmp_path, c7):
    for cmd in ("id", "lid"):
        out, log = tmp_path / f"{cmd}.txt", tmp_path / f"{cmd}.log"
        args = [cmd, "--in", str(c7), "--out", str(out), "--iterations", "5", "--seed", "3", "--log", str(log), "--log-timing"]
        assert main(args) == 0
        manifest = json.loads((tmp_path / f"{cmd}.txt.manifest.json").read_text())
        assert manifest["seed"] == 3 and manifest["iterations"] <= 5
        g = read_graph(out)
        assert tau(g) - manifest["end"]["k"] == 4
        rows = json.loads(log.read_text())
        assert all("seconds" in r for r in rows)


def test_id_rejects_non_positive_alpha(tmp_path, c7, capsys):
    assert main(["id", "--in", str(c7), "--alpha", "0", "--manifest", str(tmp_path / "m.json")]) == 1
    assert "--alpha" in capsys.readouterr().err


def test_confluence_pair(tmp_path, capsys):
    out = tmp_path / "matrix.json"
    args = ["confluence", "--pairs", "Deg3IS,Deg3IS", "--max-n", "6", "--trials", "10", "--out", str(out)]
    assert main(args + ["--manifest", str(tmp_path / "m.json")]) == 0
    text = capsys.readouterr().out
    assert "witness" in text
    data = json.loads(out.read_text())
    assert data["matrix"] == [["non_confluent"]]
    assert main(["confluence", "--pairs", "Deg1", "--manifest", str(tmp_path / "m.json")]) == 1


def test_convert(tmp_path, p4):
    out = tmp_path / "p4.g6"
    assert main(["convert", "--in", str(p4), "--out", str(out)]) == 0
    assert out.read_text().strip() == "Ch"
    back = tmp_path / "p4.json"
    assert main(["convert", "--in", str(out), "--out", str(back)]) == 0
    assert read_graph(back) == path(4)


def test_errors_exit_with_code_one(tmp_path, capsys):
    assert main(["kernelize", "--in", str(tmp_path / "missing.gr")]) == 1
    bad = tmp_path / "bad.gr"
    bad.write_text("p td 2 1\n1 3\n")
    assert main(["kernelize", "--in", str(bad)]) == 1
    assert main(["kernelize", "--in", str(bad.with_suffix(".gr")), "--rules", "Nope"]) == 1
    assert capsys.readouterr().err.count("error:") == 3


def test_console_script_entry_point(tmp_path, p4):
    proc = subprocess.run(
        [sys.executable, "-m", "vckernel.cli", "solve", "--in", str(p4), "--manifest", str(tmp_path / "m.json")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout.splitlines()[0] == "2"
