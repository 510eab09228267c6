import csv
import json

import pytest

from dkcheck.cli import run
from dkcheck.gallery import build
from dkcheck.kripke import save


def test_check_quiet_exit_codes(capsys):
    base = ["check", "--model", "appendix_a", "--world", "s2", "--formula", "D{a,b} p", "--quiet"]
    assert run([*base, "--variant", "intersection"]) == 0
    assert run([*base, "--variant", "fullcomm"]) == 1
    assert run([*base, "--variant", "(L0,single,Omega,all)"]) == 2
    assert "--variant" in capsys.readouterr().err


def test_check_prints_verdict(capsys):
    assert run(["check", "--model", "moore", "--formula", "[b]p"]) == 0
    assert capsys.readouterr().out.strip() == "true"


def test_check_all_variants_table(capsys):
    assert run(["check", "--model", "appendix-a", "--formula", "D{a,b} p", "--all-variants"]) == 0
    rows = capsys.readouterr().out.strip().splitlines()
    assert len(rows) == 12
    assert rows[0].split() == ["(cap,-,-,all)", "true"]
    assert all(r.split()[1] == "false" for r in rows[2:])


def test_check_json(capsys):
    assert run(["check", "--model", "intro", "--formula", "D{a,b} q", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out == {"world": "pq", "formula": "D{a,b} q", "variant": "(L0,single,sim,all)", "verdict": True}


@pytest.mark.parametrize("argv, needle", [
    (["check", "--model", "appendix_a", "--formula", "D{a,b p"], "--formula"),
    (["check", "--model", "missing.json", "--formula", "p"], "--model"),
    (["check", "--model", "moore", "--world", "zz", "--formula", "p"], "--world"),
    (["check", "--model", "moore", "--formula", "r"], "undeclared atoms"),
    (["bisim", "--model", "moore", "--atoms", "r"], "--atoms"),
    (["diff", "--count", "0"], "--count"),
])
def test_usage_errors_name_the_culprit(capsys, argv, needle):
    assert run(argv) == 2
    assert needle in capsys.readouterr().err


def test_argparse_errors_exit_two(capsys):
    assert run(["check", "--model", "moore"]) == 2
    assert run(["frobnicate"]) == 2
    assert run(["--help"]) == 0


def test_model_file_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"worlds": ["x"], "agents": ["a"], "atoms": [],
                               "relations": {"a": [["x", "y"]]}, "frame": "K"}))
    assert run(["check", "--model", str(bad), "--formula", "true"]) == 2
    err = capsys.readouterr().err
    assert "bad.json" in err and "'y'" in err


def test_model_file_round_trip(tmp_path, capsys):
    path = tmp_path / "intro.json"
    save(build("intro").model, path)
    assert run(["check", "--model", str(path), "--world", "pq", "--formula", "[b]p", "--quiet"]) == 0


def test_bisim(capsys):
    assert run(["bisim", "--model", "appendix_a", "--atoms", "p"]) == 0
    assert capsys.readouterr().out.splitlines() == ["s1 s2 s3", "t1 t2 t3"]
    assert run(["bisim", "--model", "appendix_a", "--atoms", "", "--json", "--pairs"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["classes"] == [["s1", "s2", "s3", "t1", "t2", "t3"]]
    assert all(same for _, _, same in out["pairs"])


def test_simulate(tmp_path, capsys):
    script = tmp_path / "pool.txt"
    script.write_text("# pooling\nb: p\na: q\n")
    assert run(["simulate", "--model", "intro", "--script", str(script), "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert [s["correct"] for s in out["steps"]] == [True, True]
    assert out["neighborhoods"]["a"] == ["pq"]


def test_simulate_errors_name_the_line(tmp_path, capsys):
    script = tmp_path / "bad.txt"
    script.write_text("b: p\nz: q\n")
    assert run(["simulate", "--model", "intro", "--script", str(script)]) == 2
    assert "bad.txt:2" in capsys.readouterr().err
    script.write_text("b: p\na: D{a} q\n")
    assert run(["simulate", "--model", "intro", "--script", str(script)]) == 2
    assert "bad.txt:2" in capsys.readouterr().err


def test_simulate_flags_incorrect_step(tmp_path, capsys):
    script = tmp_path / "wrong.txt"
    script.write_text("a: p\n")
    assert run(["simulate", "--model", "appendix_a", "--world", "s1", "--script", str(script)]) == 0
    assert "INCORRECT" in capsys.readouterr().out


def test_diff_writes_report_and_plots(tmp_path, capsys):
    out = tmp_path / "report.json"
    plots = tmp_path / "plots"
    argv = ["diff", "--seed", "3", "--count", "25", "--out", str(out), "--plot-dir", str(plots)]
    assert run(argv) == 0
    text = capsys.readouterr().out
    assert "discrepancies: 0" in text
    report = json.loads(out.read_text())
    assert report["instance_count"] == 25 and report["discrepancies"] == []
    for name in ("agreement.png", "verdicts.png", "agreement.csv"):
        assert (plots / name).stat().st_size > 0
    with (plots / "agreement.csv").open(newline="") as fh:
        header = next(csv.reader(fh))
    assert header[0] == "variant" and len(header) == 15


def test_diff_json_is_deterministic(capsys):
    run(["diff", "--seed", "4", "--count", "15", "--json"])
    first = capsys.readouterr().out
    run(["diff", "--seed", "4", "--count", "15", "--json"])
    assert capsys.readouterr().out == first


def test_diff_size_bound_refusals_are_reported(capsys):
    assert run(["diff", "--count", "10", "--bound", "0", "--max-atoms", "2", "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["refusals"] > 0


@pytest.mark.parametrize("name", ["appendix-a", "moore", "intro", "circularity"])
def test_demo(capsys, name):
    assert run(["demo", name]) == 0
    out = capsys.readouterr().out
    assert "[PASS]" in out and "[FAIL]" not in out
