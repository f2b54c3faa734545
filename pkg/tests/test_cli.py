import json
import shutil
import subprocess
import sys

import pytest

from arrtopo.cli import EXIT_INPUT, EXIT_MISMATCH, EXIT_PASS, EXIT_UNSTABLE, default_seed, main, worst
from conftest import CORPUS_DIR

BOOLEAN3 = str(CORPUS_DIR.joinpath("boolean3.arr"))
BRAID3 = str(CORPUS_DIR.joinpath("braid3.arr"))
GENERIC4 = str(CORPUS_DIR.joinpath("generic4.arr"))


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_text(capsys):
    code, out, _ = run(capsys, "analyze", BOOLEAN3)
    assert code == EXIT_PASS
    assert "gradient degree     1" in out


def test_analyze_json_braid(capsys):
    code, out, _ = run(capsys, "analyze", BRAID3, "--json")
    rep = json.loads(out)
    assert code == EXIT_PASS
    assert rep["essential"] is False and rep["gradient_degree"] == 0


def test_analyze_dot(tmp_path, capsys):
    dot = tmp_path / "l.dot"
    assert run(capsys, "analyze", BOOLEAN3, "--dot", str(dot))[0] == EXIT_PASS
    assert dot.read_text().startswith("digraph")


def test_analyze_missing_file(capsys):
    code, _, err = run(capsys, "analyze", "missing.arr")
    assert code == EXIT_INPUT and "missing.arr" in err


def test_analyze_reports_line_of_bad_input(tmp_path, capsys):
    bad = tmp_path / "bad.arr"
    bad.write_text("2 2\n1 0\n2 0\n")
    code, _, err = run(capsys, "analyze", str(bad))
    assert code == EXIT_INPUT and "line 3" in err and "proportional" in err


def test_verify_thm1(capsys):
    code, out, _ = run(capsys, "verify", "thm1", GENERIC4, "--seed", "7", "--json")
    rows = json.loads(out)
    assert code == EXIT_PASS
    assert [r["observation"] for r in rows] == [3, 3]
    assert {r["certification"] for r in rows} == {"exact", "numeric-stable"}
    for r in rows:
        assert {"engine", "input_hash", "prediction", "observation", "match", "provenance"} <= set(r)


def test_verify_thm2(capsys):
    code, out, _ = run(capsys, "verify", "thm2", BOOLEAN3, "-e", "2", "--seed", "7", "--json")
    (row,) = json.loads(out)
    assert code == EXIT_PASS and row["prediction"] == row["observation"] == 8


def test_verify_pointcount(capsys):
    code, out, _ = run(capsys, "verify", "pointcount", BRAID3, "--primes", "5,7,11,13", "--json")
    rows = json.loads(out)
    assert code == EXIT_PASS
    assert sum(r["check"].startswith("pointcount[q=") for r in rows) == 4
    assert all(r["match"] for r in rows)


@pytest.mark.parametrize("check", ["lemma7", "zaslavsky", "remark8"])
def test_verify_other_checks(capsys, check):
    assert run(capsys, "verify", check, GENERIC4)[0] == EXIT_PASS


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "pointcount", BRAID3, "--primes", "4"],
        ["verify", "pointcount", BRAID3, "--primes", "a,b"],
        ["verify", "thm2", BOOLEAN3, "-e", "3"],
        ["verify", "thm1", "nowhere.arr"],
    ],
)
def test_verify_input_errors(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_INPUT


def test_json_output_is_reproducible(capsys):
    first = run(capsys, "verify", "thm1", GENERIC4, "--json")[1]
    second = run(capsys, "verify", "thm1", GENERIC4, "--json")[1]
    assert first == second


def test_arr_seed_env(monkeypatch):
    monkeypatch.setenv("ARR_SEED", "11")
    assert default_seed() == 11
    monkeypatch.delenv("ARR_SEED")
    assert default_seed() == 0


def test_worst_outcome_ordering():
    assert worst([EXIT_PASS, EXIT_UNSTABLE]) == EXIT_UNSTABLE
    assert worst([EXIT_UNSTABLE, EXIT_INPUT]) == EXIT_INPUT
    assert worst([EXIT_INPUT, EXIT_MISMATCH, EXIT_PASS]) == EXIT_MISMATCH
    assert worst([]) == EXIT_PASS


def test_corpus_with_corrupted_file(tmp_path, capsys):
    shutil.copy(CORPUS_DIR.joinpath("points3.arr"), tmp_path / "points3.arr")
    (tmp_path / "broken.arr").write_text("3 2\n1 0 0\n")
    code, out, _ = run(capsys, "corpus", str(tmp_path), "--json")
    report = json.loads(out)
    assert code == report["exit"] != EXIT_PASS
    files = [r["file"] for r in report["rows"]]
    assert files == sorted(files)
    broken = [r for r in report["rows"] if r["file"] == "broken.arr"]
    assert broken and broken[0]["exit"] == EXIT_INPUT
    assert all(r["exit"] == EXIT_PASS for r in report["rows"] if r["file"] == "points3.arr")


def test_corpus_empty_directory(tmp_path, capsys):
    assert run(capsys, "corpus", str(tmp_path))[0] == EXIT_INPUT


def test_console_script_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "arrtopo.cli", "analyze", BRAID3, "--json"],
        capture_output=True, text=True,
    )
    assert out.returncode == 0 and json.loads(out.stdout)["gradient_degree"] == 0


def test_corpus_output_independent_of_jobs(tmp_path, capsys):
    for name in ("points3.arr", "boolean2.arr"):
        shutil.copy(CORPUS_DIR.joinpath(name), tmp_path / name)
    serial = run(capsys, "corpus", str(tmp_path), "--json")
    parallel = run(capsys, "corpus", str(tmp_path), "--json", "--jobs", "2")
    assert serial[0] == parallel[0] == EXIT_PASS
    assert serial[1] == parallel[1]
