import json
import os

import pytest
import yaml

from trichomp.main import cli_main

CONFIGS = os.path.join(os.path.dirname(__file__), "..", "configs")
CSV_N2 = "q,r,f\n0,0,1\n1,0,2\n1,1,3\n2,0,3\n2,1,2\n2,2,4\n"


def test_compute_stdout(capsys):
    assert cli_main(["compute", "--n", "2"]) == 0
    assert capsys.readouterr().out == CSV_N2
    assert cli_main(["compute", "--n", "0", "--engine", "reference"]) == 0
    assert capsys.readouterr().out == "q,r,f\n0,0,1\n"


@pytest.mark.parametrize("format", ["csv", "jsonl", "runs"])
def test_compute_is_deterministic(tmp_path, format):
    first, second = tmp_path / "first", tmp_path / "second"
    for path in (first, second):
        assert cli_main(["compute", "--n", "30", "--format", format, "--out", str(path)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_compute_errors():
    assert cli_main(["compute", "--n", "3", "--format", "hdf5"]) == 2
    ceiling = ["--memory-ceiling", "1000"]
    assert cli_main(["compute", "--n", "500", "--engine", "reference", *ceiling]) == 3
    with pytest.raises(SystemExit) as info:
        cli_main(["compute", "--n", "3", "--format", "xml"])
    assert info.value.code == 2


def test_sparse_ceiling(capsys):
    ceiling = ["--memory-ceiling", "2000000"]
    # the sparse table fits, its dense copy does not
    assert cli_main(["compute", "--n", "300", *ceiling]) == 0
    streamed = capsys.readouterr().out
    assert cli_main(["compute", "--n", "300", "--engine", "reference"]) == 0
    assert capsys.readouterr().out == streamed
    assert cli_main(["verify", "--n", "300", *ceiling]) == 3
    assert cli_main(["plot", "--n", "300", "--out", "unused.png", *ceiling]) == 3
    assert cli_main(["compute", "--n", "200", "--memory-ceiling", "20000"]) == 3


@pytest.mark.parametrize(
    "n, line",
    [
        (1, "n=1 kind=diagonal cut=2:0 target=1,0,0"),
        (2, "n=2 kind=rowstart cut=3:1 target=2,2,1"),
        (5, "n=5 kind=rowstart cut=3:3 target=5,5,3"),
    ],
)
def test_move(capsys, n, line):
    assert cli_main(["move", "--n", str(n)]) == 0
    assert capsys.readouterr().out == line + "\n"


def test_move_zero():
    with pytest.raises(SystemExit) as info:
        cli_main(["move", "--n", "0"])
    assert info.value.code == 2


def test_query(capsys):
    assert cli_main(["query", "2,2,1"]) == 0
    assert capsys.readouterr().out == "P\n"
    assert cli_main(["query", "2,2,2"]) == 0
    assert capsys.readouterr().out == "N winning: 3:1 -> 2,2,1\n"
    assert cli_main(["query", "1,0,0"]) == 0
    assert capsys.readouterr().out == "P\n"
    assert cli_main(["query", "2,1,3"]) == 2
    assert cli_main(["query", "two"]) == 2


def test_query_several_winning_moves(capsys):
    assert cli_main(["query", "3,1,1"]) == 0
    assert capsys.readouterr().out == "P\n"
    assert cli_main(["query", "3,3,1"]) == 0
    assert capsys.readouterr().out == "N winning: 1:2 -> 2,2,1; 2:1 -> 3,1,1\n"


def test_verify_quick(capsys):
    assert cli_main(["verify", "-c", os.path.join(CONFIGS, "quick.yaml")]) == 0
    reports = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert len(reports) == 10
    assert all(report["passed"] for report in reports)


def test_verify_skips(capsys):
    args = ["verify", "--n", "8", "--oracle-bound", "null", "--cubic-bound", "null"]
    assert cli_main(args) == 0
    assert len(capsys.readouterr().out.splitlines()) == 7


def test_verify_bad_bounds():
    assert cli_main(["verify", "--n", "5", "--oracle-bound", "6"]) == 2


def test_verify_faults(capsys, tmp_path):
    faults_path = tmp_path / "faults.yaml"
    faults_path.write_text(yaml.safe_dump([{"q": 2, "r": 1, "f": 3}]))
    args = ["verify", "--n", "10", "--oracle-bound", "5", "--cubic-bound", "10"]
    assert cli_main([*args, "--faults", str(faults_path)]) == 1
    first = json.loads(capsys.readouterr().out.splitlines()[0])
    assert first["name"] == "recurrence"
    assert first["counterexample"]["q"] == 2


def test_scale(capsys):
    assert cli_main(["scale", "--n", "300"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["name"] == "partition_scan" and report["passed"]


def test_plot(tmp_path):
    out = tmp_path / "table.png"
    assert cli_main(["plot", "--n", "20", "--out", str(out)]) == 0
    assert out.stat().st_size > 0
