import io
import subprocess
import sys
from pathlib import Path

import pytest

from chainwalk.cli import fmt_decimal, main

HERE = Path(__file__).parent
GOLDEN = HERE / "golden"
CORPUS = HERE / "corpus"

GOLDEN_CASES = {
    "solve_ruin_1_2.tsv": ["solve", "--model", "ruin", "--left", "1", "--right", "2", "--format", "tsv"],
    "solve_ruin_1_2.txt": ["solve", "--model", "ruin", "--left", "1", "--right", "2"],
    "solve_moran_10_3.tsv": ["solve", "--model", "moran", "--n", "10", "--k", "3", "--format", "tsv"],
    "solve_drunkard_10.tsv": ["solve", "--model", "drunkard", "--n", "10", "--format", "tsv"],
    "solve_short_table_survival.tsv": ["solve", str(CORPUS / "table_digraph.chain"), "--survival", "3",
                                       "--format", "tsv"],
    "solve_graph_dog.tsv": ["solve", "--model", "graph", "--edges", "h-a,a-b,b-c,c-a", "--targets", "h",
                            "--graph-start", "b", "--dog-start", "c", "--format", "tsv"],
    "simulate_ruin_3_7.tsv": ["simulate", "--model", "ruin", "--left", "3", "--right", "7",
                              "--trials", "100000", "--seed", "42", "--format", "tsv"],
    "simulate_moran_10_3.txt": ["simulate", "--model", "moran", "--n", "10", "--k", "3",
                                "--trials", "20000", "--seed", "7"],
    "simulate_costs_file.tsv": ["simulate", str(CORPUS / "costs.chain"), "--trials", "5000", "--seed", "3",
                                "--format", "tsv"],
    "model_ruin_1_2.chain": ["model", "ruin", "--left", "1", "--right", "2", "--emit"],
    "model_moran_4_1.chain": ["model", "moran", "--n", "4", "--k", "1", "--emit"],
    "calibrate_1_100.txt": ["calibrate", "--half-width", "1", "--mean-steps", "100"],
    "lottery_expected_10.txt": ["lottery", "--expected", "--max-tosses", "10"],
    "lottery_running_20.txt": ["lottery", "--max-tosses", "20", "--plays", "1000", "--seed", "5",
                               "--every", "250"],
    "series_start_2.txt": ["series", "--start", "2", "--tol", "1e-12"],
    "renewal_10000.txt": ["renewal", "--steps", "10000", "--seed", "1"],
}


def run(argv):
    out = io.StringIO()
    code = main(argv, out)
    return code, out.getvalue()


@pytest.mark.parametrize("name", sorted(GOLDEN_CASES))
def test_golden(name):
    code, text = run(GOLDEN_CASES[name])
    assert code == 0
    assert text == (GOLDEN / name).read_text(encoding="utf-8")


def test_ruin_absorb_right_line():
    _, text = run(GOLDEN_CASES["solve_ruin_1_2.tsv"])
    assert "absorb_right\t1\t1/3\t0.333333333333" in text.splitlines()


def test_moran_fixation_line():
    _, text = run(GOLDEN_CASES["solve_moran_10_3.tsv"])
    assert "absorb_green\t3\t3/10\t0.3" in text.splitlines()


def test_drunkard_lines():
    lines = run(GOLDEN_CASES["solve_drunkard_10.tsv"])[1].splitlines()
    assert "expected_cost\t0\t100\t100" in lines
    assert "returns\t0\t9\t9" in lines


def test_simulate_frequency_close():
    _, text = run(GOLDEN_CASES["simulate_ruin_3_7.tsv"])
    row = next(line.split("\t") for line in text.splitlines() if line.startswith("absorb_right"))
    assert abs(float(row[2]) - 0.3) < 0.01


def test_simulate_repeatable_with_workers():
    argv = GOLDEN_CASES["simulate_ruin_3_7.tsv"]
    assert run(argv)[1] == run(argv + ["--workers", "4"])[1]


def test_emit_matches_model_golden():
    assert run(GOLDEN_CASES["model_ruin_1_2.chain"])[1] == (GOLDEN / "ruin_1_2.chain").read_text()


def test_missing_file(capsys):
    code, _ = run(["solve", "missing.chain"])
    assert code == 1
    assert "missing.chain" in capsys.readouterr().err


def test_bad_file_diagnostic(tmp_path, capsys):
    bad = tmp_path / "bad.chain"
    bad.write_text("state end absorbing\nstate mid\nedge mid end 0.9\n")
    assert run(["solve", str(bad)])[0] == 1
    err = capsys.readouterr().err
    assert "bad.chain:2:7" in err and "sum to 9/10" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["simulate", "--model", "ruin", "--left", "1", "--right", "2", "--trials", "0"],
        ["solve"],
        ["solve", "--model", "ruin", "--left", "1"],
        ["calibrate", "--half-width", "0", "--mean-steps", "1"],
        ["frobnicate"],
        ["simulate", str(CORPUS / "three_exits.chain"), "--trials", "10"],
    ],
)
def test_usage_errors(argv, capsys):
    assert run(argv)[0] == 2


def test_domain_errors(capsys):
    assert run(["solve", "--model", "ruin", "--left", "0", "--right", "2"])[0] == 1
    assert run(["solve", "--model", "graph", "--edges", "a-b,c-d", "--targets", "a"])[0] == 1
    code = run(["simulate", "--model", "drunkard", "--n", "30", "--trials", "10", "--max-steps", "3"])[0]
    assert code == 1
    assert "trial 0" in capsys.readouterr().err


def test_subprocess_byte_identical():
    argv = [sys.executable, "-m", "chainwalk", *GOLDEN_CASES["simulate_moran_10_3.txt"]]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b
    assert a.decode() == (GOLDEN / "simulate_moran_10_3.txt").read_text()


@pytest.mark.parametrize(
    "value, text",
    [(1 / 3, "0.333333333333"), (100, "100"), (0, "0"), (0.05, "0.05"), (2 / 3, "0.666666666667"),
     (1e-20, "0.00000000000000000001"), (123456789012345, "123456789012000")],
)
def test_fmt_decimal(value, text):
    assert fmt_decimal(value) == text
