import csv
import io
import json
import subprocess
import sys

import pytest

from qppturbo import cli
from qppturbo.dataset import LteRow, lte_table_text


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, "--json", *argv)
    return code, json.loads(out)


def test_check(capsys):
    code, rep = run_json(capsys, "check", "40", "3", "10")
    assert code == 0
    assert rep["command"] == "check"
    # gcd(1!, 40) * gcd(2!, 40) quadratic inverses
    assert rep["results"] == {"valid": True, "irreducible": True, "inverse_degree": 2, "inverse_count": 2,
                              "qc_period": 2}
    assert set(rep) == {"command", "inputs", "results", "dataset_version", "version", "timing"}


def test_check_invalid(capsys):
    code, rep = run_json(capsys, "check", "256", "2", "32")
    assert code == 0 and rep["results"] == {"valid": False}


def test_inverse(capsys):
    code, rep = run_json(capsys, "inverse", "640", "141", "120")
    assert code == 0
    g1, g2 = rep["results"]["inverse"]
    assert all((g1 * y + g2 * y * y) % 640 == x for x, y in ((x, (141 * x + 120 * x * x) % 640) for x in range(640)))


def test_inverse_of_non_permutation(capsys):
    code, _, err = run(capsys, "inverse", "256", "2", "32")
    assert code == 2 and "not a permutation" in err


def test_bounds_text_and_csv(capsys):
    code, out, _ = run(capsys, "bounds", "496")
    assert code == 0 and "combined_bound: 38" in out
    code, out, _ = run(capsys, "--csv", "bounds", "496", "--class", "cubic")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and list(rows[0]) == ["rule", "applicable", "bound", "params"]
    assert "cubic_universal" in {r["rule"] for r in rows}
    code, out, _ = run(capsys, "--csv", "bounds", "496", "--class", "cubic", "--no-cubic-universal")
    assert "cubic_universal" not in out


def test_bounds_other_encoder(capsys):
    code, rep = run_json(capsys, "bounds", "40", "--class", "quadratic", "--feedback", "0b10011",
                         "--feedforward", "0b11011")
    assert code == 0 and rep["results"]["combined_bound"] == 82 and rep["results"]["nu"] == 4


def test_dmin_exact(capsys):
    code, rep = run_json(capsys, "dmin", "40", "3", "10")
    assert code == 0
    assert (rep["results"]["dmin"], rep["results"]["multiplicity"], rep["results"]["exact"]) == (17, 11, True)
    assert len(rep["results"]["witnesses"]) <= 8


def test_dmin_estimate(capsys):
    code, rep = run_json(capsys, "dmin", "40", "3", "10", "--method", "estimate")
    assert code == 0 and rep["results"]["dmin"] == 17 and rep["results"]["exact"] is False


def test_dmin_budget_exit_code(capsys, monkeypatch):
    code, rep = run_json(capsys, "dmin", "128", "15", "32", "--budget", "1000")
    assert code == 3 and "budget" in rep["results"]["note"]
    monkeypatch.setenv("QPP_BUDGET_NODES", "1000")
    code, _, err = run(capsys, "dmin", "128", "15", "32")
    assert code == 3 and "budget" in err


@pytest.mark.parametrize("argv", [
    ["dmin", "40", "3", "10", "--nu", "4"],
    ["dmin", "40", "3", "10", "--feedback", "0b1101"],
    ["dmin", "256", "2", "32"],
    ["dmin", "56", "3", "14", "--mode", "tailbiting"],
    ["frobnicate"],
    ["dmin", "40", "3"],
])
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_json_is_deterministic(capsys):
    reps = []
    for _ in range(2):
        _, rep = run_json(capsys, "dmin", "48", "7", "12")
        rep.pop("timing")
        rep["results"].pop("nodes")
        reps.append(json.dumps(rep, sort_keys=True))
    assert reps[0] == reps[1]


def test_search_csv(capsys):
    code, out, _ = run(capsys, "--csv", "--threads", "1", "search", "32", "--limit", "3")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 3
    assert list(rows[0]) == ["N", "f1", "f2", "dmin", "multiplicity", "exact", "bound", "inverse_degree"]
    assert int(rows[0]["dmin"]) >= int(rows[-1]["dmin"])


def test_regress(capsys):
    code, rep = run_json(capsys, "regress", "--max-n", "48")
    assert code == 0
    assert (rep["results"]["passed"], rep["results"]["failed"]) == (2, 0)


def test_regress_mismatch(capsys, monkeypatch):
    monkeypatch.setattr(cli, "load_lte_table", lambda: [LteRow(40, 3, 10, 18, 11)])
    code, _, err = run(capsys, "regress")
    assert code == 4 and "mismatch" in err


def test_lte_table(capsys):
    code, out, _ = run(capsys, "lte-table", "--dump")
    assert code == 0 and out == lte_table_text()
    code, rep = run_json(capsys, "lte-table")
    assert len(rep["results"]["rows"]) == 188


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "qppturbo", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("qppturbo ")
