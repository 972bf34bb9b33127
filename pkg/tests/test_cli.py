import csv
import io
import json
import math

import pytest

from repi import constants as C
from repi.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_constants(capsys):
    code, out, _ = run(capsys, "constants", "--r", "0.5", "--k", "3")
    data = json.loads(out)
    assert code == EXIT_OK
    assert data["alpha"] == C.alpha(0.5) and data["c_rk_lower"] == C.c_rk_lower(0.5, 3)


def test_entropy_json_round_trips_floats(capsys, tmp_path):
    xy = tmp_path / "grid.txt"
    code, out, _ = run(capsys, "entropy", "--f", "exponential", "rate=1", "--r", "0.5", "--resolution", "200",
                       "--xy", str(xy))
    data = json.loads(out)
    assert code == EXIT_OK and data["closed_form"] == pytest.approx(16.0, rel=1e-15)
    assert data["grid"] == pytest.approx(16.0, rel=1e-4)
    first = xy.read_text().splitlines()[0].split()
    assert float(first[0]) == 0.0 and float(first[1]) == pytest.approx(1.0, rel=1e-5)


def test_entropy_infinite_order(capsys):
    code, out, _ = run(capsys, "entropy", "--f", "gaussian", "--r", "inf")
    assert code == EXIT_OK and json.loads(out)["grid"] == pytest.approx(2 * math.pi, rel=1e-9)


def test_solve(capsys):
    code, out, _ = run(capsys, "solve", "--which", "alpha", "--r", "0.5")
    assert code == EXIT_OK and json.loads(out)["numeric"] == pytest.approx(C.alpha(0.5), abs=1e-8)
    code, out, _ = run(capsys, "--format", "csv", "solve", "--which", "beta-stationary", "--r", "0.3")
    row = next(csv.DictReader(io.StringIO(out)))
    assert float(row["numeric"]) == pytest.approx(C.beta(0.3), abs=1e-8)


def test_verify_pass_and_fail(capsys):
    code, out, _ = run(capsys, "verify", "--claim", "thm1.1", "--f", "exponential", "--g", "exponential",
                       "--r", "0.5")
    assert code == EXIT_OK and json.loads(out)["status"] == "pass"
    crit = C.critical_exponent(0.5)
    code, out, _ = run(capsys, "verify", "--claim", "thm1.1", "--f", "exponential", "--g", "exponential",
                       "--r", "0.5", "--alpha", str(0.99 * crit))
    assert code == EXIT_FAIL and json.loads(out)["status"] == "fail"


def test_verify_precondition_row(capsys):
    code, out, _ = run(capsys, "verify", "--claim", "thm1.1", "--f", "mixture", "--g", "gaussian", "--r", "0.5",
                       "--resolution", "50")
    data = json.loads(out)
    assert code == EXIT_OK and data["status"] == "precondition violated"


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--claim", "thm1.1", "--f", "banana", "--g", "gaussian", "--r", "0.5"],
        ["verify", "--claim", "thm1.2", "--r", "0.5"],
        ["verify", "--claim", "appB", "--r", "0.5"],
        ["solve", "--which", "crk", "--r", "0.5"],
        ["constants", "--r", "1.5"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE and "repi: error" in err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--claim", "nope", "--r", "0.5"])
    assert exc.value.code == 2


def test_sweep_csv_to_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("r = 0.3\nk = 2\nresolution = 50\nfamily = gaussian\nfamily = exponential rate=1\n")
    out = tmp_path / "out.csv"
    code, stdout, _ = run(capsys, "sweep", "--config", str(cfg), "--output", str(out))
    assert code == EXIT_OK and stdout == ""
    rows = list(csv.DictReader(out.open()))
    assert rows and set(rows[0]) == {"claim_id", "r", "family", "margin", "pass"}
    assert all(r["pass"] == "pass" for r in rows)


def test_rearrange(capsys):
    code, out, _ = run(capsys, "rearrange", "--f", "exponential", "--r", "0.5", "--resolution", "500")
    data = json.loads(out)
    assert code == EXIT_OK and data["rel_diff"] < 1e-4
    code, out, _ = run(capsys, "rearrange", "--f", "exponential", "--g", "uniform", "--r", "0.5", "--resolution", "100")
    assert code == EXIT_OK and json.loads(out)["claim_id"] == "thm7.1"


def test_verify_other_claims(capsys):
    for argv in (
        ["--claim", "thm1.2", "--len-a", "1", "--len-b", "2", "--r", "0.5", "--resolution", "100"],
        ["--claim", "thm1.4", "--f", "laplace", "--k", "3", "--r", "0.5", "--resolution", "100"],
        ["--claim", "prop5.1", "--r", "0.5"],
        ["--claim", "lem2.3", "--r", "0.5"],
        ["--claim", "appB", "--x", "0.5", "--y", "1.5", "--r", "0.5"],
        ["--claim", "lem2.2", "--f", "gamma2", "--r", "0.3", "--q", "0.6"],
        ["--claim", "thmA.1", "--f", "uniform", "--r", "0.5", "--resolution", "100"],
        ["--claim", "thm2.1", "--f", "gaussian", "--g", "laplace", "--p", "0.5", "--q", "0.5",
         "--r", str(1 / 3), "--resolution", "100"],
        ["--claim", "consistency", "--f", "gaussian", "--g", "gaussian", "--r", "0.5", "--resolution", "100"],
    ):
        code, out, _ = run(capsys, "verify", *argv)
        assert code == EXIT_OK, (argv, out)
