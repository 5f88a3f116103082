import csv
import io
import json

import mpmath
import pytest

from ddzeta.cli import (EXIT_FAIL, EXIT_OK, EXIT_SINGULAR, EXIT_USAGE, EXIT_ZEROS, UsageError, main,
                        parse_complex, read_config)
from ddzeta.zeta_zeros import default_zeros_path


@pytest.fixture(autouse=True)
def _clean_cwd(tmp_path, monkeypatch):
    # keep a stray ./ddzeta.conf and DDZETA_ZEROS out of the tests
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("DDZETA_ZEROS", raising=False)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_residue_examples(capsys):
    assert run(capsys, "residue", "--m", "2", "--n", "1")[:2] == (EXIT_OK, "-1/12\n")
    assert run(capsys, "residue", "--m", "1", "--n", "2")[:2] == (EXIT_OK, "0\n")
    code, out, err = run(capsys, "residue", "--m", "1", "--n", "1")
    assert code == EXIT_USAGE and ("even" in err or "odd" in err)
    code, out, _ = run(capsys, "residue", "--m", "0", "--n", "1", "--output", "json")
    assert json.loads(out) == {"m": 0, "n": 1, "series": "lambda", "residue": "-1/2"}


def test_residue_mu(capsys):
    code, out, _ = run(capsys, "residue", "--m", "1", "--n", "0", "--series", "mu", "--precision", "30")
    assert code == EXIT_OK
    with mpmath.workdps(30):
        assert abs(mpmath.mpf(out) + 2 * mpmath.pi ** 2 / mpmath.zeta(3)) < 1e-25


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "reciprocity", "--max", "6")
    assert code == EXIT_OK and "failures: 0" in out
    code, out, _ = run(capsys, "verify", "--suite", "saalschutz", "--max", "5", "--output", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and rows and set(rows[0]) == {"case", "inputs", "expected", "actual", "status"}
    assert all(r["status"] == "pass" for r in rows)
    code, out, _ = run(capsys, "verify", "--max", "0", "--output", "json")
    assert code == EXIT_OK and json.loads(out)["cases"] == 0
    assert run(capsys, "verify", "--max", "101")[0] == EXIT_USAGE


def test_eval_is_deterministic(capsys):
    argv = ("eval", "--s1", "3", "--s2", "3", "--precision", "30", "--max-zeros", "30")
    code, first, _ = run(capsys, *argv)
    assert code == EXIT_OK
    _, second, _ = run(capsys, *argv)
    assert first == second
    js = json.loads(first)
    assert js["value"]["re"].startswith("0.0716475750528")
    assert js["params"]["zeros_used"] <= 30


def test_eval_singular(capsys):
    code, out, _ = run(capsys, "eval", "--s1", "0", "--s2", "1", "--precision", "30")
    assert code == EXIT_SINGULAR
    js = json.loads(out)
    assert js["error"] == "singular"
    assert {m["set"] for m in js["matches"]} == {"s2=1", "s1+s2=2-l"}


@pytest.mark.parametrize("bad", ["1,2,3", "abc", "1,", "inf"])
def test_eval_malformed(capsys, bad):
    assert run(capsys, "eval", "--s1", bad, "--s2", "3")[0] == EXIT_USAGE


def test_parse_complex():
    with mpmath.workdps(30):
        assert parse_complex("0.5,-14") == mpmath.mpc("0.5", -14)
        assert parse_complex(" 2 ") == 2
    with pytest.raises(UsageError):
        parse_complex("")


def test_usage_errors(capsys):
    assert run(capsys, "eval", "--s1", "3", "--s2", "3", "--precision", "10")[0] == EXIT_USAGE
    assert run(capsys, "eval", "--s1", "3", "--s2", "3", "--eta", "1.5")[0] == EXIT_USAGE
    assert run(capsys, "eval", "--s1", "3", "--s2", "3", "--max-zeros", "500")[0] == EXIT_USAGE
    assert run(capsys, "eval", "--s1", "3", "--s2", "3", "--series", "phi")[0] == EXIT_USAGE
    assert run(capsys, "nope")[0] == EXIT_USAGE


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "--s1", "3", "--s2", "3", "--cutoff", "2000")
    js = json.loads(out)
    assert code == EXIT_OK and js["tail_is_rigorous"] is False
    assert abs(float(js["value"]["re"]) - 0.0716475750528731) < 10 * float(js["tail_estimate"])
    assert run(capsys, "oracle", "--s1", "0.5", "--s2", "1.2")[0] == EXIT_USAGE


def test_missing_zero_table(capsys, tmp_path, monkeypatch):
    missing = str(tmp_path / "none.txt")
    code, _, err = run(capsys, "eval", "--s1", "3", "--s2", "3", "--zeros-file", missing)
    assert code == EXIT_ZEROS and "not found" in err
    monkeypatch.setenv("DDZETA_ZEROS", missing)
    assert run(capsys, "zeros", "--validate", "3")[0] == EXIT_ZEROS


def test_zeros_import_and_validate(capsys, tmp_path):
    src = default_zeros_path().read_text().splitlines()
    body = [l for l in src if l.strip() and not l.startswith("#")][:12]
    f = tmp_path / "z.txt"
    f.write_text("\n".join(body) + "\n")
    code, out, _ = run(capsys, "zeros", "--import", str(f))
    js = json.loads(out)
    assert code == EXIT_OK and js["count"] == 12 and js["first"].startswith("14.1347251417")
    code, out, _ = run(capsys, "zeros", "--validate", "12", "--zeros-file", str(f), "--precision", "30")
    assert code == EXIT_OK and json.loads(out)["checked"] == 12
    assert run(capsys, "zeros", "--validate", "13", "--zeros-file", str(f))[0] == EXIT_USAGE
    # flip a digit well inside the working precision
    body[3] = body[3][:25] + str((int(body[3][25]) + 5) % 10) + body[3][26:]
    f.write_text("\n".join(body) + "\n")
    assert run(capsys, "zeros", "--validate", "5", "--zeros-file", str(f), "--precision", "30")[0] == EXIT_FAIL


def test_config_file(capsys, tmp_path):
    conf = tmp_path / "ddzeta.conf"
    conf.write_text("# defaults\nprecision = 30\nmax-zeros = 20  # fewer\noutput = text\n")
    assert read_config(conf) == {"precision_decimal": 30, "max_zeros": 20, "output": "text"}
    code, out, _ = run(capsys, "eval", "--s1", "3", "--s2", "3")
    assert code == EXIT_OK and "params.zeros_used:" in out and "params.target_decimal: 30" in out
    # flags beat the file
    code, out, _ = run(capsys, "eval", "--s1", "3", "--s2", "3", "--output", "json", "--max-zeros", "10")
    assert json.loads(out)["params"]["max_zeros"] == 10
    conf.write_text("colour = blue\n")
    assert run(capsys, "residue", "--m", "2", "--n", "1")[0] == EXIT_USAGE
    assert run(capsys, "residue", "--m", "2", "--n", "1", "--config", "missing.conf")[0] == EXIT_USAGE


def test_fit(capsys):
    code, out, _ = run(capsys, "fit", "--m", "0", "--n", "1", "--precision", "30", "--max-zeros", "40")
    js = json.loads(out)
    assert code == EXIT_OK and len(js["ladder"]) == 8
    assert abs(float(js["c1"]["re"]) - 0.5) < 1e-10
    code, out, _ = run(capsys, "fit", "--m", "0", "--n", "0", "--ladder-start", "1", "--ladder-len", "4",
                       "--precision", "30")
    assert code == EXIT_SINGULAR and json.loads(out)["error"] == "singular"
    assert run(capsys, "fit", "--m", "0", "--n", "1", "--ladder-len", "3")[0] == EXIT_USAGE
