import io
import json
import subprocess
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from fcvt.cli import main, read_dataset

DATA = Path(__file__).parent / "data"
GOLDEN_CSV = DATA / "golden_h0.csv"


def schema(name):
    return json.loads(resources.files("fcvt").joinpath(f"schemas/{name}.schema.json").read_text())


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def write(path, text, newline="\n"):
    path.write_bytes(text.replace("\n", newline).encode())
    return path


class TestTestCommand:
    def test_golden(self):
        code, out = run("test", "--data", str(GOLDEN_CSV), "--response", "y", "--format", "json")
        assert code == 0
        got = json.loads(out)
        want = json.loads((DATA / "golden_h0.json").read_text())
        jsonschema.validate(got, schema("test_report"))
        assert got.keys() == want.keys()
        for k, v in want.items():
            if isinstance(v, float):
                assert got[k] == pytest.approx(v, rel=1e-9, abs=1e-12), k
            else:
                assert got[k] == v, k
        assert 0 < got["p_value"] < 1

    def test_text_matches_json(self):
        _, js = run("test", "--data", str(GOLDEN_CSV), "--response", "y", "--format", "json")
        _, txt = run("test", "--data", str(GOLDEN_CSV), "--response", "y")
        report = json.loads(js)
        lines = dict(line.split(None, 1) for line in txt.strip().splitlines())
        for key in ("T", "a", "b", "z", "p_value", "alpha", "tr_P_hadamard"):
            assert lines[key].strip() == f"{report[key]:.6g}"
        assert lines["reject"].strip() == str(report["reject"]).lower()
        assert int(lines["n"]) == report["n"]

    def test_response_by_index(self):
        _, by_name = run("test", "--data", str(GOLDEN_CSV), "--response", "y", "--format", "json")
        _, by_index = run("test", "--data", str(GOLDEN_CSV), "--response", "3", "--format", "json")
        assert by_name == by_index

    def test_no_intercept_and_moments(self):
        code, out = run("test", "--data", str(GOLDEN_CSV), "--response", "y", "--no-intercept",
                        "--moments", "1", "1", "1", "--format", "json")
        rep = json.loads(out)
        assert code == 0 and rep["p"] == 3 and rep["profile"]["M4"] == 1.0

    def test_two_sided(self):
        _, one = run("test", "--data", str(GOLDEN_CSV), "--response", "y", "--format", "json")
        _, two = run("test", "--data", str(GOLDEN_CSV), "--response", "y", "--format", "json", "--two-sided")
        assert json.loads(two)["p_value"] == pytest.approx(2 * json.loads(one)["p_value"])

    def test_crlf_and_lf_parse_identically(self, tmp_path):
        text = GOLDEN_CSV.read_text()
        lf = write(tmp_path / "lf.csv", text)
        crlf = write(tmp_path / "crlf.csv", text, "\r\n")
        a, b = read_dataset(lf, "y"), read_dataset(crlf, "y")
        assert a.header == b.header and np.array_equal(a.rows, b.rows)
        assert run("test", "--data", str(lf), "--response", "y") == run("test", "--data", str(crlf), "--response", "y")

    def test_duplicated_column(self, tmp_path, capsys):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((30, 2))
        rows = ["u,v,u_copy,y"] + [f"{a},{b},{a},{c}" for (a, b), c in zip(X, rng.standard_normal(30))]
        path = write(tmp_path / "dup.csv", "\n".join(rows) + "\n")
        code, _ = run("test", "--data", str(path), "--response", "y")
        err = capsys.readouterr().err
        assert code == 3
        assert "RankDeficient" in err and "u, u_copy" in err
        assert len(err.strip().splitlines()) == 1

    def test_degenerate_residuals(self, tmp_path, capsys):
        rows = ["x,y"] + [f"{i},{2 * i + 1}" for i in range(10)]
        path = write(tmp_path / "exact.csv", "\n".join(rows) + "\n")
        assert run("test", "--data", str(path), "--response", "y")[0] == 3
        assert "DegenerateResiduals" in capsys.readouterr().err

    @pytest.mark.parametrize(
        "body, message",
        [
            ("x,y\n1,2\n3,\n", "missing value"),
            ("x,y\n1,2\n3,NA\n", "missing value"),
            ("x,y\n1,2\n3,4,5\n", "expected 2 cells"),
            ("x,y\n1,2\n3,four\n", "non-numeric"),
            ("x,y\n1,2\n3,1e999\n", "non-finite"),
            ("x,y\n1,2\n3,4\n", "not found"),
            ("", "empty file"),
            ("x,y\n", "no data rows"),
        ],
    )
    def test_parse_errors(self, tmp_path, capsys, body, message):
        path = write(tmp_path / "bad.csv", body)
        response = "z" if message == "not found" else "y"
        assert run("test", "--data", str(path), "--response", response)[0] == 2
        assert message in capsys.readouterr().err

    def test_decimal_comma_is_not_a_number(self, tmp_path, capsys):
        path = write(tmp_path / "comma.csv", 'x,y\n"1,5",2\n2,3\n3,5\n')
        assert run("test", "--data", str(path), "--response", "y")[0] == 2

    def test_missing_file(self, tmp_path):
        assert run("test", "--data", str(tmp_path / "nope.csv"), "--response", "y")[0] == 2

    def test_too_many_rows(self, tmp_path, capsys):
        rows = ["x,y"] + [f"{i % 7},{i % 5}" for i in range(4097)]
        path = write(tmp_path / "big.csv", "\n".join(rows) + "\n")
        assert run("test", "--data", str(path), "--response", "y")[0] == 2
        assert "4096" in capsys.readouterr().err


class TestSimulateCommand:
    ARGS = ("simulate", "--n", "48", "--p", "4", "--reps", "200", "--seed", "1")

    def test_deterministic_bytes(self):
        a, b = run(*self.ARGS), run(*self.ARGS)
        assert a[0] == 0 and a == b
        jsonschema.validate(json.loads(a[1]), schema("simulation_result"))

    def test_text_matches_json(self):
        _, js = run(*self.ARGS)
        _, txt = run(*self.ARGS, "--format", "text")
        d = json.loads(js)
        lines = dict(line.split(None, 1) for line in txt.strip().splitlines())
        for key in ("rejection_rate", "mean_T", "mean_a"):
            assert lines[key].strip() == f"{d[key]:.6g}"

    def test_odd_p_model2(self, capsys):
        assert run("simulate", "--n", "20", "--p", "3", "--model", "model2")[0] == 3
        assert "OddPForModel2" in capsys.readouterr().err

    @pytest.mark.parametrize("extra", [("--design", "cauchy"), ("--reps", "ten"), ("--alpha", "2")])
    def test_bad_flags(self, extra):
        assert run("simulate", "--n", "20", "--p", "2", *extra)[0] == 2


class TestValidateCommand:
    @pytest.mark.parametrize("sigma", ["const", "half2"])
    def test_exact_rows_pass(self, sigma):
        code, out = run("validate", "--n", "8", "--p", "2", "--sigma", sigma, "--format", "json")
        table = json.loads(out)
        jsonschema.validate(table, schema("validation_table"))
        assert code == 0 and table["passed"]
        exact = [r for r in table["rows"] if r["mode"] == "exact"]
        assert [r["quantity"] for r in exact] == ["ET1", "ET2", "VarT1"]
        assert all(r["rel_error"] <= 1e-8 for r in exact)

    def test_text_table(self):
        code, out = run("validate", "--n", "6", "--p", "1")
        assert code == 0 and out.count("PASS") == 3 and out.count("ratio=") == 2

    def test_too_large(self, capsys):
        assert run("validate", "--n", "30")[0] == 2
        assert "TooLarge" in capsys.readouterr().err

    def test_failed_row_exits_one(self, monkeypatch):
        import fcvt.cli as cli

        monkeypatch.setattr(cli, "EXACT_RTOL", -1.0)
        assert run("validate", "--n", "6", "--p", "1")[0] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fcvt", "validate", "--n", "30"], capture_output=True, text=True)
    assert proc.returncode == 2 and "TooLarge" in proc.stderr
    proc = subprocess.run([sys.executable, "-m", "fcvt", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "simulate" in proc.stdout
