"""CLI plumbing tests: spec loading, one in-process run per subcommand,
exit codes, output formats, and byte-identical reruns."""

import json
import subprocess
from pathlib import Path

import pytest

from bconv.cli import dispatch, load_system_spec

DATA = Path(__file__).parent / "data"
GOLDEN_SPEC = DATA / "golden-1d.json"
THIRD_SPEC = DATA / "third-1d.json"
PAIR_CSV = DATA / "pair.csv"

# several fixtures put atoms exactly on dyadic cell boundaries; the nudge
# warning is exercised on purpose in the entropy tests, not here
pytestmark = pytest.mark.filterwarnings("ignore::bconv.errors.BoundaryHazardWarning")


def run_json(argv, tmp_path, name="out.json"):
    out = tmp_path / name
    code = dispatch([*argv, "--out", str(out)])
    assert code == 0, argv
    return json.loads(out.read_bytes())


class TestLoadSystemSpec:
    def test_golden_fixture_loads(self):
        s = load_system_spec(GOLDEN_SPEC)
        assert s.dim == 1
        assert s.translations == ((1,), (-1,))
        assert s.probs == (0.5, 0.5)
        assert s.minpolys is not None and s.minpolys[0].coeffs == (-1, 1, 1)

    def test_minpolys_optional(self, tmp_path):
        p = tmp_path / "s.json"
        p.write_text('{"lambda": [0.5], "maps": [{"a": [1], "p": 0.5}, {"a": [-1], "p": 0.5}]}')
        assert load_system_spec(p).minpolys is None

    def test_malformed_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        with pytest.raises(ValueError, match="malformed system spec"):
            load_system_spec(p)

    def test_non_object(self, tmp_path):
        p = tmp_path / "arr.json"
        p.write_text("[1, 2]")
        with pytest.raises(ValueError, match="JSON object"):
            load_system_spec(p)

    def test_missing_keys(self, tmp_path):
        p = tmp_path / "k.json"
        p.write_text('{"lambda": [0.5]}')
        with pytest.raises(ValueError, match="'lambda' and 'maps'"):
            load_system_spec(p)

    def test_empty_lambda(self, tmp_path):
        p = tmp_path / "l.json"
        p.write_text('{"lambda": [], "maps": [{"a": [1], "p": 0.5}, {"a": [0], "p": 0.5}]}')
        with pytest.raises(ValueError, match="nonempty"):
            load_system_spec(p)

    def test_too_few_maps(self, tmp_path):
        p = tmp_path / "m.json"
        p.write_text('{"lambda": [0.5], "maps": [{"a": [1], "p": 1.0}]}')
        with pytest.raises(ValueError, match="at least two"):
            load_system_spec(p)

    def test_map_missing_fields(self, tmp_path):
        p = tmp_path / "f.json"
        p.write_text('{"lambda": [0.5], "maps": [{"a": [1]}, {"a": [0], "p": 0.5}]}')
        with pytest.raises(ValueError, match="'a' and 'p'"):
            load_system_spec(p)


class TestSubcommands:
    def test_dim(self, tmp_path):
        got = run_json(["dim", "--spec", str(THIRD_SPEC), "--n", "8"], tmp_path)
        assert got["rows"][0]["n"] == 8
        assert got["rows"][0]["kappa"] == pytest.approx(1.0, abs=1e-12)
        assert got["rows"][0]["dim_estimate"] == pytest.approx(0.6309297535714574, abs=1e-9)
        assert got["lyapunov"] == pytest.approx(0.6309297535714574, abs=1e-9)
        assert got["gamma"] == got["lyapunov"]
        assert got["m"] == 0

    def test_entropy(self, tmp_path):
        got = run_json(
            ["entropy", "--measure", str(PAIR_CSV), "--lam", "0.5", "--n", "1"], tmp_path
        )
        assert got["value"] == pytest.approx(1.0, abs=1e-12)
        assert got["method"] == "partition"

    def test_avg_entropy_exact(self, tmp_path):
        got = run_json(["avg-entropy", "--measure", str(PAIR_CSV), "--r", "1"], tmp_path)
        assert got["value"] == pytest.approx(1.0, abs=1e-12)
        assert got["method"] == "exact"
        assert got["error_bound"] <= 1e-9

    def test_avg_entropy_conditional(self, tmp_path):
        got = run_json(
            ["avg-entropy", "--measure", str(PAIR_CSV), "--r", "1", "--r2", "2"], tmp_path
        )
        assert got["value"] == pytest.approx(0.5, abs=1e-12)

    def test_rw_entropy(self, tmp_path):
        got = run_json(["rw-entropy", "--spec", str(GOLDEN_SPEC), "--n", "3..4"], tmp_path)
        assert [r["n"] for r in got["rows"]] == [3, 4]
        assert got["rows"][0]["value"] == pytest.approx(2.75 / 3, abs=1e-12)
        assert got["rows"][0]["distinct_maps"] == 7
        assert got["rows"][0]["arithmetic"] == "exact"
        assert got["rows"][0]["collision_note"] == "collision detected"
        assert got["rows"][1]["value"] == pytest.approx(0.875, abs=1e-12)

    def test_overlap(self, tmp_path):
        got = run_json(["overlap", "--spec", str(GOLDEN_SPEC), "--n", "5"], tmp_path)
        assert got["per_axis"] == [3]
        assert got["joint"] == 3

    def test_separation(self, tmp_path):
        got = run_json(["separation", "--spec", str(THIRD_SPEC), "--n", "3"], tmp_path)
        gaps = [r["gap"] for r in got["rows"]]
        assert gaps == pytest.approx([2.0, 2.0 / 3.0, 2.0 / 9.0], rel=1e-12)

    def test_nonsat(self, tmp_path):
        got = run_json(
            [
                "nonsat",
                "--measure",
                str(PAIR_CSV),
                "--lam",
                "0.5",
                "--eps",
                "0.1",
                "--m",
                "2",
                "--n",
                "1..3",
            ],
            tmp_path,
        )
        assert got["non_saturated"] is True
        assert all(r["value"] == 0.0 for r in got["rows"])
        assert len(got["rows"]) == 3

    def test_decompose(self, tmp_path):
        got = run_json(
            [
                "decompose",
                "--measure",
                str(PAIR_CSV),
                "--lam",
                "0.5",
                "--n",
                "0",
                "--N",
                "1",
                "--eps",
                "0.1",
            ],
            tmp_path,
        )
        assert got["paired_mass"] == pytest.approx(1.0, abs=1e-12)
        assert got["theta_mass"] == pytest.approx(0.0, abs=1e-12)
        assert got["method"] == "max-flow"
        assert len(got["rows"]) == 1
        assert got["rows"][0]["rescaled_distance"] == pytest.approx(4.0)
        assert got["rows"][0]["in_statement_window"] is True

    def test_increase(self, tmp_path):
        got = run_json(
            [
                "increase",
                "--measure",
                str(PAIR_CSV),
                "--measure2",
                str(PAIR_CSV),
                "--lam",
                "0.5",
                "--t1",
                "0",
                "--t2",
                "2",
            ],
            tmp_path,
        )
        assert got["gain"] >= -1e-12
        assert got["beta"] >= 0.0
        assert got["method"] == "exact"
        assert got["t1"] == 0.0 and got["t2"] == 2.0

    def test_tube(self, tmp_path):
        got = run_json(
            ["tube", "--lam", "0.5", "--x", "0", "--y", "1", "--k", "16", "--m", "3"],
            tmp_path,
        )
        assert got["rows"][0]["a"] == 2
        assert got["top_axis"] == 1
        assert got["k"] == 16

    def test_mahler(self, tmp_path):
        got = run_json(["mahler", "--poly", "-1,-1,1"], tmp_path)
        assert got["mahler"] == pytest.approx(1.618033988749895, abs=1e-7)

    def test_poly_search(self, tmp_path):
        got = run_json(
            ["poly-search", "--xi", "0.7", "--n", "2", "--coeffs", "-1,0,1"], tmp_path
        )
        assert got["poly"] == [1, -1]
        assert got["value"] == 0.30000000000000004
        assert got["strategy"] == "meet-in-middle"

    def test_approx_with_rw_bound(self, tmp_path):
        got = run_json(
            ["approx", "--spec", str(GOLDEN_SPEC), "--n", "3", "--rw-n", "6"], tmp_path
        )
        assert got["in_omega"] is True
        assert got["eta"][0] == pytest.approx(0.6180339887498949, abs=1e-12)
        assert got["rows"][0]["status"] == "ok"
        assert got["rows"][0]["distance"] == 0.0
        assert got["rw_entropy_upper"] == pytest.approx(0.8176065103715944, abs=1e-9)
        assert got["rw_n"] == 6

    def test_stdout_when_no_out(self, capsys):
        assert dispatch(["mahler", "--poly", "2"]) == 0
        got = json.loads(capsys.readouterr().out)
        assert got["mahler"] == 2.0


class TestExitCodes:
    def test_missing_spec_file(self, capsys):
        code = dispatch(["dim", "--spec", "/nonexistent/spec.json", "--n", "3"])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_bad_spec_content(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text('{"lambda": [0.5]}')
        assert dispatch(["dim", "--spec", str(p), "--n", "3"]) == 1
        assert "lambda" in capsys.readouterr().err

    def test_bad_range(self, capsys):
        assert dispatch(["dim", "--spec", str(THIRD_SPEC), "--n", "5..3"]) == 1
        assert "range" in capsys.readouterr().err

    def test_budget_refusal_is_exit_2(self, capsys):
        code = dispatch(
            [
                "poly-search",
                "--xi",
                "0.7",
                "--n",
                "12",
                "--coeffs",
                "-1,0,1",
                "--strategy",
                "exhaustive",
                "--budget",
                "100",
            ]
        )
        assert code == 2
        assert "budget refused" in capsys.readouterr().err

    def test_cell_budget_refusal(self, capsys):
        # r = 1 would degenerate to one offset cell; 0.37 forces three
        code = dispatch(
            ["avg-entropy", "--measure", str(PAIR_CSV), "--r", "0.37", "--cell-budget", "1"]
        )
        assert code == 2
        capsys.readouterr()

    def test_unknown_command(self, capsys):
        assert dispatch(["frobnicate"]) == 1
        capsys.readouterr()

    def test_help_is_success(self, capsys):
        assert dispatch(["--help"]) == 0
        assert "subcommand" not in capsys.readouterr().err


class TestDeterminism:
    def test_qmc_rerun_is_byte_identical(self, tmp_path):
        argv = [
            "avg-entropy",
            "--measure",
            str(PAIR_CSV),
            "--r",
            "0.37",
            "--quad",
            "qmc",
            "--seed",
            "9",
            "--offsets",
            "128",
        ]
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert dispatch([*argv, "--out", str(a)]) == 0
        assert dispatch([*argv, "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert json.loads(a.read_bytes())["method"] == "qmc"

    def test_exact_rerun_is_byte_identical(self, tmp_path):
        argv = ["rw-entropy", "--spec", str(GOLDEN_SPEC), "--n", "3..6"]
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert dispatch([*argv, "--out", str(a)]) == 0
        assert dispatch([*argv, "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestCsvFormat:
    def test_scalar_payload_csv(self, tmp_path):
        out = tmp_path / "o.csv"
        code = dispatch(
            [
                "poly-search",
                "--xi",
                "0.7",
                "--n",
                "2",
                "--coeffs",
                "-1,0,1",
                "--format",
                "csv",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "abs_value,poly,strategy,value"
        assert lines[1].split(",")[1] == '"1 -1"'
        assert len(lines) == 2

    def test_row_payload_csv(self, tmp_path):
        out = tmp_path / "sep.csv"
        code = dispatch(
            ["separation", "--spec", str(THIRD_SPEC), "--n", "3", "--format", "csv", "--out", str(out)]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "n,axis,gap,gap_rate"
        assert len(lines) == 4
        assert lines[1].startswith("1,1,2.0,")


class TestConsoleScript:
    def test_installed_entry_point(self):
        res = subprocess.run(
            ["bconv", "mahler", "--poly=-1,-1,1"], capture_output=True, text=True
        )
        assert res.returncode == 0
        assert json.loads(res.stdout)["mahler"] == pytest.approx(1.618033988749895, abs=1e-7)
