import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from subdiv.cli import main
from subdiv.experiments import circle_samples
from subdiv.io import format_svg, read_csv, write_csv


@pytest.fixture
def triangle_csv(tmp_path):
    x, y = circle_samples(3, 1e-5)
    return write_csv(tmp_path / "tri.csv", np.c_[x.values, y.values], "x,y")


class TestIO:
    @settings(suppress_health_check=[HealthCheck.function_scoped_fixture])
    @given(st.lists(st.tuples(st.floats(allow_nan=False, allow_infinity=False),
                              st.floats(allow_nan=False, allow_infinity=False)), min_size=1, max_size=20))
    def test_csv_roundtrip_bit_exact(self, tmp_path, rows):
        data = np.array(rows)
        back = read_csv(write_csv(tmp_path / "r.csv", data, "x,y"))
        assert back.tobytes() == data.tobytes()

    def test_comments_and_blank_lines(self, tmp_path):
        p = tmp_path / "c.csv"
        p.write_text("# header\n\n1.5\n# mid\n2\n")
        assert read_csv(p).tolist() == [[1.5], [2.0]]

    def test_ragged_and_garbage(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("1,2\n3\n")
        with pytest.raises(ValueError):
            read_csv(p)
        p.write_text("1,abc\n")
        with pytest.raises(ValueError):
            read_csv(p)

    def test_svg_square(self):
        svg = format_svg([[0, 0], [1, 0], [1, 1], [0, 1]])
        assert svg.count("<path") == 1
        d = svg.split('d="')[1].split('"')[0]
        assert d.count("L") == 3 and "Z" not in d
        assert 'viewBox="-0.050000 -1.050000 1.100000 1.100000"' in svg

    def test_svg_closed_and_1d(self):
        assert "Z" in format_svg([[0, 0], [1, 0], [0, 1]], closed=True)
        with pytest.raises(ValueError):
            format_svg([1.0, 2.0])


class TestRefine:
    def test_open_count(self, tmp_path, capsys):
        src = write_csv(tmp_path / "pts.csv", np.c_[np.arange(10.0), np.arange(10.0) ** 2])
        assert main(["refine", str(src), "--levels", "1", "--out-dir", str(tmp_path)]) == 0
        assert read_csv(tmp_path / "pts_refined.csv").shape == (15, 2)
        err = capsys.readouterr().err
        assert "10 -> 15" in err and "branch 1" in err

    def test_periodic_count_and_svg(self, tmp_path, triangle_csv):
        rc = main(["refine", str(triangle_csv), "--levels", "5", "--topology", "periodic",
                   "--out-dir", str(tmp_path), "--format", "csv,svg,jsonl"])
        assert rc == 0
        assert read_csv(tmp_path / "tri_refined.csv").shape == (96, 2)
        svg = (tmp_path / "tri_refined.svg").read_text()
        assert svg.count("<path") == 1 and "Z" in svg
        rec = json.loads((tmp_path / "records.jsonl").read_text().splitlines()[-1])
        assert rec["outputs"]["counts"][-1] == 96

    def test_zero_levels_bit_exact(self, tmp_path, triangle_csv):
        main(["refine", str(triangle_csv), "--levels", "0", "--out-dir", str(tmp_path)])
        assert read_csv(tmp_path / "tri_refined.csv").tobytes() == read_csv(triangle_csv).tobytes()

    def test_output_matches_library(self, tmp_path, triangle_csv):
        from subdiv import SubdivisionRefiner

        main(["refine", str(triangle_csv), "--levels", "3", "--topology", "periodic", "--out-dir", str(tmp_path)])
        expected = SubdivisionRefiner(levels=3, topology="periodic").fit_transform(read_csv(triangle_csv))
        assert read_csv(tmp_path / "tri_refined.csv").tobytes() == expected.tobytes()

    def test_r_rule_domain_error(self, tmp_path, capsys):
        src = write_csv(tmp_path / "r.csv", [1.0, 2.0, 1.0, -1.0, 1.0, 5.0])
        assert main(["refine", str(src), "--scheme", "r-rule", "--out-dir", str(tmp_path)]) != 0
        assert "index 3" in capsys.readouterr().err

    def test_insufficient_data(self, tmp_path, capsys):
        src = write_csv(tmp_path / "s.csv", [1.0, 2.0, 3.0])
        assert main(["refine", str(src), "--out-dir", str(tmp_path)]) != 0
        assert "error" in capsys.readouterr().err

    def test_svg_of_1d_refused(self, tmp_path):
        src = write_csv(tmp_path / "v.csv", np.arange(8.0))
        assert main(["refine", str(src), "--format", "svg", "--out-dir", str(tmp_path)]) != 0

    def test_level_dependent_flags(self, tmp_path):
        t = np.arange(12) * 1.0
        src = write_csv(tmp_path / "c.csv", np.cos(t))
        rc = main(["refine", str(src), "--scheme", "t-gamma", "--gamma-kind", "trig", "--gamma-mag", "1.0",
                   "--levels", "2", "--out-dir", str(tmp_path)])
        assert rc == 0
        out = read_csv(tmp_path / "c_refined.csv")[:, 0]
        fine_t = 1.5 + np.arange(len(out)) / 4
        assert np.max(np.abs(out - np.cos(fine_t))) <= 1e-12


class TestExperiment:
    def test_circle_failure_flag(self, tmp_path, capsys):
        assert main(["experiment", "circle", "--n", "3", "--u", "0", "--out-dir", str(tmp_path)]) == 0
        rec = json.loads((tmp_path / "records.jsonl").read_text())
        assert rec["outputs"]["failed"] is True
        assert rec["parameters"]["u"] == 0.0 and rec["seed"] == 0 and rec["version"]

    def test_records_append(self, tmp_path):
        for u in ("1e-5", "0"):
            main(["experiment", "circle", "--u", u, "--out-dir", str(tmp_path)])
        lines = (tmp_path / "records.jsonl").read_text().splitlines()
        assert [json.loads(s)["outputs"]["failed"] for s in lines] == [False, True]

    def test_gradient_tables(self, tmp_path):
        main(["experiment", "gradient-tables", "--out-dir", str(tmp_path)])
        rec = json.loads((tmp_path / "records.jsonl").read_text())
        assert len(rec["outputs"]) == 8
        rows = read_csv_rows(tmp_path / "gradient_tables.csv")
        assert rows[0][0] == "psi_0" and float(rows[0][1]) == pytest.approx(1.25, abs=1e-6)

    def test_approx_table_layout(self, tmp_path):
        main(["experiment", "approx-table", "--out-dir", str(tmp_path)])
        rows = read_csv_rows(tmp_path / "approx_table.csv")
        assert len(rows) == 16
        assert rows[0][:4] == ["F1", "-1.0", "-0.3", "0"]
        assert float(rows[0][4]) == pytest.approx(5.5174e-09, rel=1e-4)

    def test_monotone_and_conics(self, tmp_path):
        main(["experiment", "monotone", "--data", "2", "--levels", "6", "--out-dir", str(tmp_path)])
        main(["experiment", "conics", "--out-dir", str(tmp_path)])
        recs = [json.loads(s) for s in (tmp_path / "records.jsonl").read_text().splitlines()]
        assert all(recs[0]["outputs"]["strict"])
        assert recs[1]["outputs"]["parabola"]["s-eps"] <= 1e-12

    def test_contraction_deterministic(self, tmp_path):
        for _ in range(2):
            main(["experiment", "contraction", "--trials", "50", "--seed", "7", "--out-dir", str(tmp_path)])
        a, b = (tmp_path / "records.jsonl").read_text().splitlines()
        assert a == b
        assert json.loads(a)["outputs"]["difference_scheme_sup"] <= 5 / 6

    def test_unknown_experiment(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["experiment", "fractal", "--out-dir", str(tmp_path)])


class TestExportAndAnalyze:
    def test_export(self, tmp_path):
        src = write_csv(tmp_path / "sq.csv", [[0, 0], [1, 0], [1, 1], [0, 1]])
        assert main(["export-svg", str(src), "--out-dir", str(tmp_path)]) == 0
        assert (tmp_path / "sq.svg").read_text().count("<path") == 1

    def test_export_rejects_1d_and_empty(self, tmp_path, capsys):
        src = write_csv(tmp_path / "one.csv", [1.0, 2.0, 3.0])
        assert main(["export-svg", str(src), "--out-dir", str(tmp_path)]) != 0
        assert "refine" in capsys.readouterr().err
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        assert main(["export-svg", str(empty), "--out-dir", str(tmp_path)]) != 0

    def test_analyze(self, tmp_path, capsys):
        from subdiv.experiments import MONOTONE_DATA2

        src = write_csv(tmp_path / "m.csv", MONOTONE_DATA2)
        assert main(["analyze", str(src), "--levels", "10"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out[0]["nondecreasing"] and out[0]["alpha"] == pytest.approx(2.0, abs=0.2)


def read_csv_rows(path):
    return [line.split(",") for line in path.read_text().splitlines() if not line.startswith("#")]


def test_console_script_and_log_env(tmp_path):
    src = write_csv(tmp_path / "p.csv", np.arange(8.0) ** 2)
    env = {"SUBDIV_LOG": "info", "PATH": "/usr/bin:/bin:/usr/local/bin"}
    res = subprocess.run([sys.executable, "-m", "subdiv.cli", "refine", str(src), "--out-dir", str(tmp_path)],
                         capture_output=True, text=True, env=env)
    assert res.returncode == 0
    assert "INFO subdiv: wrote" in res.stderr
