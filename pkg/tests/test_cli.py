import csv
import io
import math

import pytest

from feller.cli import main

TABLE1_THEO = {
    (0.1, 100.0): 0.00, (0.1, 1000.0): 0.00, (0.1, 5000.0): 1.83,
    (0.1, 10000.0): 13.53, (0.1, 20000.0): 36.79,
    (1.0, 100.0): 0.00, (1.0, 1000.0): 13.53, (1.0, 5000.0): 67.03,
    (1.0, 10000.0): 81.87, (1.0, 20000.0): 90.48,
    (10.0, 100.0): 13.53, (10.0, 1000.0): 81.87, (10.0, 5000.0): 96.08,
    (10.0, 10000.0): 98.02, (10.0, 20000.0): 99.00,
    (100.0, 100.0): 81.87, (100.0, 1000.0): 98.02, (100.0, 5000.0): 99.60,
    (100.0, 10000.0): 99.80, (100.0, 20000.0): 99.90,
}


def read_csv(path):
    rows = [r for r in csv.reader(open(path)) if r and not r[0].startswith("#")]
    return rows[0], rows[1:]


def read_comments(path):
    return [line.strip() for line in open(path) if line.startswith("#")]


class TestTablePresets:
    def test_table1_theory_matches_reference_values(self, tmp_path):
        out = tmp_path / "t1.csv"
        rc = main(["table", "1", "--theory-only", "--seed", "1", "--out", str(out),
                   "--round"])
        assert rc == 0
        header, rows = read_csv(out)
        assert header == ["sigma2", "t", "theo_pct"]
        assert len(rows) == 20
        for sigma2, t, theo in rows:
            assert float(theo) == TABLE1_THEO[(float(sigma2), float(t))]

    def test_table2_theory_matches_reference_values(self, tmp_path):
        out = tmp_path / "t2.csv"
        assert main(["table", "2", "--theory-only", "--seed", "1",
                     "--out", str(out), "--round"]) == 0
        header, rows = read_csv(out)
        assert header == ["x0", "t", "theo_pct"]
        # x0 rows mirror the sigma2 table through the scaling x0 <-> 1/sigma2
        mirror = {10.0: 100.0, 100.0: 10.0, 1000.0: 1.0, 10000.0: 0.1}
        for x0, t, theo in rows:
            assert float(theo) == TABLE1_THEO[(mirror[float(x0)], float(t))]

    def test_table4_runs_at_small_scale(self, tmp_path):
        out = tmp_path / "t4.csv"
        assert main(["table", "4", "--paths", "50", "--seed", "3",
                     "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["x0", "t", "xbar", "ci_lo", "ci_hi", "alpha"]
        assert len(rows) == 20
        for x0, t, xbar, lo, hi, alpha in rows:
            assert float(lo) < float(hi)
            assert float(alpha) == 0.05


class TestSurvivalCommand:
    ARGS = ["survival", "--sigma2", "10", "--x0", "1000", "--dt", "50", "--tn",
            "5000", "--paths", "400", "--checkpoints", "1000,5000", "--seed", "9"]

    def test_simulated_columns(self, tmp_path):
        out = tmp_path / "s.csv"
        assert main(self.ARGS + ["--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["sigma2", "t", "theo_pct", "sim_pct", "stderr_pct"]
        assert [r[1] for r in rows] == ["1000", "5000"]
        theo = float(rows[0][2])
        assert theo == pytest.approx(100 * math.exp(-2 * 1000 / (10 * 1000)), rel=1e-12)
        sim = float(rows[0][3])
        assert abs(sim - theo) < 4 * float(rows[0][4])

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(self.ARGS + ["--out", str(a)]) == 0
        assert main(self.ARGS + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_seed_changes_simulation(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(self.ARGS + ["--out", str(a)]) == 0
        args = [x if x != "9" else "10" for x in self.ARGS]
        assert main(args + ["--out", str(b)]) == 0
        _, rows_a = read_csv(a)
        _, rows_b = read_csv(b)
        assert [r[2] for r in rows_a] == [r[2] for r in rows_b]  # theory fixed
        assert [r[3] for r in rows_a] != [r[3] for r in rows_b]

    def test_off_grid_checkpoint_fails_cleanly(self, tmp_path, capsys):
        rc = main(["survival", "--dt", "50", "--tn", "1000", "--paths", "10",
                   "--checkpoints", "123", "--seed", "1",
                   "--out", str(tmp_path / "x.csv")])
        assert rc == 3
        assert "error:" in capsys.readouterr().err

    def test_round_gives_two_decimals(self, tmp_path):
        out = tmp_path / "r.csv"
        assert main(self.ARGS + ["--round", "--out", str(out)]) == 0
        _, rows = read_csv(out)
        for row in rows:
            for cell in row[2:]:
                assert len(cell.split(".")[1]) == 2


class TestPathsCommand:
    def test_degenerate_start_emits_zero_path(self, tmp_path):
        out = tmp_path / "p.csv"
        rc = main(["paths", "--paths", "1", "--x0", "0", "--tn", "5", "--dt", "1",
                   "--seed", "1", "--out", str(out)])
        assert rc == 0
        header, rows = read_csv(out)
        assert header == ["path_id", "t", "x"]
        assert len(rows) == 6
        assert all(float(r[2]) == 0.0 for r in rows)

    def test_long_format(self, tmp_path):
        out = tmp_path / "p.csv"
        assert main(["paths", "--paths", "3", "--x0", "50", "--tn", "10", "--dt", "1",
                     "--seed", "2", "--out", str(out)]) == 0
        _, rows = read_csv(out)
        assert len(rows) == 3 * 11
        assert sorted({r[0] for r in rows}) == ["0", "1", "2"]


class TestHittingCommand:
    def test_metadata_and_schema(self, tmp_path):
        out = tmp_path / "h.csv"
        rc = main(["hitting", "--sigma2", "10", "--x0", "50", "--tn", "2000",
                   "--dt", "1", "--paths", "400", "--bins", "20", "--seed", "5",
                   "--out", str(out)])
        assert rc == 0
        comments = read_comments(out)
        assert any(c.startswith("# tstar=5") for c in comments)
        assert any(c.startswith("# censored=") for c in comments)
        header, rows = read_csv(out)
        assert header == ["bin_lo", "bin_hi", "count", "density", "f_theory"]
        assert sum(int(r[2]) for r in rows) <= 400


class TestDensityCommand:
    def test_atom_metadata_and_grid(self, tmp_path):
        out = tmp_path / "d.csv"
        rc = main(["density", "--sigma2", "1", "--x0", "1000", "--t", "1000",
                   "--points", "11", "--seed", "1", "--out", str(out)])
        assert rc == 0
        comments = read_comments(out)
        atom = float(comments[0].split("=")[1])
        assert atom == pytest.approx(math.exp(-2.0), rel=1e-12)
        header, rows = read_csv(out)
        assert header == ["x", "pdf"]
        assert len(rows) == 11

    def test_config_file_and_flag_precedence(self, tmp_path):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text("sigma2 = 4\nx0 = 500\n# comment line\n")
        out = tmp_path / "d.csv"
        assert main(["density", "--config", str(cfgfile), "--t", "100",
                     "--points", "5", "--seed", "1", "--out", str(out)]) == 0
        atom = float(read_comments(out)[0].split("=")[1])
        assert atom == pytest.approx(math.exp(-2 * 500 / (4 * 100)), rel=1e-12)
        # flag beats config
        assert main(["density", "--config", str(cfgfile), "--sigma2", "1",
                     "--t", "100", "--points", "5", "--seed", "1",
                     "--out", str(out)]) == 0
        atom = float(read_comments(out)[0].split("=")[1])
        assert atom == pytest.approx(math.exp(-2 * 500 / (1 * 100)), rel=1e-12)


class TestValidateCommand:
    def test_small_run_passes(self, tmp_path):
        out = tmp_path / "v.csv"
        rc = main(["validate", "--sigma2", "1", "--x0", "1000", "--t", "1000",
                   "--samples", "20000", "--seed", "4242", "--out", str(out)])
        assert rc == 0
        header, rows = read_csv(out)
        assert header == ["check", "simulated", "expected", "abs_error",
                          "tolerance", "status"]
        assert all(r[5] == "pass" for r in rows)


class TestUsageAndErrors:
    def test_unknown_flag_exits_2(self):
        assert main(["survival", "--bogus", "1"]) == 2

    def test_missing_subcommand_exits_2(self):
        assert main([]) == 2

    def test_bad_float_list_exits_2(self):
        assert main(["survival", "--sigma2", "abc"]) == 2

    def test_unwritable_output_exits_3(self, capsys):
        rc = main(["density", "--points", "2", "--seed", "1",
                   "--out", "/nonexistent-dir/x.csv"])
        assert rc == 3
        assert "error:" in capsys.readouterr().err

    def test_both_lists_rejected(self, capsys):
        rc = main(["survival", "--sigma2", "1,2", "--x0", "3,4", "--seed", "1"])
        assert rc == 3

    def test_invalid_parameter_exits_3(self, capsys):
        rc = main(["density", "--sigma2", "-1", "--seed", "1"])
        assert rc == 3

    def test_omitted_seed_is_printed(self, tmp_path, capsys):
        out = tmp_path / "d.csv"
        rc = main(["density", "--points", "2", "--out", str(out)])
        assert rc == 0
        err = capsys.readouterr().err
        assert "seed:" in err

    def test_tsv_format(self, tmp_path):
        out = tmp_path / "d.tsv"
        assert main(["density", "--points", "3", "--seed", "1", "--format", "tsv",
                     "--out", str(out)]) == 0
        data_lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert all("\t" in l for l in data_lines)

    def test_stdout_default(self, capsys):
        assert main(["density", "--points", "3", "--seed", "1"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("# atom=")


class TestFullPrecision:
    def test_unrounded_cells_have_15_significant_digits(self, tmp_path):
        out = tmp_path / "s.csv"
        assert main(["survival", "--sigma2", "3", "--x0", "700", "--dt", "50",
                     "--tn", "1000", "--paths", "50", "--checkpoints", "1000",
                     "--seed", "1", "--out", str(out)]) == 0
        _, rows = read_csv(out)
        theo = rows[0][2]
        expect = 100 * math.exp(-2 * 700 / (3 * 1000.0))
        assert float(theo) == pytest.approx(expect, rel=1e-15)
        digits = theo.replace(".", "").replace("-", "").lstrip("0")
        assert len(digits) >= 15
