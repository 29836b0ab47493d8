"""End-to-end tests of the command-line interface and its exit codes."""

import json

import pytest

from cuspkernel.cli import main, parse_point


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


class TestParsing:
    def test_complex_literals(self):
        z = parse_point("0.13+1.1i")
        assert z.x == 0.13 and z.y == 1.1
        z = parse_point("-0.25+2i")
        assert z.x == -0.25 and z.y == 2.0

    def test_rejects_lower_half(self):
        import argparse

        with pytest.raises(argparse.ArgumentTypeError):
            parse_point("0.5-1i")


class TestKernelCommand:
    def test_weight_400(self, capsys):
        rc, out, _ = run(capsys, "kernel", "--z", "0+1i", "--k", "400",
                         "--tol", "1e-12")
        assert rc == 0
        rec = json.loads(out)
        assert abs(rec["re"] - 4.0) < 1e-9
        assert rec["tail_bound"] < 1e-12

    def test_weight_402(self, capsys):
        rc, out, _ = run(capsys, "kernel", "--z", "0+1i", "--k", "402",
                         "--tol", "1e-12")
        rec = json.loads(out)
        assert rc == 0 and abs(complex(rec["re"], rec["im"])) < 1e-9

    def test_bulk_1600(self, capsys):
        rc, out, _ = run(capsys, "kernel", "--z", "0.13+1.1i", "--k", "1600")
        rec = json.loads(out)
        assert rc == 0 and abs(rec["re"] - 2.0) < 1e-3

    def test_cutoff_exit_code(self, capsys):
        rc, _, err = run(capsys, "kernel", "--z", "0+1i", "--k", "4",
                         "--tol", "1e-25")
        assert rc == 3 and "cutoff" in err

    def test_csv_format(self, capsys):
        rc, out, _ = run(capsys, "kernel", "--z", "0+1i", "--k", "400",
                         "--format", "csv")
        lines = out.strip().splitlines()
        assert rc == 0 and lines[0].startswith("k,re,im,tail_bound")

    def test_off_diagonal_argument(self, capsys):
        rc, out, _ = run(capsys, "kernel", "--z", "0.3+0.7i", "--w", "0.1+0.9i",
                         "--k", "12", "--tol", "1e-12")
        rec = json.loads(out)
        rc2, out2, _ = run(capsys, "kernel", "--z", "0.1+0.9i", "--w", "0.3+0.7i",
                           "--k", "12", "--tol", "1e-12")
        rec2 = json.loads(out2)
        assert rc == rc2 == 0
        assert abs(rec["re"] - rec2["re"]) < 1e-10
        assert abs(rec["im"] + rec2["im"]) < 1e-10  # Hermitian pair


class TestScanCommand:
    def test_grid_rows(self, capsys):
        rc, out, _ = run(capsys, "scan", "--grid", "0,0.4,3,1,1.4,3",
                         "--k", "36")
        lines = out.strip().splitlines()
        assert rc == 0
        assert lines[0] == "x,y,k,re_R,im_R,tail_bound,terms_used"
        assert len(lines) == 10

    def test_near_zero_density_node(self, capsys):
        rc, out, _ = run(capsys, "scan", "--grid", "0,0,1,1,1,1", "--k", "402")
        row = out.strip().splitlines()[1].split(",")
        assert rc == 0 and abs(float(row[3])) < 1e-9

    def test_deterministic_bytes(self, capsys):
        args = ("scan", "--grid=-0.3,0.3,4,0.9,1.5,3", "--k", "48")
        rc1, out1, _ = run(capsys, *args)
        rc2, out2, _ = run(capsys, *args)
        assert rc1 == rc2 == 0 and out1 == out2

    def test_malformed_grid(self, capsys):
        rc, _, err = run(capsys, "scan", "--grid", "0,1,3")
        assert rc == 2 and "grid" in err


class TestLemmasCommand:
    def test_pass_and_determinism(self, capsys):
        args = ("lemmas", "--Y", "10", "--delta", "0.05", "--samples", "100",
                "--seed", "7")
        rc1, out1, _ = run(capsys, *args)
        rc2, out2, _ = run(capsys, *args)
        assert rc1 == rc2 == 0
        assert out1 == out2
        rec = json.loads(out1)
        assert rec["pass"] and rec["min_observed"] > rec["bound"]
        assert rec["rng"] == "philox"


class TestIntegralCommands:
    def test_vertical_sweep(self, capsys):
        rc, out, _ = run(capsys, "vertical", "--x", "0.13", "--support", "1,2",
                         "--sweep", "300,600,1200", "--unsafe")
        assert rc == 0
        recs = json.loads(out)
        gaps = [abs(r["gap"]) / r["reference"] for r in recs]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 0.01

    def test_vertical_window_exit(self, capsys):
        rc, _, err = run(capsys, "vertical", "--x", "0.13", "--support", "1,2",
                         "--k", "300")
        assert rc == 2 and "window" in err

    def test_horizontal_constant(self, capsys):
        rc, out, _ = run(capsys, "horizontal", "--y", "1.3", "--k", "1200")
        recs = json.loads(out)
        assert rc == 0
        assert abs(recs[0]["integral"] - 0.954930) < 0.01

    def test_region(self, capsys):
        rc, out, _ = run(capsys, "region", "--center", "0.1,1.2",
                         "--radius", "0.2", "--k", "120")
        recs = json.loads(out)
        assert rc == 0 and recs[0]["reference"] > 0

    def test_horizontal_bump_psi(self, capsys):
        rc, out, _ = run(capsys, "horizontal", "--y", "1.3", "--k", "1200",
                         "--psi", "bump:-0.4,0.4")
        recs = json.loads(out)
        assert rc == 0
        assert abs(recs[0]["gap"]) / recs[0]["reference"] < 0.01

    def test_bad_psi(self, capsys):
        rc, _, err = run(capsys, "horizontal", "--y", "1.3", "--psi", "wave")
        assert rc == 2 and "psi" in err

    def test_sweep_csv_rows(self, capsys):
        rc, out, _ = run(capsys, "vertical", "--x", "0.13", "--support", "1,2",
                         "--sweep", "600,1200", "--unsafe", "--format", "csv")
        lines = out.strip().splitlines()
        assert rc == 0
        assert lines[0] == ("k,x_or_y,integral,reference,gap,"
                            "reported_error,nodes,wall_time_ms")
        assert len(lines) == 3
        assert lines[1].startswith("600,") and lines[2].startswith("1200,")

    def test_zero_support_gap(self, capsys):
        # a bump well inside the bulk at high weight: tiny gap
        rc, out, _ = run(capsys, "vertical", "--x", "0.13", "--support",
                         "1.1,1.9", "--k", "1200")
        recs = json.loads(out)
        assert rc == 0
        assert abs(recs[0]["gap"]) / recs[0]["reference"] < 0.01


class TestPretraceCommand:
    def test_single_point_passes(self, capsys):
        rc, out, _ = run(capsys, "pretrace", "--points", "1", "--seed", "42")
        rec = json.loads(out)
        assert rc == 0 and rec["pass"]
        assert rec["max_residual"] < 1e-8

    def test_deterministic_bytes(self, capsys):
        args = ("pretrace", "--points", "2", "--seed", "5")
        rc1, out1, _ = run(capsys, *args)
        rc2, out2, _ = run(capsys, *args)
        assert rc1 == rc2 == 0 and out1 == out2


class TestDumpCommands:
    def test_elliptic_csv(self, capsys, tmp_path):
        out_path = tmp_path / "e.csv"
        rc, _, _ = run(capsys, "elliptic", "--Y", "2", "--out", str(out_path))
        assert rc == 0
        lines = out_path.read_text().strip().splitlines()
        assert lines[0] == "x,y,stab_order,gen_a,gen_b,gen_c,gen_d"
        assert len(lines) == 6

    def test_coeffs(self, capsys):
        rc, out, _ = run(capsys, "coeffs", "--n", "5")
        lines = out.strip().splitlines()
        assert rc == 0 and lines[1] == "1,1" and lines[2] == "2,-24"
