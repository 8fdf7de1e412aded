"""End-to-end tests of the command-line interface."""

import json
import math

import numpy as np
import pytest

from smoothavg.cli import main
from smoothavg.kernel import box_kernel, triangle_kernel, write_kernel_file


def run(argv):
    return main([str(a) for a in argv])


class TestGenerateAnalyze:
    def test_round_trip_triangle(self, tmp_path, capsys):
        kfile = tmp_path / "tri.json"
        assert run(["generate", "triangle", "-n", 4, "-o", kfile]) == 0
        assert run(["analyze", kfile]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["laplacian"]["constant"] == pytest.approx(4 / 25, abs=1e-10)
        assert data["laplacian"]["is_extremal"] is True
        assert data["laplacian"]["gap"] == pytest.approx(0.0, abs=1e-10)
        assert data["nonneg_fourier"]["flag"] is True

    def test_round_trip_box(self, tmp_path, capsys):
        kfile = tmp_path / "box.json"
        assert run(["generate", "box", "-n", 4, "-o", kfile]) == 0
        assert run(["analyze", kfile]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["first_deriv"]["constant"] == pytest.approx(2 / 9, abs=1e-10)
        assert data["first_deriv"]["is_extremal"] is True

    def test_generate_n0(self, tmp_path):
        kfile = tmp_path / "id.json"
        assert run(["generate", "triangle", "-n", 0, "-o", kfile]) == 0
        assert json.loads(kfile.read_text()) == {"n": 0, "half": [1.0]}

    @pytest.mark.parametrize("kind,section", [("box", "first_deriv"), ("triangle", "laplacian")])
    def test_generated_families_round_trip_with_zero_gap(self, tmp_path, capsys, kind, section):
        for n in range(0, 21):
            kfile = tmp_path / f"{kind}{n}.json"
            assert run(["generate", kind, "-n", n, "-o", kfile]) == 0
            assert run(["analyze", kfile]) == 0
            data = json.loads(capsys.readouterr().out)
            assert abs(data[section]["gap"]) <= 1e-10
            assert data[section]["is_extremal"] is True

    def test_asymmetric_exit3(self, tmp_path):
        kfile = tmp_path / "asym.json"
        kfile.write_text('{"full": [0.2, 0.5, 0.3]}')
        assert run(["analyze", kfile]) == 3

    def test_symmetrize_flag_rescues(self, tmp_path):
        kfile = tmp_path / "asym.json"
        kfile.write_text('{"full": [0.2, 0.5, 0.3]}')
        assert run(["analyze", kfile, "--symmetrize"]) == 0

    def test_malformed_exit2(self, tmp_path):
        kfile = tmp_path / "bad.json"
        kfile.write_text("{nope")
        assert run(["analyze", kfile]) == 2

    def test_operator_section(self, tmp_path, capsys):
        kfile = tmp_path / "box.json"
        write_kernel_file(kfile, box_kernel(2))
        assert run(["analyze", kfile, "--operator=-1,3,-3,1"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["operator"]["stencil"] == [-1.0, 3.0, -3.0, 1.0]
        assert data["operator"]["constant"] > 0

    def test_seventeen_digit_floats(self, tmp_path, capsys):
        kfile = tmp_path / "box.json"
        write_kernel_file(kfile, box_kernel(3))
        assert run(["analyze", kfile]) == 0
        assert "0.14285714285714285" in capsys.readouterr().out

    def test_n_cap(self, tmp_path):
        assert run(["generate", "box", "-n", 70, "-o", tmp_path / "k.json"]) == 2


class TestOptimize:
    def test_first_deriv_recovers_box(self, tmp_path):
        out = tmp_path / "sol.json"
        assert run(["optimize", "first-deriv", "-n", 5, "-o", out]) == 0
        data = json.loads(out.read_text())
        assert data["value"] == pytest.approx(2 / 11, abs=1e-8)
        np.testing.assert_allclose(data["kernel"]["half"], box_kernel(5).half, atol=1e-6)
        assert data["solution"]["converged"] is True
        assert len(data["solution"]["trace"]) == data["solution"]["iterations"]

    def test_laplacian_nonneg_recovers_triangle(self, tmp_path):
        out = tmp_path / "sol.json"
        assert run(["optimize", "laplacian", "--nonneg", "-n", 5, "-o", out]) == 0
        data = json.loads(out.read_text())
        assert data["value"] == pytest.approx(1 / 9, abs=1e-8)
        np.testing.assert_allclose(data["kernel"]["half"], triangle_kernel(5).half, atol=1e-6)

    def test_operator_exploratory(self, tmp_path):
        out = tmp_path / "sol.json"
        assert run(["optimize", "operator", "--stencil", "1,-2,1", "-n", 5, "-o", out]) == 0
        data = json.loads(out.read_text())
        assert data["problem"]["exploratory"] is True
        # dropping positivity cannot beat the constrained optimum
        assert data["value"] <= 4 / 36 + 1e-9

    def test_operator_needs_stencil(self):
        assert run(["optimize", "operator", "-n", 3]) == 2

    def test_tol_range(self):
        assert run(["optimize", "first-deriv", "-n", 3, "--tol", "1"]) == 2


class TestVerify:
    @pytest.mark.parametrize("suite", ["thm1", "thm2", "thm3", "thm4", "thm5", "prop8"])
    def test_suites_pass(self, suite, capsys):
        assert run(["verify", suite, "--n-max", 5]) == 0
        out = capsys.readouterr().out
        assert out.startswith("1..")
        assert "not ok" not in out

    def test_all_passes(self, capsys):
        assert run(["verify", "all", "--n-max", 4]) == 0
        assert "not ok" not in capsys.readouterr().out

    def test_n_max_cap(self):
        assert run(["verify", "thm1", "--n-max", 31]) == 2


class TestSmooth:
    def test_constant_series(self, tmp_path, capsys):
        src = tmp_path / "in.csv"
        dst = tmp_path / "out.csv"
        src.write_text("".join("1.0\n" for _ in range(12)))
        assert run(["smooth", src, dst, "--box", 2]) == 0
        vals = [float(v) for v in dst.read_text().split()]
        assert len(vals) == 12 - 4
        np.testing.assert_allclose(vals, 1.0, atol=1e-12)

    def test_delta_spike(self, tmp_path):
        src = tmp_path / "in.csv"
        dst = tmp_path / "out.csv"
        rows = ["0.0"] * 9
        rows[4] = "1.0"
        src.write_text("\n".join(rows) + "\n")
        assert run(["smooth", src, dst, "--box", 1]) == 0
        vals = [float(v) for v in dst.read_text().split()]
        assert vals[2:5] == pytest.approx([1 / 3, 1 / 3, 1 / 3])

    def test_ratios_below_ceilings(self, tmp_path, capsys):
        rng = np.random.default_rng(7)
        src = tmp_path / "in.csv"
        dst = tmp_path / "out.csv"
        src.write_text("series\n" + "".join(f"{v}\n" for v in rng.standard_normal(1000)))
        assert run(["smooth", src, dst, "--triangle", 4]) == 0
        out = capsys.readouterr().out
        grad_line, lap_line = out.strip().splitlines()
        grad_ratio, m_u = float(grad_line.split()[2]), float(grad_line.split()[-1])
        lap_ratio, l_u = float(lap_line.split()[2]), float(lap_line.split()[-1])
        assert grad_ratio <= m_u + 1e-12
        assert lap_ratio <= l_u + 1e-12

    def test_pad_modes_keep_length(self, tmp_path):
        src = tmp_path / "in.csv"
        src.write_text("".join(f"{v}\n" for v in np.arange(10.0)))
        for pad in ("zero", "reflect"):
            dst = tmp_path / f"out_{pad}.csv"
            assert run(["smooth", src, dst, "--triangle", 2, "--pad", pad]) == 0
            assert len(dst.read_text().split()) == 10

    def test_parse_error_reports_row(self, tmp_path, capsys):
        src = tmp_path / "in.csv"
        src.write_text("1.0\n2.0\nbanana\n4.0\n")
        assert run(["smooth", src, tmp_path / "out.csv", "--box", 1]) == 2
        assert "row 3" in capsys.readouterr().err

    def test_too_short_series(self, tmp_path):
        src = tmp_path / "in.csv"
        src.write_text("1.0\n2.0\n3.0\n")
        assert run(["smooth", src, tmp_path / "out.csv", "--box", 2]) == 2

    def test_kernel_source_required(self, tmp_path):
        src = tmp_path / "in.csv"
        src.write_text("1.0\n2.0\n3.0\n")
        assert run(["smooth", src, tmp_path / "out.csv"]) == 2


class TestContinuum:
    def test_builtin_triangle(self, capsys):
        assert run(["continuum", "--builtin", "triangle", "--n-max", 200]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["J0"] == pytest.approx(1 / (36 * math.pi**4), abs=1e-10)
        assert abs(data["c_f_analytic"]) <= 1e-10
        assert abs(data["c_f_numeric"]) <= 1e-4

    def test_builtin_halftriangle(self, capsys):
        assert run(["continuum", "--builtin", "halftriangle", "--n-max", 200]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["c_f_analytic"] > 0
        assert data["prop8_lhs"] - data["prop8_rhs"] > 1e-6

    def test_profile_file(self, tmp_path, capsys):
        pfile = tmp_path / "prof.json"
        pfile.write_text('{"knots": [0.0, 0.5, 1.0], "values": [1.0, 0.0, 0.0]}')
        assert run(["continuum", "--profile", pfile, "--n-max", 150]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["c_f_analytic"] == pytest.approx(1 / (144 * math.pi**4), rel=1e-8)

    def test_malformed_profile(self, tmp_path):
        pfile = tmp_path / "prof.json"
        pfile.write_text('{"knots": [0.0]}')
        assert run(["continuum", "--profile", pfile]) == 2

    def test_source_required(self):
        assert run(["continuum"]) == 2
