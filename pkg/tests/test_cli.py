import json
import struct

import numpy as np
import pytest

from reflectkit.cli import main
from reflectkit.core import angle_grid, pattern_sweep
from reflectkit.masks import MaskDesign


def run(*argv):
    return main(list(argv))


@pytest.fixture
def mask_file(tmp_path):
    path = tmp_path / "mask.json"
    assert (
        run(
            "design-mask",
            "--theta-i", "45",
            "--target", "-10",
            "--out", str(path),
        )
        == 0
    )
    return path


class TestDesignMask:
    def test_writes_valid_mask_file(self, mask_file):
        design = MaskDesign.from_json(mask_file.read_text())
        assert design.aperture.element_count == 35
        assert design.bits.count("1") == 15

    def test_prints_thinning(self, mask_file, capsys):
        # re-run to capture stdout
        run("design-mask", "--theta-i", "45", "--target", "-10", "--out", str(mask_file))
        out = capsys.readouterr().out
        assert "thinning ratio: 0.4286" in out

    def test_multibeam_with_weights(self, tmp_path):
        path = tmp_path / "dual.json"
        code = run(
            "design-mask",
            "--theta-i", "30",
            "--target", "-7.8",
            "--target", "-60",
            "--weight", "1",
            "--weight", "0.5+0.5j",
            "--auto-psi",
            "--out", str(path),
        )
        assert code == 0
        design = MaskDesign.from_json(path.read_text())
        assert design.task.targets[1][1] == 0.5 + 0.5j

    def test_weight_count_mismatch(self, tmp_path, capsys):
        code = run(
            "design-mask",
            "--theta-i", "30",
            "--target", "-7.8",
            "--target", "-60",
            "--weight", "1",
            "--out", str(tmp_path / "x.json"),
        )
        assert code == 1
        assert "--weight" in capsys.readouterr().err

    def test_invalid_angle_is_validation_error(self, tmp_path):
        code = run(
            "design-mask", "--theta-i", "95", "--target", "0",
            "--out", str(tmp_path / "x.json"),
        )
        assert code == 1


class TestDesignPeriod:
    def test_prints_orders(self, capsys):
        assert run("design-period", "--theta-i", "45", "--target", "-10") == 0
        out = capsys.readouterr().out
        assert "period: 9.3728 mm" in out
        assert "n=+1" in out

    def test_snapped_mask_output(self, tmp_path, capsys):
        path = tmp_path / "snap.json"
        code = run(
            "design-period",
            "--theta-i", "45", "--target", "-10",
            "--d0-mm", "2.5", "--wells", "35",
            "--out", str(path),
        )
        assert code == 0
        assert "stride 4" in capsys.readouterr().out
        design = MaskDesign.from_json(path.read_text())
        assert design.bits.count("1") == 9

    def test_out_without_snap_fails(self, tmp_path, capsys):
        code = run(
            "design-period", "--theta-i", "45", "--target", "-10",
            "--out", str(tmp_path / "x.json"),
        )
        assert code == 1


class TestSimulate:
    def test_writes_pattern_csv(self, mask_file, tmp_path):
        out = tmp_path / "pattern.csv"
        code = run(
            "simulate", "--mask", str(mask_file),
            "--start", "-90", "--stop", "0", "--step", "1",
            "--out", str(out),
        )
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "theta_deg,re,im,gain_linear,gain_db"
        assert len(lines) == 92

    def test_missing_mask_is_io_error(self, tmp_path):
        code = run("simulate", "--mask", str(tmp_path / "none.json"), "--out", "x.csv")
        assert code == 2

    def test_corrupt_mask_is_validation_error(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{]")
        code = run("simulate", "--mask", str(bad), "--out", str(tmp_path / "x.csv"))
        assert code == 1


class TestVerifyBounds:
    def test_writes_report(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = run("verify-bounds", "--trials", "10", "--seed", "5", "--out", str(out))
        assert code == 0
        assert "violations:          0" in capsys.readouterr().out
        doc = json.loads(out.read_text())
        assert doc["trials"] == 10


class TestThinning:
    def test_prints_table(self, capsys, tmp_path):
        out = tmp_path / "eta.csv"
        code = run(
            "thinning", "--theta-i", "60", "--theta-t", "-30",
            "--m-values", "35,100", "--out", str(out),
        )
        assert code == 0
        assert capsys.readouterr().out.startswith("M,eta")
        assert out.read_text().startswith("M,eta")

    def test_bad_m_values(self, capsys):
        code = run(
            "thinning", "--theta-i", "60", "--theta-t", "-30", "--m-values", "ten"
        )
        assert code == 1


class TestExportStl:
    def test_writes_three_solids(self, mask_file, tmp_path, capsys):
        prefix = tmp_path / "proto"
        code = run(
            "export-stl", "--mask", str(mask_file), "--rows", "3",
            "--out-prefix", str(prefix),
        )
        assert code == 0
        for solid in ("base", "pads", "stencil"):
            data = (tmp_path / f"proto_{solid}.stl").read_bytes()
            (count,) = struct.unpack("<I", data[80:84])
            assert len(data) == 84 + 50 * count
        assert "inkwell layout report" in capsys.readouterr().out


class TestCompare:
    def test_round_trip(self, mask_file, tmp_path, capsys):
        design = MaskDesign.from_json(mask_file.read_text())
        grid = angle_grid(-90, 0, 1.0)
        pattern = pattern_sweep(design.aperture, design.coefficients, 45.0, grid)
        db = pattern.gain_db - pattern.gain_db.max()
        meas = tmp_path / "meas.csv"
        meas.write_text(
            "theta_deg,power_dbm\n"
            + "".join(f"{t},{v - 25.0}\n" for t, v in zip(grid, db))
        )
        report = tmp_path / "report.json"
        code = run(
            "compare", "--measured", str(meas), "--mask", str(mask_file),
            "--target", "-10", "--out", str(report),
            "--normalized-out", str(tmp_path / "norm.csv"),
        )
        assert code == 0
        assert "angle error +0.00 deg" in capsys.readouterr().out
        doc = json.loads(report.read_text())
        assert doc["targets"][0]["found"]


class TestReproduceFigure:
    def test_writes_fig5_curves(self, tmp_path):
        code = run("reproduce-figure", "fig5", "--out-dir", str(tmp_path / "figs"))
        assert code == 0
        names = sorted(p.name for p in (tmp_path / "figs").iterdir())
        assert names == ["fig5_ideal.csv", "fig5_uniform_period.csv"]

    def test_unknown_figure(self, tmp_path):
        code = run("reproduce-figure", "nope", "--out-dir", str(tmp_path))
        assert code == 1
