import csv
import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from morphoseg import io, synthetic
from morphoseg.amr import AmrParams
from morphoseg.cli import boundary_mask, image_id, main
from morphoseg.gradient import load_gradient
from morphoseg.watershed import amr_wt


@pytest.fixture(scope="module")
def demo(tmp_path_factory):
    out = tmp_path_factory.mktemp("demo")
    assert main(["demo", "--out", str(out)]) == 0
    return out


def test_demo_contents(demo):
    meta = json.loads((demo / "demo.json").read_text())
    assert len(meta["images"]) >= 4
    for rec in meta["images"]:
        assert (demo / rec["ground_truth"].split("/")[-1]).is_file()
    assert np.unique(io.load_labels(demo / "two_basin_gt.png")).tolist() == [1, 2]


def test_demo_deterministic(demo, tmp_path):
    assert main(["demo", "--out", str(tmp_path)]) == 0
    for f in demo.iterdir():
        assert f.read_bytes() == (tmp_path / f.name).read_bytes().replace(
            str(tmp_path).encode(), str(demo).encode()
        ), f.name


def test_reconstruct_constant(tmp_path):
    io.write_pfm(tmp_path / "flat.pfm", np.full((8, 8), 0.25))
    assert main(["reconstruct", str(tmp_path / "flat.pfm"), "--s", "2", "--out", str(tmp_path / "o")]) == 0
    np.testing.assert_array_equal(io.read_pfm(tmp_path / "o" / "flat_psi.pfm"), np.full((8, 8), 0.25))
    meta = json.loads((tmp_path / "o" / "flat_amr.json").read_text())
    assert meta["iterations_used"] == 3
    assert meta["flags"]["eta"] == 1e-4


def test_reconstruct_two_basin(demo, tmp_path):
    assert main(["reconstruct", str(demo / "two_basin.pfm"), "--s", "1", "--out", str(tmp_path)]) == 0
    meta = json.loads((tmp_path / "two_basin_amr.json").read_text())
    assert meta["gap_history"][-1] <= 1e-4


def test_missing_file(tmp_path, capsys):
    assert main(["segment", str(tmp_path / "ghost.pgm"), "--out", str(tmp_path)]) == 2
    assert "ghost.pgm" in capsys.readouterr().err


def test_bad_parameter_exit_code(demo, tmp_path):
    assert main(["segment", str(demo / "two_basin.pfm"), "--s", "5", "--m", "2", "--out", str(tmp_path)]) == 2


def test_unparseable_flag_exit_code(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["segment", "x.pgm", "--connectivity", "6"])
    assert exc.value.code == 2


def test_segment_constant(tmp_path):
    io.write_pnm(tmp_path / "flat.pgm", np.full((10, 10), 0.5))
    assert main(["segment", str(tmp_path / "flat.pgm"), "--overlay", "--out", str(tmp_path)]) == 0
    labels = io.load_labels(tmp_path / "flat_labels.png")
    assert np.all(labels == 1)
    assert not boundary_mask(labels).any()
    assert (tmp_path / "flat_overlay.png").is_file()


def test_segment_quadrants(demo, tmp_path):
    assert main(["segment", str(demo / "four_quadrant.pgm"), "--overlay", "--out", str(tmp_path)]) == 0
    labels = io.load_labels(tmp_path / "four_quadrant_labels.png")
    assert labels.max() == 4
    rows, cols = np.nonzero(boundary_mask(labels))
    # every boundary pixel lies within one pixel of the separating lines
    near = (np.abs(rows - 31.5) <= 1.5) | (np.abs(cols - 31.5) <= 1.5)
    assert near.all()


def test_segment_with_gradient_file(demo, tmp_path):
    src = demo / "four_quadrant.pgm"
    gfile = demo / "two_basin.pfm"  # any gradient of the same shape would do
    io.write_pfm(tmp_path / "g.pfm", np.kron(load_gradient(gfile), np.ones((2, 2))))
    assert main(["segment", str(src), "--gradient", str(tmp_path / "g.pfm"), "--out", str(tmp_path)]) == 0
    expected = amr_wt(load_gradient(tmp_path / "g.pfm"), AmrParams(), precomputed_gradient=True)
    np.testing.assert_array_equal(io.load_labels(tmp_path / "four_quadrant_labels.png"), expected)


def test_gradient_shape_mismatch(demo, tmp_path):
    code = main(["segment", str(demo / "four_quadrant.pgm"), "--gradient", str(demo / "two_basin.pfm"),
                 "--out", str(tmp_path)])
    assert code == 2


def test_hierarchy(demo, tmp_path):
    assert main(["hierarchy", str(demo / "two_basin.pfm"), "--s", "1", "--m", "6", "--out", str(tmp_path)]) == 0
    meta = json.loads((tmp_path / "two_basin_hierarchy.json").read_text())
    levels = meta["levels"]
    assert len(levels) == 7
    assert levels[-1]["region_count"] == 2
    counts = [e["region_count"] for e in levels]
    assert counts == sorted(counts, reverse=True)
    assert io.load_labels(tmp_path / "two_basin_level06.png").max() == 2


def test_spectral(demo, tmp_path):
    assert main(["spectral", str(demo / "planted_color.ppm"), "--k", "3", "--out", str(tmp_path)]) == 0
    labels = io.load_labels(tmp_path / "planted_color_spectral.png")
    assert labels.max() == 3
    meta = json.loads((tmp_path / "planted_color_spectral.json").read_text())
    assert meta["flags"]["k"] == 3 and meta["flags"]["sigma"] == 1.0


def test_spectral_needs_color(demo, tmp_path):
    assert main(["spectral", str(demo / "four_quadrant.pgm"), "--k", "2", "--out", str(tmp_path)]) == 2


def test_eval_segment(demo, tmp_path):
    inputs = [str(demo / n) for n in ("two_basin.pfm", "four_quadrant.pgm", "checkerboard.pgm")]
    assert main(["eval", *inputs, "--segment", "--gt", str(demo), "--out", str(tmp_path)]) == 0
    with (tmp_path / "eval.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert [r["image"] for r in rows] == ["two_basin", "four_quadrant", "checkerboard", "mean"]
    assert all(float(r["pri"]) > 0.95 for r in rows)
    assert json.loads((tmp_path / "eval.json").read_text())["vi_unit"] == "bits"


def test_eval_labels_identity(demo, tmp_path):
    gt_dir = tmp_path / "gt" / "two_basin"
    gt_dir.mkdir(parents=True)
    shutil.copy(demo / "two_basin_gt.png", gt_dir / "a.png")
    seg = tmp_path / "two_basin_labels.png"
    shutil.copy(demo / "two_basin_gt.png", seg)
    assert main(["eval", str(seg), "--gt", str(tmp_path / "gt"), "--out", str(tmp_path)]) == 0
    row = next(csv.DictReader((tmp_path / "eval.csv").open()))
    assert (float(row["pri"]), float(row["cv"]), float(row["vi"])) == (1.0, 1.0, 0.0)


def test_eval_missing_ground_truth(demo, tmp_path):
    (tmp_path / "gt").mkdir()
    code = main(["eval", str(demo / "two_basin_gt.png"), "--gt", str(tmp_path / "gt"), "--out", str(tmp_path)])
    assert code == 2


def test_image_id():
    from pathlib import Path

    assert image_id(Path("x/12003_labels.png")) == "12003"
    assert image_id(Path("12003.jpg")) == "12003"


def test_thread_count_does_not_change_output(demo, tmp_path, monkeypatch):
    inputs = [str(demo / n) for n in ("two_basin.pfm", "four_quadrant.pgm", "checkerboard.pgm")]
    outs = []
    for threads in ("1", "3"):
        monkeypatch.setenv("MORPHOSEG_THREADS", threads)
        out = tmp_path / threads
        assert main(["segment", *inputs, "--out", str(out)]) == 0
        outs.append(out)
    for f in outs[0].glob("*.png"):
        assert f.read_bytes() == (outs[1] / f.name).read_bytes()


def test_console_script(tmp_path):
    exe = shutil.which("morphoseg")
    cmd = [exe] if exe else [sys.executable, "-m", "morphoseg.cli"]
    proc = subprocess.run([*cmd, "demo", "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "demo.json").is_file()
