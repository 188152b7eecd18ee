"""Figure regeneration tests.

Inputs are produced by the primary CLI (invoked as a subprocess: the file
formats are the only coupling), then each figure is rendered twice and the
two renders must be byte-identical.
"""

import os
import shutil
import subprocess
from pathlib import Path

import pytest

from fixedpurity_figures import FigureSpec, make_figure
from fixedpurity_figures.io import InputFormatError, read_cdf_table, read_csv_columns

CLI = shutil.which("fixedpurity")
pytestmark = pytest.mark.skipif(CLI is None, reason="primary CLI not installed")


def run_cli(args: list[str], cwd: Path) -> None:
    res = subprocess.run([CLI, *args], cwd=cwd, capture_output=True, text=True)
    assert res.returncode == 0, res.stderr


@pytest.fixture(scope="module")
def artifacts(tmp_path_factory) -> Path:
    """Desk-scale CLI outputs shared by the rendering tests."""
    root = tmp_path_factory.mktemp("artifacts")
    env_cache = root / "cache"
    env = dict(os.environ, FIXEDPURITY_CACHE_DIR=str(env_cache))
    for n in (2, 3, 4, 5, 6):
        res = subprocess.run(
            [CLI, "cdf", "--dim", str(n), "--level", "radial", "--build-table",
             "--knots", "48"],
            cwd=root, capture_output=True, text=True, env=env,
        )
        assert res.returncode == 0, res.stderr
    for mu in ("0.35", "0.5", "0.8"):
        run_cli(["sample", "--dim", "3", "--purity", mu, "--count", "150", "--seed", "9",
                 "--outdir", "batches", "--jobs", "1"], root)
    run_cli(["experiment", "ent-vs-purity", "--purities", "0.3,0.6,0.99", "--count", "120",
             "--seed", "3", "--outdir", "exp", "--jobs", "1"], root)
    run_cli(["experiment", "cqc-scan", "--purities", "0.3,0.6,0.99", "--count", "120",
             "--seed", "3", "--outdir", "exp", "--jobs", "1"], root)
    run_cli(["experiment", "induced-marginal", "--n", "3", "--k", "3", "--points", "60",
             "--outdir", "exp"], root)
    run_cli(["experiment", "induced-marginal", "--n", "3", "--k", "6", "--points", "60",
             "--outdir", "exp"], root)
    run_cli(["experiment", "max-qmi-curve", "--points", "120", "--outdir", "exp"], root)
    return root


def _tables(root: Path) -> list[str]:
    cache = root / "cache"
    return sorted(str(p) for p in cache.glob("*.json")
                  if not p.name.endswith("manifest.json"))


def _render_twice(spec_kwargs: dict, out_dir: Path, name: str) -> Path:
    a = out_dir / f"{name}_a.png"
    b = out_dir / f"{name}_b.png"
    make_figure(FigureSpec(output=str(a), **spec_kwargs))
    make_figure(FigureSpec(output=str(b), **spec_kwargs))
    assert a.read_bytes() == b.read_bytes(), "regeneration is not byte-stable"
    return a


def test_radial_cdf_overlay(artifacts, tmp_path):
    tables = _tables(artifacts)
    assert len(tables) == 5
    # monotone curves, ordered by dimension as in the radial overlay figure
    docs = sorted((read_cdf_table(p) for p in tables), key=lambda t: t["dim"])
    assert [d["dim"] for d in docs] == [2, 3, 4, 5, 6]
    out = _render_twice({"figure": "radial-cdf-overlay", "inputs": tuple(tables)},
                        tmp_path, "overlay")
    assert out.stat().st_size > 1000


def test_radial_cdf_overlay_svg_stable(artifacts, tmp_path):
    tables = _tables(artifacts)
    a, b = tmp_path / "o1.svg", tmp_path / "o2.svg"
    make_figure(FigureSpec(figure="radial-cdf-overlay", inputs=tuple(tables), output=str(a)))
    make_figure(FigureSpec(figure="radial-cdf-overlay", inputs=tuple(tables), output=str(b)))
    assert a.read_bytes() == b.read_bytes()


def test_n3_circles(artifacts, tmp_path):
    batches = sorted(str(p) for p in (artifacts / "batches").glob("sample_dim3_*.json"))
    assert len(batches) == 3
    _render_twice({"figure": "n3-circles", "inputs": tuple(batches)}, tmp_path, "circles")


def test_ent_vs_purity(artifacts, tmp_path):
    path = artifacts / "exp" / "ent_vs_purity.csv"
    cols = read_csv_columns(path, ("mu", "concurrence", "ln"))
    assert cols["mu"].size == 360
    _render_twice({"figure": "ent-vs-purity", "inputs": (str(path),)}, tmp_path, "ent")


def test_cqc_triangles(artifacts, tmp_path):
    path = artifacts / "exp" / "cqc_scan.csv"
    _render_twice({"figure": "cqc-triangles", "inputs": (str(path),)}, tmp_path, "cqc")


def test_induced_curves(artifacts, tmp_path):
    paths = tuple(str(artifacts / "exp" / f"induced_n3_k{k}.csv") for k in (3, 6))
    _render_twice({"figure": "induced-curves", "inputs": paths}, tmp_path, "induced")


def test_max_qmi_curve(artifacts, tmp_path):
    path = artifacts / "exp" / "max_qmi_curve.csv"
    _render_twice({"figure": "max-qmi-curve", "inputs": (str(path),)}, tmp_path, "maxqmi")


def test_schema_mismatch_is_descriptive(artifacts, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\r\n1,2\r\n")
    with pytest.raises(InputFormatError, match="missing columns"):
        make_figure(FigureSpec(figure="cqc-triangles", inputs=(str(bad),),
                               output=str(tmp_path / "x.png")))
    with pytest.raises(InputFormatError, match="missing input files"):
        FigureSpec(figure="cqc-triangles", inputs=(str(tmp_path / "nope.csv"),),
                   output=str(tmp_path / "x.png"))


def test_cli_entrypoint(artifacts, tmp_path):
    from fixedpurity_figures.cli import main

    path = artifacts / "exp" / "max_qmi_curve.csv"
    out = tmp_path / "cli.png"
    assert main(["max-qmi-curve", "--in", str(path), "--out", str(out)]) == 0
    assert out.exists()
    assert main(["max-qmi-curve", "--in", str(tmp_path / "missing.csv"),
                 "--out", str(out)]) == 3
