import json
from pathlib import Path

import numpy as np
import pytest

from fixedpurity.cli import main
from fixedpurity.manifest import sha256_file
from fixedpurity.sampler import SampleBatch


def run(argv: list[str]) -> int:
    return main(argv)


def test_sample_writes_batch_and_manifest(tmp_path):
    out = tmp_path / "out"
    rc = run(["sample", "--dim", "4", "--purity", "0.99", "--count", "20", "--seed", "7",
              "--emit-matrix", "--csv", "--outdir", str(out), "--jobs", "1"])
    assert rc == 0
    jpath = out / "sample_dim4_mu0.99_seed7.json"
    batch = SampleBatch.from_json(jpath.read_text())
    assert len(batch.samples) == 20
    assert np.max(np.abs(batch.purities() - 0.99)) <= 1e-11
    man = json.loads((out / "manifest_sample.json").read_text())
    paths = {o["path"]: o["sha256"] for o in man["outputs"]}
    assert str(jpath) in paths
    assert paths[str(jpath)] == sha256_file(jpath)
    csv_bytes = (out / "sample_dim4_mu0.99_seed7.csv").read_bytes()
    assert csv_bytes.startswith(b"index,purity,r,phi2,X3,")
    assert b"\r\n" in csv_bytes


def test_sample_mms_n2(tmp_path):
    out = tmp_path / "o"
    rc = run(["sample", "--dim", "2", "--purity", "0.5", "--count", "1", "--seed", "1",
              "--emit-matrix", "--outdir", str(out), "--jobs", "1"])
    assert rc == 0
    batch = SampleBatch.from_json((out / "sample_dim2_mu0.5_seed1.json").read_text())
    np.testing.assert_allclose(batch.samples[0].matrix, np.eye(2) / 2.0, atol=1e-12)


def test_sample_determinism_bytes(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        run(["sample", "--dim", "3", "--purity", "0.6", "--count", "10", "--seed", "5",
             "--outdir", str(out), "--jobs", "1"])
    fa = (a / "sample_dim3_mu0.6_seed5.json").read_bytes()
    fb = (b / "sample_dim3_mu0.6_seed5.json").read_bytes()
    assert fa == fb


def test_sample_dim6_matrices_valid(tmp_path):
    out = tmp_path / "o"
    rc = run(["sample", "--dim", "6", "--purity", "0.5", "--count", "10", "--seed", "2",
              "--emit-matrix", "--outdir", str(out), "--jobs", "1"])
    assert rc == 0
    from fixedpurity.matrixcore import DensityMatrix

    batch = SampleBatch.from_json((out / "sample_dim6_mu0.5_seed2.json").read_text())
    for s in batch.samples:
        rho = DensityMatrix(s.matrix)
        assert abs(rho.purity - 0.5) <= 1e-11


def test_exit_code_domain_error(tmp_path):
    rc = run(["sample", "--dim", "4", "--purity", "0.1", "--count", "1", "--seed", "1",
              "--outdir", str(tmp_path)])
    assert rc == 3
    rc = run(["cdf", "--dim", "4", "--level", "radial", "--at", "0.95"])
    assert rc == 3


def test_exit_code_usage():
    with pytest.raises(SystemExit) as exc:
        run(["sample", "--dim", "4"])  # missing required flags
    assert exc.value.code == 2


def test_cdf_value_output(capsys):
    rc = run(["cdf", "--dim", "4", "--level", "radial", "--at-purity", "0.3334"])
    assert rc == 0
    out = capsys.readouterr().out
    val = float(out.split("=")[1].split()[0])
    assert val == pytest.approx(0.3026, abs=1e-3)


def test_invcdf_examples(capsys):
    rc = run(["invcdf", "--dim", "3", "--level", "radial", "--p", "0.6046"])
    assert rc == 0
    out = capsys.readouterr().out
    mu = float(out.split("mu =")[1])
    assert mu == pytest.approx(0.5, abs=1e-6)


def test_cdf_conditional_and_inverse(capsys):
    rc = run(["cdf", "--dim", "4", "--level", "3", "--context", "0.45", "--at", "0.5"])
    assert rc == 0
    rc = run(["invcdf", "--dim", "4", "--level", "3", "--context", "0.45", "--p", "0.5"])
    assert rc == 0
    rc = run(["invcdf", "--dim", "6", "--level", "4", "--context", "0.5", "--p", "0.3"])
    assert rc == 0


def test_regions_output(capsys):
    rc = run(["regions", "--dim", "4"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "30.2300%" in out
    assert "54.5303%" in out
    assert "15.2397%" in out


def test_build_table_cache_content_addressed(tmp_path, monkeypatch):
    cache = tmp_path / "cache"
    monkeypatch.setenv("FIXEDPURITY_CACHE_DIR", str(cache))
    rc = run(["cdf", "--dim", "4", "--level", "radial", "--build-table"])
    assert rc == 0
    files = sorted(p for p in cache.iterdir() if not p.name.endswith("manifest.json"))
    assert len(files) == 1
    digest_before = sha256_file(files[0])
    rc = run(["cdf", "--dim", "4", "--level", "radial", "--build-table"])
    assert rc == 0
    assert sha256_file(files[0]) == digest_before  # rebuild is byte-identical


def test_measures_pipeline(tmp_path):
    out = tmp_path / "o"
    run(["sample", "--dim", "4", "--purity", "0.26", "--count", "30", "--seed", "4",
         "--emit-matrix", "--outdir", str(out), "--jobs", "1"])
    batch_file = out / "sample_dim4_mu0.26_seed4.json"
    rc = run(["measures", "--in", str(batch_file), "--split", "2x2",
              "--set", "purity_a,concurrence,ln,negativity"])
    assert rc == 0
    lines = (out / "sample_dim4_mu0.26_seed4_measures.csv").read_text().strip().splitlines()
    assert lines[0] == "index,mu,purity_a,concurrence,ln,negativity"
    for line in lines[1:]:
        cells = line.split(",")
        assert float(cells[3]) == 0.0  # separable region: concurrence vanishes


def test_measures_requires_matrices(tmp_path):
    out = tmp_path / "o"
    run(["sample", "--dim", "4", "--purity", "0.5", "--count", "3", "--seed", "4",
         "--outdir", str(out), "--jobs", "1"])
    rc = run(["measures", "--in", str(out / "sample_dim4_mu0.5_seed4.json"),
              "--split", "2x2", "--set", "concurrence"])
    assert rc == 3


def test_measures_bad_split(tmp_path):
    out = tmp_path / "o"
    run(["sample", "--dim", "4", "--purity", "0.5", "--count", "2", "--seed", "4",
         "--emit-matrix", "--outdir", str(out), "--jobs", "1"])
    rc = run(["measures", "--in", str(out / "sample_dim4_mu0.5_seed4.json"),
              "--split", "3x2", "--set", "concurrence"])
    assert rc == 3


def test_experiment_werner(tmp_path):
    out = tmp_path / "o"
    rc = run(["experiment", "werner-sweep", "--d", "2", "--points", "21", "--outdir", str(out)])
    assert rc == 0
    lines = (out / "werner_d2.csv").read_text().strip().splitlines()
    assert lines[0] == "p,mu,negativity,ln,concurrence"
    rows = [line.split(",") for line in lines[1:]]
    for cells in rows:
        p, ln = float(cells[0]), float(cells[3])
        if p <= 1.0 / 3.0 + 1e-12:
            assert ln == 0.0
    assert float(rows[-1][3]) == pytest.approx(1.0, abs=1e-12)


def test_experiment_haar_hist(tmp_path):
    out = tmp_path / "o"
    rc = run(["experiment", "haar-hist", "--dim", "2", "--count", "5000", "--bin", "0.01",
              "--seed", "3", "--outdir", str(out)])
    assert rc == 0
    lines = (out / "haar_hist_dim2.csv").read_text().strip().splitlines()
    assert lines[0] == "bin_left,bin_right,count,fraction"
    total = sum(int(line.split(",")[2]) for line in lines[1:])
    assert total == 5000


def test_experiment_cqc_triangle(tmp_path):
    out = tmp_path / "o"
    rc = run(["experiment", "cqc-scan", "--purities", "0.5", "--count", "25", "--seed", "2",
              "--outdir", str(out), "--jobs", "1"])
    assert rc == 0
    lines = (out / "cqc_scan.csv").read_text().strip().splitlines()
    assert lines[0] == "mu,index,cmi_zx,qmi"
    for line in lines[1:]:
        _, _, c, q = (float(t) for t in line.split(","))
        assert q >= c - 1e-9


def test_experiment_cqc_families(tmp_path):
    out = tmp_path / "o"
    rc = run(["experiment", "cqc-scan", "--purities", "0.9", "--count", "10", "--seed", "2",
              "--include-families", "--outdir", str(out), "--jobs", "1"])
    assert rc == 0
    lines = (out / "cqc_families.csv").read_text().strip().splitlines()
    assert lines[0] == "family,p,cmi_zx,qmi"
    fams = {line.split(",")[0] for line in lines[1:]}
    assert {"bell-mcs", "mms-mcs", "bell-mms"} <= fams
    for line in lines[1:]:
        cells = line.split(",")
        c, q = float(cells[2]), float(cells[3])
        assert q >= c - 1e-9  # families stay inside the triangle


def test_experiment_induced_and_maxqmi(tmp_path):
    out = tmp_path / "o"
    assert run(["experiment", "induced-marginal", "--n", "2", "--k", "4", "--points", "20",
                "--outdir", str(out)]) == 0
    assert run(["experiment", "max-qmi-curve", "--points", "20", "--outdir", str(out)]) == 0
    lines = (out / "induced_n2_k4.csv").read_text().strip().splitlines()
    assert lines[0] == "mu,pdf,cdf"
    cdfs = [float(line.split(",")[2]) for line in lines[1:]]
    assert cdfs == sorted(cdfs)
    assert cdfs[-1] == pytest.approx(1.0, abs=1e-9)
