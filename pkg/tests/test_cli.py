import json
import math

import numpy as np
import pytest

from trimedge.cli import main, read_sample_file, write_sample_file


def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


@pytest.fixture
def sample_file(tmp_path):
    path = tmp_path / "sample.txt"
    path.write_text("".join(f"{v}\n" for v in range(1, 11)))
    return path


def test_read_sample_file_parsing(tmp_path):
    path = tmp_path / "s.txt"
    path.write_text("# header\n1.5\n 2.5 # trailing comment\n\n3.5\n4.5\n")
    np.testing.assert_array_equal(read_sample_file(path), [1.5, 2.5, 3.5, 4.5])


def test_sample_file_round_trip(tmp_path):
    path = tmp_path / "s.txt"
    vals = np.random.default_rng(0).normal(size=10)
    write_sample_file(path, vals)
    np.testing.assert_array_equal(read_sample_file(path), vals)


def test_population_uniform(capsys):
    rc, out, _ = run(
        capsys,
        "population", "--family", "uniform", "--params", "0", "1",
        "--alpha", "0.25", "--beta", "0.75",
    )
    assert rc == 0
    doc = json.loads(out)
    assert doc["sigma2_W"] == pytest.approx(1.0 / 24.0, abs=1e-7)
    assert "beta_n" not in doc


def test_population_with_bias(capsys):
    rc, out, _ = run(
        capsys,
        "population", "--family", "exponential", "--params", "1",
        "--alpha", "0.1", "--beta", "0.9", "--n", "100",
    )
    assert rc == 0
    doc = json.loads(out)
    assert doc["beta_n"] == pytest.approx(0.004, abs=1e-10)


def test_population_atom_at_quantile_exits_2(capsys):
    rc, _, err = run(
        capsys,
        "population", "--family", "atomic", "--params", "0.3",
        "--alpha", "0.25", "--beta", "0.75",
    )
    assert rc == 2
    assert "error" in err


def test_analyze_basic(capsys, sample_file):
    rc, out, _ = run(
        capsys, "analyze", str(sample_file), "--alpha", "0.2", "--beta", "0.8"
    )
    assert rc == 0
    rep = json.loads(out)
    assert rep["estimates"]["t_n"] == pytest.approx(5.5)
    assert rep["spec"] == {"alpha": 0.2, "beta": 0.8, "k": 3, "m": 8}
    # the symmetric sample kills the skewness plug-in
    assert abs(rep["estimates"]["lambda1_hat"]) < 1e-12
    assert "expansion_normalized" in rep and "expansion_studentized" in rep


def test_analyze_zero_correction_interval(capsys, sample_file):
    # symmetric sample, symmetric trim, integer indices: all expansion
    # coefficients vanish and the interval is the plain normal one
    rc, out, _ = run(
        capsys,
        "analyze", str(sample_file), "--alpha", "0.2", "--beta", "0.8",
        "--level", "0.95",
    )
    assert rc == 0
    rep = json.loads(out)
    est = rep["estimates"]
    assert abs(est["lambda2_hat"]) < 1e-12
    assert abs(est["beta_n_hat"]) < 1e-12
    half = 1.959963985 * math.sqrt(est["s2_n"]) / (0.6 * math.sqrt(10))
    ci = rep["confidence_interval"]
    assert ci["lower"] == pytest.approx(5.5 - half, abs=1e-6)
    assert ci["upper"] == pytest.approx(5.5 + half, abs=1e-6)


def test_analyze_out_file(capsys, sample_file, tmp_path):
    out_path = tmp_path / "report.json"
    rc, out, _ = run(
        capsys,
        "analyze", str(sample_file), "--alpha", "0.2", "--beta", "0.8",
        "--out", str(out_path),
    )
    assert rc == 0 and out == ""
    rep = json.loads(out_path.read_text())
    assert rep["estimates"]["t_n"] == pytest.approx(5.5)


def test_analyze_bad_level(capsys, sample_file):
    rc, _, err = run(
        capsys,
        "analyze", str(sample_file), "--alpha", "0.2", "--beta", "0.8",
        "--level", "0.4",
    )
    assert rc == 2


def test_analyze_missing_file(capsys, tmp_path):
    rc, _, err = run(
        capsys, "analyze", str(tmp_path / "nope.txt"), "--alpha", "0.2", "--beta", "0.8"
    )
    assert rc == 2
    assert "error" in err


def test_analyze_unparseable_file(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("1.0\ntwo\n3.0\n4.0\n")
    rc, _, err = run(capsys, "analyze", str(bad), "--alpha", "0.2", "--beta", "0.8")
    assert rc == 2
    assert "not a number" in err


def test_analyze_constant_sample_exits_3(capsys, tmp_path):
    const = tmp_path / "const.txt"
    const.write_text("2.0\n" * 8)
    rc, _, err = run(capsys, "analyze", str(const), "--alpha", "0.25", "--beta", "0.75")
    assert rc == 3
    assert "degenerate" in err


def test_analyze_invalid_trim_exits_2(capsys, sample_file):
    rc, _, _ = run(capsys, "analyze", str(sample_file), "--alpha", "0.8", "--beta", "0.2")
    assert rc == 2


def test_unknown_family_exits_2(capsys):
    rc, _, err = run(
        capsys,
        "population", "--family", "triangular", "--params", "1",
        "--alpha", "0.25", "--beta", "0.75",
    )
    assert rc == 2


def test_simulate_requires_seed(capsys, tmp_path):
    rc, _, err = run(
        capsys,
        "simulate", "--family", "uniform", "--params", "0", "1",
        "--alpha", "0.25", "--beta", "0.75", "--n-list", "100",
        "--reps", "2000", "--out-dir", str(tmp_path / "o"),
    )
    assert rc == 2
    assert "seed" in err


def test_simulate_reps_floor_exits_2(capsys, tmp_path):
    rc, _, err = run(
        capsys,
        "simulate", "--family", "uniform", "--params", "0", "1",
        "--alpha", "0.25", "--beta", "0.75", "--n-list", "100",
        "--reps", "100", "--seed", "1", "--out-dir", str(tmp_path / "o"),
    )
    assert rc == 2
    assert "reps" in err


def test_simulate_artifacts_and_determinism(capsys, tmp_path):
    argv = [
        "simulate", "--family", "exponential", "--params", "1",
        "--alpha", "0.1", "--beta", "0.9", "--n-list", "100",
        "--reps", "2000", "--seed", "5",
        "--targets", "normal", "population_expansion", "empirical_expansion",
        "--dump-sample",
    ]
    outs = []
    for w, name in ((1, "a"), (2, "b")):
        out_dir = tmp_path / name
        rc, _, _ = run(capsys, *argv, "--workers", str(w), "--out-dir", str(out_dir))
        assert rc == 0
        outs.append(out_dir)
    for fname in (
        "sup_distances.csv",
        "empirical_expansion.csv",
        "summary.json",
        "sample_n100_r0.txt",
    ):
        a = (outs[0] / fname).read_bytes()
        b = (outs[1] / fname).read_bytes()
        assert a == b, fname
    summary = json.loads((outs[0] / "summary.json").read_text())
    assert summary["config"]["base_seed"] == 5
    assert {row["target"] for row in summary["sup_distances"]} == {
        "normal",
        "population_expansion",
    }
    assert all("runtime_s" not in row for row in summary["sup_distances"])


def test_simulate_dump_round_trip(capsys, tmp_path):
    out_dir = tmp_path / "sim"
    rc, _, _ = run(
        capsys,
        "simulate", "--family", "exponential", "--params", "1",
        "--alpha", "0.1", "--beta", "0.9", "--n-list", "100",
        "--reps", "1000", "--seed", "5", "--targets", "normal",
        "--out-dir", str(out_dir), "--dump-sample",
    )
    assert rc == 0
    summary = json.loads((out_dir / "summary.json").read_text())
    dumped = summary["dumped_samples"]["100"]
    rc, out, _ = run(
        capsys,
        "analyze", str(out_dir / "sample_n100_r0.txt"),
        "--alpha", "0.1", "--beta", "0.9",
    )
    assert rc == 0
    est = json.loads(out)["estimates"]
    for key in ("t_n", "mu_hat_W", "s2_n", "lambda1_hat", "lambda2_hat", "beta_n_hat"):
        assert est[key] == dumped[key], key  # exact, not approximate


def test_simulate_config_file(capsys, tmp_path):
    cfg = tmp_path / "config.json"
    cfg.write_text(
        json.dumps(
            {
                "family": "uniform",
                "params": [0, 1],
                "alpha": 0.25,
                "beta": 0.75,
                "n_list": [100],
                "reps": 1000,
                "seed": 11,
                "targets": ["normal"],
            }
        )
    )
    out_dir = tmp_path / "out"
    rc, _, _ = run(capsys, "simulate", "--config", str(cfg), "--out-dir", str(out_dir))
    assert rc == 0
    assert (out_dir / "sup_distances.csv").exists()


def test_simulate_config_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"family": "uniform", "bootstrap": True}))
    rc, _, err = run(
        capsys, "simulate", "--config", str(cfg), "--out-dir", str(tmp_path / "o")
    )
    assert rc == 2
    assert "bootstrap" in err


def test_diagnose_remainder_table(capsys, tmp_path):
    out_dir = tmp_path / "diag"
    rc, _, _ = run(
        capsys,
        "diagnose", "--family", "exponential", "--params", "1",
        "--alpha", "0.1", "--beta", "0.9", "--lemma", "lemma31",
        "--n-list", "50", "100", "--reps", "200", "--seed", "7",
        "--out-dir", str(out_dir),
    )
    assert rc == 0
    lines = (out_dir / "remainder_lemma31.csv").read_text().splitlines()
    assert lines[0].startswith("n,reps,q50_abs_scaled")
    assert len(lines) == 3


def test_diagnose_moments_table(capsys, tmp_path):
    out_dir = tmp_path / "diag"
    rc, _, _ = run(
        capsys,
        "diagnose", "--family", "uniform", "--params", "0", "1",
        "--alpha", "0.25", "--beta", "0.75", "--lemma", "moments",
        "--n-list", "50", "--reps", "10000", "--seed", "7",
        "--out-dir", str(out_dir),
    )
    assert rc == 0
    lines = (out_dir / "moment_checks.csv").read_text().splitlines()
    assert len(lines) == 2


def test_diagnose_bad_lemma(capsys, tmp_path):
    rc, _, err = run(
        capsys,
        "diagnose", "--family", "exponential", "--params", "1",
        "--alpha", "0.1", "--beta", "0.9", "--lemma", "lemma99",
        "--n-list", "50", "--reps", "200", "--seed", "7",
        "--out-dir", str(tmp_path / "d"),
    )
    assert rc == 2
