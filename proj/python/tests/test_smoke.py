import math

import numpy as np
import pytest

import dsvgd


def test_rbf_kernel_matches_closed_form():
    x = np.array([0.0, 1.0])
    y = np.array([1.0, 3.0])
    value, grad = dsvgd.rbf_kernel(x, y, 2.0)
    assert value == pytest.approx(math.exp(-5.0 / 2.0))
    np.testing.assert_allclose(grad, -(2.0 / 2.0) * (x - y) * value)


def test_median_bandwidth_three_points():
    pts = np.array([[0.0], [1.0], [3.0]])
    # Pairwise squared distances 1, 4, 9; median 4; h = 4 / ln 3.
    assert dsvgd.median_bandwidth(pts) == pytest.approx(4.0 / math.log(3.0))


def test_kde_score_matches_finite_differences():
    rng = np.random.default_rng(0)
    centers = rng.normal(size=(20, 2))
    queries = rng.normal(size=(5, 2))
    scores = dsvgd.kde_score(queries, centers, 0.7)
    eps = 1e-6
    for i, q in enumerate(queries):
        for j in range(2):
            hi = q.copy()
            lo = q.copy()
            hi[j] += eps
            lo[j] -= eps
            fd = (
                dsvgd.kde_log_density(hi[None, :], centers, 0.7)[0]
                - dsvgd.kde_log_density(lo[None, :], centers, 0.7)[0]
            ) / (2 * eps)
            assert scores[i, j] == pytest.approx(fd, abs=1e-4)


def test_svgd_run_recovers_gaussian_moments():
    rng = np.random.default_rng(1)
    init = rng.normal(size=(80, 1)) * 0.1

    def score(points):
        return -(points - 3.0) / 4.0

    final = dsvgd.svgd_run(init, score, steps=600, mode="adagrad", base_rate=0.05)
    assert abs(final.mean() - 3.0) < 0.15
    assert abs(final.std(ddof=1) - 2.0) < 0.3


def test_annealed_rate_closed_form():
    for t in (0, 1, 10, 999):
        assert dsvgd.annealed_rate(0.2, t) == pytest.approx(0.2 * (0.5 + t) ** -0.55)


def test_reliability_two_bin_case():
    conf = [0.6] * 10 + [0.8] * 10
    correct = [i < 5 for i in range(10)] + [i < 9 for i in range(10)]
    result = dsvgd.reliability_and_mce(conf, correct)
    assert result["mce"] == pytest.approx(0.1)
    populated = [b for b in result["bins"] if b["count"] > 0]
    assert [b["count"] for b in populated] == [10, 10]


def test_grid_kl_drops_after_transport():
    rng = np.random.default_rng(2)
    init = rng.normal(size=(60, 1)) * 0.2 + 4.0

    def log_target(x):
        return -0.5 * float(x[0]) ** 2

    def score(points):
        return -points

    axes = [(-8.0, 8.0, 401)]
    kl_before = dsvgd.grid_kl(init, 0.3, log_target, axes)
    moved = dsvgd.svgd_run(init, score, steps=400, mode="adagrad", base_rate=0.1)
    kl_after = dsvgd.grid_kl(moved, 0.3, log_target, axes)
    assert kl_after < kl_before / 5.0


def test_run_experiment_round_trip():
    result = dsvgd.run_experiment(
        {
            "protocol": "dsvgd",
            "model": "toy1d",
            "toy.prior": "uniform",
            "agents": "2",
            "particles": "30",
            "rounds": "2",
            "local_steps": "15",
            "distill_steps": "15",
            "metrics": "kl",
            "seed": "3",
        }
    )
    assert result["status"] == "ok"
    kl_rows = [r for r in result["rows"] if r["metric"] == "kl"]
    assert len(kl_rows) >= 3
    assert all(math.isfinite(r["value"]) for r in kl_rows)


def test_run_experiment_rejects_bad_config():
    with pytest.raises(ValueError, match="protocol"):
        dsvgd.run_experiment({"protocol": "magic", "model": "toy1d"})


def test_run_toy_demo_writes_artifacts(tmp_path):
    out = tmp_path / "demo"
    result = dsvgd.run_toy_demo("udsvgd", str(out), seed=4, particles=25, rounds=2, steps=20)
    assert result["status"] == "ok"
    assert (out / "results.csv").is_file()
    assert (out / "kde_round_0.csv").is_file()
