"""Smoke tests for the compiled bindings: each exposed operation is exercised
once with a value that can be checked against plain numpy."""

import math
import os
from pathlib import Path

import numpy as np
import pytest

import catmanip as cm


def config_dir() -> Path:
    value = os.environ.get("CATMANIP_CONFIG_DIR")
    assert value, "CATMANIP_CONFIG_DIR must point at the golden configs"
    return Path(value)


def rot_z(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def test_normalize_denormalize_round_trip():
    rng = np.random.default_rng(5)
    pts = rng.normal(size=(100, 3)) * np.array([1.0, 2.0, 4.0])
    res = cm.normalize(pts)
    coords = np.asarray(res["coords"])
    assert coords.shape == (100, 3)
    assert coords.min() >= -1e-12 and coords.max() <= 1.0 + 1e-12
    assert res["scales"][0] == 1.0
    back = np.asarray(cm.denormalize(coords, res["extents"], res["origin"]))
    assert np.abs(back - pts).max() < 1e-9


def test_normalize_rejects_empty_and_flat_clouds():
    with pytest.raises(cm.CatmanipError):
        cm.normalize(np.zeros((0, 3)))
    flat = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    with pytest.raises(cm.CatmanipError):
        cm.normalize(flat)


def test_umeyama_recovers_a_known_similarity():
    rng = np.random.default_rng(7)
    src = rng.normal(size=(60, 3))
    theta, scale, t = 0.8, 1.4, np.array([0.3, -0.2, 0.9])
    dst = scale * (src @ rot_z(theta).T) + t
    rec = cm.umeyama(src, dst)
    assert abs(rec["scale"] - scale) < 1e-9
    assert np.abs(np.asarray(rec["p"]) - t).max() < 1e-9
    expected_q = np.array([math.cos(theta / 2), 0.0, 0.0, math.sin(theta / 2)])
    assert abs(np.dot(np.asarray(rec["q"]), expected_q)) > 1.0 - 1e-12


def test_solve_pose9d_generate_and_recover():
    rng = np.random.default_rng(9)
    coords = rng.uniform(size=(80, 3))
    scales = np.array([1.0, 1.7, 0.6])
    theta, scale, t = 0.4, 1.3, np.array([0.2, -0.1, 0.5])
    observed = scale * ((coords * scales) @ rot_z(theta).T) + t
    rec = cm.solve_pose9d(coords, scales, observed)
    assert abs(rec["scale"] - scale) < 1e-9
    assert np.abs(np.asarray(rec["p"]) - t).max() < 1e-9
    assert np.abs(np.asarray(rec["scales"]) - scales).max() == 0.0
    assert rec["rms"] < 1e-9


def test_nearest_neighbors_matches_brute_force():
    rng = np.random.default_rng(11)
    data = rng.normal(size=(200, 3))
    idx, dist = cm.nearest_neighbors(data, data[[5, 17, 99]])
    assert list(idx) == [5, 17, 99]
    assert np.abs(dist).max() == 0.0

    queries = rng.normal(size=(20, 3))
    idx, dist = cm.nearest_neighbors(data, queries)
    pairwise = np.linalg.norm(queries[:, None, :] - data[None, :, :], axis=2)
    assert list(idx) == list(pairwise.argmin(axis=1))
    assert np.abs(dist - pairwise.min(axis=1)).max() < 1e-12


def test_attention_forced_two_point_case():
    # Distances to the floor plane are 0 and ln 3, so the softmax complement
    # weights are exactly 3/4 and 1/4.
    model = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, math.log(3.0)]])
    res = cm.attention(model, [1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0],
                       [{"type": "plane"}])
    weights = np.asarray(res["weights"])
    assert abs(weights[0] - 0.75) < 1e-12
    assert abs(weights[1] - 0.25) < 1e-12
    assert res["anchor_index"] == 0


def test_correspond_identity_on_identical_clouds():
    rng = np.random.default_rng(13)
    coords = rng.uniform(size=(50, 3))
    ones = np.ones(3)
    idx, residuals = cm.correspond(coords, ones, coords, ones)
    assert list(idx) == list(range(50))
    assert np.abs(residuals).max() < 1e-12


def test_run_config_executes_and_replays_deterministically():
    rows = cm.run_config(config_dir() / "standing_transfer.ini", jobs=2)
    assert len(rows) == 10
    for row in rows:
        assert row["scenario"] == "standing_transfer"
        assert row["policy"] == "closed"
        assert row["success"] == 1
        assert row["final_err_mm"] <= 0.5
    again = cm.run_config(config_dir() / "standing_transfer.ini", jobs=2)
    assert len(again) == len(rows)
    for a, b in zip(rows, again):
        for key in ("scenario", "seed", "policy", "success", "ticks",
                    "final_err_mm", "final_err_deg", "failure_reason"):
            assert a[key] == b[key]
        assert np.array_equal(a["final_true_pose"]["q"], b["final_true_pose"]["q"])
        assert np.array_equal(a["final_true_pose"]["p"], b["final_true_pose"]["p"])


def test_run_config_missing_file_raises():
    with pytest.raises(cm.CatmanipError):
        cm.run_config(config_dir() / "no_such_scenario.ini")
