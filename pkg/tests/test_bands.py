import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from huberfamily.bands import (LAMBDA_MAX_QUANTILE, FamilyGrid,
                               central_envelopes, common_grid,
                               evaluate_family, modified_band_depth,
                               summarize_family)
from huberfamily.familial import PosteriorFamily, bootstrap_family
from huberfamily.paths import HuberPath


def naive_mbd(curves):
    b, g = curves.shape
    depth = np.zeros(b)
    for i in range(b):
        for j in range(i + 1, b):
            lo = np.minimum(curves[i], curves[j])
            hi = np.maximum(curves[i], curves[j])
            depth += np.mean((curves >= lo) & (curves <= hi), axis=1)
    return depth / (b * (b - 1) / 2)


def random_curves(rng, b=30, g=16):
    curves = rng.normal(size=(b, g)).cumsum(axis=1)
    curves[: b // 3] = np.round(curves[: b // 3])  # force ties
    return curves


def test_depth_matches_pair_enumeration():
    rng = np.random.default_rng(0)
    for _ in range(20):
        curves = random_curves(rng)
        assert_allclose(modified_band_depth(curves), naive_mbd(curves), atol=1e-12)


def test_depth_examples():
    two = np.array([[0.0, 1.0], [1.0, 0.0]])
    d = modified_band_depth(two)
    assert d[0] == d[1]
    steps = np.array([[1.0] * 4, [2.0] * 4, [3.0] * 4])
    d = modified_band_depth(steps)
    assert d[1] > d[0] and d[1] > d[2]
    assert np.all((0 <= d) & (d <= 1))


def test_depth_permutation():
    rng = np.random.default_rng(1)
    curves = random_curves(rng)
    perm = rng.permutation(curves.shape[0])
    assert_allclose(modified_band_depth(curves[perm]), modified_band_depth(curves)[perm])


def test_envelopes():
    rng = np.random.default_rng(2)
    curves = random_curves(rng, b=40)
    env = central_envelopes(FamilyGrid(np.arange(16.0), curves))
    assert_array_equal(env.lower[-1], curves.min(axis=0))
    assert_array_equal(env.upper[-1], curves.max(axis=0))
    assert np.all(np.diff(env.lower, axis=0) <= 0)
    assert np.all(np.diff(env.upper, axis=0) >= 0)
    assert np.all(env.lower <= env.median_curve) and np.all(env.median_curve <= env.upper)

    same = np.tile(curves[0], (5, 1))
    env = central_envelopes(FamilyGrid(np.arange(16.0), same))
    assert np.all(env.lower == curves[0]) and np.all(env.upper == curves[0])
    assert env.median_index == 0


def test_grid():
    fam = bootstrap_family(np.random.default_rng(3).normal(size=50), 300, seed=1)
    grid = common_grid(fam, 2)
    lead = np.quantile([p.lambdas[0] for p in fam.paths], LAMBDA_MAX_QUANTILE)
    assert grid[0] == 0 and grid[1] == pytest.approx(lead)
    flat = PosteriorFamily(tuple(HuberPath([0.0], [2.0]) for _ in range(4)), 0)
    grid = common_grid(flat, 5)
    assert grid[-1] > 0
    assert np.all(evaluate_family(flat, grid).curves == 2.0)


def test_summary_columns():
    fam = bootstrap_family(np.random.default_rng(4).exponential(size=40), 100, seed=2)
    env = summarize_family(fam, 32, (0.5, 1.0))
    assert env.columns() == ["lambda", "median", "lower_50", "upper_50",
                             "lower_100", "upper_100"]
    rows = env.rows()
    assert len(rows) == 32 and all(len(r) == 6 for r in rows)
