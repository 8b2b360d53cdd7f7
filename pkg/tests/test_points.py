# -*- coding: utf-8 -*-
##
# @file tests/test_points.py
# @brief Point clouds, weight laws and atomic measures.
#

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hammerlab.points import (
    AtomicMeasure,
    Rect,
    WeightDistribution,
    WeightedPointSet,
    derive_seed,
    periodic_measure,
    pushforward,
    sample_atomic_poisson,
    sample_point_set,
    sqrt_tail_integral,
    thin,
)
from hammerlab.stats import poisson_chi2_test

# ------------------------------------------------------------
# 重み分布 / Weight laws
# ------------------------------------------------------------


@pytest.mark.parametrize(
    "text, label",
    [
        ("dirac1", "dirac:1"),
        ("dirac:2.5", "dirac:2.5"),
        ("exp1", "exp:1"),
        ("exp:0.5", "exp:0.5"),
        ("discrete:1:0.5,2:0.5", "discrete:1:0.5,2:0.5"),
    ],
)
def test_parse_weight_law(text, label):
    assert WeightDistribution.parse(text).label == label


@pytest.mark.parametrize("text", ["gauss", "dirac:-1", "exp:0", "discrete:1:0.3,2:0.3", "discrete:2:0.5,1:0.5"])
def test_parse_rejects_bad_laws(text):
    with pytest.raises(ValueError):
        WeightDistribution.parse(text)


def test_classical_flag():
    assert WeightDistribution.dirac().is_classical
    assert not WeightDistribution.dirac(2.0).is_classical
    assert not WeightDistribution.exponential().is_classical


def test_sqrt_tail_integral_closed_forms():
    assert sqrt_tail_integral(WeightDistribution.dirac(3.0)) == 3.0
    assert sqrt_tail_integral(WeightDistribution.exponential(0.5)) == 4.0
    law = WeightDistribution.discrete([1.0, 2.0], [0.5, 0.5])
    assert math.isclose(sqrt_tail_integral(law), 1.0 + math.sqrt(0.5))


def test_discrete_mean_and_sample_support():
    law = WeightDistribution.discrete([1.0, 3.0], [0.25, 0.75])
    assert law.mean == 2.5
    draws = law.sample(np.random.default_rng(0), 500)
    assert set(np.unique(draws)) <= {1.0, 3.0}


# ------------------------------------------------------------
# 点集合 / Point sets
# ------------------------------------------------------------


def test_sampling_is_reproducible():
    rect = Rect(0.0, 20.0, 0.0, 20.0)
    a = sample_point_set(rect, 1.0, WeightDistribution.exponential(), 42)
    b = sample_point_set(rect, 1.0, WeightDistribution.exponential(), 42)
    c = sample_point_set(rect, 1.0, WeightDistribution.exponential(), 43)
    assert np.array_equal(a.xs, b.xs) and np.array_equal(a.ts, b.ts) and np.array_equal(a.ws, b.ws)
    assert not (len(a) == len(c) and np.array_equal(a.xs, c.xs))


def test_point_set_is_sorted_and_read_only():
    pts = WeightedPointSet.from_points([(3.0, 1.0, 1.0), (1.0, 2.0, 1.0), (1.0, 0.5, 2.0)])
    assert pts.points == [(1.0, 0.5, 2.0), (1.0, 2.0, 1.0), (3.0, 1.0, 1.0)]
    with pytest.raises(ValueError):
        pts.xs[0] = 9.0


def test_point_set_validation():
    with pytest.raises(ValueError):
        WeightedPointSet.from_points([(1.0, 1.0, 0.0)])
    with pytest.raises(ValueError):
        WeightedPointSet.from_points([(5.0, 1.0, 1.0)], Rect(0.0, 2.0, 0.0, 2.0))
    with pytest.raises(ValueError):
        Rect(1.0, 1.0, 0.0, 1.0)


def test_window_excludes_south_and_west_sides():
    pts = WeightedPointSet.from_points(
        [(0.0, 1.0, 1.0), (1.0, 0.0, 1.0), (1.0, 1.0, 1.0), (2.0, 2.0, 1.0)], Rect(0.0, 3.0, 0.0, 3.0)
    )
    assert pts.window(0.0, 2.0, 0.0, 2.0).points == [(1.0, 1.0, 1.0), (2.0, 2.0, 1.0)]


def test_poisson_counts_pass_chi_square():
    """Cell counts over many seeds follow Poisson(area * intensity)."""
    rect = Rect(0.0, 2.0, 0.0, 2.0)
    counts = [len(sample_point_set(rect, 2.0, WeightDistribution.dirac(), derive_seed(7, k))) for k in range(400)]
    assert poisson_chi2_test(counts, 8.0, alpha=0.001).passed


def test_thinning_extremes_and_rate():
    rect = Rect(0.0, 50.0, 0.0, 50.0)
    pts = sample_point_set(rect, 1.0, WeightDistribution.dirac(), 5)
    assert len(thin(pts, 0.0, 1)) == 0
    assert len(thin(pts, 1.0, 1)) == len(pts)
    kept = len(thin(pts, 0.25, 1))
    sd = math.sqrt(len(pts) * 0.25 * 0.75)
    assert abs(kept - 0.25 * len(pts)) < 5 * sd
    with pytest.raises(ValueError):
        thin(pts, 1.5, 1)


def test_pushforward_preserves_weights_and_area():
    pts = sample_point_set(Rect(0.0, 4.0, 0.0, 9.0), 1.0, WeightDistribution.exponential(), 3)
    img = pushforward(pts, 3.0)
    assert math.isclose(img.rect.area, pts.rect.area)
    assert len(img) == len(pts)
    assert np.allclose(np.sort(img.ws), np.sort(pts.ws))
    with pytest.raises(ValueError):
        pushforward(pts, 0.0)


def test_point_csv_requires_columns(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("x,t\n1,2\n", encoding="utf-8")
    with pytest.raises(ValueError):
        WeightedPointSet.from_csv(p)
    with pytest.raises(FileNotFoundError):
        WeightedPointSet.from_csv(tmp_path / "missing.csv")


# ------------------------------------------------------------
# 原子測度 / Atomic measures
# ------------------------------------------------------------


def test_cumulative_is_signed_and_right_continuous():
    nu = AtomicMeasure.from_pairs([(-1.0, 2.0), (0.0, 3.0), (2.0, 5.0)])
    assert nu.cumulative(0.0) == 0.0
    assert nu.cumulative(1.0) == 0.0
    assert nu.cumulative(2.0) == 5.0
    assert nu.cumulative(-0.5) == -3.0
    assert nu.cumulative(-1.0) == -3.0
    assert nu.cumulative(-1.5) == -5.0
    assert nu.mass_in(-1.0, 0.0) == 3.0
    assert nu.mass_in(2.0, 1.0) == 0.0


def test_duplicate_atoms_are_merged():
    nu = AtomicMeasure.from_pairs([(1.0, 1.0), (1.0, 2.0), (0.5, 1.0)])
    assert nu.pairs == [(0.5, 1.0), (1.0, 3.0)]


def test_reflect_and_dominates():
    nu = AtomicMeasure.from_pairs([(1.0, 2.0), (3.0, 1.0)])
    assert nu.reflect().pairs == [(-3.0, 1.0), (-1.0, 2.0)]
    assert nu.dominates(AtomicMeasure.from_pairs([(1.0, 1.5)]))
    assert not nu.dominates(AtomicMeasure.from_pairs([(2.0, 0.5)]))
    assert nu.plus(nu).dominates(nu)


def test_periodic_measure_lattice():
    right = periodic_measure((0.0, 3.0), 2.0)
    assert right.positions.tolist() == [0.5, 1.0, 1.5, 2.0, 2.5, 3.0]
    assert np.all(right.masses == 1.0)
    left = periodic_measure((-2.0, 2.0), 1.0, side="left")
    assert left.positions.tolist() == [-2.0, -1.0]
    with pytest.raises(ValueError):
        periodic_measure((0.0, 1.0), 1.0, side="up")


@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_atomic_poisson_stays_in_interval(seed):
    nu = sample_atomic_poisson((-5.0, 5.0), 1.5, WeightDistribution.dirac(), seed)
    assert np.all((nu.positions >= -5.0) & (nu.positions <= 5.0))
    assert math.isclose(nu.mass_in(-6.0, 6.0), nu.total)


def test_derive_seed_separates_streams():
    seeds = {derive_seed(1, k, role) for k in range(20) for role in range(3)}
    assert len(seeds) == 60
