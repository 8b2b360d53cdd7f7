# -*- coding: utf-8 -*-
##
# @file tests/test_busemann.py
# @brief Directions, Busemann differences and the sampled measures ν_α, ν*_α.
#

from __future__ import annotations

import math

import numpy as np
import pytest

from hammerlab.busemann import (
    BusemannMeasure,
    DirectionAngle,
    busemann_maximization_gap,
    busemann_region,
    check_intensity,
    domination_violations,
    estimate_busemann,
    multi_class_report,
    multi_class_sample,
    ray_crossing,
    sample_nu_alpha,
    sample_nu_star_alpha,
)
from hammerlab.points import AtomicMeasure, WeightDistribution, sample_point_set

RADII = (4.0, 8.0, 16.0, 32.0)


def _region(alpha: DirectionAngle, seed: int, hi=(2.0, 2.0)):
    rect = busemann_region([alpha], RADII, hi)
    return sample_point_set(rect, 1.0, WeightDistribution.dirac(), seed)


def _sample(pairs) -> BusemannMeasure:
    return BusemannMeasure(AtomicMeasure.from_pairs(pairs), True, 8.0)


# ------------------------------------------------------------
# 方向 / Directions
# ------------------------------------------------------------


def test_direction_from_tangent():
    a = DirectionAngle.from_tan(4.0)
    assert math.isclose(a.tan, 4.0)
    assert math.isclose(a.rho, 2.0)
    assert math.isclose(a.phi, 0.25)
    assert math.isclose(a.lam(), 2.0)
    assert math.isclose(a.psi(), 1.0)
    assert math.isclose(a.lam(3.0), 3.0)


def test_direction_anchor_points_south_west():
    a = DirectionAngle.from_tan(1.0)
    x, t = a.anchor(10.0)
    assert x < 0 and t < 0
    assert math.isclose(math.hypot(x, t), 10.0)
    assert math.isclose(x, t)


@pytest.mark.parametrize("alpha", [math.pi, 1.5 * math.pi, 0.5, 5.0])
def test_direction_rejects_angles_outside_the_quadrant(alpha):
    with pytest.raises(ValueError):
        DirectionAngle(alpha)


def test_direction_rejects_nonpositive_tangent():
    with pytest.raises(ValueError):
        DirectionAngle.from_tan(0.0)


# ------------------------------------------------------------
# Busemann関数 / Busemann differences
# ------------------------------------------------------------


def test_busemann_traces_are_additive():
    alpha = DirectionAngle.from_tan(1.0)
    region = _region(alpha, 3)
    x, y, w = (0.0, 0.0), (1.0, 0.5), (2.0, 1.5)
    xy = estimate_busemann(region, alpha, x, y, RADII)
    yw = estimate_busemann(region, alpha, y, w, RADII)
    xw = estimate_busemann(region, alpha, x, w, RADII)
    assert len(xy.trace) == len(RADII)
    for a, b, c in zip(xy.trace, yw.trace, xw.trace):
        assert a + b == pytest.approx(c, abs=1e-9)
    if xy.converged:
        assert xy.stabilized_at in RADII
    else:
        assert xy.stabilized_at is None


def test_busemann_rejects_bad_radii_and_small_regions():
    alpha = DirectionAngle.from_tan(1.0)
    region = _region(alpha, 3)
    with pytest.raises(ValueError):
        estimate_busemann(region, alpha, (0.0, 0.0), (1.0, 1.0), (8.0, 4.0))
    with pytest.raises(ValueError):
        estimate_busemann(region, alpha, (0.0, 0.0), (1.0, 1.0), (8.0,))
    with pytest.raises(ValueError):
        estimate_busemann(region, alpha, (0.0, 0.0), (1.0, 1.0), (4.0, 64.0))
    with pytest.raises(ValueError):
        estimate_busemann(region, alpha, (0.0, 0.0), (-5.0, 1.0), RADII)


def test_sampled_measure_matches_its_cumulative():
    alpha = DirectionAngle.from_tan(2.0)
    region = _region(alpha, 5)
    sample = sample_nu_alpha(alpha, 2.0, region, RADII, lo=-2.0)
    nu = sample.measure
    assert np.all((nu.positions > -2.0) & (nu.positions <= 2.0))
    assert np.all(nu.masses > 0)
    assert np.all(np.diff(sample.cumulative) >= -1e-9)
    assert sample.cumulative[np.searchsorted(sample.mesh, 0.0)] == 0.0
    assert np.allclose(nu.cumulative(sample.mesh), sample.cumulative, atol=1e-6)


def test_sampled_dual_measure_lives_on_the_vertical_axis():
    alpha = DirectionAngle.from_tan(2.0)
    region = _region(alpha, 5)
    sample = sample_nu_star_alpha(alpha, 2.0, region, RADII)
    assert np.all((sample.measure.positions > 0.0) & (sample.measure.positions <= 2.0))
    assert np.allclose(sample.measure.cumulative(sample.mesh), sample.cumulative, atol=1e-6)
    with pytest.raises(ValueError):
        sample_nu_star_alpha(alpha, 0.0, region, RADII)
    with pytest.raises(ValueError):
        sample_nu_alpha(alpha, 1.0, region, RADII, lo=0.5)


@pytest.mark.parametrize("s", [0.0, 0.5, 1.0])
def test_busemann_values_satisfy_the_maximization_property(s):
    alpha = DirectionAngle.from_tan(1.0)
    radii = (8.0, 16.0, 32.0, 64.0)
    region = sample_point_set(busemann_region([alpha], radii, (1.0, 1.0)), 1.0, WeightDistribution.dirac(), 7)
    assert busemann_maximization_gap(region, alpha, s, 1.0, 1.0, radii) == pytest.approx(0.0, abs=1e-9)


def test_maximization_gap_validation():
    alpha = DirectionAngle.from_tan(1.0)
    region = _region(alpha, 7, hi=(1.0, 1.0))
    with pytest.raises(ValueError):
        busemann_maximization_gap(region, alpha, 2.0, 1.0, 1.0, RADII)
    # [JP] 切断が最小半径の基準点より下 / [EN] cut below the nearest anchor
    with pytest.raises(ValueError):
        busemann_maximization_gap(region, alpha, -3.0, 1.0, 1.0, RADII)


def test_ray_crossing_is_ordered():
    alpha = DirectionAngle.from_tan(1.0)
    region = _region(alpha, 7, hi=(1.0, 1.0))
    below, above = ray_crossing(region, alpha, (1.0, 1.0), RADII)
    assert below <= above <= 1.0


# ------------------------------------------------------------
# 多クラス / Multiple classes
# ------------------------------------------------------------


def test_domination_violations_on_handmade_samples():
    low = _sample([(0.5, 1.0), (1.5, 1.0)])
    high = _sample([(0.5, 2.0), (1.0, 1.0), (1.5, 1.0)])
    assert domination_violations([low, high]) == 0
    assert domination_violations([high, low]) == 2
    assert domination_violations([low]) == 0


def test_multi_class_sample_requires_increasing_directions():
    a, b = DirectionAngle.from_tan(1.0), DirectionAngle.from_tan(2.0)
    region = sample_point_set(busemann_region([a, b], RADII, (1.0, 1.0)), 1.0, WeightDistribution.dirac(), 1)
    with pytest.raises(ValueError):
        multi_class_sample([b, a], region, RADII, 1.0)
    with pytest.raises(ValueError):
        multi_class_sample([], region, RADII, 1.0)
    samples = multi_class_sample([a, b], region, RADII, 1.0)
    assert len(samples) == 2


def test_multi_class_report_structure():
    angles = [DirectionAngle.from_tan(1.0), DirectionAngle.from_tan(2.0)]
    rep = multi_class_report(angles, 2, seed=3, radii=RADII)
    assert rep["replicas"] == 2
    assert 0 <= rep["converged"] <= 2
    assert len(rep["means"]) == 2
    assert rep["targets"] == pytest.approx([1.0, math.sqrt(2.0)])


def test_intensity_check_needs_gamma_for_general_weights():
    with pytest.raises(ValueError):
        check_intensity(DirectionAngle.from_tan(1.0), WeightDistribution.exponential(), 2, radii=RADII)
