# -*- coding: utf-8 -*-
##
# @file tests/conftest.py
# @brief Shared fixtures and hypothesis profile.
#

from __future__ import annotations

from typing import Tuple

import pytest
from hypothesis import HealthCheck, settings

from hammerlab.experiments import worked_box_instance
from hammerlab.lpp import SourcesSinks
from hammerlab.points import WeightedPointSet

# [JP] numbaの初回コンパイルが締め切りを越えるため無効化 / [EN] first numba compile exceeds any deadline
settings.register_profile("hammerlab", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("hammerlab")


@pytest.fixture
def worked_box() -> Tuple[SourcesSinks, WeightedPointSet]:
    return worked_box_instance()


@pytest.fixture
def out_dir(tmp_path):
    d = tmp_path / "out"
    d.mkdir()
    return d
