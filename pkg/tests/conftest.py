from __future__ import annotations

import numpy as np
import pytest

from game_factories import worked_params
from hybrid_pursuit.models.game import GameParams


@pytest.fixture
def worked() -> GameParams:
    return worked_params()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)
