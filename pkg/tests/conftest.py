import numpy as np
import pytest

from casa.core import State, WorldConfig
from casa.intents import Intent, IntentSet, RbfBasis


@pytest.fixture
def world():
    return WorldConfig()


@pytest.fixture
def wide_world():
    # symmetric around the origin so goal examples can sit at (0, 0)
    return WorldConfig(workspace_bounds=((-2.0, 2.0), (-2.0, 2.0)), planning_horizon=20)


@pytest.fixture
def origin_goal():
    return Intent.goal("g", (0.0, 0.0))


@pytest.fixture
def basis(world):
    return RbfBasis.for_world(world)


@pytest.fixture
def two_goals():
    return IntentSet((Intent.goal("a", (1.5, 1.0)), Intent.goal("b", (0.5, 1.0))))
