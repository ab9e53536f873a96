import numpy as np
import pytest

from event_fusion.core.event_model import EventArray
from event_fusion.models.args import FilterConfig, SimulationConfig


@pytest.fixture
def filter_config():
    def make(**overrides):
        values = {"c_on": 0.15, "c_off": 0.15}
        values.update(overrides)
        return FilterConfig(**values)
    return make


@pytest.fixture
def noiseless_sim():
    def make(**overrides):
        values = {"noise_fraction": 0.0, "truncation_fraction": 0.0, "frame_delay": 0.0}
        values.update(overrides)
        return SimulationConfig(**values)
    return make


@pytest.fixture
def random_events():
    def make(n, width, height, t_end=1.0, seed=0):
        rng = np.random.default_rng(seed)
        return EventArray(
            np.sort(rng.uniform(0.0, t_end, n)),
            rng.integers(0, width, n),
            rng.integers(0, height, n),
            rng.choice(np.array([-1, 1]), n),
        )
    return make
