import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # reference_impls importable

from fdsched import SystemConfig, draw_channels


@pytest.fixture
def small_cfg():
    return SystemConfig()


@pytest.fixture
def chan():
    """Factory: seeded ChannelRealization for an optional config."""

    def make(seed, cfg=None):
        cfg = cfg if cfg is not None else SystemConfig()
        return draw_channels(cfg, np.random.default_rng(seed))

    return make
