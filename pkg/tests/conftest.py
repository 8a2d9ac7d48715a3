import os

import hypothesis
import numpy as np
import pytest

from heckelab.spectral_kernel import build_window
from heckelab_config import apply_config, default_config

np.seterr(all="warn")

hypothesis.settings.register_profile("default", max_examples=50, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=200, deadline=None, derandomize=True)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(autouse=True)
def pristine_config():
    """Every test starts from the built-in settings."""
    apply_config(default_config())
    yield
    apply_config(default_config())


@pytest.fixture(scope="session")
def window():
    return build_window(1.0)


@pytest.fixture(scope="session")
def sample_points():
    rng = np.random.default_rng(7)
    points = rng.normal(size=(5, 3))
    return points / np.linalg.norm(points, axis=1, keepdims=True)
