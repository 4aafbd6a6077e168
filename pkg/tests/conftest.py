import importlib.util

import numpy as np
import pytest

from bqt.coherent_core import ChannelParams

if importlib.util.find_spec("scipy") is None:
    raise pytest.UsageError(
        "scipy is required for the test suite. Install dependencies with 'pip install -r requirements.txt'."
    )


def pytest_collection_modifyitems(config, items):
    """Automatically add a timeout to simulation and sweep heavy tests."""
    keywords = {"circuit", "simulator", "sweep", "fig5", "compare"}
    for item in items:
        path = str(item.fspath)
        name = item.name
        if any(k in path for k in keywords) or any(k in name for k in keywords):
            item.add_marker(pytest.mark.timeout(120))


@pytest.fixture
def bell_projector() -> np.ndarray:
    """Return ``(|00> + |11>)(<00| + <11|) / 2``."""
    psi = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    return np.outer(psi, psi.conj())


@pytest.fixture
def ghz_channel() -> ChannelParams:
    return ChannelParams(0.0, 3, 0)


@pytest.fixture
def bell_channel() -> ChannelParams:
    """Two modes at zero overlap: the channel pair is a Bell state."""
    return ChannelParams(0.0, 2, 0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
