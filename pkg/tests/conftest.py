import numpy as np
import pytest

from entdetect.forest.model import ForestConfig, train_model


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture(scope="session")
def tiny_model2():
    """Small but functional 2-qubit model for CLI/service plumbing tests."""
    return train_model(
        2,
        ForestConfig(n_trees=8, samples_per_class=128, n_draws=1024, seed=3),
    )


@pytest.fixture(scope="session")
def tiny_model2_path(tiny_model2, tmp_path_factory):
    from entdetect.forest.model import save_model

    path = tmp_path_factory.mktemp("models") / "tiny2.json"
    save_model(tiny_model2, path)
    return path
