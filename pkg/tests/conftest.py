import numpy as np
import pytest

from harstack._core import HAR_CLASS_NAMES
from harstack.data import Dataset, save_har_split


def blobs(n_per_class=30, n_classes=3, n_features=4, spread=0.6, seed=0):
    rng = np.random.default_rng(seed)
    centers = rng.normal(scale=3.0, size=(n_classes, n_features))
    X = np.vstack([c + spread * rng.normal(size=(n_per_class, n_features)) for c in centers])
    y = np.repeat(np.arange(n_classes), n_per_class)
    return X, y


def har_like(n_per_class, n_features=561, seed=0):
    """Six well separated classes in the published [-1, 1] feature range."""
    rng = np.random.default_rng(seed)
    centers = rng.uniform(-0.6, 0.6, size=(6, n_features))
    X = np.vstack([c + 0.15 * rng.normal(size=(n_per_class, n_features)) for c in centers])
    X = np.clip(X, -1.0, 1.0)
    y = np.repeat(np.arange(6), n_per_class)
    perm = rng.permutation(y.size)
    return Dataset(X[perm], y[perm], HAR_CLASS_NAMES)


@pytest.fixture
def toy():
    return blobs()


@pytest.fixture(scope="session")
def fake_har_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("har")
    save_har_split(har_like(40, seed=1), str(root), "train")
    save_har_split(har_like(15, seed=2), str(root), "test")
    return str(root)
