import os
from pathlib import Path

import numpy as np
import pytest

from edge_atlas.datasets import ImageSet, load_mnist, resolve_data_dir, subset


def _data_dir() -> Path:
    # tests run from the repo root or tests/; prefer the env var
    env = os.environ.get("EDGE_ATLAS_DATA")
    if env:
        return Path(env)
    here = Path(__file__).resolve().parent.parent
    return here / "data" / "mnist"


def _mnist_available() -> bool:
    base = _data_dir()
    return any(
        (base / f"train-images-idx3-ubyte{suf}").exists() for suf in ("", ".gz")
    )


requires_mnist = pytest.mark.skipif(
    not _mnist_available(),
    reason="MNIST IDX files not found; set EDGE_ATLAS_DATA or run scripts/fetch_mnist.py",
)


@pytest.fixture(scope="session")
def mnist_dir() -> Path:
    if not _mnist_available():
        pytest.skip("MNIST data not available")
    return _data_dir()


@pytest.fixture(scope="session")
def mnist_train(mnist_dir) -> ImageSet:
    return load_mnist(mnist_dir, "train")


@pytest.fixture(scope="session")
def mnist_test(mnist_dir) -> ImageSet:
    return load_mnist(mnist_dir, "test")


@pytest.fixture(scope="session")
def desk_train(mnist_train) -> ImageSet:
    return subset(mnist_train, 10_000, seed=1)


@pytest.fixture(scope="session")
def desk_test(mnist_test) -> ImageSet:
    return subset(mnist_test, 2_000, seed=2)


@pytest.fixture(scope="session")
def synthetic_set() -> ImageSet:
    rng = np.random.default_rng(0)
    n = 600
    images = rng.random((n, 16))
    labels = np.repeat(np.arange(10), n // 10).astype(np.int64)
    return ImageSet(images=images, labels=labels, split="train")
