import gzip
import struct

import numpy as np
import pytest

from conftest import requires_mnist
from edge_atlas.datasets import (
    ImageSet,
    compute_stats,
    load_cache,
    load_idx,
    load_mnist,
    save_cache,
    subset,
)
from edge_atlas.errors import (
    CountMismatchError,
    DomainError,
    MagicNumberError,
    TruncatedFileError,
)


def _write_idx_pair(tmp_path, n=40, rows=4, cols=4, label_magic=2049,
                    image_magic=2051, truncate_images=0, n_labels=None):
    rng = np.random.default_rng(0)
    pixels = rng.integers(0, 256, size=(n, rows, cols), dtype=np.uint8)
    labels = (np.arange(n) % 10).astype(np.uint8)
    img_path = tmp_path / "imgs-idx3-ubyte"
    lab_path = tmp_path / "labs-idx1-ubyte"
    payload = struct.pack(">iiii", image_magic, n, rows, cols) + pixels.tobytes()
    if truncate_images:
        payload = payload[:-truncate_images]
    img_path.write_bytes(payload)
    m = n if n_labels is None else n_labels
    lab_path.write_bytes(struct.pack(">ii", label_magic, m) + labels[:m].tobytes())
    return img_path, lab_path, pixels


def test_load_idx_roundtrip(tmp_path):
    img, lab, pixels = _write_idx_pair(tmp_path)
    s = load_idx(img, lab)
    assert s.images.shape == (40, 16)
    assert np.allclose(s.images * 255.0, pixels.reshape(40, 16))
    assert s.images.min() >= 0.0 and s.images.max() <= 1.0
    assert list(s.labels[:10]) == list(range(10))


def test_load_idx_gzip_transparent(tmp_path):
    img, lab, _ = _write_idx_pair(tmp_path)
    img_gz = tmp_path / "imgs-idx3-ubyte.gz"
    img_gz.write_bytes(gzip.compress(img.read_bytes()))
    plain = load_idx(img, lab)
    gzipped = load_idx(img_gz, lab)
    assert np.array_equal(plain.images, gzipped.images)


def test_load_idx_magic_mismatch(tmp_path):
    img, lab, _ = _write_idx_pair(tmp_path)
    # a label file with the image magic must be rejected as labels
    bad_lab = tmp_path / "bad-labs"
    bad_lab.write_bytes(struct.pack(">ii", 2051, 40) + bytes(40))
    with pytest.raises(MagicNumberError):
        load_idx(img, bad_lab)
    with pytest.raises(MagicNumberError):
        load_idx(lab, lab)  # labels where images expected


def test_load_idx_truncation_names_byte_counts(tmp_path):
    img, lab, _ = _write_idx_pair(tmp_path, truncate_images=100)
    with pytest.raises(TruncatedFileError) as err:
        load_idx(img, lab)
    message = str(err.value)
    assert "656" in message  # expected bytes: 16 header + 40*16 pixels
    assert "556" in message  # actual


def test_load_idx_count_mismatch(tmp_path):
    img, lab, _ = _write_idx_pair(tmp_path, n_labels=39)
    with pytest.raises((CountMismatchError, TruncatedFileError)):
        load_idx(img, lab)


def test_count_mismatch_distinct_from_truncation(tmp_path):
    # label file is well formed but describes fewer records
    img, lab, _ = _write_idx_pair(tmp_path)
    short_lab = tmp_path / "short-labs"
    short_lab.write_bytes(struct.pack(">ii", 2049, 20) + bytes(20))
    with pytest.raises(CountMismatchError):
        load_idx(img, short_lab)


def test_compute_stats_constant_set():
    s = ImageSet(images=np.full((8, 5), 0.5), labels=np.zeros(8, dtype=np.int64))
    stats = compute_stats(s)
    assert stats.input_variance == 0.0
    assert stats.input_mean_sq == pytest.approx(0.25, abs=1e-15)


def test_subset_determinism_and_stratification(synthetic_set):
    a = subset(synthetic_set, 100, seed=5)
    b = subset(synthetic_set, 100, seed=5)
    assert np.array_equal(a.images, b.images)
    counts = np.bincount(a.labels, minlength=10)
    assert np.all(np.abs(counts - 10) <= 1)
    with pytest.raises(DomainError):
        subset(synthetic_set, len(synthetic_set) + 1, seed=0)


def test_subset_full_size_is_content_identity(synthetic_set):
    full = subset(synthetic_set, len(synthetic_set), seed=9)
    order_a = np.lexsort(synthetic_set.images.T)
    order_b = np.lexsort(full.images.T)
    assert np.array_equal(synthetic_set.images[order_a], full.images[order_b])
    assert np.array_equal(synthetic_set.labels[order_a], full.labels[order_b])


def test_cache_roundtrip(tmp_path, synthetic_set):
    path = tmp_path / "cache.npz"
    save_cache(synthetic_set, path)
    back = load_cache(path)
    assert back.images.tobytes() == synthetic_set.images.tobytes()
    assert np.array_equal(back.labels, synthetic_set.labels)
    assert back.split == synthetic_set.split


def test_imageset_validation():
    with pytest.raises(CountMismatchError):
        ImageSet(images=np.zeros((3, 4)), labels=np.zeros(2, dtype=np.int64))
    with pytest.raises(DomainError):
        ImageSet(images=np.full((2, 2), 1.5), labels=np.zeros(2, dtype=np.int64))


# ---------------------------------------------------------------------------
# Real MNIST
# ---------------------------------------------------------------------------

@requires_mnist
def test_mnist_shapes(mnist_train, mnist_test):
    assert mnist_train.images.shape == (60_000, 784)
    assert mnist_test.images.shape == (10_000, 784)
    assert mnist_train.split == "train"
    assert mnist_test.split == "test"


@requires_mnist
def test_mnist_pixel_statistics(mnist_train):
    stats = compute_stats(mnist_train)
    assert stats.input_variance == pytest.approx(0.095, abs=0.005)
    assert stats.input_mean_sq == pytest.approx(0.017, abs=0.003)


@requires_mnist
def test_mnist_subset_stats_close_to_full(mnist_train):
    sub = subset(mnist_train, 10_000, seed=3)
    full = compute_stats(mnist_train)
    part = compute_stats(sub)
    assert abs(part.input_variance - full.input_variance) / full.input_variance < 0.10
    assert abs(part.input_mean_sq - full.input_mean_sq) / full.input_mean_sq < 0.10


@requires_mnist
def test_mnist_env_var_resolution(mnist_dir, monkeypatch):
    monkeypatch.setenv("EDGE_ATLAS_DATA", str(mnist_dir))
    s = load_mnist(None, "test")
    assert len(s) == 10_000
