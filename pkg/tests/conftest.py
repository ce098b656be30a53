"""Shared fixtures: synthetic datasets with known structure.

The blob fixture is the workhorse: two 1000-point Gaussian clusters in
10 dimensions that differ only in feature f3 (6 sigma apart), so any
correct explanation must put f3 first by a wide margin.
"""

from __future__ import annotations

import numpy as np
import pytest

from clusterlens.data import Dataset, FeatureColumn, load_csv
from clusterlens.explain import ClusterSelection
from clusterlens.training import TrainingConfig

BLOB_SEED = 42
BLOB_N = 2000
BLOB_D = 10
BLOB_SHIFT = 6.0  # separation in f3, in units of sigma


def make_blob_arrays(seed: int = BLOB_SEED):
    """n=2000, d=10 standard normals; rows 0..999 shifted +6 in f3."""
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(BLOB_N, BLOB_D))
    X[: BLOB_N // 2, 3] += BLOB_SHIFT
    return X


def csv_bytes(X, names=None) -> bytes:
    """Render a float matrix as CSV with full round-trip precision."""
    n, d = X.shape
    names = names or [f"f{j}" for j in range(d)]
    lines = [",".join(names)]
    for row in X:
        lines.append(",".join(format(v, ".17g") for v in row))
    return ("\n".join(lines) + "\n").encode("utf-8")


@pytest.fixture(scope="session")
def blob_X():
    return make_blob_arrays()


@pytest.fixture(scope="session")
def blob_csv(blob_X) -> bytes:
    return csv_bytes(blob_X)


@pytest.fixture(scope="session")
def blob_dataset(blob_csv) -> Dataset:
    return load_csv(blob_csv)


@pytest.fixture(scope="session")
def blob_selection() -> ClusterSelection:
    return ClusterSelection(tuple(range(BLOB_N // 2)))


@pytest.fixture(scope="session")
def default_config() -> TrainingConfig:
    return TrainingConfig(seed=BLOB_SEED)


@pytest.fixture(scope="session")
def blob_report(blob_dataset, blob_selection, default_config):
    """One full explanation run on the blob fixture, shared across tests."""
    from clusterlens.explain import explain_selection

    return explain_selection(blob_dataset, blob_selection, default_config)


@pytest.fixture()
def four_row_dataset() -> Dataset:
    """The hand-checkable fixture: one feature, x=[1,1,10,10], edge at 5.

    Bin 0 holds the two 1s, bin 1 the two 10s, bin 2 is the (empty)
    missing bin.
    """
    col = FeatureColumn("x", np.array([1.0, 1.0, 10.0, 10.0])).with_edges(
        np.array([5.0])
    )
    return Dataset((col,), "four-row")


@pytest.fixture()
def four_row_labels() -> np.ndarray:
    return np.array([1.0, 1.0, 0.0, 0.0])


def make_xor_arrays(seed: int = 7, n: int = 200):
    """Binary features a, b plus one noise column; labels a XOR b.

    Neither a nor b separates the labels alone, so all main effects are
    ~flat and the (a, b) interaction carries the entire signal.
    """
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 2, size=n).astype(np.float64)
    b = rng.integers(0, 2, size=n).astype(np.float64)
    noise = rng.normal(size=n)
    y = np.logical_xor(a > 0.5, b > 0.5).astype(np.float64)
    X = np.column_stack([a, b, noise])
    return X, y


@pytest.fixture()
def xor_fixture():
    X, y = make_xor_arrays()
    ds = load_csv(csv_bytes(X, names=["a", "b", "noise"]))
    return ds, y
