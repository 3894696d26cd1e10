import pathlib

import numpy as np
import pytest

from ranksim.embeddings import EmbeddingMatrix, Vocabulary
from ranksim.outliers import OutlierTopic

DATA_DIR = pathlib.Path(__file__).parent / "data"

# contents of the golden mini_* fixtures, duplicated here on purpose so a
# loader regression cannot silently rewrite the expectation
GOLDEN_TOKENS = ["alpha", "beta", "gamma", "delta"]
GOLDEN_VALUES = np.array(
    [
        [0.25, -0.5, 1.0, 2.0],
        [1.5, 0.125, -0.25, 0.75],
        [-1.0, 2.5, 0.5, -0.125],
        [0.0625, -2.0, 1.25, 3.0],
    ],
    dtype=np.float32,
)


@pytest.fixture
def data_dir() -> pathlib.Path:
    return DATA_DIR


@pytest.fixture
def animal_matrix() -> EmbeddingMatrix:
    """Handmade matrix with two tight clusters and a compound token."""
    vocab = Vocabulary(["cat", "dog", "tiger", "car", "bus", "New_York", "New", "York"])
    data = np.array(
        [
            [0.90, 0.10, 0.00],
            [0.80, 0.20, 0.05],
            [0.85, 0.12, 0.02],
            [0.05, 0.90, 0.10],
            [0.10, 0.85, 0.12],
            [0.20, 0.20, 0.90],
            [1.00, 0.00, 0.00],
            [0.00, 1.00, 0.00],
        ],
        dtype=np.float32,
    )
    return EmbeddingMatrix(vocab, data)


def make_planted_topics(rng, n_topics=8, dims=300, noise=1e-3):
    """Synthetic planted-outlier data: per topic, 8 near-duplicate cluster
    vectors around a random unit direction plus 8 outliers orthogonal to it.

    Returns (topics, matrix).
    """
    tokens = []
    rows = []
    topics = []
    for t in range(n_topics):
        u = rng.standard_normal(dims)
        u /= np.linalg.norm(u)
        cluster = []
        for i in range(8):
            w = f"t{t}_w{i}"
            cluster.append(w)
            tokens.append(w)
            rows.append(u + noise * rng.standard_normal(dims))
        outliers = []
        classes = {}
        for j in range(8):
            o = f"t{t}_o{j}"
            v = rng.standard_normal(dims)
            v -= (v @ u) * u  # orthogonal to the cluster direction
            v /= np.linalg.norm(v)
            outliers.append(o)
            classes[o] = ("C1", "C2", "C3", "C4")[j // 2]
            tokens.append(o)
            rows.append(v)
        topics.append(OutlierTopic(f"topic{t}", cluster, outliers, classes))
    matrix = EmbeddingMatrix(Vocabulary(tokens), np.array(rows, dtype=np.float32))
    return topics, matrix
