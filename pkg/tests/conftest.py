from pathlib import Path

import numpy as np
import pytest

from embeval.wordvec import WordVectors

DATA_DIR = Path(__file__).parent / "data"


def make_wv(words, matrix, name="toy"):
    matrix = np.asarray(matrix, dtype=np.float64)
    return WordVectors(
        name=name,
        dim=matrix.shape[1],
        vocab={w: i for i, w in enumerate(words)},
        matrix=matrix,
    )


@pytest.fixture
def toy_wv():
    return make_wv(["a", "b", "c"], [[1.0, 0.0], [0.0, 1.0], [2.0, 2.0]])


@pytest.fixture
def table2_path():
    return DATA_DIR / "table2_ucp.csv"
