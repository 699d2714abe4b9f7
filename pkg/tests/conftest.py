import numpy as np
import pytest

from teluref.embeddings import EmbeddingTable, OovPolicy
from teluref.synthetic import SyntheticCorpusConfig, generate_synthetic_corpus


@pytest.fixture(scope="session")
def tiny_table():
    """Two known 3-dim words: a -> e1, b -> e2."""
    return EmbeddingTable(
        dim=3,
        entries={
            "a": np.array([1.0, 0.0, 0.0]),
            "b": np.array([0.0, 1.0, 0.0]),
        },
        oov_policy=OovPolicy.ZEROS,
    )


@pytest.fixture(scope="session")
def synth_corpus():
    """The standard 40-conversation synthetic corpus plus its embeddings."""
    return generate_synthetic_corpus(SyntheticCorpusConfig(n_conversations=40, seed=0))
