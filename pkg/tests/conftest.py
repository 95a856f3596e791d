import random

import numpy as np
import pytest

from styleveil.attrib_net import AttributionModel
from styleveil.features import FeatureKey, FeatureSpace


def random_model(rng: np.random.RandomState, input_dim: int, hidden: int = 16,
                 n_classes: int = 3) -> AttributionModel:
    """Small random 1-hidden-layer ReLU network for oracle tests."""
    w1 = rng.randn(input_dim, hidden) * 0.5
    b1 = rng.randn(hidden) * 0.1
    w2 = rng.randn(hidden, n_classes) * 0.5
    b2 = rng.randn(n_classes) * 0.1
    return AttributionModel(weights=[w1, w2], biases=[b1, b2],
                            author_labels=[f"c{i}" for i in range(n_classes)])


def linear_model(rng: np.random.RandomState, input_dim: int, n_classes: int = 3,
                 zero_bias: bool = False) -> AttributionModel:
    w = rng.randn(input_dim, n_classes)
    b = np.zeros(n_classes) if zero_bias else rng.randn(n_classes) * 0.1
    return AttributionModel(weights=[w], biases=[b],
                            author_labels=[f"c{i}" for i in range(n_classes)])


def random_text(rng: random.Random, max_chars: int = 500) -> str:
    alphabet = "abcdefghij XYZ.,!?'\néü"
    n = rng.randint(0, max_chars)
    return "".join(rng.choice(alphabet) for _ in range(n))


def tiny_space(tags=("DT", "NN", "VBZ")) -> FeatureSpace:
    entries = [FeatureKey("char", ("a",)), FeatureKey("char", ("b",)),
               FeatureKey("pos", (tags[0],)), FeatureKey("pos", tuple(tags[:2]))]
    return FeatureSpace(V=[1, 2], L_vocab=2, entries=entries)


@pytest.fixture
def np_rng():
    return np.random.RandomState(12345)
