import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from synth import separable_corpus  # noqa: E402

from modtag.features import FeatureConfig  # noqa: E402
from modtag.svm import TrainParams  # noqa: E402
from modtag.tagger import TR23, train  # noqa: E402


@pytest.fixture(scope="session")
def tiny_corpus():
    return separable_corpus(60, seed=7)


@pytest.fixture(scope="session")
def tiny_model(tiny_corpus):
    return train(tiny_corpus, FeatureConfig(), TrainParams(), TR23)
