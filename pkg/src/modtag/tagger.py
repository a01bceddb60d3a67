"""Sequence-level training and greedy left-to-right decoding.

Training builds one window vector per token (gold previous tags as dynamic
features), fits the vocabulary on training data only, and trains the
one-vs-all SVM with per-instance costs taken from each sentence's annotator
agreement level. Decoding is a single forward pass that feeds already
predicted tags back in as dynamic features, so it is strictly causal and
deterministic.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass

from .corpus import Corpus, Sentence
from .features import (
    FeatureConfig,
    SparseVector,
    build_window_vector,
    extract_sentence_features,
    fit_vocabulary,
    window_feature_strings,
)
from .lemma import EMPTY_LEMMAS, LemmaTable
from .svm import SvmModel, TrainParams, predict_class, train_multiclass

SETUP_NAMES = ("Tr23", "Tr2", "Tr3", "Tr23_W")

_DEFAULT_COSTS = {
    "Tr23": (1.0, 1.0),
    "Tr2": (1.0, 1.0),
    "Tr3": (1.0, 1.0),
    "Tr23_W": (20.0, 30.0),
}


@dataclass(frozen=True)
class TrainingSetup:
    """Which agreement levels train, and at what per-instance cost.

    Tr23 uses both levels with equal weight (costs pinned to 1), Tr2/Tr3 use
    only the level-2 / level-3 sentences, Tr23_W uses both with differential
    costs (20 and 30 by default).
    """

    name: str
    cost_agr2: float
    cost_agr3: float

    def __post_init__(self):
        if self.name not in SETUP_NAMES:
            raise ValueError(f"unknown training setup {self.name!r} (expected {SETUP_NAMES})")
        if self.cost_agr2 <= 0 or self.cost_agr3 <= 0:
            raise ValueError("setup costs must be positive")
        if self.name == "Tr23" and (self.cost_agr2, self.cost_agr3) != (1.0, 1.0):
            raise ValueError("Tr23 trains with equal unit costs; use Tr23_W for weighting")

    @classmethod
    def make(cls, name: str, cost_agr2: float | None = None, cost_agr3: float | None = None):
        if name not in SETUP_NAMES:
            raise ValueError(f"unknown training setup {name!r} (expected {SETUP_NAMES})")
        default2, default3 = _DEFAULT_COSTS[name]
        return cls(
            name,
            default2 if cost_agr2 is None else float(cost_agr2),
            default3 if cost_agr3 is None else float(cost_agr3),
        )

    @property
    def needs_levels(self) -> bool:
        """True when sentences must carry an agreement level."""
        return self.name != "Tr23"

    def includes(self, agreement: int | None) -> bool:
        if agreement is None:
            if self.needs_levels:
                raise ValueError(
                    f"setup {self.name} needs per-sentence agreement levels, "
                    "but a sentence has none"
                )
            return True
        if self.name == "Tr2":
            return agreement == 2
        if self.name == "Tr3":
            return agreement == 3
        return True

    def cost_for(self, agreement: int | None) -> float:
        if agreement == 3:
            return self.cost_agr3
        return self.cost_agr2


TR23 = TrainingSetup.make("Tr23")
TR2 = TrainingSetup.make("Tr2")
TR3 = TrainingSetup.make("Tr3")
TR23_W = TrainingSetup.make("Tr23_W")


@dataclass
class TaggerModel:
    svm: SvmModel
    lemmas: LemmaTable = EMPTY_LEMMAS

    @property
    def config(self) -> FeatureConfig:
        return self.svm.config


def train(
    corpus: Corpus,
    config: FeatureConfig,
    params: TrainParams,
    setup: TrainingSetup = TR23,
    lemmas: LemmaTable = EMPTY_LEMMAS,
) -> TaggerModel:
    """Train the windowed one-vs-all tagger on a fully gold-tagged corpus."""
    if len(corpus) == 0:
        raise ValueError("empty corpus")
    kept = [s for s in corpus if setup.includes(s.agreement)]
    if not kept:
        raise ValueError(f"no training data after filtering for setup {setup.name}")

    window_strings: list[list[str]] = []
    labels: list[str] = []
    costs: list[float] = []
    for sentence in kept:
        gold = sentence.gold_tags()
        if any(g is None for g in gold):
            raise ValueError(f"sentence {sentence.id!r} has untagged tokens")
        feats = extract_sentence_features(sentence, config, lemmas)
        cost = setup.cost_for(sentence.agreement)
        for position in range(len(sentence)):
            window_strings.append(
                window_feature_strings(feats, position, gold[:position], config)
            )
            labels.append(gold[position])
            costs.append(cost)

    vocab = fit_vocabulary(s for strings in window_strings for s in strings)
    examples = [
        (SparseVector.from_indices(vocab.lookup(s) for s in strings), label)
        for strings, label in zip(window_strings, labels)
    ]
    svm = train_multiclass(examples, params, costs=costs, vocabulary=vocab, config=config)
    return TaggerModel(svm=svm, lemmas=lemmas)


def decode(sentence: Sentence, model: TaggerModel) -> list[str]:
    """Greedy left-to-right tagging; returns one tag per token."""
    config = model.svm.config
    vocab = model.svm.vocabulary
    if config is None or vocab is None:
        raise ValueError("model carries no feature config/vocabulary; cannot decode")
    feats = extract_sentence_features(sentence, config, model.lemmas)
    predicted: list[str] = []
    for position in range(len(sentence)):
        vector = build_window_vector(feats, position, predicted, config, vocab)
        predicted.append(predict_class(model.svm, vector))
    return predicted


def _decode_one(args):
    sentence, model = args
    return sentence.with_pred(decode(sentence, model))


def tag_corpus(corpus: Corpus, model: TaggerModel, jobs: int = 1) -> Corpus:
    """Decode every sentence; predictions go to the tokens' pred column."""
    if jobs > 1 and len(corpus) > 1:
        with multiprocessing.Pool(jobs) as pool:
            tagged = pool.map(
                _decode_one, [(s, model) for s in corpus],
                chunksize=max(1, len(corpus) // (jobs * 4)),
            )
    else:
        tagged = [s.with_pred(decode(s, model)) for s in corpus]
    return Corpus(tuple(tagged))
