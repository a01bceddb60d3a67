"""Token-level feature templates, windowed vectorization, and the vocabulary.

Six templates are available; each yields one ``name=value`` indicator string
per token. Window vectorization prefixes every neighbor's strings with its
offset ("o:-2|stem=want"), pads out-of-range offsets with a single BOS/EOS
feature, and appends the predicted tags of up to ``w`` preceding tokens as
dynamic features ("tag:-1=Want").
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Sentence, Token
from .lemma import EMPTY_LEMMAS, LemmaTable, lemmatize
from .porter import porter_stem

WORD_STEM = "wordStem"
WORD_LEMMA = "wordLemma"
POS = "POS"
IS_NUMERIC = "isNumeric"
VERB_TYPE = "verbType"
WHICH_MODAL = "whichModal"

# Canonical template order; extraction output follows it regardless of how
# the active set was written.
TEMPLATES = (WORD_STEM, WORD_LEMMA, POS, IS_NUMERIC, VERB_TYPE, WHICH_MODAL)

_PREFIX = {
    WORD_STEM: "stem",
    WORD_LEMMA: "lemma",
    POS: "pos",
    IS_NUMERIC: "isNumeric",
    VERB_TYPE: "verbType",
    WHICH_MODAL: "whichModal",
}

_AUXILIARIES = frozenset(
    "be am is are was were been being have has had having do does did done".split()
)

MIN_WIDTH, MAX_WIDTH = 1, 5


@dataclass(frozen=True)
class FeatureConfig:
    active: tuple[str, ...] = (WORD_STEM, POS, WHICH_MODAL)
    context_width: int = 2
    use_dynamic_tags: bool = True

    def __post_init__(self):
        unknown = [t for t in self.active if t not in TEMPLATES]
        if unknown:
            raise ValueError(f"unknown feature templates: {unknown}")
        if not self.active:
            raise ValueError("at least one feature template must be active")
        ordered = tuple(t for t in TEMPLATES if t in set(self.active))
        object.__setattr__(self, "active", ordered)
        if not MIN_WIDTH <= self.context_width <= MAX_WIDTH:
            raise ValueError(f"context width must be in [{MIN_WIDTH}, {MAX_WIDTH}]")


def is_numeric(word: str) -> bool:
    """True iff non-empty and all ASCII digits."""
    return bool(word) and all(c in "0123456789" for c in word)


def verb_type(word: str, pos: str) -> str:
    if pos == "MD":
        return "Modal"
    if pos.startswith("VB"):
        return "Auxiliary" if word.lower() in _AUXILIARIES else "Regular"
    return "Nil"


def which_modal(word: str, pos: str) -> str:
    return word.lower() if pos == "MD" else "Nil"


def extract_token_features(
    token: Token, config: FeatureConfig, lemmas: LemmaTable = EMPTY_LEMMAS
) -> list[str]:
    """One "name=value" string per active template, in canonical order."""
    out = []
    for template in config.active:
        if template == WORD_STEM:
            value = porter_stem(token.surface.lower())
        elif template == WORD_LEMMA:
            value = lemmatize(token.surface, token.pos, lemmas)
        elif template == POS:
            value = token.pos
        elif template == IS_NUMERIC:
            value = "true" if is_numeric(token.surface) else "false"
        elif template == VERB_TYPE:
            value = verb_type(token.surface, token.pos)
        else:
            value = which_modal(token.surface, token.pos)
        out.append(f"{_PREFIX[template]}={value}")
    return out


def extract_sentence_features(
    sentence: Sentence, config: FeatureConfig, lemmas: LemmaTable = EMPTY_LEMMAS
) -> list[list[str]]:
    return [extract_token_features(t, config, lemmas) for t in sentence.tokens]


class FeatureVocabulary:
    """Bijection feature string <-> dense column index.

    Grows on add() until frozen; afterwards unseen strings resolve to None.
    """

    __slots__ = ("_index", "frozen")

    def __init__(self):
        self._index: dict[str, int] = {}
        self.frozen = False

    def add(self, feature: str) -> int | None:
        idx = self._index.get(feature)
        if idx is None and not self.frozen:
            idx = len(self._index)
            self._index[feature] = idx
        return idx

    def lookup(self, feature: str) -> int | None:
        return self._index.get(feature)

    def freeze(self) -> None:
        self.frozen = True

    def __len__(self):
        return len(self._index)

    def __contains__(self, feature: str):
        return feature in self._index

    def __eq__(self, other):
        return (
            isinstance(other, FeatureVocabulary)
            and self._index == other._index
            and self.frozen == other.frozen
        )

    def strings(self) -> list[str]:
        """All feature strings in index order."""
        return list(self._index)

    @classmethod
    def from_strings(cls, strings, frozen: bool = True) -> "FeatureVocabulary":
        vocab = cls()
        for s in strings:
            vocab.add(s)
        vocab.frozen = frozen
        return vocab


def fit_vocabulary(feature_strings) -> FeatureVocabulary:
    """Index feature strings in first-seen order and freeze."""
    vocab = FeatureVocabulary()
    for s in feature_strings:
        vocab.add(s)
    if not len(vocab):
        raise ValueError("cannot fit a vocabulary on zero feature strings")
    vocab.freeze()
    return vocab


@dataclass(frozen=True)
class SparseVector:
    """Binary indicator vector: strictly increasing indices, all values 1.0."""

    indices: tuple[int, ...]

    def __post_init__(self):
        prev = -1
        for i in self.indices:
            if i <= prev:
                raise ValueError("indices must be strictly increasing")
            prev = i
        if self.indices and self.indices[0] < 0:
            raise ValueError("indices must be non-negative")

    @classmethod
    def from_indices(cls, indices) -> "SparseVector":
        return cls(tuple(sorted(set(indices))))

    @property
    def nnz(self) -> int:
        return len(self.indices)


def window_feature_strings(
    token_features: list[list[str]],
    position: int,
    previous_tags,
    config: FeatureConfig,
) -> list[str]:
    """All feature strings for one token's window, before vocabulary mapping.

    ``previous_tags`` holds the tags of the tokens before ``position`` in
    sentence order (so previous_tags[-1] tags position-1); only the last
    ``min(position, w)`` entries are consulted.
    """
    n = len(token_features)
    if not 0 <= position < n:
        raise ValueError(f"position {position} out of range for {n} tokens")
    w = config.context_width
    out: list[str] = []
    for offset in range(-w, w + 1):
        p = position + offset
        if p < 0:
            out.append(f"o:{offset}|PAD=BOS")
        elif p >= n:
            out.append(f"o:{offset}|PAD=EOS")
        else:
            out.extend(f"o:{offset}|{f}" for f in token_features[p])
    if config.use_dynamic_tags:
        available = len(previous_tags)
        if available < min(position, w):
            raise ValueError(
                f"need {min(position, w)} previous tags at position {position}, got {available}"
            )
        for k in range(1, w + 1):
            if position - k < 0:
                out.append(f"tag:-{k}=PAD")
            else:
                out.append(f"tag:-{k}={previous_tags[-k]}")
    return out


def build_window_vector(
    token_features: list[list[str]],
    position: int,
    previous_tags,
    config: FeatureConfig,
    vocab: FeatureVocabulary,
) -> SparseVector:
    """Map one window's feature strings through the vocabulary.

    On a frozen vocabulary, unseen strings are silently skipped.
    """
    strings = window_feature_strings(token_features, position, previous_tags, config)
    indices = []
    for s in strings:
        idx = vocab.add(s)
        if idx is not None:
            indices.append(idx)
    return SparseVector.from_indices(indices)
