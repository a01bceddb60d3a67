"""High-recall first-pass tagger: lexicon lookup with phrase-filter exceptions.

A lexicon maps single trigger words to modalities; a filter set lists phrase
contexts (e.g. "best wishes" for Want) whose member tokens must not fire for
that filter's modality. Candidate harvesting caps the number of sentences kept
per (modality, trigger) pair with a seed-deterministic uniform sample.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .corpus import Corpus, Sentence
from .errors import ParseError
from .porter import porter_stem
from .tags import require_modality


@dataclass(frozen=True)
class Lexicon:
    entries: dict[str, str]            # lowercased trigger -> modality (never O)
    match_stems: bool = False          # also match on Porter stems
    stem_index: dict[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for trigger, modality in self.entries.items():
            if trigger != trigger.lower():
                raise ValueError(f"lexicon trigger {trigger!r} must be lowercased")
            require_modality(modality)
        if self.match_stems:
            stems: dict[str, str] = {}
            for trigger, modality in self.entries.items():
                stem = porter_stem(trigger)
                if stems.get(stem, modality) != modality:
                    raise ValueError(f"stem {stem!r} maps to conflicting modalities")
                stems[stem] = modality
            object.__setattr__(self, "stem_index", stems)

    def lookup(self, surface: str) -> str | None:
        word = surface.lower()
        hit = self.entries.get(word)
        if hit is None and self.match_stems:
            hit = self.stem_index.get(porter_stem(word))
        return hit


@dataclass(frozen=True)
class FilterSet:
    patterns: tuple[tuple[str, tuple[str, ...]], ...] = ()

    def __post_init__(self):
        for modality, phrase in self.patterns:
            require_modality(modality)
            if not phrase:
                raise ValueError("empty filter phrase")
            if any(w != w.lower() for w in phrase):
                raise ValueError(f"filter phrase {phrase!r} must be lowercased")


@dataclass(frozen=True)
class TriggerMatch:
    sentence_id: str
    token_index: int
    trigger: str
    modality: str


EMPTY_FILTERS = FilterSet()


def load_lexicon(path, match_stems: bool = False) -> Lexicon:
    """Read "trigger<TAB>Modality" lines; duplicate conflicting triggers error."""
    entries: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise ParseError(path, line_no, f"expected 2 columns, got {len(cols)}")
            trigger = cols[0].strip().lower()
            if not trigger:
                raise ParseError(path, line_no, "empty trigger")
            try:
                modality = require_modality(cols[1].strip())
            except ValueError as exc:
                raise ParseError(path, line_no, str(exc)) from exc
            if entries.get(trigger, modality) != modality:
                raise ParseError(
                    path, line_no,
                    f"trigger {trigger!r} already mapped to {entries[trigger]}, conflicts with {modality}",
                )
            entries[trigger] = modality
    if not entries:
        raise ParseError(path, 1, "empty lexicon")
    return Lexicon(entries, match_stems=match_stems)


def load_filters(path, lexicon: Lexicon | None = None) -> FilterSet:
    """Read "Modality<TAB>word word ..." lines.

    Single-word phrases are only allowed when they are not bare lexicon
    triggers (a filter must name a context, not merely negate a trigger);
    this is checked when a lexicon is supplied.
    """
    patterns: list[tuple[str, tuple[str, ...]]] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise ParseError(path, line_no, f"expected 2 columns, got {len(cols)}")
            try:
                modality = require_modality(cols[0].strip())
            except ValueError as exc:
                raise ParseError(path, line_no, str(exc)) from exc
            phrase = tuple(cols[1].lower().split())
            if not phrase:
                raise ParseError(path, line_no, "empty filter phrase")
            if len(phrase) == 1 and lexicon is not None and phrase[0] in lexicon.entries:
                raise ParseError(
                    path, line_no,
                    f"single-word filter {phrase[0]!r} merely negates a lexicon trigger",
                )
            patterns.append((modality, phrase))
    return FilterSet(tuple(patterns))


def _filtered_positions(sentence: Sentence, filters: FilterSet) -> dict[int, set[str]]:
    """Token index -> set of modalities suppressed there by filter phrases."""
    lowered = [t.surface.lower() for t in sentence.tokens]
    blocked: dict[int, set[str]] = {}
    for modality, phrase in filters.patterns:
        size = len(phrase)
        for start in range(0, len(lowered) - size + 1):
            if tuple(lowered[start:start + size]) == phrase:
                for i in range(start, start + size):
                    blocked.setdefault(i, set()).add(modality)
    return blocked


def tag_triggers(sentence: Sentence, lexicon: Lexicon, filters: FilterSet = EMPTY_FILTERS) -> list[TriggerMatch]:
    """One match per token whose surface (or stem) is a lexicon trigger,
    unless the token sits inside a filter-phrase occurrence for that modality."""
    blocked = _filtered_positions(sentence, filters)
    matches = []
    for index, token in enumerate(sentence.tokens):
        modality = lexicon.lookup(token.surface)
        if modality is None:
            continue
        if modality in blocked.get(index, ()):
            continue
        matches.append(TriggerMatch(sentence.id, index, token.surface.lower(), modality))
    return matches


def select_candidates(
    corpus: Corpus,
    lexicon: Lexicon,
    filters: FilterSet = EMPTY_FILTERS,
    cap: int = 50,
    seed: int = 42,
) -> dict[str, list[tuple[Sentence, TriggerMatch]]]:
    """Harvest candidate sentences per modality, keeping at most ``cap``
    sentences per (modality, trigger) pair via a uniform seeded sample.

    A sentence matching several modalities appears under each; a sentence
    matching one trigger several times counts once for that trigger.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    # (modality, trigger) -> list of (corpus position, sentence, first match)
    groups: dict[tuple[str, str], list[tuple[int, Sentence, TriggerMatch]]] = {}
    for position, sentence in enumerate(corpus):
        seen: set[tuple[str, str]] = set()
        for match in tag_triggers(sentence, lexicon, filters):
            key = (match.modality, match.trigger)
            if key in seen:
                continue
            seen.add(key)
            groups.setdefault(key, []).append((position, sentence, match))

    selected: dict[str, list[tuple[Sentence, TriggerMatch]]] = {}
    for key in sorted(groups):
        modality, trigger = key
        rows = groups[key]
        if len(rows) > cap:
            rng = random.Random(f"{seed}:{modality}:{trigger}")
            rows = sorted(rng.sample(rows, cap), key=lambda r: r[0])
        selected.setdefault(modality, []).extend((sent, match) for _, sent, match in rows)
    return selected
