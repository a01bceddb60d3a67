"""Multi-annotator judgment ingestion and majority aggregation.

An example is accepted when at least two annotators agree on BOTH the
modality and the exact target span, and that group is a strict plurality.
Everything else is a rejection with a reason:

  MAJORITY_ABSENT   - the "modality not present" answer is the strict plurality
  SPAN_DISAGREEMENT - a modality has majority support but its spans differ
  NO_MAJORITY       - no answer reaches two agreeing annotators / ties

Agreement levels: unanimous sets are Agr3, accepted non-unanimous sets Agr2
(the labels keep their three-annotator names for any annotator count).
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass

from .corpus import Sentence
from .errors import ParseError
from .tags import OUTSIDE, require_modality
from .util import atomic_write_text, ratio_percent

NO_MAJORITY = "NO_MAJORITY"
MAJORITY_ABSENT = "MAJORITY_ABSENT"
SPAN_DISAGREEMENT = "SPAN_DISAGREEMENT"

_ABSENT = "absent"


@dataclass(frozen=True)
class AnnotatorJudgment:
    annotator_id: str
    present: bool
    modality: str | None = None
    target_span: tuple[int, int] | None = None

    def __post_init__(self):
        if not self.annotator_id:
            raise ValueError("empty annotator id")
        if self.present:
            if self.modality is None or self.target_span is None:
                raise ValueError("present judgments need a modality and a target span")
            require_modality(self.modality)
            start, end = self.target_span
            if not 0 <= start < end:
                raise ValueError(f"invalid target span [{start}, {end})")
        elif self.modality is not None or self.target_span is not None:
            raise ValueError("not-present judgments carry no modality or span")


@dataclass(frozen=True)
class AnnotationSet:
    sentence_id: str
    judgments: tuple[AnnotatorJudgment, ...]

    def __post_init__(self):
        if len(self.judgments) < 2:
            raise ValueError(f"{self.sentence_id!r}: need at least 2 judgments")
        ids = [j.annotator_id for j in self.judgments]
        if len(set(ids)) != len(ids):
            raise ValueError(f"{self.sentence_id!r}: duplicate annotator ids")


@dataclass(frozen=True)
class AggregatedExample:
    sentence_id: str
    modality: str
    target_span: tuple[int, int]
    agreement: int        # annotators agreeing on modality AND span
    total_judgments: int

    def __post_init__(self):
        if not 2 <= self.agreement <= self.total_judgments:
            raise ValueError("agreement must be in [2, total_judgments]")

    @property
    def unanimous(self) -> bool:
        return self.agreement == self.total_judgments

    @property
    def level(self) -> int:
        """Agreement level label: 3 when unanimous, else 2."""
        return 3 if self.unanimous else 2


@dataclass(frozen=True)
class Rejection:
    sentence_id: str
    reason: str


def _strict_plurality(counter: Counter, key) -> bool:
    size = counter[key]
    return size >= 2 and all(other == key or count < size for other, count in counter.items())


def aggregate(annotation_set: AnnotationSet):
    """Resolve one sentence's judgments into an AggregatedExample or Rejection."""
    full = Counter()
    by_modality = Counter()
    for j in annotation_set.judgments:
        if j.present:
            full[(j.modality, j.target_span)] += 1
            by_modality[j.modality] += 1
        else:
            full[_ABSENT] += 1
            by_modality[_ABSENT] += 1

    present_keys = [k for k in full if k != _ABSENT]
    winners = [k for k in present_keys if _strict_plurality(full, k)]
    if winners:
        modality, span = winners[0]
        return AggregatedExample(
            sentence_id=annotation_set.sentence_id,
            modality=modality,
            target_span=span,
            agreement=full[winners[0]],
            total_judgments=len(annotation_set.judgments),
        )
    if _strict_plurality(by_modality, _ABSENT):
        return Rejection(annotation_set.sentence_id, MAJORITY_ABSENT)
    if any(_strict_plurality(by_modality, m) for m in by_modality if m != _ABSENT):
        return Rejection(annotation_set.sentence_id, SPAN_DISAGREEMENT)
    return Rejection(annotation_set.sentence_id, NO_MAJORITY)


@dataclass
class AggregationStats:
    total: int = 0
    accepted: int = 0
    agr2: int = 0
    agr3: int = 0
    rejected: dict[str, int] = None

    def __post_init__(self):
        if self.rejected is None:
            self.rejected = {NO_MAJORITY: 0, MAJORITY_ABSENT: 0, SPAN_DISAGREEMENT: 0}

    def to_json_dict(self) -> dict:
        return {
            "total": self.total,
            "accepted": self.accepted,
            "agr2": self.agr2,
            "agr3": self.agr3,
            "rejected": dict(self.rejected),
        }


def aggregate_corpus(annotation_sets):
    """Aggregate many sets; returns (accepted examples, outcome stats)."""
    seen: set[str] = set()
    examples: list[AggregatedExample] = []
    stats = AggregationStats()
    for annotation_set in annotation_sets:
        if annotation_set.sentence_id in seen:
            raise ValueError(f"duplicate sentence id {annotation_set.sentence_id!r}")
        seen.add(annotation_set.sentence_id)
        stats.total += 1
        outcome = aggregate(annotation_set)
        if isinstance(outcome, AggregatedExample):
            stats.accepted += 1
            if outcome.level == 3:
                stats.agr3 += 1
            else:
                stats.agr2 += 1
            examples.append(outcome)
        else:
            stats.rejected[outcome.reason] += 1
    return examples, stats


def to_training(example: AggregatedExample, sentence: Sentence) -> Sentence:
    """Project an aggregated judgment onto its sentence as per-token gold tags."""
    if example.sentence_id != sentence.id:
        raise ValueError(f"id mismatch: example {example.sentence_id!r} vs sentence {sentence.id!r}")
    start, end = example.target_span
    if end > len(sentence):
        raise ValueError(
            f"span [{start}, {end}) exceeds sentence {sentence.id!r} of length {len(sentence)}"
        )
    tags = [example.modality if start <= i < end else OUTSIDE for i in range(len(sentence))]
    projected = sentence.with_gold(tags)
    return Sentence(projected.id, projected.tokens, agreement=example.level)


def estimate_screen_precision(marked_positive: int, confirmed: int) -> float:
    """confirmed / marked_positive as a percentage, half-up to 2 decimals."""
    if marked_positive <= 0:
        raise ValueError("marked_positive must be positive")
    if not 0 <= confirmed <= marked_positive:
        raise ValueError("confirmed must be between 0 and marked_positive")
    return ratio_percent(confirmed, marked_positive, ndigits=2)


def read_annotation_sets(path) -> list[AnnotationSet]:
    """Read JSON-lines annotation records."""
    sets: list[AnnotationSet] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                judgments = tuple(
                    AnnotatorJudgment(
                        annotator_id=str(j["annotator_id"]),
                        present=bool(j["present"]),
                        modality=j.get("modality"),
                        target_span=tuple(j["span"]) if j.get("span") is not None else None,
                    )
                    for j in record["judgments"]
                )
                sets.append(AnnotationSet(str(record["sentence_id"]), judgments))
            except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                raise ParseError(path, line_no, f"bad annotation record: {exc}") from exc
    if not sets:
        raise ParseError(path, 1, "no annotation records")
    return sets


def write_annotation_sets(annotation_sets, path) -> None:
    lines = []
    for annotation_set in annotation_sets:
        record = {
            "sentence_id": annotation_set.sentence_id,
            "judgments": [
                {
                    "annotator_id": j.annotator_id,
                    "present": j.present,
                    **({"modality": j.modality, "span": list(j.target_span)} if j.present else {}),
                }
                for j in annotation_set.judgments
            ],
        }
        lines.append(json.dumps(record, sort_keys=True))
    atomic_write_text(path, "\n".join(lines) + "\n")
