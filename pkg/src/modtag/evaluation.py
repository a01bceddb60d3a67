"""Token-level precision/recall/F scoring, k-fold CV, feature search, and
the annotator-confidence experiment grid.

Counting rules: a token is a true positive for class m iff gold == m and
predicted == m; a false positive for m iff predicted == m and gold != m; a
false negative for m iff gold == m and predicted != m. "Overall" is the
micro-aggregation over the five modality classes; O never enters it. Rates
are percentages; displayed values round half-up to one decimal. Fold counts
are pooled (micro) before rates are computed.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .corpus import Corpus
from .features import MAX_WIDTH, MIN_WIDTH, FeatureConfig
from .lemma import EMPTY_LEMMAS, LemmaTable
from .svm import TrainParams
from .tags import ALL_TAGS, MODALITIES
from .tagger import TR23, TrainingSetup, decode, train
from .util import round_half_up

TEST_ALL = "all"
TEST_AGR3 = "agr3"

COND_AGR23 = "agr23"
COND_AGR3 = "agr3"
COND_GOLD = "gold"


@dataclass
class ClassCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def add(self, other: "ClassCounts") -> None:
        self.tp += other.tp
        self.fp += other.fp
        self.fn += other.fn


def f_measure(precision, recall):
    """Harmonic mean of two rates; None when either is missing or both zero."""
    if precision is None or recall is None or precision + recall == 0:
        return None
    return 2.0 * precision * recall / (precision + recall)


@dataclass
class PrfReport:
    counts: dict[str, ClassCounts] = field(
        default_factory=lambda: {cls: ClassCounts() for cls in ALL_TAGS}
    )

    def merge(self, other: "PrfReport") -> None:
        for cls in ALL_TAGS:
            self.counts[cls].add(other.counts[cls])

    def overall_counts(self) -> ClassCounts:
        total = ClassCounts()
        for cls in MODALITIES:
            total.add(self.counts[cls])
        return total

    @staticmethod
    def _precision(c: ClassCounts):
        return 100.0 * c.tp / (c.tp + c.fp) if c.tp + c.fp > 0 else None

    @staticmethod
    def _recall(c: ClassCounts):
        return 100.0 * c.tp / (c.tp + c.fn) if c.tp + c.fn > 0 else None

    def precision(self, cls: str):
        return self._precision(self.counts[cls])

    def recall(self, cls: str):
        return self._recall(self.counts[cls])

    def f1(self, cls: str):
        return f_measure(self.precision(cls), self.recall(cls))

    def overall_precision(self):
        return self._precision(self.overall_counts())

    def overall_recall(self):
        return self._recall(self.overall_counts())

    def overall_f1(self):
        return f_measure(self.overall_precision(), self.overall_recall())

    @staticmethod
    def _display(rate):
        return None if rate is None else round_half_up(rate, 1)

    def to_json_dict(self) -> dict:
        per_class = {}
        for cls in ALL_TAGS:
            per_class[cls] = {
                "precision": self._display(self.precision(cls)),
                "recall": self._display(self.recall(cls)),
                "f": self._display(self.f1(cls)),
            }
        overall = self.overall_counts()
        return {
            "per_class": per_class,
            "overall": {
                "precision": self._display(self.overall_precision()),
                "recall": self._display(self.overall_recall()),
                "f": self._display(self.overall_f1()),
            },
            "counts": {
                **{cls: {"tp": c.tp, "fp": c.fp, "fn": c.fn} for cls, c in self.counts.items()},
                "overall": {"tp": overall.tp, "fp": overall.fp, "fn": overall.fn},
            },
        }

    def format_table(self) -> str:
        def cell(rate):
            return "NA" if rate is None else f"{round_half_up(rate, 1):.1f}"

        rows = [("Modality", "Precision", "Recall", "F")]
        for cls in MODALITIES:
            rows.append((cls, cell(self.precision(cls)), cell(self.recall(cls)), cell(self.f1(cls))))
        rows.append(("Overall", cell(self.overall_precision()),
                     cell(self.overall_recall()), cell(self.overall_f1())))
        widths = [max(len(r[i]) for r in rows) for i in range(4)]
        lines = ["  ".join(col.ljust(w) for col, w in zip(row, widths)).rstrip() for row in rows]
        lines.insert(1, "-" * len(lines[0]))
        return "\n".join(lines)


def score_tag_sequences(gold_tags, pred_tags) -> PrfReport:
    report = PrfReport()
    for gold, pred in zip(gold_tags, pred_tags, strict=True):
        if gold == pred:
            report.counts[gold].tp += 1
        else:
            report.counts[pred].fp += 1
            report.counts[gold].fn += 1
    return report


def score(gold: Corpus, predicted: Corpus) -> PrfReport:
    """Token-level scores for two aligned corpora.

    The predicted tag is taken from the pred column when the corpus carries
    one, otherwise from its gold column (so a 3-column file of predictions
    also works).
    """
    if len(gold) != len(predicted):
        raise ValueError(f"corpora differ in sentence count: {len(gold)} vs {len(predicted)}")
    use_pred = any(t.pred is not None for s in predicted for t in s.tokens)
    report = PrfReport()
    for g_sent, p_sent in zip(gold, predicted):
        if g_sent.id != p_sent.id:
            raise ValueError(f"sentence id mismatch: {g_sent.id!r} vs {p_sent.id!r}")
        if len(g_sent) != len(p_sent):
            raise ValueError(f"sentence {g_sent.id!r} differs in length")
        gold_tags = []
        pred_tags = []
        for g_tok, p_tok in zip(g_sent.tokens, p_sent.tokens):
            if g_tok.gold is None:
                raise ValueError(f"gold corpus has untagged token in {g_sent.id!r}")
            value = p_tok.pred if use_pred else p_tok.gold
            if value is None:
                raise ValueError(f"predicted corpus has untagged token in {p_sent.id!r}")
            gold_tags.append(g_tok.gold)
            pred_tags.append(value)
        report.merge(score_tag_sequences(gold_tags, pred_tags))
    return report


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignment: dict[str, int]
    seed: int

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("need at least 2 folds")
        sizes = [0] * self.k
        for fold in self.assignment.values():
            if not 0 <= fold < self.k:
                raise ValueError(f"fold index {fold} outside [0, {self.k})")
            sizes[fold] += 1
        if sizes and max(sizes) - min(sizes) > 1:
            raise ValueError("fold sizes differ by more than 1")

    def fold_of(self, sentence_id: str) -> int:
        return self.assignment[sentence_id]


def kfold_plan(corpus: Corpus, k: int, seed: int = 42) -> FoldPlan:
    """Seed-deterministic sentence-level partition into k near-equal folds."""
    if k < 2:
        raise ValueError("need at least 2 folds")
    ids = corpus.ids()
    if k > len(ids):
        raise ValueError(f"cannot make {k} folds from {len(ids)} sentences")
    shuffled = list(ids)
    random.Random(seed).shuffle(shuffled)
    return FoldPlan(k, {sid: i % k for i, sid in enumerate(shuffled)}, seed)


def cross_validate(
    corpus: Corpus,
    plan: FoldPlan,
    config: FeatureConfig,
    params: TrainParams,
    setup: TrainingSetup = TR23,
    test_filter: str = TEST_ALL,
    lemmas: LemmaTable = EMPTY_LEMMAS,
) -> PrfReport:
    """Train on k-1 folds, decode the held-out fold, pool counts across folds."""
    if test_filter not in (TEST_ALL, TEST_AGR3):
        raise ValueError(f"unknown test filter {test_filter!r}")
    missing = [s.id for s in corpus if s.id not in plan.assignment]
    if missing:
        raise ValueError(f"fold plan does not cover sentences: {missing[:5]}")
    pooled = PrfReport()
    for fold in range(plan.k):
        train_sents = tuple(s for s in corpus if plan.fold_of(s.id) != fold)
        test_sents = [s for s in corpus if plan.fold_of(s.id) == fold]
        if test_filter == TEST_AGR3:
            test_sents = [s for s in test_sents if s.agreement == 3]
        model = train(Corpus(train_sents), config, params, setup, lemmas)
        for sentence in test_sents:
            predicted = decode(sentence, model)
            pooled.merge(score_tag_sequences(sentence.gold_tags(), predicted))
    return pooled


def _config_sort_key(config: FeatureConfig, f_value):
    from .features import TEMPLATES

    template_ids = tuple(TEMPLATES.index(t) for t in config.active)
    f_key = -f_value if f_value is not None else float("inf")
    return (f_key, len(config.active), template_ids, config.context_width)


def feature_search(
    corpus: Corpus,
    plan: FoldPlan,
    templates,
    widths=range(MIN_WIDTH, MAX_WIDTH + 1),
    params: TrainParams | None = None,
    setup: TrainingSetup = TR23,
    strategy: str = "exhaustive",
    prune_threshold: float = 0.0,
    lemmas: LemmaTable = EMPTY_LEMMAS,
    use_dynamic_tags: bool = True,
) -> list[tuple[FeatureConfig, float | None]]:
    """Search template subsets × context widths by cross-validated overall F.

    "exhaustive" tries every non-empty subset at every width; "greedy-prune"
    starts from all templates and repeatedly drops the template whose removal
    costs at most ``prune_threshold`` F. Results cover every evaluated config,
    best first; ties prefer smaller configs, then canonical template order,
    then smaller width. Fully deterministic.
    """
    templates = tuple(templates)
    if not templates:
        raise ValueError("need at least one candidate template")
    widths = tuple(widths)
    if params is None:
        params = TrainParams()

    evaluated: dict[tuple, tuple[FeatureConfig, float | None]] = {}

    def evaluate(active, width):
        config = FeatureConfig(active=tuple(active), context_width=width,
                               use_dynamic_tags=use_dynamic_tags)
        key = (config.active, config.context_width)
        if key not in evaluated:
            report = cross_validate(corpus, plan, config, params, setup, TEST_ALL, lemmas)
            evaluated[key] = (config, report.overall_f1())
        return evaluated[key][1]

    def best_width_f(active):
        best = None
        for width in widths:
            f_value = evaluate(active, width)
            if best is None or _f_higher(f_value, best):
                best = f_value
        return best

    if strategy == "exhaustive":
        for size in range(1, len(templates) + 1):
            for subset in itertools.combinations(templates, size):
                for width in widths:
                    evaluate(subset, width)
    elif strategy == "greedy-prune":
        current = list(templates)
        current_f = best_width_f(current)
        while len(current) > 1:
            candidates = []
            for template in current:
                reduced = [t for t in current if t != template]
                candidates.append((best_width_f(reduced), template, reduced))
            drop_f, _, reduced = max(
                candidates,
                key=lambda c: (-1e18 if c[0] is None else c[0], -current.index(c[1])),
            )
            loss = (current_f or 0.0) - (drop_f or 0.0)
            if drop_f is not None and loss <= prune_threshold:
                current, current_f = reduced, drop_f
            else:
                break
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    ranked = sorted(evaluated.values(), key=lambda item: _config_sort_key(*item))
    return ranked


def _f_higher(candidate, incumbent) -> bool:
    if candidate is None:
        return False
    if incumbent is None:
        return True
    return candidate > incumbent


DEFAULT_SETUPS = ("Tr23", "Tr2", "Tr3", "Tr23_W")


@dataclass
class ExperimentResult:
    setups: tuple[str, ...]
    conditions: tuple[str, ...]
    cells: dict[tuple[str, str], PrfReport]

    def format_table(self) -> str:
        def triple(report):
            def cell(rate):
                return "NA" if rate is None else f"{round_half_up(rate, 1):.1f}"

            return (cell(report.overall_precision()), cell(report.overall_recall()),
                    cell(report.overall_f1()))

        titles = {COND_AGR23: "Tested on Agr2+Agr3", COND_AGR3: "Tested on Agr3 only",
                  COND_GOLD: "Tested on Gold"}
        data_rows = []
        for setup in self.setups:
            row = [setup]
            for cond in self.conditions:
                row += list(triple(self.cells[(setup, cond)]))
            data_rows.append(row)
        header2 = ["TrainingSetup"] + ["P", "R", "F"] * len(self.conditions)
        widths = [max(len(r[i]) for r in data_rows + [header2]) for i in range(len(header2))]
        # widen each group so its title fits across the three P/R/F columns
        for g, cond in enumerate(self.conditions):
            first = 1 + 3 * g
            span = sum(widths[first:first + 3]) + 4
            short = len(titles.get(cond, cond)) - span
            if short > 0:
                widths[first + 2] += short

        def fmt(row):
            return "  ".join(col.ljust(w) for col, w in zip(row, widths)).rstrip()

        header1 = "".ljust(widths[0]) + "  "
        for g, cond in enumerate(self.conditions):
            first = 1 + 3 * g
            span = sum(widths[first:first + 3]) + 4
            header1 += titles.get(cond, cond).ljust(span + 2)
        lines = [header1.rstrip(), fmt(header2)]
        lines.append("-" * max(len(l) for l in lines))
        lines.extend(fmt(r) for r in data_rows)
        return "\n".join(lines)


def confidence_experiment(
    corpus: Corpus,
    plan: FoldPlan,
    config: FeatureConfig,
    params: TrainParams,
    gold_corpus: Corpus | None = None,
    setups=DEFAULT_SETUPS,
    lemmas: LemmaTable = EMPTY_LEMMAS,
    setup_costs: dict[str, tuple[float, float]] | None = None,
) -> ExperimentResult:
    """Run every training setup under both CV test filters (and optionally
    against an external gold corpus trained on the full data)."""
    conditions = [COND_AGR23, COND_AGR3] + ([COND_GOLD] if gold_corpus is not None else [])
    cells: dict[tuple[str, str], PrfReport] = {}
    for name in setups:
        overrides = (setup_costs or {}).get(name, (None, None))
        setup = TrainingSetup.make(name, *overrides)
        cells[(name, COND_AGR23)] = cross_validate(
            corpus, plan, config, params, setup, TEST_ALL, lemmas)
        cells[(name, COND_AGR3)] = cross_validate(
            corpus, plan, config, params, setup, TEST_AGR3, lemmas)
        if gold_corpus is not None:
            model = train(corpus, config, params, setup, lemmas)
            report = PrfReport()
            for sentence in gold_corpus:
                predicted = decode(sentence, model)
                report.merge(score_tag_sequences(sentence.gold_tags(), predicted))
            cells[(name, COND_GOLD)] = report
    return ExperimentResult(tuple(setups), tuple(conditions), cells)
