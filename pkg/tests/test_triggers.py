import random

import pytest

from modtag.corpus import Corpus, Sentence, Token
from modtag.errors import ParseError
from modtag.triggers import (
    EMPTY_FILTERS,
    FilterSet,
    Lexicon,
    load_filters,
    load_lexicon,
    select_candidates,
    tag_triggers,
)

LEX = Lexicon({"want": "Want", "wishes": "Want", "wish": "Want", "try": "Effort",
               "best": "Effort", "can": "Ability"})
BEST_WISHES = FilterSet((("Want", ("best", "wishes")),))


def sent(sid, *surfaces):
    return Sentence(sid, tuple(Token(s, "XX") for s in surfaces))


class TestLoadLexicon:
    def test_basic(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("# comment\nwant\tWant\nWISH\tWant\n", encoding="utf-8")
        lex = load_lexicon(path)
        assert lex.entries == {"want": "Want", "wish": "Want"}

    def test_conflicting_duplicate(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("try\tEffort\ntry\tWant\n", encoding="utf-8")
        with pytest.raises(ParseError, match="conflict"):
            load_lexicon(path)

    def test_consistent_duplicate_ok(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("try\tEffort\ntry\tEffort\n", encoding="utf-8")
        assert load_lexicon(path).entries == {"try": "Effort"}

    def test_unknown_modality(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("want\tWishful\n", encoding="utf-8")
        with pytest.raises(ParseError):
            load_lexicon(path)

    def test_no_outside_entries(self):
        with pytest.raises(ValueError):
            Lexicon({"want": "O"})


class TestLookup:
    def test_case_insensitive(self):
        lex = Lexicon({"wish": "Want"})
        assert lex.lookup("Wish") == "Want"

    def test_inflection_not_matched_by_default(self):
        lex = Lexicon({"wish": "Want"})
        assert lex.lookup("Wishes") is None

    def test_stem_matching_opt_in(self):
        lex = Lexicon({"wish": "Want"}, match_stems=True)
        assert lex.lookup("Wishes") == "Want"
        assert lex.lookup("wishing") == "Want"


class TestTagTriggers:
    def test_single_match(self):
        matches = tag_triggers(sent("s1", "I", "want", "to", "go"), LEX, EMPTY_FILTERS)
        assert len(matches) == 1
        match = matches[0]
        assert (match.token_index, match.trigger, match.modality) == (1, "want", "Want")

    def test_best_wishes_filtered(self):
        matches = tag_triggers(sent("s1", "Best", "wishes", ",", "John"), LEX, BEST_WISHES)
        assert [m.modality for m in matches] == ["Effort"]  # "best" only; Want suppressed

    def test_filter_blocks_only_its_modality(self):
        matches = tag_triggers(sent("s1", "best", "wishes"), LEX, BEST_WISHES)
        assert [(m.trigger, m.modality) for m in matches] == [("best", "Effort")]

    def test_no_triggers(self):
        assert tag_triggers(sent("s1", "The", "meeting", "is", "Tuesday"), LEX, BEST_WISHES) == []

    def test_matches_ordered_by_index(self):
        matches = tag_triggers(sent("s1", "can", "we", "try", "to", "want"), LEX)
        assert [m.token_index for m in matches] == [0, 2, 4]

    def test_recall_property(self):
        rng = random.Random(0)
        fillers = ["the", "on", "table", "meeting", "ok"]
        for _ in range(50):
            words = [rng.choice(fillers) for _ in range(rng.randint(1, 6))]
            trigger = rng.choice(list(LEX.entries))
            words.insert(rng.randrange(len(words) + 1), trigger)
            if ["best", "wishes"] in [words[i:i + 2] for i in range(len(words))]:
                continue
            assert tag_triggers(sent("s", *words), LEX, BEST_WISHES)


class TestLoadFilters:
    def test_basic(self, tmp_path):
        path = tmp_path / "filters.tsv"
        path.write_text("Want\tbest wishes\n", encoding="utf-8")
        filters = load_filters(path)
        assert filters.patterns == (("Want", ("best", "wishes")),)

    def test_single_word_filter_must_not_negate_trigger(self, tmp_path):
        path = tmp_path / "filters.tsv"
        path.write_text("Want\twish\n", encoding="utf-8")
        with pytest.raises(ParseError, match="negates"):
            load_filters(path, Lexicon({"wish": "Want"}))

    def test_single_word_filter_with_context_ok(self, tmp_path):
        path = tmp_path / "filters.tsv"
        path.write_text("Want\tgodspeed\n", encoding="utf-8")
        filters = load_filters(path, Lexicon({"wish": "Want"}))
        assert filters.patterns[0][1] == ("godspeed",)


def trigger_corpus(counts: dict[str, int]) -> Corpus:
    sentences = []
    n = 0
    for trigger, how_many in counts.items():
        for _ in range(how_many):
            n += 1
            sentences.append(sent(f"s{n:05d}", "they", trigger, "it"))
    return Corpus(tuple(sentences))


class TestSelectCandidates:
    def test_cap_applies(self):
        corpus = trigger_corpus({"want": 120})
        selected = select_candidates(corpus, LEX, EMPTY_FILTERS, cap=50, seed=42)
        assert len(selected["Want"]) == 50

    def test_under_cap_keeps_all(self):
        corpus = trigger_corpus({"want": 30})
        selected = select_candidates(corpus, LEX, EMPTY_FILTERS, cap=50, seed=42)
        assert len(selected["Want"]) == 30

    def test_same_seed_same_selection(self):
        corpus = trigger_corpus({"want": 120, "try": 80})
        first = select_candidates(corpus, LEX, EMPTY_FILTERS, cap=50, seed=9)
        second = select_candidates(corpus, LEX, EMPTY_FILTERS, cap=50, seed=9)
        assert first == second

    def test_cap_is_per_trigger_within_modality(self):
        corpus = trigger_corpus({"want": 70, "wish": 70})
        selected = select_candidates(corpus, LEX, EMPTY_FILTERS, cap=50, seed=1)
        per_trigger = {}
        for _, match in selected["Want"]:
            per_trigger[match.trigger] = per_trigger.get(match.trigger, 0) + 1
        assert per_trigger == {"want": 50, "wish": 50}

    def test_multi_modality_sentence_appears_under_each(self):
        corpus = Corpus((sent("s1", "I", "want", "to", "try"),))
        selected = select_candidates(corpus, LEX, EMPTY_FILTERS, cap=50, seed=1)
        assert selected["Want"][0][0].id == "s1"
        assert selected["Effort"][0][0].id == "s1"

    def test_cap_below_one_rejected(self):
        with pytest.raises(ValueError):
            select_candidates(trigger_corpus({"want": 3}), LEX, EMPTY_FILTERS, cap=0, seed=1)
