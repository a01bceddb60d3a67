import pytest
from synth import separable_corpus

from modtag.corpus import Corpus, Sentence, Token
from modtag.features import FeatureConfig, build_window_vector, extract_sentence_features
from modtag.svm import TrainParams, predict_class, save_model
from modtag.tagger import (
    TR2,
    TR3,
    TR23,
    TR23_W,
    TaggerModel,
    TrainingSetup,
    decode,
    tag_corpus,
    train,
)


def gold_sentence(sid, words, tags, agreement=None):
    tokens = tuple(Token(w, "NN", gold=t) for w, t in zip(words, tags))
    return Sentence(sid, tokens, agreement=agreement)


class TestTrainingSetup:
    def test_known_names_only(self):
        with pytest.raises(ValueError, match="unknown training setup"):
            TrainingSetup.make("Tr5")

    def test_tr23_costs_pinned(self):
        with pytest.raises(ValueError, match="equal unit costs"):
            TrainingSetup("Tr23", 2.0, 3.0)

    def test_tr23w_default_costs(self):
        assert (TR23_W.cost_agr2, TR23_W.cost_agr3) == (20.0, 30.0)

    def test_tr23w_costs_overridable(self):
        setup = TrainingSetup.make("Tr23_W", 5, 7)
        assert (setup.cost_agr2, setup.cost_agr3) == (5.0, 7.0)

    def test_inclusion_rules(self):
        assert TR2.includes(2) and not TR2.includes(3)
        assert TR3.includes(3) and not TR3.includes(2)
        assert TR23.includes(2) and TR23.includes(3) and TR23.includes(None)

    def test_levels_required_when_filtering(self):
        with pytest.raises(ValueError, match="agreement levels"):
            TR3.includes(None)

    def test_cost_for_levels(self):
        assert TR23_W.cost_for(2) == 20.0
        assert TR23_W.cost_for(3) == 30.0


class TestTrain:
    def test_setup_filter_can_empty_training(self):
        corpus = Corpus((gold_sentence("s1", ["a"], ["O"], agreement=2),))
        with pytest.raises(ValueError, match="no training data after filtering"):
            train(corpus, FeatureConfig(), TrainParams(), TR3)

    def test_untagged_tokens_rejected(self):
        corpus = Corpus((Sentence("s1", (Token("a", "NN"),)),))
        with pytest.raises(ValueError, match="untagged"):
            train(corpus, FeatureConfig(), TrainParams(), TR23)

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            train(Corpus(()), FeatureConfig(), TrainParams(), TR23)

    def test_tr23_equals_unit_cost_tr23w_bitwise(self, tmp_path):
        corpus = separable_corpus(30, seed=3, agr3_rate=0.4)
        config = FeatureConfig()
        a = train(corpus, config, TrainParams(), TR23)
        b = train(corpus, config, TrainParams(), TrainingSetup.make("Tr23_W", 1.0, 1.0))
        p1, p2 = tmp_path / "a.model", tmp_path / "b.model"
        save_model(a.svm, p1)
        save_model(b.svm, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_agreement_costs_resolve_label_conflicts(self):
        # the same sentence appears 3x as Agr3 tagged Want and 4x as Agr2
        # tagged O: plain counting favors O, 20/30 weighting favors Want
        words = ["i", "want", "it"]
        sentences = [gold_sentence(f"w{i}", words, ["O", "Want", "O"], agreement=3)
                     for i in range(3)]
        sentences += [gold_sentence(f"o{i}", words, ["O", "O", "O"], agreement=2)
                      for i in range(4)]
        corpus = Corpus(tuple(sentences))
        config = FeatureConfig(active=("wordStem",), context_width=1)
        probe = corpus[0]
        plain = decode(probe, train(corpus, config, TrainParams(), TR23))
        weighted = decode(probe, train(corpus, config, TrainParams(), TR23_W))
        assert plain[1] == "O"
        assert weighted[1] == "Want"

    def test_vocabulary_fitted_on_training_only(self, tiny_model):
        assert tiny_model.svm.vocabulary.frozen


class TestDecode:
    def test_output_length_matches(self, tiny_corpus, tiny_model):
        for sentence in tiny_corpus:
            assert len(decode(sentence, tiny_model)) == len(sentence)

    def test_single_token_sentence(self, tiny_model):
        sentence = Sentence("one", (Token("meeting", "NN"),))
        assert len(decode(sentence, tiny_model)) == 1

    def test_reproduces_gold_on_separable_training_data(self, tiny_corpus, tiny_model):
        for sentence in tiny_corpus:
            assert decode(sentence, tiny_model) == sentence.gold_tags()

    def test_deterministic(self, tiny_corpus, tiny_model):
        sentence = tiny_corpus[0]
        assert decode(sentence, tiny_model) == decode(sentence, tiny_model)

    def test_causality_prefix_stable_under_suffix_edits(self, tiny_corpus, tiny_model):
        sentence = tiny_corpus[0]
        width = tiny_model.svm.config.context_width
        edited = Sentence(
            sentence.id,
            sentence.tokens[:-1] + (Token("zzzz", "ZZ", gold="O"),),
            agreement=sentence.agreement,
        )
        base = decode(sentence, tiny_model)
        changed = decode(edited, tiny_model)
        stable = len(sentence) - 1 - width
        assert base[:stable] == changed[:stable]

    def test_static_only_decode_is_order_independent(self, tiny_corpus):
        config = FeatureConfig(use_dynamic_tags=False)
        model = train(tiny_corpus, config, TrainParams(), TR23)
        sentence = tiny_corpus[1]
        forward = decode(sentence, model)
        feats = extract_sentence_features(sentence, config, model.lemmas)
        backward = [None] * len(sentence)
        for position in reversed(range(len(sentence))):
            vector = build_window_vector(feats, position, [], config, model.svm.vocabulary)
            backward[position] = predict_class(model.svm, vector)
        assert forward == backward


class TestTagCorpus:
    def test_ids_and_order_preserved(self, tiny_corpus, tiny_model):
        tagged = tag_corpus(tiny_corpus, tiny_model)
        assert tagged.ids() == tiny_corpus.ids()

    def test_predictions_attached_to_all_tokens(self, tiny_corpus, tiny_model):
        tagged = tag_corpus(tiny_corpus, tiny_model)
        assert all(t.pred is not None for s in tagged for t in s.tokens)

    def test_parallel_equals_sequential(self, tiny_corpus, tiny_model):
        sequential = tag_corpus(tiny_corpus, tiny_model, jobs=1)
        parallel = tag_corpus(tiny_corpus, tiny_model, jobs=2)
        assert sequential == parallel

    def test_empty_corpus(self, tiny_model):
        assert len(tag_corpus(Corpus(()), tiny_model)) == 0

    def test_inputs_not_mutated(self, tiny_corpus, tiny_model):
        before = tuple(tiny_corpus.sentences)
        tag_corpus(tiny_corpus, tiny_model)
        assert tiny_corpus.sentences == before


class TestTaggerModel:
    def test_config_exposed(self, tiny_model):
        assert isinstance(tiny_model.config, FeatureConfig)

    def test_decode_requires_config(self, tiny_model):
        from modtag.svm import SvmModel

        bare = SvmModel(tiny_model.svm.classes, tiny_model.svm.binaries)
        with pytest.raises(ValueError, match="feature config"):
            decode(Sentence("x", (Token("a", "NN"),)), TaggerModel(bare))
