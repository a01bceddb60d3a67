"""modtag: modality tagging pipeline.

Harvests candidate sentences with a high-recall trigger lexicon, aggregates
multi-annotator judgments into confidence-weighted training data, and trains
a windowed one-vs-all kernel-SVM sequence tagger for five modalities
(Ability, Effort, Intention, Success, Want).
"""

__version__ = "0.1.0"

from .annotation import (
    AggregatedExample,
    AnnotationSet,
    AnnotatorJudgment,
    Rejection,
    aggregate,
    aggregate_corpus,
    estimate_screen_precision,
    to_training,
)
from .corpus import (
    Corpus,
    Sentence,
    Token,
    parse_column_file,
    tokenize_raw,
    write_column_file,
)
from .evaluation import (
    FoldPlan,
    PrfReport,
    confidence_experiment,
    cross_validate,
    feature_search,
    kfold_plan,
    score,
)
from .features import (
    FeatureConfig,
    FeatureVocabulary,
    SparseVector,
    build_window_vector,
    extract_token_features,
    fit_vocabulary,
    is_numeric,
    verb_type,
    which_modal,
)
from .kernels import BACKEND, KernelParams, kernel_eval
from .lemma import LemmaTable, lemmatize, load_lemma_table
from .oracle import primal_oracle_train
from .porter import porter_stem
from .svm import (
    BinaryModel,
    SvmModel,
    TrainParams,
    decision_scores,
    load_model,
    predict_class,
    save_model,
    train_binary,
    train_multiclass,
)
from .tagger import TaggerModel, TrainingSetup, decode, tag_corpus, train
from .tags import ALL_TAGS, MODALITIES
from .triggers import (
    FilterSet,
    Lexicon,
    TriggerMatch,
    load_filters,
    load_lexicon,
    select_candidates,
    tag_triggers,
)
