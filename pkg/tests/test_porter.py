import pytest

from modtag.porter import porter_stem

# Full-pipeline outputs, hand-verified against the published algorithm
# description (with the distributed-form revisions: bli->ble, logi->log,
# consonant-preceded terminal y -> i) before the implementation was written.
# Note these are whole-algorithm outputs; the per-step examples in the
# published description show single-step transformations only.
REFERENCE = [
    # plurals / -ed / -ing (step 1)
    ("caresses", "caress"),
    ("ponies", "poni"),
    ("ties", "ti"),
    ("caress", "caress"),
    ("cats", "cat"),
    ("feed", "feed"),
    ("agreed", "agre"),
    ("plastered", "plaster"),
    ("bled", "bled"),
    ("motoring", "motor"),
    ("sing", "sing"),
    ("conflated", "conflat"),
    ("troubled", "troubl"),
    ("sized", "size"),
    ("hopping", "hop"),
    ("tanned", "tan"),
    ("falling", "fall"),
    ("hissing", "hiss"),
    ("fizzed", "fizz"),
    ("failing", "fail"),
    ("filing", "file"),
    # terminal y (revised rule)
    ("happy", "happi"),
    ("sky", "ski"),
    ("enjoy", "enjoy"),
    ("say", "say"),
    ("by", "by"),
    ("cry", "cri"),
    ("try", "tri"),
    ("tried", "tri"),
    ("trying", "tri"),
    ("flies", "fli"),
    ("dying", "dy"),
    # double suffixes (step 2) carried through the whole pipeline
    ("relational", "relat"),
    ("conditional", "condit"),
    ("rational", "ration"),
    ("valenci", "valenc"),
    ("hesitanci", "hesit"),
    ("digitizer", "digit"),
    ("conformabli", "conform"),
    ("radicalli", "radic"),
    ("differentli", "differ"),
    ("vileli", "vile"),
    ("analogousli", "analog"),
    ("vietnamization", "vietnam"),
    ("predication", "predic"),
    ("operator", "oper"),
    ("feudalism", "feudal"),
    ("decisiveness", "decis"),
    ("hopefulness", "hope"),
    ("callousness", "callous"),
    ("formaliti", "formal"),
    ("sensitiviti", "sensit"),
    ("sensibiliti", "sensibl"),
    # -ic-, -ful, -ness (step 3)
    ("triplicate", "triplic"),
    ("formative", "form"),
    ("formalize", "formal"),
    ("electriciti", "electr"),
    ("electrical", "electr"),
    ("hopeful", "hope"),
    ("goodness", "good"),
    # -ant, -ence, ... (step 4)
    ("revival", "reviv"),
    ("allowance", "allow"),
    ("inference", "infer"),
    ("airliner", "airlin"),
    ("gyroscopic", "gyroscop"),
    ("adjustable", "adjust"),
    ("defensible", "defens"),
    ("irritant", "irrit"),
    ("replacement", "replac"),
    ("adjustment", "adjust"),
    ("dependent", "depend"),
    ("adoption", "adopt"),
    ("homologou", "homolog"),
    ("communism", "commun"),
    ("activate", "activ"),
    ("angulariti", "angular"),
    ("effective", "effect"),
    ("bowdlerize", "bowdler"),
    # final -e and -ll (step 5)
    ("probate", "probat"),
    ("rate", "rate"),
    ("cease", "ceas"),
    ("controll", "control"),
    ("roll", "roll"),
    # full published derivation chains
    ("generalizations", "gener"),
    ("oscillators", "oscil"),
    # everyday forms used across the test corpora
    ("want", "want"),
    ("wanted", "want"),
    ("wanting", "want"),
    ("wants", "want"),
    ("wish", "wish"),
    ("wishes", "wish"),
    ("hoping", "hope"),
    ("hoped", "hope"),
    ("plans", "plan"),
    ("planned", "plan"),
    ("managed", "manag"),
    ("succeeding", "succeed"),
    ("agreement", "agreement"),
    ("run", "run"),
]


@pytest.mark.parametrize("word,expected", REFERENCE, ids=[w for w, _ in REFERENCE])
def test_reference_pairs(word, expected):
    assert porter_stem(word) == expected


# Stems whose own stem differs again: a final lone "s" or "eed"/"e" ending
# re-triggers step 1/5 rules. The algorithm was never globally idempotent;
# this freezes the exact exception set so drift in either direction fails.
NON_FIXED_POINTS = {"agre", "decis", "callous", "defens", "ceas", "succeed"}


def test_idempotent_on_reference_outputs_except_known_set():
    violations = {stem for _, stem in REFERENCE if porter_stem(stem) != stem}
    assert violations == NON_FIXED_POINTS


def test_short_words_unchanged():
    assert porter_stem("is") == "is"
    assert porter_stem("a") == "a"
    assert porter_stem("go") == "go"


def test_lowercase_folding():
    assert porter_stem("Wishes") == "wish"


def test_empty_word_rejected():
    with pytest.raises(ValueError):
        porter_stem("")
