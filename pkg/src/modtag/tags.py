"""The closed modality tag set and its canonical ordering."""

ABILITY = "Ability"
EFFORT = "Effort"
INTENTION = "Intention"
SUCCESS = "Success"
WANT = "Want"
OUTSIDE = "O"

# Alphabetical; used for deterministic tie-breaking everywhere.
MODALITIES = (ABILITY, EFFORT, INTENTION, SUCCESS, WANT)

# Class order for one-vs-all models: modalities first, O last.
ALL_TAGS = MODALITIES + (OUTSIDE,)

_TAG_SET = frozenset(ALL_TAGS)
_MODALITY_SET = frozenset(MODALITIES)


def is_tag(value: str) -> bool:
    return value in _TAG_SET

def is_modality(value: str) -> bool:
    return value in _MODALITY_SET


def require_tag(value: str) -> str:
    if value not in _TAG_SET:
        raise ValueError(f"unknown modality tag {value!r} (expected one of {', '.join(ALL_TAGS)})")
    return value


def require_modality(value: str) -> str:
    if value not in _MODALITY_SET:
        raise ValueError(f"unknown modality {value!r} (expected one of {', '.join(MODALITIES)})")
    return value
