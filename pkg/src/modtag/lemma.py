"""Dictionary lemmatizer with a rule fallback for regular inflections.

The dictionary is a TSV of ``word<TAB>POS-prefix<TAB>lemma`` rows; an empty
POS prefix matches any tag. When no row matches, regular -s/-es/-ed/-ing
endings are stripped with undoubling and e-restoration heuristics; the final
fallback is the lowercased word itself. The fallback is intentionally small:
irregular forms belong in the dictionary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseError

_VOWELS = "aeiou"


@dataclass(frozen=True)
class LemmaTable:
    rows: tuple[tuple[str, str, str], ...] = ()  # (word, pos_prefix, lemma)
    _index: dict[str, tuple[tuple[str, str], ...]] = field(
        default_factory=dict, compare=False, repr=False
    )

    def __post_init__(self):
        index: dict[str, list[tuple[str, str]]] = {}
        for word, prefix, lemma in self.rows:
            index.setdefault(word.lower(), []).append((prefix, lemma.lower()))
        object.__setattr__(
            self, "_index", {w: tuple(rows) for w, rows in index.items()}
        )

    def lookup(self, word: str, pos: str) -> str | None:
        for prefix, lemma in self._index.get(word.lower(), ()):
            if pos.startswith(prefix):
                return lemma
        return None


EMPTY_LEMMAS = LemmaTable()


def load_lemma_table(path) -> LemmaTable:
    rows: list[tuple[str, str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise ParseError(path, line_no, f"expected 3 columns, got {len(cols)}")
            word, prefix, lemma = (c.strip() for c in cols)
            if not word or not lemma:
                raise ParseError(path, line_no, "empty word or lemma")
            rows.append((word, prefix, lemma))
    return LemmaTable(tuple(rows))


def _is_cons(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_cons(word, i - 1)
    return True


def _restore_e(base: str) -> str:
    """hop -> hope, us -> use; leaves want, seem, snow, box alone."""
    n = len(base)
    if n >= 3:
        if (
            _is_cons(base, n - 1)
            and not _is_cons(base, n - 2)
            and _is_cons(base, n - 3)
            and base[-1] not in "wxy"
        ):
            return base + "e"
    elif n == 2 and not _is_cons(base, 0) and _is_cons(base, 1) and base[-1] not in "wxy":
        return base + "e"
    return base


def _undouble(base: str) -> str:
    if len(base) >= 3 and base[-1] == base[-2] and _is_cons(base, len(base) - 1):
        if base[-1] not in "lsz":
            return base[:-1]
    return base


def _strip_ed_ing(word: str, suffix: str) -> str:
    base = word[: -len(suffix)]
    undoubled = _undouble(base)
    if undoubled != base:
        return undoubled
    return _restore_e(base)


def lemmatize(word: str, pos: str, table: LemmaTable = EMPTY_LEMMAS) -> str:
    """Dictionary lookup, then regular-inflection stripping, then identity."""
    hit = table.lookup(word, pos)
    if hit is not None:
        return hit
    w = word.lower()
    if len(w) >= 4 and w.endswith("ies"):
        return w[:-3] + "y"
    if len(w) >= 4 and w.endswith("es"):
        base = w[:-2]
        if base[-1] in "sxzo" or base.endswith(("ch", "sh")):
            return base
    if len(w) >= 3 and w.endswith("s") and not w.endswith("ss"):
        return w[:-1]
    if len(w) >= 4 and w.endswith("ied"):
        return w[:-3] + "y"
    if len(w) >= 4 and w.endswith("ed"):
        return _strip_ed_ing(w, "ed")
    if len(w) >= 5 and w.endswith("ing"):
        return _strip_ed_ing(w, "ing")
    return w
