"""Data model and I/O for tokenized, POS-tagged, optionally labeled text.

Column file format (UTF-8):
  - one token per line: ``surface<TAB>POS[<TAB>TAG]``
  - blank line between sentences
  - optional ``# id:<string>`` comment line before a sentence
  - optional ``# agr:<2|3>`` comment line carrying the annotator-agreement level
  - other ``#`` comment lines are ignored on parse

Prediction files add a fourth column: ``surface<TAB>POS<TAB>gold-or-"-"<TAB>predicted``.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, replace

from .errors import ParseError
from .tags import require_tag
from .util import atomic_write_text


@dataclass(frozen=True)
class Token:
    surface: str
    pos: str
    gold: str | None = None
    pred: str | None = None

    def __post_init__(self):
        if not self.surface or any(c in self.surface for c in "\t\n "):
            raise ValueError(f"invalid token surface {self.surface!r}")
        if not self.pos:
            raise ValueError(f"token {self.surface!r} has empty POS")
        if self.gold is not None:
            require_tag(self.gold)
        if self.pred is not None:
            require_tag(self.pred)


@dataclass(frozen=True)
class Sentence:
    id: str
    tokens: tuple[Token, ...]
    agreement: int | None = None  # annotator-agreement level (2 or 3) when known

    def __post_init__(self):
        if not self.tokens:
            raise ValueError(f"sentence {self.id!r} has no tokens")
        if self.agreement is not None and self.agreement not in (2, 3):
            raise ValueError(f"sentence {self.id!r}: agreement must be 2 or 3")

    def __len__(self):
        return len(self.tokens)

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def gold_tags(self) -> list[str | None]:
        return [t.gold for t in self.tokens]

    def with_gold(self, tags) -> "Sentence":
        if len(tags) != len(self.tokens):
            raise ValueError("tag list does not match token count")
        new = tuple(replace(t, gold=g) for t, g in zip(self.tokens, tags))
        return replace(self, tokens=new)

    def with_pred(self, tags) -> "Sentence":
        if len(tags) != len(self.tokens):
            raise ValueError("tag list does not match token count")
        new = tuple(replace(t, pred=p) for t, p in zip(self.tokens, tags))
        return replace(self, tokens=new)


@dataclass(frozen=True)
class Corpus:
    sentences: tuple[Sentence, ...]

    def __post_init__(self):
        seen = set()
        for s in self.sentences:
            if s.id in seen:
                raise ValueError(f"duplicate sentence id {s.id!r}")
            seen.add(s.id)

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def __getitem__(self, i):
        return self.sentences[i]

    def ids(self) -> list[str]:
        return [s.id for s in self.sentences]

    def by_id(self) -> dict[str, Sentence]:
        return {s.id: s for s in self.sentences}


def _open_lines(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read().split("\n")


def _parse_blocks(path, lines, n_columns):
    """Shared column-file scanner; yields Sentence objects."""
    sentences = []
    tokens: list[Token] = []
    pending_id: str | None = None
    pending_agr: int | None = None
    auto = 0

    def flush():
        nonlocal tokens, pending_id, pending_agr, auto
        if not tokens:
            return
        auto += 1
        sid = pending_id if pending_id is not None else f"s{auto:04d}"
        sentences.append(Sentence(sid, tuple(tokens), agreement=pending_agr))
        tokens = []
        pending_id = None
        pending_agr = None

    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("id:"):
                pending_id = body[3:].strip()
                if not pending_id:
                    raise ParseError(path, line_no, "empty sentence id")
            elif body.startswith("agr:"):
                value = body[4:].strip()
                if value not in ("2", "3"):
                    raise ParseError(path, line_no, f"agreement level must be 2 or 3, got {value!r}")
                pending_agr = int(value)
            continue
        cols = line.split("\t")
        if not 2 <= len(cols) <= n_columns:
            raise ParseError(path, line_no, f"expected 2-{n_columns} tab-separated columns, got {len(cols)}")
        try:
            tokens.append(_token_from_columns(cols, n_columns))
        except ValueError as exc:
            raise ParseError(path, line_no, str(exc)) from exc
    flush()
    if not sentences:
        raise ParseError(path, 1, "no sentences")
    return Corpus(tuple(sentences))


def _token_from_columns(cols, n_columns):
    surface, pos = cols[0], cols[1]
    gold = None
    pred = None
    if len(cols) >= 3:
        gold = None if (n_columns == 4 and cols[2] == "-") else require_tag(cols[2])
    if len(cols) == 4:
        pred = require_tag(cols[3])
    return Token(surface, pos, gold=gold, pred=pred)


def parse_column_file(path) -> Corpus:
    """Read a 2- or 3-column corpus file; blank line = sentence boundary."""
    return _parse_blocks(path, _open_lines(path), n_columns=3)


def parse_column_string(text: str, name: str = "<string>") -> Corpus:
    return _parse_blocks(name, text.split("\n"), n_columns=3)


def parse_prediction_file(path) -> Corpus:
    """Read a 4-column prediction file (gold column may be "-")."""
    return _parse_blocks(path, _open_lines(path), n_columns=4)


def parse_prediction_string(text: str, name: str = "<string>") -> Corpus:
    return _parse_blocks(name, text.split("\n"), n_columns=4)


def render_column_file(corpus: Corpus) -> str:
    """The exact text write_column_file would produce."""
    return _render(corpus, with_pred=False)


def render_prediction_file(corpus: Corpus) -> str:
    return _render(corpus, with_pred=True)


def _render(corpus: Corpus, with_pred: bool) -> str:
    if not corpus.sentences:
        raise ValueError("refusing to write an empty corpus")
    parts = []
    for sent in corpus:
        parts.append(f"# id:{sent.id}\n")
        if sent.agreement is not None:
            parts.append(f"# agr:{sent.agreement}\n")
        for tok in sent.tokens:
            cols = [tok.surface, tok.pos]
            if with_pred:
                if tok.pred is None:
                    raise ValueError(f"token {tok.surface!r} in {sent.id!r} has no prediction")
                cols.append(tok.gold if tok.gold is not None else "-")
                cols.append(tok.pred)
            elif tok.gold is not None:
                cols.append(tok.gold)
            parts.append("\t".join(cols) + "\n")
        parts.append("\n")
    return "".join(parts)


def write_column_file(corpus: Corpus, path) -> None:
    """Write a corpus so that parse_column_file reads back an equal Corpus."""
    atomic_write_text(path, _render(corpus, with_pred=False))


def write_prediction_file(corpus: Corpus, path) -> None:
    """Write the 4-column prediction format (surface, POS, gold?, predicted)."""
    atomic_write_text(path, _render(corpus, with_pred=True))


_PUNCT = frozenset(string.punctuation)


def tokenize_raw(text: str) -> list[str]:
    """Whitespace tokenization with leading/trailing ASCII punctuation detached."""
    out: list[str] = []
    for chunk in text.split():
        lead: list[str] = []
        trail: list[str] = []
        while chunk and chunk[0] in _PUNCT:
            lead.append(chunk[0])
            chunk = chunk[1:]
        while chunk and chunk[-1] in _PUNCT:
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        out.extend(lead)
        if chunk:
            out.append(chunk)
        out.extend(reversed(trail))
    return out
