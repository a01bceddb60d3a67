"""Porter suffix-stripping stemmer.

Implements the classic five-step algorithm in the author's distributed form,
which differs from the 1980 journal text in three later revisions:

  * step 2 maps "bli" -> "ble" (so "abli" -> "able" still holds),
  * step 2 gains "(m>0) logi -> log",
  * step 1c turns a terminal "y" into "i" only when preceded by a consonant
    that is not the word's first letter ("happy" -> "happi", "try" -> "tri",
    but "by" -> "by", "say" -> "say"),

plus the distributed code's early return for words of length <= 2.

Only lowercase words are stemmed; input is lowercase-folded on entry.
"""

from __future__ import annotations

_VOWELS = "aeiou"


class _Stemmer:
    """Buffer b[0..k] with offset j, mirroring the reference formulation."""

    __slots__ = ("b", "k", "j")

    def __init__(self, word: str):
        self.b = word
        self.k = len(word) - 1
        self.j = 0

    def cons(self, i: int) -> bool:
        ch = self.b[i]
        if ch in _VOWELS:
            return False
        if ch == "y":
            return i == 0 or not self.cons(i - 1)
        return True

    def m(self) -> int:
        """Number of vowel-consonant sequences in b[0..j]."""
        count = 0
        i = 0
        while i <= self.j and self.cons(i):
            i += 1
        while True:
            while True:
                if i > self.j:
                    return count
                if self.cons(i):
                    break
                i += 1
            count += 1
            while i <= self.j and self.cons(i):
                i += 1

    def vowel_in_stem(self) -> bool:
        return any(not self.cons(i) for i in range(self.j + 1))

    def doublec(self, j: int) -> bool:
        return j > 0 and self.b[j] == self.b[j - 1] and self.cons(j)

    def cvc(self, i: int) -> bool:
        """b[i-2..i] is consonant-vowel-consonant and b[i] is not w, x or y."""
        if i < 2 or not self.cons(i) or self.cons(i - 1) or not self.cons(i - 2):
            return False
        return self.b[i] not in "wxy"

    def ends(self, suffix: str) -> bool:
        length = len(suffix)
        if suffix[-1] != self.b[self.k] or length > self.k + 1:
            return False
        if self.b[self.k - length + 1 : self.k + 1] != suffix:
            return False
        self.j = self.k - length
        return True

    def set_to(self, text: str) -> None:
        self.b = self.b[: self.j + 1] + text
        self.k = len(self.b) - 1

    def replace_if_m(self, text: str) -> None:
        if self.m() > 0:
            self.set_to(text)

    def step1ab(self) -> None:
        if self.b[self.k] == "s":
            if self.ends("sses"):
                self.k -= 2
            elif self.ends("ies"):
                self.set_to("i")
            elif self.b[self.k - 1] != "s":
                self.k -= 1
        if self.ends("eed"):
            if self.m() > 0:
                self.k -= 1
        elif (self.ends("ed") or self.ends("ing")) and self.vowel_in_stem():
            self.k = self.j
            if self.ends("at"):
                self.set_to("ate")
            elif self.ends("bl"):
                self.set_to("ble")
            elif self.ends("iz"):
                self.set_to("ize")
            elif self.doublec(self.k):
                if self.b[self.k - 1] not in "lsz":
                    self.k -= 1
            else:
                self.j = self.k
                if self.m() == 1 and self.cvc(self.k):
                    self.set_to("e")

    def step1c(self) -> None:
        # Revised rule: y -> i after a consonant that is not the first letter.
        if self.b[self.k] == "y" and self.k >= 2 and self.cons(self.k - 1):
            self.b = self.b[: self.k] + "i"

    _STEP2 = {
        "a": (("ational", "ate"), ("tional", "tion")),
        "c": (("enci", "ence"), ("anci", "ance")),
        "e": (("izer", "ize"),),
        "l": (("bli", "ble"), ("alli", "al"), ("entli", "ent"), ("eli", "e"), ("ousli", "ous")),
        "o": (("ization", "ize"), ("ation", "ate"), ("ator", "ate")),
        "s": (("alism", "al"), ("iveness", "ive"), ("fulness", "ful"), ("ousness", "ous")),
        "t": (("aliti", "al"), ("iviti", "ive"), ("biliti", "ble")),
        "g": (("logi", "log"),),
    }

    _STEP3 = {
        "e": (("icate", "ic"), ("ative", ""), ("alize", "al")),
        "i": (("iciti", "ic"),),
        "l": (("ical", "ic"), ("ful", "")),
        "s": (("ness", ""),),
    }

    def _apply_table(self, table, key_index: int) -> None:
        for suffix, replacement in table.get(self.b[key_index], ()):
            if self.ends(suffix):
                self.replace_if_m(replacement)
                return

    def step2(self) -> None:
        self._apply_table(self._STEP2, self.k - 1)

    def step3(self) -> None:
        self._apply_table(self._STEP3, self.k)

    _STEP4 = {
        "a": ("al",),
        "c": ("ance", "ence"),
        "e": ("er",),
        "i": ("ic",),
        "l": ("able", "ible"),
        "n": ("ant", "ement", "ment", "ent"),
        "o": ("ion", "ou"),
        "s": ("ism",),
        "t": ("ate", "iti"),
        "u": ("ous",),
        "v": ("ive",),
        "z": ("ize",),
    }

    def step4(self) -> None:
        for suffix in self._STEP4.get(self.b[self.k - 1], ()):
            if not self.ends(suffix):
                continue
            if suffix == "ion" and self.b[self.j] not in "st":
                continue
            if self.m() > 1:
                self.k = self.j
            return

    def step5(self) -> None:
        self.j = self.k
        if self.b[self.k] == "e":
            a = self.m()
            if a > 1 or (a == 1 and not self.cvc(self.k - 1)):
                self.k -= 1
        if self.b[self.k] == "l" and self.doublec(self.k) and self.m() > 1:
            self.k -= 1

    def run(self) -> str:
        self.step1ab()
        self.step1c()
        self.step2()
        self.step3()
        self.step4()
        self.step5()
        return self.b[: self.k + 1]


def porter_stem(word: str) -> str:
    """Stem one word; words of length <= 2 are returned unchanged."""
    if not word:
        raise ValueError("cannot stem an empty word")
    word = word.lower()
    if len(word) <= 2:
        return word
    return _Stemmer(word).run()
