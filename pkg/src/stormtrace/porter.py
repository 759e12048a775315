"""Porter suffix-stripping stemmer.

Follows Martin Porter's reference C implementation, including its two
departures from the 1980 description: step 2 maps ``bli`` -> ``ble``
(instead of ``abli`` -> ``able``) and adds ``logi`` -> ``log``. Output
agrees with the published ``voc.txt``/``output.txt`` vocabulary pair.
"""

from __future__ import annotations

from functools import lru_cache

_VOWELS = frozenset("aeiou")


class _Word:
    """Mutable buffer plus the stem boundary ``j`` set by ``ends``."""

    __slots__ = ("b", "j")

    def __init__(self, word: str):
        self.b = word
        self.j = 0

    def cons(self, i: int) -> bool:
        ch = self.b[i]
        if ch in _VOWELS:
            return False
        if ch == "y":
            return i == 0 or not self.cons(i - 1)
        return True

    def m(self) -> int:
        """Number of VC sequences in b[:j+1]."""
        n = 0
        i = 0
        j = self.j
        while True:
            if i > j:
                return n
            if not self.cons(i):
                break
            i += 1
        i += 1
        while True:
            while True:
                if i > j:
                    return n
                if self.cons(i):
                    break
                i += 1
            i += 1
            n += 1
            while True:
                if i > j:
                    return n
                if not self.cons(i):
                    break
                i += 1
            i += 1

    def vowel_in_stem(self) -> bool:
        return any(not self.cons(i) for i in range(self.j + 1))

    def doublec(self, i: int) -> bool:
        return i >= 1 and self.b[i] == self.b[i - 1] and self.cons(i)

    def cvc(self, i: int) -> bool:
        if i < 2 or not self.cons(i) or self.cons(i - 1) or not self.cons(i - 2):
            return False
        return self.b[i] not in "wxy"

    def ends(self, suffix: str) -> bool:
        if not self.b.endswith(suffix):
            return False
        self.j = len(self.b) - len(suffix) - 1
        return True

    def setto(self, repl: str) -> None:
        self.b = self.b[: self.j + 1] + repl

    def r(self, repl: str) -> None:
        if self.m() > 0:
            self.setto(repl)

    @property
    def k(self) -> int:
        return len(self.b) - 1


def _step1ab(w: _Word) -> None:
    if w.b.endswith("s"):
        if w.ends("sses"):
            w.b = w.b[:-2]
        elif w.ends("ies"):
            w.setto("i")
        elif not w.b.endswith("ss"):
            w.b = w.b[:-1]
    if w.ends("eed"):
        if w.m() > 0:
            w.b = w.b[:-1]
    elif (w.ends("ed") or w.ends("ing")) and w.vowel_in_stem():
        w.b = w.b[: w.j + 1]
        if w.ends("at"):
            w.setto("ate")
        elif w.ends("bl"):
            w.setto("ble")
        elif w.ends("iz"):
            w.setto("ize")
        elif w.doublec(w.k):
            if w.b[-1] not in "lsz":
                w.b = w.b[:-1]
        else:
            w.j = w.k
            if w.m() == 1 and w.cvc(w.k):
                w.b += "e"


def _step1c(w: _Word) -> None:
    if w.ends("y") and w.vowel_in_stem():
        w.b = w.b[:-1] + "i"


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


def _apply_table(w: _Word, table: dict, key: str) -> None:
    for suffix, repl in table.get(key, ()):
        if w.ends(suffix):
            w.r(repl)
            return


def _step4(w: _Word) -> None:
    # keyed on the penultimate letter, as in the reference implementation
    for suffix in _STEP4.get(w.b[-2], ()):
        if w.ends(suffix):
            if suffix == "ion" and not (w.j >= 0 and w.b[w.j] in "st"):
                return
            break
    else:
        return
    if w.m() > 1:
        w.b = w.b[: w.j + 1]


def _step5(w: _Word) -> None:
    w.j = w.k
    if w.b[-1] == "e":
        a = w.m()
        if a > 1 or (a == 1 and not w.cvc(w.k - 1)):
            w.b = w.b[:-1]
    w.j = w.k
    if w.b[-1] == "l" and w.doublec(w.k) and w.m() > 1:
        w.b = w.b[:-1]


@lru_cache(maxsize=65536)
def stem(word: str) -> str:
    """Porter stem of a lowercase word. Words of length <= 2 are returned as is."""
    if len(word) <= 2:
        return word
    w = _Word(word)
    _step1ab(w)
    if len(w.b) > 1:
        _step1c(w)
        _apply_table(w, _STEP2, w.b[-2])
        _apply_table(w, _STEP3, w.b[-1])
        _step4(w)
        _step5(w)
    return w.b
