"""Concurrent alphabets: ordered letters plus a symmetric independence relation."""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Sequence

from .errors import AlphabetError

Symbol = str


class ConcurrentAlphabet:
    """Letters in lexicographic order together with an independence relation.

    The declaration order of ``letters`` is the lexicographic order used by
    normal forms.  ``independence`` is given as unordered pairs; it is stored
    symmetrically.  Instances are immutable and hashable.
    """

    __slots__ = ("letters", "_rank", "_indep", "_width")

    def __init__(self, letters: Sequence[Symbol], independence: Iterable[Sequence[Symbol]] = ()):
        letters = tuple(letters)
        if not letters:
            raise AlphabetError("the alphabet must have at least one letter")
        if len(set(letters)) != len(letters):
            raise AlphabetError(f"duplicate letters in {letters!r}")
        for a in letters:
            if not isinstance(a, str) or not a:
                raise AlphabetError(f"letters must be non-empty strings, got {a!r}")
        rank = {a: i for i, a in enumerate(letters)}
        indep = set()
        for pair in independence:
            pair = tuple(pair)
            if len(pair) != 2:
                raise AlphabetError(f"independence entries must be pairs, got {pair!r}")
            a, b = pair
            if a not in rank or b not in rank:
                raise AlphabetError(f"independence pair {pair!r} uses an unknown letter")
            if a == b:
                raise AlphabetError(f"independence must be irreflexive, got {pair!r}")
            indep.add((a, b))
            indep.add((b, a))
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "_rank", rank)
        object.__setattr__(self, "_indep", frozenset(indep))
        object.__setattr__(self, "_width", None)

    def __setattr__(self, name, value):
        raise AttributeError("ConcurrentAlphabet is immutable")

    def __repr__(self):
        pairs = sorted({tuple(sorted(p, key=self.rank)) for p in self._indep})
        return f"ConcurrentAlphabet({list(self.letters)!r}, {pairs!r})"

    def __eq__(self, other):
        if not isinstance(other, ConcurrentAlphabet):
            return NotImplemented
        return self.letters == other.letters and self._indep == other._indep

    def __hash__(self):
        return hash((self.letters, self._indep))

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __contains__(self, a):
        return a in self._rank

    @property
    def independence(self) -> frozenset:
        """Symmetric set of independent ordered pairs."""
        return self._indep

    def rank(self, a: Symbol) -> int:
        try:
            return self._rank[a]
        except KeyError:
            raise AlphabetError(f"unknown symbol {a!r}") from None

    def check_word(self, word: Iterable[Symbol]) -> tuple:
        word = tuple(word)
        for a in word:
            if a not in self._rank:
                raise AlphabetError(f"unknown symbol {a!r}")
        return word

    def is_independent(self, a: Symbol, b: Symbol) -> bool:
        self.rank(a)
        self.rank(b)
        return (a, b) in self._indep

    def is_dependent(self, a: Symbol, b: Symbol) -> bool:
        return not self.is_independent(a, b)

    def less(self, a: Symbol, b: Symbol) -> bool:
        """Strict letter order."""
        return self._rank[a] < self._rank[b]

    def width(self) -> int:
        """Size of the largest pairwise-independent subset of letters."""
        if self._width is None:
            object.__setattr__(self, "_width", _max_independent_subset(self))
        return self._width

    def word_key(self, word: Sequence[Symbol]) -> tuple:
        """Sort key realising the lexicographic order on words."""
        return tuple(self._rank[a] for a in word)

    def format_word(self, word: Sequence[Symbol]) -> str:
        if all(len(a) == 1 for a in self.letters):
            return "".join(word)
        return " ".join(word)

    def parse_word(self, text: str) -> tuple:
        """Parse a word given either as whitespace-separated symbols or as a
        string of single-character letters."""
        text = text.strip()
        if not text:
            return ()
        if any(ch.isspace() for ch in text):
            return self.check_word(text.split())
        if all(len(a) == 1 for a in self.letters):
            return self.check_word(tuple(text))
        return self.check_word((text,))

    def to_json(self) -> dict:
        pairs = sorted({tuple(sorted(p, key=self.rank)) for p in self._indep}, key=self.word_key)
        return {"alphabet": list(self.letters), "independence": [list(p) for p in pairs]}


def _max_independent_subset(alpha: ConcurrentAlphabet) -> int:
    letters = alpha.letters
    if not letters:
        raise AlphabetError("width of an empty alphabet is undefined")
    # exhaustive search, largest size first; alphabets are small constants
    for size in range(len(letters), 1, -1):
        for subset in combinations(letters, size):
            if all((a, b) in alpha.independence for a, b in combinations(subset, 2)):
                return size
    return 1


def is_independent(alpha: ConcurrentAlphabet, a: Symbol, b: Symbol) -> bool:
    return alpha.is_independent(a, b)


def width(alpha: ConcurrentAlphabet) -> int:
    return alpha.width()
