"""Trace partial orders, equivalence, lexicographic normal forms.

Words are tuples of symbols.  A labeled index ``(a, i)`` names the i-th
occurrence (1-based) of letter ``a`` in a word.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .alphabet import ConcurrentAlphabet, Symbol
from .errors import BudgetExceededError

Word = tuple
LabeledIndex = tuple  # (symbol, occurrence number)

DEFAULT_CLASS_GUARD = 10


@dataclass(frozen=True)
class TraceOrderDag:
    """Hasse diagram of the trace partial order of a word."""

    vertices: frozenset
    edges: frozenset


def labeled_indices(word: Sequence[Symbol]) -> list:
    seen = Counter()
    out = []
    for a in word:
        seen[a] += 1
        out.append((a, seen[a]))
    return out


def predecessor_sets(alpha: ConcurrentAlphabet, word: Sequence[Symbol]) -> dict:
    """Map each labeled index to the set of labeled indices strictly below it."""
    labels = labeled_indices(word)
    preds = {}
    for p, (a, i) in enumerate(labels):
        down = set()
        for q in range(p):
            if alpha.is_dependent(a, labels[q][0]):
                down.add(labels[q])
                down |= preds[labels[q]]
        preds[(a, i)] = frozenset(down)
    return preds


def trace_order(alpha: ConcurrentAlphabet, word: Sequence[Symbol]) -> TraceOrderDag:
    word = alpha.check_word(word)
    labels = labeled_indices(word)
    last = {}  # letter -> labeled index of its latest occurrence
    preds = {}
    edges = set()
    for a, i in labels:
        candidates = [last[b] for b in last if alpha.is_dependent(a, b)]
        down = set()
        for c in candidates:
            down.add(c)
            down |= preds[c]
        # a candidate is a cover unless another candidate already sits above it
        for c in candidates:
            if not any(c in preds[d] for d in candidates if d != c):
                edges.add((c, (a, i)))
        preds[(a, i)] = frozenset(down)
        last[a] = (a, i)
    return TraceOrderDag(frozenset(labels), frozenset(edges))


def equivalent(alpha: ConcurrentAlphabet, w1: Sequence[Symbol], w2: Sequence[Symbol]) -> bool:
    w1 = alpha.check_word(w1)
    w2 = alpha.check_word(w2)
    if len(w1) != len(w2) or Counter(w1) != Counter(w2):
        return False
    return trace_order(alpha, w1) == trace_order(alpha, w2)


def insert_letter(alpha: ConcurrentAlphabet, nfw: Sequence[Symbol], a: Symbol) -> tuple:
    """Return ``(nf(nfw . a), position)`` for a word ``nfw`` in normal form.

    ``a`` travels left over the maximal suffix of letters independent of it
    and stops in front of the first letter of that suffix that is larger
    than ``a``; ``position`` is the index ``a`` ends up at.
    """
    nfw = tuple(nfw)
    alpha.rank(a)
    start = len(nfw)
    while start > 0 and alpha.is_independent(a, nfw[start - 1]):
        start -= 1
    pos = len(nfw)
    for j in range(start, len(nfw)):
        if alpha.less(a, nfw[j]):
            pos = j
            break
    return nfw[:pos] + (a,) + nfw[pos:], pos


def normal_form(alpha: ConcurrentAlphabet, word: Sequence[Symbol]) -> Word:
    """Lexicographically least word of the trace of ``word``."""
    word = alpha.check_word(word)
    nf: Word = ()
    for a in word:
        nf, _ = insert_letter(alpha, nf, a)
    return nf


def is_normal_form(alpha: ConcurrentAlphabet, word: Sequence[Symbol]) -> bool:
    return normal_form(alpha, word) == tuple(word)


def enumerate_class(alpha: ConcurrentAlphabet, word: Sequence[Symbol], guard: int = DEFAULT_CLASS_GUARD) -> frozenset:
    """All words equivalent to ``word`` (closure under independent swaps)."""
    word = alpha.check_word(word)
    if len(word) > guard:
        raise BudgetExceededError(f"class enumeration limited to length {guard}, got {len(word)}")
    seen = {word}
    todo = deque([word])
    while todo:
        w = todo.popleft()
        for i in range(len(w) - 1):
            if alpha.is_independent(w[i], w[i + 1]):
                v = w[:i] + (w[i + 1], w[i]) + w[i + 2:]
                if v not in seen:
                    seen.add(v)
                    todo.append(v)
    return frozenset(seen)


def concat_traces(alpha: ConcurrentAlphabet, t1: Iterable[Word], t2: Iterable[Word],
                  guard: int = DEFAULT_CLASS_GUARD) -> frozenset:
    """Concatenation of two classes, each given as a set of words."""
    w1 = next(iter(t1))
    w2 = next(iter(t2))
    return enumerate_class(alpha, tuple(w1) + tuple(w2), guard)
