"""Predictive membership: does some word equivalent to ``w`` reach a state?

The search runs over pairs (automaton state, ideal of the trace order of
``w``).  Equal letters are dependent, so an ideal is fully described by how
many occurrences of each letter it contains.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .alphabet import ConcurrentAlphabet, Symbol


def _requirements(alpha: ConcurrentAlphabet, word: Sequence[Symbol]):
    """For the k-th occurrence of each letter, the minimum count of every other
    letter an ideal must already hold before that occurrence can be added."""
    letters = sorted(set(word), key=alpha.rank)
    slot = {a: i for i, a in enumerate(letters)}
    seen = [0] * len(letters)
    needs = {a: [] for a in letters}
    for a in word:
        req = tuple(seen[slot[b]] if alpha.is_dependent(a, b) and b != a else 0 for b in letters)
        needs[a].append(req)
        seen[slot[a]] += 1
    return letters, slot, needs, tuple(seen)


def reachable_by_class(A, word: Sequence[Symbol], start=None) -> frozenset:
    """States reachable by reading some word equivalent to ``word``.

    ``A`` needs ``alphabet``, ``initial`` and ``successors(state, letter)``.
    """
    alpha = A.alphabet
    word = alpha.check_word(word)
    letters, slot, needs, full = _requirements(alpha, word)
    zero = tuple(0 for _ in letters)
    layer = {zero: frozenset({A.initial if start is None else start})}
    for _ in range(len(word)):
        nxt = {}
        for counts, states in layer.items():
            for a in letters:
                i = slot[a]
                c = counts[i]
                if c == full[i]:
                    continue
                req = needs[a][c]
                if any(have < need for have, need in zip(counts, req)):
                    continue
                targets = {q for p in states for q in A.successors(p, a)}
                if not targets:
                    continue
                key = counts[:i] + (c + 1,) + counts[i + 1:]
                prev = nxt.get(key)
                nxt[key] = frozenset(targets) if prev is None else prev | targets
        layer = nxt
        if not layer:
            return frozenset()
    return layer.get(full, frozenset())


def member(A, q, word: Sequence[Symbol]) -> bool:
    """True iff some word equivalent to ``word`` reaches state ``q`` of ``A``."""
    return q in reachable_by_class(A, word)


def member_any(A, targets: Iterable, word: Sequence[Symbol]) -> bool:
    return bool(reachable_by_class(A, word) & frozenset(targets))


def accepts_trace(A, word: Sequence[Symbol]) -> bool:
    """True iff the trace of ``word`` meets the language of ``A``."""
    return member_any(A, A.finals, word)
