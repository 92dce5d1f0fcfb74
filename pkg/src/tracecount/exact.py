"""Brute-force exact trace counting and canonical runs.

Two counters that share as little code as possible:

* ``count_exact_nf`` walks the normal-form DFA and asks the predictive
  membership oracle about every normal form of length ``n``;
* ``count_exact_enum`` lists every accepted word and collects the distinct
  normal forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .automata import Nfa, UnrolledNfa, nf_dfa
from .errors import BudgetExceededError
from .membership import accepts_trace
from .traces import equivalent, normal_form

DEFAULT_BUDGET = 10 ** 7


def _check_budget(A: Nfa, n: int, budget: int):
    if len(A.alphabet) ** n > budget:
        raise BudgetExceededError(
            f"|alphabet|^n = {len(A.alphabet)}^{n} exceeds the enumeration budget {budget}")


def count_exact_nf(A: Nfa, n: int, budget: int = DEFAULT_BUDGET) -> int:
    """Number of traces meeting L(A) in length ``n``, via normal forms."""
    _check_budget(A, n, budget)
    dfa = nf_dfa(A.alphabet)
    letters = A.alphabet.letters
    total = 0
    stack = [(dfa.initial, ())]
    while stack:
        state, word = stack.pop()
        if len(word) == n:
            if accepts_trace(A, word):
                total += 1
            continue
        for a in letters:
            for nxt in dfa.successors(state, a):
                stack.append((nxt, word + (a,)))
    return total


def count_exact_enum(A: Nfa, n: int, budget: int = DEFAULT_BUDGET) -> int:
    """Number of traces meeting L(A) in length ``n``, via word enumeration."""
    _check_budget(A, n, budget)
    return len({normal_form(A.alphabet, w) for w in A.words(n)})


def count_exact(A: Nfa, n: int, method: str = "nf-enum", budget: int = DEFAULT_BUDGET) -> int:
    if method == "nf-enum":
        return count_exact_nf(A, n, budget)
    if method == "word-enum":
        return count_exact_enum(A, n, budget)
    raise ValueError(f"unknown method {method!r}")


def exact_state_counts(U: UnrolledNfa) -> dict:
    """Exact number of traces meeting L(q) for every state of ``U``."""
    alpha = U.alphabet
    return {q: len({normal_form(alpha, w) for w in words}) for q, words in U.words_reaching().items()}


@dataclass(frozen=True)
class CanonicalRun:
    transitions: tuple

    @property
    def word(self) -> tuple:
        return tuple(t[1] for t in self.transitions)


class CanonicalRuns:
    """Canonical runs of an unrolled automaton, by explicit enumeration.

    Meant for small instances: the words reaching each state are listed once.
    """

    def __init__(self, U: UnrolledNfa):
        self.U = U
        self._words = U.words_reaching()
        self._memo = {}

    def run(self, word: Sequence, q) -> CanonicalRun:
        """Canonical run for the trace of ``word`` at state ``q``."""
        alpha = self.U.alphabet
        word = alpha.check_word(word)
        key = (normal_form(alpha, word), q)
        if key in self._memo:
            return self._memo[key]
        if q == self.U.initial:
            if word:
                raise ValueError("only the empty trace reaches the initial state")
            result = CanonicalRun(())
        else:
            result = None
            for t in self.U.incoming.get(q, []):
                p, s, _ = t
                witness = next((w for w in self._words.get(p, ()) if equivalent(alpha, w + (s,), word)), None)
                if witness is not None:
                    result = CanonicalRun(self.run(witness, p).transitions + (t,))
                    break
            if result is None:
                raise ValueError(f"trace of {word!r} does not meet L({q!r})")
        self._memo[key] = result
        return result

    def word(self, word: Sequence, q) -> tuple:
        return self.run(word, q).word


def canonical_run(U: UnrolledNfa, word: Sequence, q) -> CanonicalRun:
    return CanonicalRuns(U).run(word, q)
