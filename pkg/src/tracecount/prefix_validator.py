"""The prefix-validator DFA for a normal form ``u``.

It accepts exactly the words whose normal form starts with ``u``.  A state
``(u1, b, L)`` records the ``u``-prefix ``u1`` of the normal form read so
far, the first letter ``b`` of the remaining residual (``None`` when the
residual is empty) and the set ``L`` of letters occurring in the residual.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Sequence

from .alphabet import ConcurrentAlphabet, Symbol
from .automata import Nfa
from .errors import NotNormalFormError
from .traces import insert_letter, is_normal_form, labeled_indices, predecessor_sets


@dataclass(frozen=True)
class PvState:
    u_prefix: tuple
    first_residual: Symbol | None
    residual_letters: frozenset

    def __repr__(self):
        b = "λ" if self.first_residual is None else self.first_residual
        return f"({''.join(self.u_prefix) or 'λ'}, {b}, {{{','.join(sorted(self.residual_letters))}}})"


class _DagPrefixChecker:
    """Caches the trace order of ``u`` for repeated DAG-prefix queries."""

    def __init__(self, alpha: ConcurrentAlphabet, u: Sequence[Symbol]):
        self.alpha = alpha
        self.u = tuple(u)
        self.counts = Counter(self.u)
        self.preds = predecessor_sets(alpha, self.u)

    def __call__(self, u1: Sequence[Symbol]) -> bool:
        u1 = tuple(u1)
        if any(c > self.counts[a] for a, c in Counter(u1).items()):
            return False
        mine = predecessor_sets(self.alpha, u1)
        return all(mine[v] == self.preds[v] for v in mine)

    def u_prefix(self, x: Sequence[Symbol]) -> int:
        """Length of the longest prefix of ``x`` whose DAG is a DAG-prefix of u's."""
        x = tuple(x)
        # DAG-prefixes are closed under removing the last letter, so scan forward
        k = 0
        while k < len(x) and self(x[:k + 1]):
            k += 1
        return k


def is_dag_prefix(alpha: ConcurrentAlphabet, u1: Sequence[Symbol], u: Sequence[Symbol]) -> bool:
    """True iff the trace order of ``u1`` is a DAG-prefix of that of ``u``:
    an upward-closed sub-DAG whose vertices keep all their parents."""
    return _DagPrefixChecker(alpha, alpha.check_word(u))(alpha.check_word(u1))


def border(alpha: ConcurrentAlphabet, u1: Sequence[Symbol], u: Sequence[Symbol]) -> set:
    """Labeled indices ``(b, j)`` of ``u`` whose addition to ``u1`` stays a DAG-prefix."""
    check = _DagPrefixChecker(alpha, alpha.check_word(u))
    u1 = alpha.check_word(u1)
    if not check(u1):
        raise ValueError(f"{u1!r} is not a DAG-prefix of {tuple(u)!r}")
    have = Counter(u1)
    out = set()
    for b in alpha.letters:
        if have[b] < check.counts[b] and check(u1 + (b,)):
            out.add((b, have[b] + 1))
    return out


def u_prefix_residual(alpha: ConcurrentAlphabet, u: Sequence[Symbol], x: Sequence[Symbol]) -> tuple:
    """Split ``x`` into its ``u``-prefix and ``u``-residual."""
    x = alpha.check_word(x)
    k = _DagPrefixChecker(alpha, alpha.check_word(u)).u_prefix(x)
    return x[:k], x[k:]


class PrefixValidator:
    """Builds the DFA by breadth-first exploration from ``(λ, λ, ∅)``.

    ``steps`` counts transition computations, for complexity checks.
    """

    def __init__(self, alpha: ConcurrentAlphabet, u: Sequence[Symbol]):
        u = alpha.check_word(u)
        if not is_normal_form(alpha, u):
            raise NotNormalFormError(f"{alpha.format_word(u)!r} is not in lexicographic normal form")
        self.alpha = alpha
        self.u = u
        self._check = _DagPrefixChecker(alpha, u)
        self.steps = 0
        self.dfa = self._build()

    def step(self, state: PvState, a: Symbol) -> PvState:
        alpha = self.alpha
        self.steps += 1
        u1, b1, L1 = state.u_prefix, state.first_residual, state.residual_letters
        if any(alpha.is_dependent(a, c) for c in L1):
            return PvState(u1, b1, L1 | {a})
        x, _ = insert_letter(alpha, u1, a)
        k = self._check.u_prefix(x)
        u2, v2 = x[:k], x[k:]
        if x != u1 + (a,) or b1 is None or alpha.less(a, b1):
            first = v2[0] if v2 else b1
            return PvState(u2, first, L1 | frozenset(v2))
        return PvState(u1, b1, L1 | {a})

    def _build(self) -> Nfa:
        start = PvState((), None, frozenset())
        states = [start]
        seen = {start}
        trans = []
        todo = deque([start])
        while todo:
            p = todo.popleft()
            for a in self.alpha.letters:
                q = self.step(p, a)
                trans.append((p, a, q))
                if q not in seen:
                    seen.add(q)
                    states.append(q)
                    todo.append(q)
        finals = [s for s in states if s.u_prefix == self.u]
        return Nfa(self.alpha, states, start, finals, trans)

    def state_bound(self) -> int:
        w = self.alpha.width()
        return w * len(self.u) ** w * len(self.alpha) * 2 ** len(self.alpha)


def build_prefix_validator(alpha: ConcurrentAlphabet, u: Sequence[Symbol]) -> Nfa:
    return PrefixValidator(alpha, u).dfa
