"""Finite automata: NFAs, unrolling, products and the normal-form DFA.

JSON automaton format::

    {"alphabet": ["a", "b"], "independence": [["a", "b"]],
     "states": ["p", "q"], "initial": "p", "finals": ["q"],
     "transitions": [["p", "a", "q"], ...]}

The order of ``alphabet`` is the lexicographic letter order.
"""

from __future__ import annotations

import json
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from .alphabet import ConcurrentAlphabet, Symbol
from .errors import AlphabetError, AutomatonFormatError

State = Hashable
Transition = tuple  # (source, letter, target)


class Nfa:
    """Non-deterministic automaton without epsilon moves.

    ``states`` keeps declaration order; that order is used to number states
    when the automaton is unrolled.
    """

    def __init__(self, alphabet: ConcurrentAlphabet, states: Iterable[State], initial: State,
                 finals: Iterable[State], transitions: Iterable[Transition]):
        self.alphabet = alphabet
        self.states = tuple(dict.fromkeys(states))
        state_set = set(self.states)
        if initial not in state_set:
            raise AutomatonFormatError(f"initial state {initial!r} is not a declared state")
        self.initial = initial
        self.finals = frozenset(finals)
        if not self.finals <= state_set:
            raise AutomatonFormatError(f"final states {sorted(map(str, self.finals - state_set))} are undeclared")
        trans = []
        for t in transitions:
            if len(t) != 3:
                raise AutomatonFormatError(f"transition {t!r} is not a triple")
            p, a, q = t
            if p not in state_set or q not in state_set:
                raise AutomatonFormatError(f"transition {t!r} uses an undeclared state")
            if a not in alphabet:
                raise AutomatonFormatError(f"transition {t!r} uses unknown symbol {a!r}")
            trans.append((p, a, q))
        self.transitions = tuple(dict.fromkeys(trans))
        self._succ = defaultdict(list)
        self._pred = defaultdict(list)
        for p, a, q in self.transitions:
            self._succ[(p, a)].append(q)
            self._pred[q].append((p, a))

    def __repr__(self):
        return (f"Nfa(states={len(self.states)}, transitions={len(self.transitions)}, "
                f"initial={self.initial!r}, finals={sorted(map(repr, self.finals))})")

    def successors(self, state: State, letter: Symbol) -> list:
        return self._succ.get((state, letter), [])

    def incoming(self, state: State) -> list:
        return self._pred.get(state, [])

    @property
    def is_deterministic(self) -> bool:
        return all(len(v) <= 1 for v in self._succ.values())

    def reach(self, word: Sequence[Symbol], start: State | None = None) -> frozenset:
        """States reached from ``start`` (default: initial) by reading ``word``."""
        current = {self.initial if start is None else start}
        for a in word:
            current = {q for p in current for q in self.successors(p, a)}
            if not current:
                break
        return frozenset(current)

    def accepts(self, word: Sequence[Symbol]) -> bool:
        return bool(self.reach(word) & self.finals)

    def words(self, n: int) -> set:
        """All accepted words of length ``n`` (subset-construction DFS)."""
        out = set()
        letters = self.alphabet.letters

        def walk(current, prefix):
            if len(prefix) == n:
                if current & self.finals:
                    out.add(prefix)
                return
            for a in letters:
                nxt = frozenset(q for p in current for q in self.successors(p, a))
                if nxt:
                    walk(nxt, prefix + (a,))

        walk(frozenset({self.initial}), ())
        return out

    # -- serialisation -------------------------------------------------

    def to_json(self) -> dict:
        names = {s: _state_name(s) for s in self.states}
        if len(set(names.values())) != len(names):
            names = {s: f"s{i}" for i, s in enumerate(self.states)}
        data = self.alphabet.to_json()
        data.update({
            "states": [names[s] for s in self.states],
            "initial": names[self.initial],
            "finals": [names[s] for s in self.states if s in self.finals],
            "transitions": [[names[p], a, names[q]] for p, a, q in self.transitions],
        })
        return data

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


def _state_name(state) -> str:
    return state if isinstance(state, str) else repr(state)


def nfa_from_json(data) -> Nfa:
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise AutomatonFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise AutomatonFormatError("automaton description must be a JSON object")
    missing = [k for k in ("alphabet", "states", "initial", "finals", "transitions") if k not in data]
    if missing:
        raise AutomatonFormatError(f"missing keys: {missing}")
    try:
        alpha = ConcurrentAlphabet(data["alphabet"], data.get("independence", []))
    except AlphabetError:
        raise
    except TypeError as exc:
        raise AlphabetError(str(exc)) from exc
    return Nfa(alpha, data["states"], data["initial"], data["finals"],
               [tuple(t) for t in data["transitions"]])


def load_nfa(path) -> Nfa:
    with open(path, encoding="utf-8") as fh:
        return nfa_from_json(fh.read())


# ---------------------------------------------------------------------------
# unrolling

FINAL = "q_F"


@dataclass
class UnrolledNfa:
    """Levelled acyclic automaton for words of one fixed length.

    States are integers ``0 .. size-1`` numbered level by level; ``labels``
    maps them back to ``(original state, level)`` (or ``FINAL`` for the merged
    final state).  ``transitions`` is sorted by the fixed total order used by
    canonical runs: (level, source, letter rank, target).
    """

    alphabet: ConcurrentAlphabet
    n: int
    levels: list
    labels: list
    transitions: list
    initial: int = 0
    final: int | None = None
    incoming: dict = field(default_factory=dict)
    _succ: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.level_of = {}
        for i, lvl in enumerate(self.levels):
            for q in lvl:
                self.level_of[q] = i
        self.order = {t: k for k, t in enumerate(self.transitions)}
        self.incoming = defaultdict(list)
        self._succ = defaultdict(list)
        for t in self.transitions:
            self.incoming[t[2]].append(t)
            self._succ[(t[0], t[1])].append(t[2])

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def finals(self) -> frozenset:
        return frozenset() if self.final is None else frozenset({self.final})

    @property
    def is_empty(self) -> bool:
        return self.final is None

    def successors(self, state, letter) -> list:
        return self._succ.get((state, letter), [])

    def predecessors(self, q) -> list:
        """Distinct predecessor states of ``q`` in order of first incoming transition."""
        return list(dict.fromkeys(t[0] for t in self.incoming.get(q, [])))

    def restricted(self, excluded) -> "_RestrictedView":
        return _RestrictedView(self, frozenset(excluded))

    def words_reaching(self) -> dict:
        """Map each state to the set of words reaching it (exponential; oracle use)."""
        out = {self.initial: {()}}
        for lvl in self.levels[1:]:
            for q in lvl:
                out[q] = {w + (a,) for p, a, _ in self.incoming.get(q, []) for w in out[p]}
        return out

    def as_nfa(self) -> Nfa:
        return Nfa(self.alphabet, range(self.size), self.initial, self.finals, self.transitions)


class _RestrictedView:
    """Unrolled automaton with some transitions removed (read-only view)."""

    def __init__(self, base: UnrolledNfa, excluded: frozenset):
        self.base = base
        self.excluded = excluded
        self.alphabet = base.alphabet
        self.initial = base.initial

    def successors(self, state, letter):
        return [q for q in self.base.successors(state, letter) if (state, letter, q) not in self.excluded]


def unroll(A: Nfa, n: int) -> UnrolledNfa:
    """Unroll ``A`` for words of length ``n`` and prune dead states.

    Accepting states of the last level are merged into one final state.
    """
    if n < 0:
        raise ValueError("length must be non-negative")
    rank = A.alphabet.rank
    decl = {s: i for i, s in enumerate(A.states)}
    # forward reachability per level
    fwd = [{A.initial}]
    for _ in range(n):
        fwd.append({q for p in fwd[-1] for a in A.alphabet for q in A.successors(p, a)})
    # backward: states at level i that can reach an accepting state at level n
    bwd = [set() for _ in range(n + 1)]
    bwd[n] = fwd[n] & A.finals
    for i in range(n - 1, -1, -1):
        bwd[i] = {p for p in fwd[i] if any(q in bwd[i + 1] for a in A.alphabet for q in A.successors(p, a))}
    alpha = A.alphabet
    if not bwd[0]:
        return UnrolledNfa(alpha, n, [[0]], [(A.initial, 0)], [], 0, None)
    labels = []
    index = {}
    levels = []
    for i in range(n + 1):
        if i == n and n > 0:
            index_final = len(labels)
            labels.append(FINAL)
            levels.append([index_final])
            for s in bwd[n]:
                index[(s, n)] = index_final
            continue
        lvl = []
        for s in sorted(bwd[i], key=decl.__getitem__):
            index[(s, i)] = len(labels)
            lvl.append(len(labels))
            labels.append((s, i))
        levels.append(lvl)
    trans = set()
    for i in range(n):
        for p in bwd[i]:
            for a in alpha:
                for q in A.successors(p, a):
                    if q in bwd[i + 1]:
                        trans.add((index[(p, i)], a, index[(q, i + 1)]))
    order = sorted(trans, key=lambda t: (t[0], rank(t[1]), t[2]))
    final = levels[n][0]
    return UnrolledNfa(alpha, n, levels, labels, order, 0, final)


# ---------------------------------------------------------------------------
# normal-form DFA and product


def nf_dfa(alpha: ConcurrentAlphabet) -> Nfa:
    """Deterministic automaton accepting exactly the lexicographic normal forms.

    A state is the set of letters that may not be read next.  Missing
    transitions go to an implicit rejecting sink.
    """
    letters = alpha.letters
    start = frozenset()
    states = [start]
    seen = {start}
    trans = []
    todo = deque([start])
    while todo:
        blocked = todo.popleft()
        for b in letters:
            if b in blocked:
                continue
            nxt = frozenset(
                a for a in letters
                if alpha.is_independent(a, b) and (a in blocked or alpha.less(a, b))
            )
            trans.append((blocked, b, nxt))
            if nxt not in seen:
                seen.add(nxt)
                states.append(nxt)
                todo.append(nxt)
    return Nfa(alpha, states, start, states, trans)


def product(A: Nfa, D: Nfa) -> Nfa:
    """Synchronous product; accepts L(A) intersected with L(D)."""
    if A.alphabet != D.alphabet:
        raise AutomatonFormatError("product of automata over different concurrent alphabets")
    start = (A.initial, D.initial)
    states = [start]
    seen = {start}
    trans = []
    todo = deque([start])
    while todo:
        p, d = todo.popleft()
        for a in A.alphabet:
            for p2 in A.successors(p, a):
                for d2 in D.successors(d, a):
                    nxt = (p2, d2)
                    trans.append(((p, d), a, nxt))
                    if nxt not in seen:
                        seen.add(nxt)
                        states.append(nxt)
                        todo.append(nxt)
    finals = [s for s in states if s[0] in A.finals and s[1] in D.finals]
    return Nfa(A.alphabet, states, start, finals, trans)
