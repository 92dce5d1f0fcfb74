"""DNF formulas and their reduction to a DFA whose trace count is the model count.

Text format: one term per line, literals ``x3`` or ``!x3`` separated by
whitespace.  Blank lines and lines starting with ``#`` are ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product as cartesian

from .alphabet import ConcurrentAlphabet
from .automata import Nfa
from .errors import DnfParseError

DNF_ALPHABET = ConcurrentAlphabet(["a", "b", "0", "1", "$"], [("a", "b")])

_LITERAL = re.compile(r"^(!?)x(\d+)$")


@dataclass(frozen=True)
class DnfFormula:
    """``terms[i]`` maps a 1-based variable index to its required truth value."""

    terms: tuple
    num_vars: int

    def __post_init__(self):
        if not self.terms:
            raise DnfParseError("a DNF needs at least one term")
        if self.num_vars < 1:
            raise DnfParseError("a DNF needs at least one variable")
        for term in self.terms:
            if not term:
                raise DnfParseError("empty terms are not allowed")
            if max(term) > self.num_vars or min(term) < 1:
                raise DnfParseError(f"term {term} mentions a variable outside 1..{self.num_vars}")

    def satisfied_by(self, assignment) -> bool:
        return any(all(assignment[v - 1] == val for v, val in term.items()) for term in self.terms)

    def model_count(self) -> int:
        """Brute-force count of satisfying assignments."""
        return sum(self.satisfied_by(bits) for bits in cartesian((False, True), repeat=self.num_vars))

    @property
    def slice_length(self) -> int:
        return len(self.terms) + 1 + self.num_vars

    def to_text(self) -> str:
        lines = []
        for term in self.terms:
            lines.append(" ".join(("" if val else "!") + f"x{v}" for v, val in sorted(term.items())))
        return "\n".join(lines) + "\n"


def parse_dnf(text: str, num_vars: int | None = None) -> DnfFormula:
    terms = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        term = {}
        for tok in line.split():
            m = _LITERAL.match(tok)
            if not m:
                raise DnfParseError(f"line {lineno}: bad literal {tok!r}")
            var = int(m.group(2))
            if var < 1:
                raise DnfParseError(f"line {lineno}: variables are numbered from 1")
            val = m.group(1) != "!"
            if term.get(var, val) != val:
                raise DnfParseError(f"line {lineno}: contradictory literals on x{var}")
            term[var] = val
        terms.append(term)
    if not terms:
        raise DnfParseError("no terms found")
    top = max(max(t) for t in terms)
    if num_vars is None:
        num_vars = top
    elif num_vars < top:
        raise DnfParseError(f"num_vars={num_vars} but x{top} is used")
    return DnfFormula(tuple(terms), num_vars)


def dnf_to_dfa(formula: DnfFormula) -> Nfa:
    """Deterministic automaton over ``a, b, 0, 1, $`` with ``a`` and ``b``
    independent whose length ``k+1+n`` slice has one trace per model.

    Accepted words are ``a^i b a^(k-i-1) $ bits`` where term ``i+1`` holds
    under ``bits``.  The rejecting sink is left implicit.
    """
    k = len(formula.terms)
    n = formula.num_vars
    states = []
    trans = []
    states += [("q", i) for i in range(k)]
    states += [("r", i, pos) for i in range(k) for pos in range(1, k + 1)]
    states += [("p", t, l) for t in range(k) for l in range(n + 1)]
    for i in range(k):
        if i < k - 1:
            trans.append((("q", i), "a", ("q", i + 1)))
        trans.append((("q", i), "b", ("r", i, i + 1)))
        for pos in range(1, k + 1):
            if i < k - 1:
                trans.append((("r", i, pos), "a", ("r", i + 1, pos)))
    for pos in range(1, k + 1):
        trans.append((("r", k - 1, pos), "$", ("p", pos - 1, 0)))
    for t, term in enumerate(formula.terms):
        for l in range(1, n + 1):
            if l in term:
                bit = "1" if term[l] else "0"
                trans.append((("p", t, l - 1), bit, ("p", t, l)))
            else:
                trans.append((("p", t, l - 1), "0", ("p", t, l)))
                trans.append((("p", t, l - 1), "1", ("p", t, l)))
    finals = [("p", t, n) for t in range(k)]
    return Nfa(DNF_ALPHABET, states, ("q", 0), finals, trans)
