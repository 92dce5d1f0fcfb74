import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import random_alphabet, random_nfa
from tracecount.alphabet import ConcurrentAlphabet
from tracecount.automata import Nfa, load_nfa, unroll
from tracecount.errors import BudgetExceededError
from tracecount.exact import (CanonicalRuns, canonical_run, count_exact, count_exact_enum, count_exact_nf,
                              exact_state_counts)
from tracecount.traces import enumerate_class


def test_intro_language_has_two_traces(data_path):
    A = load_nfa(data_path("intro.json"))
    assert count_exact_nf(A, 6) == 2
    assert count_exact_enum(A, 6) == 2
    assert count_exact(A, 6, "word-enum") == 2


def test_no_independence_counts_words():
    alpha = ConcurrentAlphabet("ab")
    A = Nfa(alpha, [0, 1], 0, [1], [(0, "a", 0), (0, "b", 1), (1, "a", 1), (1, "b", 1)])
    for n in range(6):
        assert count_exact_nf(A, n) == len(A.words(n)) == 2 ** n - 1


def test_budget_guard(data_path):
    A = load_nfa(data_path("intro.json"))
    with pytest.raises(BudgetExceededError):
        count_exact_nf(A, 20)
    with pytest.raises(BudgetExceededError):
        count_exact(A, 6, "word-enum", budget=100)
    with pytest.raises(ValueError):
        count_exact(A, 6, "magic")


def test_figure_example_canonical_run(data_path):
    A = load_nfa(data_path("figure.json"))
    U = unroll(A, 4)
    run = canonical_run(U, tuple("bacc"), U.final)
    assert run.word == tuple("abcc")
    path = [U.labels[run.transitions[0][0]]] + [U.labels[t[2]] for t in run.transitions]
    assert [lbl if isinstance(lbl, str) else lbl[0] for lbl in path] == ["qI", "q2", "q5", "q9", "q_F"]
    # only two words of the class are accepted
    accepted = {w for w in enumerate_class(A.alphabet, tuple("abcc")) if A.accepts(w)}
    assert accepted == {tuple("abcc"), tuple("bacc")}


def test_canonical_run_edge_cases(data_path):
    U = unroll(load_nfa(data_path("figure.json")), 4)
    runs = CanonicalRuns(U)
    assert runs.run((), U.initial).transitions == ()
    with pytest.raises(ValueError):
        runs.run(tuple("a"), U.initial)
    with pytest.raises(ValueError):
        runs.run(tuple("cccc"), U.levels[1][0])
    alpha = ConcurrentAlphabet("ab")
    P = unroll(Nfa(alpha, [0, 1, 2], 0, [2], [(0, "a", 1), (1, "b", 2)]), 2)
    assert canonical_run(P, tuple("ab"), P.final).word == tuple("ab")


@given(st.integers(0, 10 ** 6), st.integers(0, 5))
def test_state_counts_match_final_count(seed, n):
    rng = random.Random(seed)
    alpha = random_alphabet(rng, max_letters=3)
    A = random_nfa(rng, alpha, max_states=4)
    U = unroll(A, n)
    if U.is_empty:
        assert count_exact_nf(A, n) == 0
    else:
        assert exact_state_counts(U)[U.final] == count_exact_nf(A, n) == count_exact_enum(A, n)


@given(st.integers(0, 10 ** 6), st.integers(1, 4))
def test_canonical_words_are_unique_per_class(seed, n):
    rng = random.Random(seed)
    alpha = random_alphabet(rng, max_letters=3)
    A = random_nfa(rng, alpha, max_states=4)
    U = unroll(A, n)
    if U.is_empty:
        return
    runs = CanonicalRuns(U)
    for q, words in U.words_reaching().items():
        cans = {runs.word(w, q) for w in words}
        assert len(cans) == len({frozenset(enumerate_class(alpha, w)) for w in words})
        assert cans <= words
