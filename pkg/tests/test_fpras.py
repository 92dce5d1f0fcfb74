import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import random_alphabet, random_nfa
from tracecount.alphabet import ConcurrentAlphabet
from tracecount.automata import Nfa, load_nfa, unroll
from tracecount.dnf import dnf_to_dfa, parse_dnf
from tracecount.errors import ParameterError, RoundUpOverflowError
from tracecount.exact import count_exact_nf, exact_state_counts
from tracecount.fpras import (TraceMcCore, UnionFilter, default_params, median_of_means, reduce_set, round_up,
                              trace_mc, trace_mc_core, union_sets)
from tracecount.rng import generator, root_sequence

SMALL = {"beta": 40, "gamma": 3, "xi": 3}


def by_label(U, name, level):
    return next(q for q, lbl in enumerate(U.labels) if lbl == (name, level))


def test_median_of_means_examples():
    assert median_of_means(2, [3, 3, 3, 3]) == 3
    assert median_of_means(4, [1, 2, 3, 4]) == Fraction(5, 2)
    assert median_of_means(2, [0, 2, 4, 4, 10, 0]) == 4
    with pytest.raises(ParameterError):
        median_of_means(4, [1, 2, 3])


def test_reduce_set_extremes():
    rng = generator(root_sequence(1))
    S = {(a,) for a in "abcdef"}
    assert reduce_set(S, 1, rng) == S
    assert reduce_set(S, 0, rng) == set()
    with pytest.raises(ParameterError):
        reduce_set(S, Fraction(3, 2), rng)
    with pytest.raises(ParameterError):
        reduce_set(S, 0.5, rng)


def test_reduce_set_half_concentrates():
    S = set(range(10_000))
    inside = 0
    for seed in range(100):
        kept = len(reduce_set(S, Fraction(1, 2), generator(root_sequence(seed))))
        inside += abs(kept - 5000) <= 300
    assert inside >= 99


def test_round_up_examples():
    assert round_up(4, Fraction(1, 2), 7) == 7
    assert round_up(4, Fraction(1, 2), Fraction(13, 10)) == Fraction(3, 2)
    assert round_up(4, Fraction(1, 2), Fraction(2, 5)) == Fraction(1, 2)
    with pytest.raises(RoundUpOverflowError):
        round_up(2, Fraction(1, 2), 7)
    # a larger base admits counts above 2^n
    assert round_up(2, Fraction(1, 2), 7, base=3) == 7


@given(st.integers(0, 6), st.fractions(Fraction(1, 20), Fraction(19, 20)), st.fractions(0, 60))
def test_round_up_is_least_acceptable_value(n, eps, v):
    top = 2 ** n
    acceptable = sorted({f * ell for ell in range(1, top + 1) for f in (1, 1 - eps, 1 + eps)})
    if v > acceptable[-1]:
        with pytest.raises(RoundUpOverflowError):
            round_up(n, eps, v)
    else:
        assert round_up(n, eps, v) == min(x for x in acceptable if x >= v)


def test_default_parameters():
    p = default_params(Fraction(9, 10), Fraction(1, 4), 2, 3, 6)
    assert p.beta == math.ceil(8 * 2 * 3 ** 3 * Fraction(19, 10) / Fraction(81, 100))
    assert p.gamma == math.ceil(2 * math.log(16 * 6))
    assert p.xi == math.ceil(8 * math.log(4))
    assert p.theta == 16 * p.alpha * 6 / Fraction(1, 10)
    q = default_params(Fraction(9, 10), Fraction(1, 4), 2, 3, 6, {"beta": 10, "gamma": 2})
    assert (q.beta, q.gamma, q.alpha) == (10, 2, 20)
    assert q.theta == 16 * 20 * 6 / Fraction(1, 10)
    for bad in [{"beta": 0}, {"gamma": 1.5}, {"delta": 3}]:
        with pytest.raises(ParameterError):
            default_params(Fraction(1, 2), Fraction(1, 2), 1, 1, 1, bad)
    for eps, delta in [(0, Fraction(1, 2)), (1, Fraction(1, 2)), (Fraction(1, 2), 1), (0.5, Fraction(1, 2))]:
        with pytest.raises(ParameterError):
            default_params(eps, delta, 1, 1, 1)


def test_union_single_incoming_is_verbatim():
    alpha = ConcurrentAlphabet("ab")
    A = Nfa(alpha, [0, 1, 2], 0, [2], [(0, "a", 1), (0, "b", 1), (1, "b", 2)])
    U = unroll(A, 2)
    q1 = by_label(U, 1, 1)
    assert union_sets(U, U.final, {q1: {("a",), ("b",)}}) == {("a", "b"), ("b", "b")}
    assert union_sets(U, U.final, {q1: set()}) == set()


def test_union_keeps_earlier_transition(data_path):
    U = unroll(load_nfa(data_path("figure.json")), 4)
    q5, q6, q9 = by_label(U, "q5", 2), by_label(U, "q6", 2), by_label(U, "q9", 3)
    assert union_sets(U, q9, {q5: {tuple("ab")}, q6: {tuple("ba")}}) == {tuple("abc")}
    assert union_sets(U, q9, {q6: {tuple("ba")}}) == set()
    assert union_sets(U, q9, {q6: {tuple("cc")}}) == {tuple("ccc")}


def test_union_filter_caches(data_path):
    U = unroll(load_nfa(data_path("figure.json")), 4)
    f = UnionFilter(U)
    tau = U.incoming[by_label(U, "q9", 3)][0]
    f.keeps(tau, tuple("ab"))
    f.keeps(tau, tuple("ab"))
    assert f.oracle_calls == 1


def test_unique_predecessor_path():
    alpha = ConcurrentAlphabet("ab")
    A = Nfa(alpha, [0, 1, 2], 0, [2], [(0, "a", 1), (1, "b", 2)])
    U = unroll(A, 2)
    params = default_params(Fraction(1, 2), Fraction(1, 2), 1, 2, U.size, SMALL)
    core = TraceMcCore(U, params, 0, instrument=True)
    assert core.run() == 1
    rec = core.records[U.levels[1][0]]
    assert rec.n_hat == 1 and rec.estimate == 1
    assert rec.shat.words == [("a",)] and rec.shat.matrix.all()
    assert core.N[U.initial] == 1


def test_theta_zero_interrupts():
    A = load_nfa_simple()
    U = unroll(A, 2)
    params = default_params(Fraction(1, 2), Fraction(1, 2), 1, 2, U.size, {**SMALL, "theta": 0})
    core = TraceMcCore(U, params, 0)
    assert core.run() == 0 and core.interrupted
    res = trace_mc(A, 2, Fraction(1, 2), Fraction(1, 2), overrides={**SMALL, "theta": 0})
    assert res.estimate == 0 and res.interrupted_runs == res.params.xi


def load_nfa_simple():
    alpha = ConcurrentAlphabet("ab", [("a", "b")])
    return Nfa(alpha, [0, 1, 2], 0, [2], [(0, a, 1) for a in "ab"] + [(1, a, 2) for a in "ab"])


def test_empty_slice_returns_zero():
    res = trace_mc(load_nfa_simple(), 3, Fraction(1, 2), Fraction(1, 2))
    assert res.estimate == 0 and res.params is None
    with pytest.raises(ParameterError):
        trace_mc(load_nfa_simple(), 3, 2, Fraction(1, 2))


def test_single_trace_language_within_band(data_path):
    A = load_nfa(data_path("single_trace.json"))
    eps = Fraction(1, 2)
    res = trace_mc(A, 2, eps, Fraction(1, 4), seed=5)
    assert res.interrupted_runs == 0
    assert all(1 - eps <= r <= 1 + eps for r in res.runs)


def test_dnf_with_four_models():
    phi = parse_dnf("x1\nx2", num_vars=3)
    assert phi.model_count() == 6
    phi = parse_dnf("x1 x2\n!x1 x3", num_vars=3)
    assert phi.model_count() == 4
    D = dnf_to_dfa(phi)
    n = phi.slice_length
    hits = sum(Fraction(2, 5) <= trace_mc(D, n, Fraction(9, 10), Fraction(1, 4), seed=s).estimate <= Fraction(38, 5)
               for s in range(40))
    assert hits >= 24


def test_estimates_are_acceptable_and_monotone(data_path):
    A = load_nfa(data_path("figure.json"))
    U = unroll(A, 4)
    eps = Fraction(1, 2)
    params = default_params(eps, Fraction(1, 2), 2, 4, U.size, SMALL)
    core = TraceMcCore(U, params, 3, instrument=True)
    core.run()
    top = 3 ** 4  # three letters, so counts are bounded by 3^n
    for q, rec in core.records.items():
        N = rec.estimate
        assert any(f * ell == N for ell in range(1, top + 1) for f in (1, 1 - eps, 1 + eps))
        assert N >= rec.n_max == max(core.N[p] for p in U.predecessors(q))


def test_sample_size_is_unbiased_with_exact_upstream(data_path):
    U = unroll(load_nfa(data_path("figure.json")), 4)
    exact = exact_state_counts(U)
    params = default_params(Fraction(1, 2), Fraction(1, 2), 2, 4, U.size, {"beta": 1000, "gamma": 10, "xi": 1})
    core = TraceMcCore(U, params, 11, plug_in=exact, instrument=True)
    core.run()
    for q, rec in core.records.items():
        sizes = rec.shat.matrix.sum(axis=1)
        mean = exact[q] / rec.n_max
        # each replica holds a sum of independent Bernoulli(1/n_max) picks
        sigma = math.sqrt(float(exact[q] * (1 / rec.n_max) * (1 - 1 / rec.n_max)) / len(sizes))
        assert abs(sizes.mean() - float(mean)) <= 3 * sigma + 1e-12, (U.labels[q], sizes.mean(), mean)


def test_workers_do_not_change_results(data_path):
    A = load_nfa(data_path("figure.json"))
    one = trace_mc(A, 4, Fraction(1, 2), Fraction(1, 4), seed=9, overrides=SMALL, workers=1)
    many = trace_mc(A, 4, Fraction(1, 2), Fraction(1, 4), seed=9, overrides=SMALL, workers=3)
    assert one.to_json() == many.to_json()
    other = trace_mc(A, 4, Fraction(1, 2), Fraction(1, 4), seed=10, overrides=SMALL)
    assert other.params == one.params


@given(st.integers(0, 10 ** 6), st.integers(1, 4))
def test_initial_state_and_samples_are_canonical_members(seed, n):
    rng = random.Random(seed)
    alpha = random_alphabet(rng, max_letters=3)
    A = random_nfa(rng, alpha, max_states=4)
    U = unroll(A, n)
    if U.is_empty:
        assert trace_mc(A, n, Fraction(1, 2), Fraction(1, 2)).estimate == 0
        return
    params = default_params(Fraction(1, 2), Fraction(1, 2), alpha.width(), n, U.size, SMALL)
    core = TraceMcCore(U, params, seed, instrument=True)
    est = core.run()
    assert core.N[U.initial] == 1
    assert est >= 0
    reach = U.words_reaching()
    for q, rec in core.records.items():
        assert set(rec.samples.words) <= reach[q]
        assert np.array_equal(rec.samples.matrix, rec.samples.matrix & rec.samples.matrix.any(axis=0))


def test_trace_mc_core_wrapper(data_path):
    U = unroll(load_nfa(data_path("intro.json")), 6)
    params = default_params(Fraction(1, 2), Fraction(1, 2), 3, 6, U.size, SMALL)
    assert trace_mc_core(U, params, seed=1) > 0
    assert count_exact_nf(load_nfa(data_path("intro.json")), 6) == 2


def test_median_of_means_concentration():
    # Bernoulli(3/10) inputs: sigma^2 = 21/100; with eps = 1/10, beta = 84 the
    # exponent factor is 1/2, so the failure bound is exp(-gamma/2)
    beta, gamma, mu, eps = 84, 6, 0.3, 0.1
    bound = math.exp(-gamma * (1 - 2 * 0.21 / (eps ** 2 * beta)))
    g = generator(root_sequence(21))
    trials = 2000
    fails = 0
    for _ in range(trials):
        xs = (g.random(beta * gamma) < mu).astype(int)
        fails += abs(float(median_of_means(beta, xs.tolist())) - mu) > eps
    slack = 3 * math.sqrt(bound * (1 - bound) / trials)
    assert fails / trials <= bound + slack


def test_canonical_run_prefixes_are_sampled(data_path):
    from tracecount.exact import CanonicalRuns
    U = unroll(load_nfa(data_path("figure.json")), 4)
    params = default_params(Fraction(1, 2), Fraction(1, 2), 2, 4, U.size, {"beta": 30, "gamma": 2, "xi": 1})
    core = TraceMcCore(U, params, 17, instrument=True)
    core.run()
    runs = CanonicalRuns(U)
    seen = 0
    for q, rec in core.records.items():
        for r in range(params.alpha):
            for w in rec.samples.replica(r):
                run = runs.run(w, q)
                for k, (_, _, target) in enumerate(run.transitions[:-1], start=1):
                    seen += 1
                    assert w[:k] in core.records[target].samples.replica(r)
    assert seen > 0
