"""Randomized approximate counting of the traces meeting a language slice.

The estimator walks the unrolled automaton level by level.  For every state
``q`` it keeps an estimate ``N(q)`` of the number of traces meeting ``L(q)``
and ``alpha`` independent sample sets of canonical words.  Sample sets are
stored column-wise: for each state a list of distinct words and an
``alpha x len(words)`` boolean matrix saying which replica holds which word.

All estimates and probabilities are exact ``Fraction`` values.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .automata import Nfa, UnrolledNfa, unroll
from .errors import ParameterError, RoundUpOverflowError
from .membership import member
from .rng import as_sequence, bernoulli, bernoulli_mask, generator, substream


def _fraction(x, name: str) -> Fraction:
    if isinstance(x, float):
        raise ParameterError(f"{name} must be an exact rational (int, Fraction or 'p/q' string), got float {x}")
    try:
        return Fraction(x)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"{name}: cannot parse {x!r} as a rational") from exc


@dataclass(frozen=True)
class FprasParams:
    epsilon: Fraction
    delta: Fraction
    beta: int
    gamma: int
    xi: int
    theta: Fraction

    @property
    def alpha(self) -> int:
        return self.beta * self.gamma

    def to_json(self) -> dict:
        return {
            "epsilon": str(self.epsilon), "delta": str(self.delta), "beta": self.beta,
            "gamma": self.gamma, "alpha": self.alpha, "xi": self.xi, "theta": str(self.theta),
        }


OVERRIDABLE = ("beta", "gamma", "xi", "theta")


def default_params(epsilon, delta, width: int, n: int, num_states: int,
                   overrides: Mapping | None = None) -> FprasParams:
    """Parameters of the estimator, with optional replacements.

    ``theta`` is recomputed from the (possibly overridden) ``beta`` and
    ``gamma`` unless it is overridden itself.
    """
    eps = _fraction(epsilon, "epsilon")
    dlt = _fraction(delta, "delta")
    if not 0 < eps < 1:
        raise ParameterError("epsilon must lie in (0, 1)")
    if not 0 < dlt < 1:
        raise ParameterError("delta must lie in (0, 1)")
    overrides = dict(overrides or {})
    unknown = set(overrides) - set(OVERRIDABLE)
    if unknown:
        raise ParameterError(f"unknown overrides: {sorted(unknown)}")
    for k, v in overrides.items():
        if v is None:
            continue
        if k != "theta" and (not isinstance(v, int) or v < 1):
            raise ParameterError(f"override {k} must be a positive integer")
    beta = overrides.get("beta") or max(1, math.ceil(8 * width * Fraction(n) ** (width + 1) * (1 + eps) / eps ** 2))
    gamma = overrides.get("gamma") or max(1, math.ceil(2 * math.log(16 * num_states)))
    xi = overrides.get("xi") or max(1, math.ceil(8 * math.log(1 / dlt)))
    theta = overrides.get("theta")
    if theta is None:
        theta = 16 * beta * gamma * num_states / (1 - eps)
    return FprasParams(eps, dlt, int(beta), int(gamma), int(xi), _fraction(theta, "theta"))


# ---------------------------------------------------------------------------
# building blocks


def median_of_means(beta: int, xs: Sequence) -> Fraction:
    """Lower median of the means of consecutive batches of ``beta`` values."""
    xs = list(xs)
    if beta < 1 or len(xs) == 0 or len(xs) % beta:
        raise ParameterError(f"{len(xs)} values cannot be split into batches of {beta}")
    gamma = len(xs) // beta
    sums = sorted(sum(Fraction(x) for x in xs[i * beta:(i + 1) * beta]) for i in range(gamma))
    return sums[(gamma - 1) // 2] / beta


def _median_of_means_counts(beta: int, sizes: np.ndarray) -> Fraction:
    gamma = sizes.shape[0] // beta
    sums = np.sort(sizes.reshape(gamma, beta).sum(axis=1))
    return Fraction(int(sums[(gamma - 1) // 2]), beta)


def reduce_set(S: Iterable, p, rng: np.random.Generator) -> set:
    """Keep each element independently with probability ``p``."""
    p = _fraction(p, "p")
    if not 0 <= p <= 1:
        raise ParameterError(f"probability {p} outside [0, 1]")
    return {w for w in sorted(S) if bernoulli(rng, p)}


def round_up(n: int, epsilon, v, base: int = 2) -> Fraction:
    """Least acceptable value that is at least ``v``.

    Acceptable values are ``l``, ``(1-epsilon) l`` and ``(1+epsilon) l`` for
    integers ``1 <= l <= base**n``.
    """
    eps = _fraction(epsilon, "epsilon")
    v = _fraction(v, "v")
    top = base ** n
    if v > (1 + eps) * top:
        raise RoundUpOverflowError(f"{v} exceeds the largest acceptable value {(1 + eps) * top}")
    best = None
    for factor in (Fraction(1), 1 - eps, 1 + eps):
        ell = max(1, math.ceil(v / factor))
        if ell <= top:
            cand = factor * ell
            if best is None or cand < best:
                best = cand
    return best


class UnionFilter:
    """Decides which extended words survive ``union`` and remembers the answers.

    ``w.s`` read through transition ``tau`` into ``q`` is kept iff no word
    equivalent to it reaches ``q`` once ``tau`` and every later transition
    into ``q`` are removed.
    """

    def __init__(self, U: UnrolledNfa):
        self.U = U
        self._cache = {}
        self.oracle_calls = 0

    def keeps(self, tau, w: tuple) -> bool:
        key = (tau, w)
        ans = self._cache.get(key)
        if ans is None:
            U = self.U
            q = tau[2]
            k = U.order[tau]
            excluded = [t for t in U.incoming[q] if U.order[t] >= k]
            self.oracle_calls += 1
            ans = not member(U.restricted(excluded), q, w + (tau[1],))
            self._cache[key] = ans
        return ans


def union_sets(U: UnrolledNfa, q, sets: Mapping, union_filter: UnionFilter | None = None) -> set:
    """Scalar form of ``union``: ``sets`` maps each predecessor to its words."""
    f = union_filter or UnionFilter(U)
    out = set()
    for tau in U.incoming.get(q, []):
        for w in sorted(sets.get(tau[0], ())):
            if f.keeps(tau, tuple(w)):
                out.add(tuple(w) + (tau[1],))
    return out


# ---------------------------------------------------------------------------
# the core estimator


@dataclass
class SampleSets:
    """Per-state samples: ``matrix[r, j]`` tells whether replica r holds ``words[j]``."""

    words: list
    matrix: np.ndarray

    def replica(self, r: int) -> set:
        return {self.words[j] for j in np.flatnonzero(self.matrix[r])}

    def total(self) -> int:
        return int(self.matrix.sum())


@dataclass
class StateRecord:
    """Instrumentation for one processed state."""

    n_max: Fraction
    n_hat: Fraction
    estimate: Fraction
    shat: SampleSets
    samples: SampleSets


class TraceMcCore:
    """One run of the level-by-level estimator.

    ``plug_in`` replaces every computed estimate by the given exact value
    (no rounding); used to check the sampling step in isolation.
    """

    def __init__(self, U: UnrolledNfa, params: FprasParams, seq, union_filter: UnionFilter | None = None,
                 plug_in: Mapping | None = None, instrument: bool = False):
        if U.is_empty:
            raise ParameterError("the unrolled automaton accepts nothing")
        self.U = U
        self.params = params
        self.seq = as_sequence(seq)
        self.filter = union_filter or UnionFilter(U)
        self.plug_in = plug_in
        self.instrument = instrument
        self.base = max(2, len(U.alphabet))
        self.N = {}
        self.S = {}
        self.records = {}
        self.number_samples = 0
        self.interrupted = False

    def estimate_and_sample(self, q) -> None:
        U, prm = self.U, self.params
        alpha = prm.alpha
        rng = generator(substream(self.seq, q))
        preds = U.predecessors(q)
        n_max = max(self.N[p] for p in preds)

        reduced = {}
        for p in preds:
            sp = self.S[p]
            reduced[p] = sp.matrix & bernoulli_mask(rng, self.N[p] / n_max, sp.matrix.shape)

        words, columns = [], []
        for tau in U.incoming[q]:
            p, s, _ = tau
            mask = reduced[p]
            src = self.S[p].words
            for j in np.flatnonzero(mask.any(axis=0)):
                w = src[j]
                if self.filter.keeps(tau, w):
                    words.append(w + (s,))
                    columns.append(mask[:, j])
        shat = np.column_stack(columns) if columns else np.zeros((alpha, 0), dtype=bool)

        n_hat = n_max * _median_of_means_counts(prm.beta, shat.sum(axis=1))
        if self.plug_in is not None:
            est = Fraction(self.plug_in[q])
        else:
            est = round_up(U.n, prm.epsilon, max(n_max, n_hat), self.base)
        self.N[q] = est

        kept = shat & bernoulli_mask(rng, n_max / est, shat.shape)
        live = np.flatnonzero(kept.any(axis=0))
        samples = SampleSets([words[j] for j in live], kept[:, live])
        self.S[q] = samples
        if self.instrument:
            self.records[q] = StateRecord(n_max, n_hat, est, SampleSets(words, shat), samples)

    def run(self) -> Fraction:
        U, prm = self.U, self.params
        q0 = U.initial
        self.N[q0] = Fraction(1)
        self.S[q0] = SampleSets([()], np.ones((prm.alpha, 1), dtype=bool))
        self.number_samples = prm.alpha
        for i in range(1, U.n + 1):
            for q in U.levels[i]:
                self.estimate_and_sample(q)
                self.number_samples += self.S[q].total()
                if self.number_samples >= prm.theta:
                    self.interrupted = True
                    return Fraction(0)
            if not self.instrument:
                for q in U.levels[i - 1]:
                    self.S.pop(q, None)
        return self.N[U.final]


def trace_mc_core(U: UnrolledNfa, params: FprasParams, seed=0, **kwargs) -> Fraction:
    return TraceMcCore(U, params, seed, **kwargs).run()


@dataclass
class CountResult:
    estimate: Fraction
    params: FprasParams | None
    seed: int | None
    runs: list = field(default_factory=list)
    interrupted_runs: int = 0
    unrolled_states: int = 0
    oracle_calls: int = 0
    cores: list = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {
            "estimate": str(self.estimate),
            "exactArithmetic": True,
            "params": None if self.params is None else self.params.to_json(),
            "seed": self.seed,
            "interruptedRuns": self.interrupted_runs,
            "runs": [str(r) for r in self.runs],
            "unrolledStates": self.unrolled_states,
        }


def trace_mc(A: Nfa, n: int, epsilon, delta, seed=0, overrides: Mapping | None = None,
             workers: int = 1, instrument: bool = False, unrolled: UnrolledNfa | None = None) -> CountResult:
    """Estimate the number of traces meeting the length-``n`` slice of L(A).

    The median of ``xi`` independent core runs is returned.  Run ``j`` draws
    from substream ``(j,)`` of the seed, so the answer does not depend on
    ``workers``.
    """
    if n < 0:
        raise ParameterError("length must be non-negative")
    U = unrolled if unrolled is not None else unroll(A, n)
    seq = as_sequence(seed)
    seed_value = seed if isinstance(seed, int) else None
    if U.is_empty:
        _ = default_params(epsilon, delta, 1, n, 1, overrides)  # validate anyway
        return CountResult(Fraction(0), None, seed_value, unrolled_states=0)
    params = default_params(epsilon, delta, A.alphabet.width(), n, U.size, overrides)
    union_filter = UnionFilter(U)

    def one(j):
        core = TraceMcCore(U, params, substream(seq, j), union_filter, instrument=instrument)
        return core.run(), core

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, range(params.xi)))
    else:
        outcomes = [one(j) for j in range(params.xi)]
    runs = [est for est, _ in outcomes]
    interrupted = sum(core.interrupted for _, core in outcomes)
    estimate = sorted(runs)[(len(runs) - 1) // 2]
    return CountResult(estimate, params, seed_value, runs, interrupted, U.size, union_filter.oracle_calls,
                       [core for _, core in outcomes] if instrument else [])
