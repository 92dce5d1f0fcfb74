"""Almost-uniform sampling of traces by prefix extension with rejection.

A sample is grown one letter at a time along normal forms.  The weight of
extending ``u`` by ``a`` is an estimate of ``C(u.a)``, the number of traces
of the slice whose normal form starts with ``u.a``.  ``C(u)`` is counted on
the product of the input automaton with the prefix validator for ``u``.
The probability ``phi`` of the built word is known, and the word is kept
with probability ``1 / (2 * C(λ) * phi)``, which makes accepted samples
exactly uniform whenever the estimates are accurate.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .automata import Nfa, nf_dfa, product, unroll
from .errors import EmptyLanguageError, ParameterError
from .exact import count_exact_nf
from .fpras import trace_mc
from .prefix_validator import build_prefix_validator
from .rng import as_sequence, bernoulli, generator, substream, weighted_choice


class ExactCounter:
    """Counting oracle backed by the brute-force normal-form counter."""

    deterministic = True
    name = "exact"

    def __call__(self, A: Nfa, n: int, epsilon, delta, seq, unrolled=None) -> Fraction:
        return Fraction(count_exact_nf(A, n))


class FprasCounter:
    """Counting oracle backed by the randomized estimator."""

    deterministic = False
    name = "fpras"

    def __init__(self, overrides: Mapping | None = None, workers: int = 1):
        self.overrides = dict(overrides or {})
        self.workers = workers

    def __call__(self, A: Nfa, n: int, epsilon, delta, seq, unrolled=None) -> Fraction:
        return trace_mc(A, n, epsilon, delta, seed=seq, overrides=self.overrides,
                        workers=self.workers, unrolled=unrolled).estimate


@dataclass(frozen=True)
class SamplerConfig:
    delta: Fraction
    epsilon_prime: Fraction
    delta_prime: Fraction
    outer_runs: int

    @classmethod
    def defaults(cls, n: int, delta, epsilon_prime=None, delta_prime=None, outer_runs=None) -> "SamplerConfig":
        delta = Fraction(delta)
        if not 0 < delta < 1:
            raise ParameterError("delta must lie in (0, 1)")
        m = outer_runs if outer_runs is not None else math.ceil(math.log(1 / delta) / math.log(Fraction(4, 3)))
        m = max(1, int(m))
        if epsilon_prime is None:
            epsilon_prime = Fraction(1, 16 * max(n, 1))
        if delta_prime is None:
            delta_prime = delta / (Fraction(2) ** (n - 1) * m)
        return cls(delta, Fraction(epsilon_prime), Fraction(delta_prime), m)

    def to_json(self) -> dict:
        return {"delta": str(self.delta), "epsilonPrime": str(self.epsilon_prime),
                "deltaPrime": str(self.delta_prime), "outerRuns": self.outer_runs}


@dataclass
class CoreOutcome:
    """Result of one prefix-extension attempt; ``word`` is None for ⊥."""

    word: tuple | None
    phi: Fraction
    c_total: Fraction
    reason: str = "accepted"


class TraceSampler:
    """Samples normal forms of traces of the length-``n`` slice of ``A``.

    Prefix-validator automata are cached per prefix; counts are cached too
    when the counter is deterministic.  With ``workers > 1`` the estimates for
    the letters of one step run concurrently; each uses its own substream, so
    results do not depend on scheduling.
    """

    def __init__(self, A: Nfa, n: int, config: SamplerConfig, counter=None, workers: int = 1):
        self.A = A
        self.workers = workers
        self.n = n
        self.config = config
        self.counter = counter if counter is not None else FprasCounter()
        self.alpha = A.alphabet
        self._nf = nf_dfa(self.alpha)
        self._products = {}
        self._counts = {}
        self.counter_calls = 0

    def _product(self, u: tuple):
        if u not in self._products:
            P = product(self.A, build_prefix_validator(self.alpha, u))
            self._products[u] = (P, unroll(P, self.n))
        return self._products[u]

    def estimate_c(self, u: Sequence, seq) -> Fraction:
        """Estimate of the number of traces whose normal form extends ``u``."""
        u = tuple(u)
        if self.counter.deterministic and u in self._counts:
            return self._counts[u]
        P, U = self._product(u)
        if U.is_empty:
            value = Fraction(0)
        else:
            self.counter_calls += 1
            value = Fraction(self.counter(P, self.n, self.config.epsilon_prime, self.config.delta_prime,
                                          seq, unrolled=U))
        if self.counter.deterministic:
            self._counts[u] = value
        return value

    def core(self, seq) -> CoreOutcome:
        seq = as_sequence(seq)
        rank = self.alpha.rank
        c_total = self.estimate_c((), substream(seq, 0, 1))
        if c_total <= 0:
            return CoreOutcome(None, Fraction(0), c_total, "zero-estimate")
        u = ()
        phi = Fraction(1)
        state = self._nf.initial
        for i in range(1, self.n + 1):
            legal = [(a, self._nf.successors(state, a)) for a in self.alpha.letters]
            legal = [(a, nxt[0]) for a, nxt in legal if nxt]

            def est(item, i=i, u=u):
                return self.estimate_c(u + (item[0],), substream(seq, i, 1 + rank(item[0])))

            if self.workers > 1 and len(legal) > 1:
                with ThreadPoolExecutor(max_workers=self.workers) as pool:
                    values = list(pool.map(est, legal))
            else:
                values = [est(item) for item in legal]
            cands = [(a, c, nxt) for (a, nxt), c in zip(legal, values) if c > 0]
            if not cands:
                return CoreOutcome(None, phi, c_total, "no-extension")
            k = weighted_choice(generator(substream(seq, i, 0)), [c for _, c, _ in cands])
            a, c, state = cands[k]
            phi *= c / sum(c2 for _, c2, _ in cands)
            u += (a,)
        if phi < 1 / (2 * c_total):
            return CoreOutcome(None, phi, c_total, "phi-too-small")
        if bernoulli(generator(substream(seq, self.n + 1, 0)), 1 / (2 * c_total * phi)):
            return CoreOutcome(u, phi, c_total)
        return CoreOutcome(None, phi, c_total, "rejected")

    def sample(self, seq) -> tuple | None:
        """First accepted core outcome among ``outer_runs`` attempts, else None."""
        seq = as_sequence(seq)
        if unroll(self.A, self.n).is_empty:
            raise EmptyLanguageError(f"no word of length {self.n} is accepted")
        for j in range(self.config.outer_runs):
            out = self.core(substream(seq, j))
            if out.word is not None:
                return out.word
        return None


def trace_sample_core(A: Nfa, n: int, config: SamplerConfig, seed=0, counter=None) -> CoreOutcome:
    return TraceSampler(A, n, config, counter).core(seed)


def trace_sample(A: Nfa, n: int, delta, seed=0, counter=None, config: SamplerConfig | None = None,
                 workers: int = 1):
    """Normal form of an almost-uniform trace of the slice, or None for ⊥."""
    config = config or SamplerConfig.defaults(n, delta)
    return TraceSampler(A, n, config, counter, workers).sample(seed)
