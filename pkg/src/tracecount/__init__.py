"""Approximate counting and almost-uniform sampling of Mazurkiewicz traces
meeting the length-n slice of a regular language."""

from .alphabet import ConcurrentAlphabet, width
from .automata import Nfa, UnrolledNfa, load_nfa, nf_dfa, nfa_from_json, product, unroll
from .dnf import DnfFormula, dnf_to_dfa, parse_dnf
from .errors import (AlphabetError, AutomatonFormatError, BudgetExceededError, DnfParseError,
                     EmptyLanguageError, NotNormalFormError, ParameterError, RoundUpOverflowError,
                     TraceCountError)
from .exact import CanonicalRuns, canonical_run, count_exact, count_exact_enum, count_exact_nf
from .fpras import CountResult, FprasParams, default_params, trace_mc
from .membership import accepts_trace, member
from .prefix_validator import PrefixValidator, build_prefix_validator
from .sampler import ExactCounter, FprasCounter, SamplerConfig, TraceSampler, trace_sample
from .traces import enumerate_class, equivalent, normal_form, trace_order

__version__ = "0.1.0"
