"""Command-line front end.

Every subcommand prints JSON on stdout.  Rationals are written as "p/q"
strings.  Errors go to stderr with one exit code per failure kind:

    0  success
    1  unexpected library error
    2  usage error (bad flags)
    3  input parse error (malformed JSON automaton, DNF text, word)
    4  validation error (alphabet, parameters, normal form)
    5  enumeration budget exceeded
    6  roundUp overflow
    7  empty language (sampling only)
    8  input file cannot be read
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from fractions import Fraction

from .alphabet import ConcurrentAlphabet
from .automata import nfa_from_json
from .dnf import dnf_to_dfa, parse_dnf
from .errors import (AlphabetError, AutomatonFormatError, BudgetExceededError, DnfParseError,
                     EmptyLanguageError, NotNormalFormError, ParameterError, RoundUpOverflowError,
                     TraceCountError)
from .exact import count_exact
from .fpras import trace_mc
from .membership import accepts_trace, member
from .prefix_validator import build_prefix_validator
from .rng import root_sequence, substream
from .sampler import ExactCounter, FprasCounter, SamplerConfig, TraceSampler
from .traces import normal_form

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_VALIDATION = 4
EXIT_BUDGET = 5
EXIT_OVERFLOW = 6
EXIT_EMPTY = 7
EXIT_IO = 8

THREADS_ENV = "TRACECOUNT_THREADS"

# most specific classes first: several errors also derive from ValueError
_EXIT_CODES = [
    (AutomatonFormatError, EXIT_PARSE),
    (DnfParseError, EXIT_PARSE),
    (AlphabetError, EXIT_VALIDATION),
    (ParameterError, EXIT_VALIDATION),
    (NotNormalFormError, EXIT_VALIDATION),
    (BudgetExceededError, EXIT_BUDGET),
    (RoundUpOverflowError, EXIT_OVERFLOW),
    (EmptyLanguageError, EXIT_EMPTY),
    (TraceCountError, EXIT_INTERNAL),
]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def rational(text: str) -> Fraction:
    """Parse "p/q" or an integer; decimals are refused to keep arithmetic exact."""
    try:
        if "." in text or "e" in text.lower():
            raise ValueError
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational 'p/q', got {text!r}") from None


def seed_value(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise _IoError(str(exc)) from exc


class _IoError(Exception):
    pass


def _load_automaton(path: str):
    raw = _read(path)
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise AutomatonFormatError(f"automaton file is not UTF-8: {exc}") from exc
    return nfa_from_json(text), hashlib.sha256(raw).hexdigest()


def _load_alphabet(args) -> tuple:
    """Alphabet from --alphabet FILE (any JSON object with "alphabet" and
    "independence"), or from --letters and --independent."""
    if args.alphabet:
        raw = _read(args.alphabet)
        try:
            data = json.loads(raw)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise AutomatonFormatError(f"invalid JSON: {exc}") from exc
        if not isinstance(data, dict) or "alphabet" not in data:
            raise AutomatonFormatError("alphabet file needs an \"alphabet\" key")
        try:
            alpha = ConcurrentAlphabet(data["alphabet"], data.get("independence", []))
        except TypeError as exc:
            raise AlphabetError(str(exc)) from exc
        return alpha, hashlib.sha256(raw).hexdigest()
    if not args.letters:
        raise _UsageError("give --alphabet FILE or --letters")
    letters = args.letters.split(",") if "," in args.letters else list(args.letters)
    pairs = []
    for item in args.independent or []:
        pair = item.split(",") if "," in item else list(item)
        if len(pair) != 2:
            raise AlphabetError(f"independence pair must have two letters: {item!r}")
        pairs.append(pair)
    alpha = ConcurrentAlphabet(letters, pairs)
    return alpha, hashlib.sha256(json.dumps(alpha.to_json(), sort_keys=True).encode()).hexdigest()


def _parse_word(alpha, text):
    try:
        return alpha.parse_word(text)
    except AlphabetError as exc:
        raise AutomatonFormatError(f"cannot parse word {text!r}: {exc}") from exc


def _overrides(args) -> dict:
    out = {k: getattr(args, k) for k in ("beta", "gamma", "xi") if getattr(args, k) is not None}
    if args.theta is not None:
        out["theta"] = args.theta
    return out


def _report(command, digest, seed, params, result, started, interrupted=0) -> dict:
    return {
        "command": command,
        "inputDigest": digest,
        "seed": seed,
        "params": params,
        "result": result,
        "interruptedRuns": interrupted,
        "wallTime": round(time.perf_counter() - started, 6),
    }


def _emit(obj, out) -> None:
    out.write(json.dumps(obj, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_count(args, out):
    started = time.perf_counter()
    A, digest = _load_automaton(args.automaton)
    res = trace_mc(A, args.n, args.epsilon, args.delta, seed=args.seed, overrides=_overrides(args),
                   workers=args.threads, instrument=args.trace_instrument)
    result = res.to_json()
    if args.trace_instrument:
        alpha = A.alphabet
        dumps = []
        for core in res.cores:
            U = core.U
            dumps.append({
                str(U.labels[q]): [[alpha.format_word(w) for w in sorted(rec.samples.replica(r), key=alpha.word_key)]
                                   for r in range(core.params.alpha)]
                for q, rec in core.records.items()
            })
        result["sampleSets"] = dumps
    params = {"n": args.n, **(result["params"] or {"epsilon": str(args.epsilon), "delta": str(args.delta)})}
    _emit(_report("count", digest, args.seed, params, result, started, res.interrupted_runs), out)


def cmd_count_exact(args, out):
    started = time.perf_counter()
    A, digest = _load_automaton(args.automaton)
    value = count_exact(A, args.n, args.method, args.budget)
    _emit(_report("count-exact", digest, None, {"n": args.n, "method": args.method, "budget": args.budget},
                  {"count": value}, started), out)


def cmd_sample(args, out):
    started = time.perf_counter()
    A, digest = _load_automaton(args.automaton)
    config = SamplerConfig.defaults(args.n, args.delta, args.epsilon_prime, args.delta_prime, args.outer_runs)
    if args.counter == "exact":
        counter = ExactCounter()
    else:
        counter = FprasCounter(_overrides(args))
    sampler = TraceSampler(A, args.n, config, counter, workers=args.threads)
    root = root_sequence(args.seed)
    bottoms = 0
    for i in range(args.count):
        word = sampler.sample(substream(root, i))
        if word is None:
            bottoms += 1
            _emit({"bottom": True}, out)
        else:
            _emit({"sample": A.alphabet.format_word(word)}, out)
    if args.report:
        params = {"n": args.n, "count": args.count, "counter": args.counter, **config.to_json(),
                  "overrides": _overrides(args)}
        report = _report("sample", digest, args.seed, params, {"bottoms": bottoms}, started)
        with open(args.report, "w", encoding="utf-8") as fh:
            _emit(report, fh)


def cmd_member(args, out):
    started = time.perf_counter()
    A, digest = _load_automaton(args.automaton)
    w = _parse_word(A.alphabet, args.word)
    if args.state is None:
        value = accepts_trace(A, w)
    else:
        if args.state not in A.states:
            raise AutomatonFormatError(f"unknown state {args.state!r}")
        value = member(A, args.state, w)
    _emit(_report("member", digest, None, {"word": args.word, "state": args.state}, {"member": value}, started),
          out)


def cmd_nf(args, out):
    started = time.perf_counter()
    alpha, digest = _load_alphabet(args)
    w = _parse_word(alpha, args.word)
    nf = alpha.format_word(normal_form(alpha, w))
    _emit(_report("nf", digest, None, {"word": args.word}, {"normalForm": nf}, started), out)


def _write_dfa(command, dfa, digest, params, args, out, started):
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(dfa.dumps() + "\n")
        result = {"output": args.output, "states": len(dfa.states), "transitions": len(dfa.transitions)}
        _emit(_report(command, digest, None, params, result, started), out)
    else:
        _emit(dfa.to_json(), out)


def cmd_prefix_automaton(args, out):
    started = time.perf_counter()
    alpha, digest = _load_alphabet(args)
    u = _parse_word(alpha, args.word)
    _write_dfa("prefix-automaton", build_prefix_validator(alpha, u), digest, {"u": args.word}, args, out, started)


def cmd_reduce_dnf(args, out):
    started = time.perf_counter()
    if args.formula is not None:
        raw = args.formula.replace(";", "\n").encode("utf-8")
    else:
        raw = _read(args.file)
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DnfParseError(f"DNF text is not UTF-8: {exc}") from exc
    formula = parse_dnf(text, args.num_vars)
    params = {"terms": len(formula.terms), "numVars": formula.num_vars, "sliceLength": formula.slice_length}
    _write_dfa("reduce-dnf", dnf_to_dfa(formula), hashlib.sha256(raw).hexdigest(), params, args, out, started)


# ---------------------------------------------------------------------------


def _add_fpras_overrides(p):
    p.add_argument("--beta", type=int, help="override the per-state sample size")
    p.add_argument("--gamma", type=int, help="override the number of median-of-means batches")
    p.add_argument("--xi", type=int, help="override the number of outer runs")
    p.add_argument("--theta", type=rational, help="override the sample budget")
    p.add_argument("--threads", type=int, default=_default_threads(),
                   help=f"worker threads (default from ${THREADS_ENV}, else 1)")


def _add_alphabet(p):
    p.add_argument("--alphabet", help="JSON file with \"alphabet\" and \"independence\" keys")
    p.add_argument("--letters", help="letters in order, e.g. 'abc' or 'x,y,z'")
    p.add_argument("--independent", action="append", metavar="PAIR",
                   help="independent pair, e.g. 'ab' or 'x,y'; repeatable")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tracecount", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("count", help="approximate trace count of the length-n slice")
    p.add_argument("automaton")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--epsilon", type=rational, required=True)
    p.add_argument("--delta", type=rational, required=True)
    p.add_argument("--seed", type=seed_value, default=0)
    p.add_argument("--trace-instrument", action="store_true", help="dump the sample sets of every run")
    _add_fpras_overrides(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("count-exact", help="exact trace count by brute force")
    p.add_argument("automaton")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--method", choices=["nf-enum", "word-enum"], default="nf-enum")
    p.add_argument("--budget", type=int, default=10 ** 7)
    p.set_defaults(func=cmd_count_exact)

    p = sub.add_parser("sample", help="almost-uniform trace samples, one JSON line each")
    p.add_argument("automaton")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--delta", type=rational, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=seed_value, default=0)
    p.add_argument("--counter", choices=["fpras", "exact"], default="fpras")
    p.add_argument("--epsilon-prime", type=rational)
    p.add_argument("--delta-prime", type=rational)
    p.add_argument("--outer-runs", type=int)
    p.add_argument("--report", help="also write a run report to this file")
    _add_fpras_overrides(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("member", help="does some word equivalent to WORD reach a final (or given) state")
    p.add_argument("automaton")
    p.add_argument("word")
    p.add_argument("--state")
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("nf", help="lexicographic normal form of a word")
    p.add_argument("word")
    _add_alphabet(p)
    p.set_defaults(func=cmd_nf)

    p = sub.add_parser("prefix-automaton", help="DFA of the words whose normal form starts with WORD")
    p.add_argument("word")
    _add_alphabet(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_prefix_automaton)

    p = sub.add_parser("reduce-dnf", help="DFA whose trace count equals the model count of a DNF")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("file", nargs="?", help="DNF file, one term per line ('-' for stdin)")
    src.add_argument("--formula", help="terms separated by ';', e.g. 'x1 !x2; x3'")
    p.add_argument("--num-vars", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_reduce_dnf)
    return parser


def _validate(args):
    if getattr(args, "n", 0) < 0:
        raise ParameterError("-n must be non-negative")
    if getattr(args, "count", 0) < 0:
        raise ParameterError("--count must be non-negative")
    if getattr(args, "threads", 1) < 1:
        raise ParameterError("--threads must be positive")


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        _validate(args)
        args.func(args, out)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _IoError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except TraceCountError as exc:
        code = next(c for cls, c in _EXIT_CODES if isinstance(exc, cls))
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
