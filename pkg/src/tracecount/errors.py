"""Exception hierarchy shared by the library and the CLI."""


class TraceCountError(Exception):
    """Base class for all library errors."""


class AlphabetError(TraceCountError, ValueError):
    """Malformed concurrent alphabet or unknown symbol."""


class AutomatonFormatError(TraceCountError, ValueError):
    """Malformed automaton description."""


class DnfParseError(TraceCountError, ValueError):
    pass


class ParameterError(TraceCountError, ValueError):
    """Invalid numeric parameter (epsilon, delta, probabilities, overrides)."""


class NotNormalFormError(TraceCountError, ValueError):
    pass


class BudgetExceededError(TraceCountError):
    """An exhaustive enumeration would exceed its configured budget."""


class RoundUpOverflowError(TraceCountError, ArithmeticError):
    """A value lies above the largest acceptable value."""


class EmptyLanguageError(TraceCountError):
    """The requested slice of the language is empty."""
