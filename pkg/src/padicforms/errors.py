"""Exception hierarchy shared by all modules."""


class PadicError(Exception):
    """Base class for errors raised by padicforms."""


class PrecisionExhausted(PadicError):
    """No digit of the requested quantity can be certified."""


class DivisionByZero(PadicError, ZeroDivisionError):
    pass


class NegativeValuation(PadicError):
    pass


class NotApplicable(PadicError):
    """Hypotheses of a lifting step or bound rule do not hold."""


class RefusedTooLarge(PadicError):
    """An enumeration would exceed the configured candidate budget."""


class OracleExhausted(PadicError):
    """The brute-force oracle found no acceptable vector within budget."""


class ConditionFailed(PadicError):
    pass


class IsZero(PadicError):
    """A form value is indistinguishable from zero (so a zero was found)."""


class InvalidPrime(PadicError):
    pass


class NoRuleAvailable(PadicError):
    pass


class FormatError(PadicError, ValueError):
    """Malformed form, vector, scalar token or certificate input."""
