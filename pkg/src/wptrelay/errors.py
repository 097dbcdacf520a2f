"""Exception hierarchy shared by all modules."""


class WptRelayError(Exception):
    """Base class for every error raised by this package."""


class DomainError(WptRelayError, ValueError):
    """An argument lies outside the domain of a physical formula."""


class SupportError(DomainError):
    """A valuation lies outside the support (p_si, inf) of its distribution."""


class RangeError(DomainError):
    """A target lies outside the range of the virtual valuation."""


class BracketError(WptRelayError, ValueError):
    """The bisection target is not bracketed by f(lo) and f(hi)."""


class NoConvergence(WptRelayError, ArithmeticError):
    """An iterative solver ran out of iterations."""


class MechanismError(WptRelayError, ValueError):
    """Malformed auction input (e.g. a bid at or below its support edge)."""


class EmptyError(MechanismError):
    """An operation that needs at least one candidate received none."""


class ParseError(WptRelayError, ValueError):
    """A configuration file could not be parsed."""

    def __init__(self, message, *, line=None, key=None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class ValidationError(WptRelayError, ValueError):
    """A configuration value violates a documented invariant."""


class SimulationAbort(WptRelayError, RuntimeError):
    """Too many Monte Carlo trials failed for the aggregate to be trusted."""
