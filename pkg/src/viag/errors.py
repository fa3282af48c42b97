"""Exception hierarchy shared by every module."""


class ViagError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ViagError, ValueError):
    """A parameter lies outside its physical domain.

    The offending parameter name is kept on ``param`` so callers (the CLI in
    particular) can report it without parsing the message.
    """

    def __init__(self, param, message):
        super().__init__(f"{param}: {message}")
        self.param = param


class SingularParametersError(ViagError, ArithmeticError):
    """The susceptibility denominator (or a linear system) is singular."""


class QuadratureError(ViagError, ArithmeticError):
    """Successive-doubling quadrature failed to converge.

    ``previous`` and ``last`` hold the final two estimates.
    """

    def __init__(self, message, previous, last, panels, failed=None):
        super().__init__(message)
        self.previous = previous
        self.last = last
        self.panels = panels
        self.failed = failed  # flat indices of unconverged batch members


class RankDeficientError(ViagError, ArithmeticError):
    """The Liouvillian has more than one stationary state."""

    def __init__(self, null_dim):
        super().__init__(
            f"Liouvillian null space has dimension {null_dim}; steady state is not unique"
        )
        self.null_dim = null_dim


class ConfigError(ViagError, ValueError):
    """Invalid configuration text, with optional line/column context."""

    def __init__(self, message, line=None, column=None, key=None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column
        self.key = key
