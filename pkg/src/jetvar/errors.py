"""Exception hierarchy shared by all jetvar modules."""


class JetvarError(Exception):
    pass


class UndeclaredCoordinate(JetvarError):
    pass


class JetOrderError(JetvarError):
    """A jet coordinate would exceed the context's order cap."""


class UnboundCoordinate(JetvarError):
    pass


class SingularDerived(JetvarError):
    """A derived symbol cannot be evaluated (e.g. det g = 0)."""


class ParseError(JetvarError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"{message}{where}")


class ModelError(JetvarError):
    """Semantic problem in a model declaration."""


class PreconditionError(JetvarError):
    """An operation's precondition failed; ``residual`` carries the evidence."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)
