class DomainError(ValueError):
    """Raised when parameters or inputs fall outside an operation's domain."""


class ToleranceError(ArithmeticError):
    """A computed identity missed its tolerance."""

    def __init__(self, name, value, tol):
        self.name = name
        self.value = value
        self.tol = tol
        super().__init__("%s: %.3e exceeds %.1e" % (name, value, tol))
