"""Exception hierarchy shared by the library and the command line."""


class TwistlineError(Exception):
    """Base class for all library errors."""


class DomainError(TwistlineError, ValueError):
    """An input lies outside the domain where a formula is valid."""


class TransportError(TwistlineError):
    """A lattice could not be transported; carries the element index."""

    def __init__(self, message, element_index=None):
        super().__init__(message)
        self.element_index = element_index

    def __str__(self):
        msg = super().__str__()
        if self.element_index is None:
            return msg
        return f"element {self.element_index}: {msg}"


class VerificationError(TwistlineError):
    """An oracle check did not meet its tolerance."""
