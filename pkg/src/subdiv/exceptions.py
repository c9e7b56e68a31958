"""Exception hierarchy for the subdivision package."""


class SubdivisionError(Exception):
    """Base class for all errors raised by :mod:`subdiv`."""


class InsufficientDataError(SubdivisionError, ValueError):
    """The sequence is too short for the requested stencil or number of levels."""


class IndeterminatePhiError(SubdivisionError, ZeroDivisionError):
    """The tension parameter cannot be recovered from the given samples."""


class InvalidSpaceError(SubdivisionError, ValueError):
    """The requested exponential-polynomial space is ill-formed (e.g. repeated factors)."""


class RuleDomainError(SubdivisionError, ValueError):
    """A partial refinement rule was evaluated outside its domain.

    Attributes:
        index: position (in the input sequence) of the offending insertion window.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NotApplicableError(SubdivisionError, ValueError):
    """A diagnostic was requested for data outside its hypotheses."""
