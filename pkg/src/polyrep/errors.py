"""Exception types shared across the package."""


class PolyrepError(Exception):
    pass


class DimensionMismatch(PolyrepError):
    pass


class ContextMismatch(PolyrepError):
    """Objects built over different (p, n) contexts were combined."""


class ContextTooSmall(PolyrepError):
    """Evaluation dimension below the degree, where results stop being faithful."""


class BadWeight(PolyrepError):
    pass


class NotStable(PolyrepError):
    """A subspace claimed to be a submodule is not closed under the action."""


class NotRestricted(PolyrepError):
    pass


class HeadNotRestricted(PolyrepError):
    pass


class OddCharRequired(PolyrepError):
    pass


class DegreeMismatch(PolyrepError):
    pass


class CoverFailure(PolyrepError):
    """Internal assertion: a constructed cover map failed to surject."""


class BudgetExceeded(PolyrepError):
    """A configured size or search cap was hit before the answer was certain."""


class FormatError(PolyrepError):
    """Malformed serialized module text."""


class ParseError(PolyrepError):
    """Expression syntax error, carries the offending position."""

    def __init__(self, message, position):
        super().__init__("%s (at position %d)" % (message, position))
        self.position = position
