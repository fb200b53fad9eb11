"""Exception hierarchy shared by all ghostpic modules."""


class GhostpicError(Exception):
    """Base class for all errors raised by this package."""


class CatalogError(GhostpicError):
    """Invalid catalog data (schema violation, dimension mismatch, ...)."""


class NonGenericPathError(GhostpicError):
    """A linear path crosses two non-proportional hyperplanes at one time."""

    def __init__(self, first, second, time):
        self.first = first
        self.second = second
        self.time = time
        super().__init__(
            f"non-generic-path: {first} and {second} both cross at t={time}"
        )


class GuardExceededError(GhostpicError):
    """An enumeration guard was hit; set GHOSTPIC_GUARD to override."""

    def __init__(self, message, count=None):
        self.count = count
        super().__init__(message)


class InternalConsistencyError(GhostpicError):
    """Two routes that must agree by theorem disagreed (a bug, not bad input)."""


class RankError(GhostpicError):
    """Operation requires a specific ambient rank (rendering is rank-3 only)."""
