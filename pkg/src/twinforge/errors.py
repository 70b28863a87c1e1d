"""Exception types shared across the package."""


class TwinforgeError(Exception):
    """Base class for all library errors."""


class InvalidElement(TwinforgeError, ValueError):
    pass


class NonUniqueMaximalLowerBound(TwinforgeError):
    """Two elements have several maximal lower bounds."""

    def __init__(self, a, b, bounds):
        self.a, self.b, self.bounds = a, b, tuple(bounds)
        super().__init__(f"{a} and {b} have maximal lower bounds {sorted(self.bounds)}")


class InverseMismatch(TwinforgeError, ValueError):
    pass


class Incomparable(TwinforgeError, ValueError):
    pass


class AtlasCapExceeded(TwinforgeError):
    """Raised when the orbit atlas grows beyond the configured cap."""


class SearchBudgetExceeded(TwinforgeError):
    pass


class Inconsistent(TwinforgeError):
    """Maps indexed by a directed set disagree at some point."""


class BlueprintInconsistent(TwinforgeError):
    pass


class InvalidDSequence(TwinforgeError, ValueError):
    pass


class NotASolution(TwinforgeError, ValueError):
    pass


class FamilyViolatesUniformity(TwinforgeError, ValueError):
    def __init__(self, clause, detail):
        self.clause = clause
        self.detail = detail
        super().__init__(f"family violates uniformity clause ({clause}): {detail}")


class InvalidParameter(TwinforgeError, ValueError):
    pass
