"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class ParseError(ValueError):
    """A space, fuzzy set or map file could not be loaded."""


class NoWitness(LookupError):
    """A witness constructor found nothing to return."""


class NoPreimage(LookupError):
    """The map is not onto, so some target has no exact preimage.

    ``missing`` holds the labels outside the image and ``level`` the
    offending level of the target (or the singleton of a missing point).
    """

    def __init__(self, message, missing=(), level=()):
        super().__init__(message)
        self.missing = tuple(missing)
        self.level = tuple(level)


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed the configured size budget."""

    def __init__(self, what, count, budget):
        super().__init__(f"{what}: {count} items exceeds budget {budget}")
        self.what = what
        self.count = count
        self.budget = budget
