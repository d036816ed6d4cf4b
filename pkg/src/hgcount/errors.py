"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """An operation was called outside its documented domain."""


class HgFormatError(ValueError):
    """A `.hg` file could not be parsed."""

    def __init__(self, path, line, message):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class BudgetExceeded(RuntimeError):
    """A resource cap (oracle cost or sampling steps) ran out."""
