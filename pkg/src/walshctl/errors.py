"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A configuration value violates a hardware bit-width or range constraint.

    ``problems`` lists every violation found, not just the first.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class InvariantError(RuntimeError):
    """An internal consistency check failed; indicates a bug, never bad input."""
