"""Exception types raised by the numerical core and the CLI."""


class CiniError(Exception):
    """Base class for all package errors."""


class SingularityError(CiniError):
    """The auxiliary angle hit a pole of ``cot(lambda)`` during integration."""

    def __init__(self, t, value):
        self.t = float(t)
        self.value = float(value)
        super().__init__(
            f"|sin(lambda)| = {value:.3e} fell below the singularity threshold at t = {t:.17g}"
        )


class NonFiniteError(CiniError):
    """A NaN or infinity appeared in an integrated quantity."""

    def __init__(self, t, what="state"):
        self.t = float(t)
        super().__init__(f"non-finite {what} at t = {t:.17g}")


class ConfigError(CiniError, ValueError):
    """Invalid run configuration; ``path`` names the offending entry."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
