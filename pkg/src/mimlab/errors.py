"""Exception types shared across the package.

Plain ``ValueError`` is used for ordinary bad-argument cases; the classes
here mark failure modes callers may want to catch separately.
"""


class DimensionError(ValueError):
    """Array shapes or sizes are inconsistent with each other."""


class NumericError(ArithmeticError):
    """A computation produced non-finite values."""


class ConfigError(ValueError):
    """Configurations disagree or a config file is invalid."""


class DegenerateBaselineError(ValueError):
    """The baseline curve is flat over the requested window, so the
    relative-area ratio is undefined."""
