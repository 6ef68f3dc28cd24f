"""Exception hierarchy shared across the package.

The CLI maps these to exit codes: ConfigError -> 1, DatasetError -> 2,
InvariantError -> 3.
"""


class FairsubError(Exception):
    pass


class ConfigError(FairsubError):
    """Malformed or inconsistent experiment configuration."""


class DatasetError(FairsubError):
    """Unreadable or malformed dataset file, or unknown element id."""


class InvariantError(FairsubError):
    """A guarantee the library promises at runtime failed to hold."""


class InfeasibleThresholdError(FairsubError):
    """The coverage threshold cannot be met by any subset."""
