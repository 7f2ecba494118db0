"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a formula."""


class InputError(ValueError):
    """Malformed user input: a config file, a trials file or a record."""


class CalibrationError(RuntimeError):
    """The turn-gap distribution cannot be fitted to the requested targets."""
