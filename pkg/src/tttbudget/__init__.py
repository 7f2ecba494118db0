"""Perceptual and latency budgets for telepresence systems that aim to be
indistinguishable from a face-to-face meeting, plus a turn-taking simulator
and statistics for indistinguishability trials."""

__version__ = "0.1.0"

from .exceptions import CalibrationError, DomainError, InputError

__all__ = ["CalibrationError", "DomainError", "InputError", "__version__"]
