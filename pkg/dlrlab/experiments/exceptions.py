"""
Custom exceptions for the experiment harness
"""


class ExperimentError(Exception):
    """Base exception for experiment-related errors"""
    pass


class ConfigurationError(ExperimentError, ValueError):
    """Raised when a trial or scan configuration is invalid"""

    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = errors or {}


class CheckpointGridError(ExperimentError, ValueError):
    """Raised when curves to be combined were evaluated at different times"""
    pass


class EmptySummaryError(ExperimentError, ValueError):
    """Raised when summary statistics are requested over no values"""
    pass
