"""
Custom exceptions for the weight-update rules
"""


class OptimizerError(Exception):
    """Base exception for optimizer-related errors"""
    pass


class OptimizerShapeError(OptimizerError, ValueError):
    """Raised when weights, gradients and state disagree on shape"""
    pass


class OptimizerConfigError(OptimizerError, ValueError):
    """Raised when an optimizer is configured with invalid parameters"""
    pass


class ScheduleError(OptimizerError, ValueError):
    """Raised when a scheduled learning rate is not positive"""
    pass
