"""
Custom exceptions for learning-rate traces and schedule fitting
"""


class TraceError(Exception):
    """Base exception for trace-related errors"""
    pass


class NonIncreasingTimeError(TraceError, ValueError):
    """Raised when a sample is recorded at or before the previous time"""
    pass


class TraceFormatError(TraceError, ValueError):
    """Raised when trace CSV rows cannot be parsed"""
    pass


class ScheduleFitError(TraceError):
    """Raised when a trace cannot be fitted, or the fit did not converge"""

    def __init__(self, message, fits=None):
        super().__init__(message)
        self.fits = fits or []
