"""
Custom exceptions for the network core
"""


class NetworkError(Exception):
    """Base exception for network-related errors"""
    pass


class ShapeMismatchError(NetworkError, ValueError):
    """Raised when inputs, targets or weights disagree on shape"""
    pass


class InitializationError(NetworkError, ValueError):
    """Raised when a network cannot be initialized with the given sizes"""
    pass


class EmptyBatchError(NetworkError, ValueError):
    """Raised when a loss or accuracy is requested over zero samples"""
    pass


class CheckpointFormatError(NetworkError):
    """Raised when a weight checkpoint cannot be parsed"""
    pass
