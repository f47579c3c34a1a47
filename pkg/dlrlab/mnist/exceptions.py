"""
Custom exceptions for MNIST ingestion and batching
"""


class MnistDataError(Exception):
    """Base exception for dataset-related errors"""
    pass


class IdxFormatError(MnistDataError, ValueError):
    """Raised when an IDX stream has the wrong magic number or a short header"""
    pass


class IdxTruncatedError(MnistDataError, ValueError):
    """Raised when the payload is shorter than the header declares"""
    pass


class LabelRangeError(MnistDataError, ValueError):
    """Raised when a label falls outside [0, 9]"""
    pass


class BatchingError(MnistDataError, ValueError):
    """Raised when a batch plan cannot be built"""
    pass


class CountMismatchError(MnistDataError, ValueError):
    """Raised when an image file and its label file hold different sample counts"""
    pass


class MissingDataFileError(MnistDataError):
    """Raised when one of the four MNIST files cannot be found"""

    def __init__(self, path):
        self.path = path
        super().__init__(f"MNIST file not found: {path}")
