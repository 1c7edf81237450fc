"""Exception hierarchy shared by every permkit module."""


class PermkitError(Exception):
    """Base class for all errors raised by permkit."""


class MatrixFormatError(PermkitError, ValueError):
    """A matrix or sample file could not be parsed."""


class DimensionError(PermkitError, ValueError):
    """Matrix shape is not what the operation requires."""


class OrderTooLargeError(PermkitError, ValueError):
    """Matrix order exceeds what the selected algorithm supports."""


class InvalidPartitionError(PermkitError, ValueError):
    """A greedy partition does not fit the matrix it is applied to."""


class BandwidthError(PermkitError, ValueError):
    """Matrix has non-zero entries outside the declared band."""


class SampleFormatError(PermkitError, ValueError):
    """A sample-set file could not be parsed."""
