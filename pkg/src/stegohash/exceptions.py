"""Exception hierarchy shared across the package."""


class StegohashError(Exception):
    """Base class for all package-specific errors."""


class UnsupportedImageError(StegohashError):
    """Raised when an image file cannot be represented as 8-bit gray/RGB."""


class CapacityError(StegohashError):
    """Raised when a payload does not fit the chosen carrier or QR symbol."""


class PlacementError(StegohashError):
    """Raised when no feasible QR placement exists for the image geometry."""


class ExtractionError(StegohashError):
    """Raised when an embedded message cannot be recovered."""
