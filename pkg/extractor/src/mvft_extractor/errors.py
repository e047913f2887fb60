class ExtractorError(Exception):
    """Base class for extraction failures."""


class VideoDecodeError(ExtractorError):
    """The input video cannot be opened or yields no frames."""


class BackboneLoadError(ExtractorError):
    """The requested backbone is unknown or failed to construct."""
