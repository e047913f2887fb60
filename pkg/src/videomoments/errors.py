"""Exception hierarchy.

Every error deliberately raised by this package derives from VideoMomentsError,
so callers (and the CLI exit-code mapping) can distinguish engine errors from
genuine bugs. Plain OSError from the filesystem is never wrapped.
"""


class VideoMomentsError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(VideoMomentsError):
    """Input data violates an invariant (non-finite values, bad config, ...)."""


class ContractError(VideoMomentsError):
    """A precondition of an operation was violated by the caller."""


class DegenerateEmbeddingError(ValidationError):
    """The fused embedding vector is exactly zero and cannot be normalized."""

    def __init__(self, video_id: str):
        super().__init__(f"degenerate embedding (zero vector) for video {video_id!r}")
        self.video_id = video_id


class FeatureFormatError(VideoMomentsError):
    """Base class for feature/index file parse errors."""


class BadMagicError(FeatureFormatError):
    """Stream does not start with the expected magic bytes."""


class UnsupportedVersionError(FeatureFormatError):
    """Recognized magic but unknown format version."""


class TruncatedPayloadError(FeatureFormatError):
    """Stream ended before the declared payload was complete."""


class ShapeMismatchError(FeatureFormatError):
    """Declared shape is invalid or inconsistent with the payload."""


class TrailingDataError(FeatureFormatError):
    """Extra bytes follow the payload; the format allows no trailer."""


class InvalidIdError(FeatureFormatError):
    """The embedded identifier block is not valid UTF-8."""


class ManifestError(VideoMomentsError):
    """A benchmark manifest violates its schema or references missing files."""
