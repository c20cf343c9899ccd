"""Shared exception types."""


class ValidationError(ValueError):
    """Input violates a documented contract (bad config, malformed data, bad shape)."""


class FormatError(ValidationError):
    """A file does not follow its declared on-disk format."""
