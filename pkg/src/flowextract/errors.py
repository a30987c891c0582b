"""Exception types shared across the pipeline."""


class FlowExtractError(Exception):
    """Base class for all pipeline errors."""


class UnsupportedFormatError(FlowExtractError):
    """Input file is not a PNG image."""


class CorruptImageError(FlowExtractError):
    """Input file could not be decoded as an image."""


class SchemaViolationError(FlowExtractError):
    """A JSON document does not satisfy its documented schema."""


class ConfigError(FlowExtractError):
    """A configuration value is missing, unknown, or out of range."""


class LayoutOverflowError(FlowExtractError):
    """The requested node count does not fit the layout grid."""


class DanglingEdgeError(FlowExtractError):
    """An edge references a node id that does not exist (internal bug)."""
