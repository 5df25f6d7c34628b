"""Package exception types."""


class GatepilotError(Exception):
    """Base class for package errors."""


class GeometryError(GatepilotError):
    """Inputs describe an impossible or unusable geometric configuration."""


class DegenerateGeometryError(GeometryError):
    """A solve would be rank-deficient (e.g. all bearing rays parallel)."""


class NumericalError(GatepilotError):
    """A numerical operation lost validity (singular matrix, bad conditioning)."""


class CorpusError(GatepilotError):
    """A corpus file is missing, malformed, or inconsistent."""


class ConfigError(GatepilotError):
    """Run configuration failed validation; message lists every violation."""
