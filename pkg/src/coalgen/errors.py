"""Exception hierarchy shared by every stage of the generator."""


class CoalgenError(Exception):
    """Base class for all generator errors."""


class ConfigurationError(CoalgenError):
    """A configuration value or combination of values is invalid."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class IntegrityError(CoalgenError):
    """A record violates an invariant or references something that does not exist."""


class GenerationError(CoalgenError):
    """Random generation could not satisfy its constraints."""


class RuleParseError(CoalgenError):
    """A rule document is malformed."""

    def __init__(self, message: str, location: str):
        self.location = location
        super().__init__(f"{location}: {message}")


class RuleEvaluationError(CoalgenError):
    """A rule could not be evaluated against a context (strict mode)."""


class SerializationError(CoalgenError):
    """A record cannot be rendered as a Controlled English sentence."""
