"""Exception hierarchy shared across the package."""


class GearphyError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(GearphyError, ValueError):
    """A physical parameter is outside its admissible range."""


class UnsupportedCarrierError(GearphyError, KeyError):
    """Carrier frequency has no measured mixer power entry."""


class InvalidConfigurationError(GearphyError, ValueError):
    """Gear / front-end pairing is structurally inconsistent."""


class InfeasibleRateError(GearphyError):
    """Requested spectral efficiency exceeds what the gear can deliver."""


class NumericalError(GearphyError, ArithmeticError):
    """A numerical routine failed to converge; carries diagnostics."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConfigError(GearphyError, ValueError):
    """Configuration file failed to parse or validate."""
