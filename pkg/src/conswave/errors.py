"""Exception types shared across the package."""


class ConswaveError(Exception):
    """Base class for all package errors."""


class ConfigurationError(ConswaveError):
    """Invalid preset name, window, grid or run configuration."""


class DataError(ConswaveError):
    """Initial data violates its invariants (non-finite samples, bad file)."""


class NumericsError(ConswaveError):
    """Non-finite value produced during a field evaluation."""


class IntegrationError(ConswaveError):
    """Time stepping failed (v lost positivity or a state went non-finite)."""


class StateCorruptionError(ConswaveError):
    """Characteristic positions decreased beyond tolerance."""


class DiagnosticError(ConswaveError):
    """A hard-asserted a-priori bound was violated."""


class BlowupError(ConswaveError):
    """The Eulerian reference solver hit its pre-breaking slope guard."""
