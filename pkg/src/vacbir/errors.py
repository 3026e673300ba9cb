"""Exception and warning types raised across the package."""

from __future__ import annotations


class VacbirError(Exception):
    """Base class for every error raised by vacbir."""


class DomainError(VacbirError, ValueError):
    """An argument lies outside the domain of the requested formula."""


class FieldValidityError(DomainError):
    """Pump field at or above the Schwinger field; the weak-field expansion fails."""


class SingularPhaseError(DomainError):
    """The sensitivity diverges at the requested operating phase."""


class DegenerateStateError(DomainError):
    """Mean signal slope vanishes because |alpha|^2 equals sinh^2 r."""


class AboveThresholdError(DomainError):
    """OPA pump ratio at or above threshold (p >= 1)."""


class ConfigError(VacbirError):
    """A facility or scenario file could not be read or failed validation."""


class TruncationWarning(UserWarning):
    """Fock-space truncation carries non-negligible probability weight."""
