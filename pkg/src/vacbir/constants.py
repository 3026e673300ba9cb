"""SI physical constants and the QED scales derived from them.

Values are the CODATA 2018 recommended set. ``h``, ``e`` and ``c`` are exact
in the 2019 SI; ``m_e`` and ``eps0`` carry their CODATA uncertainties.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import DomainError

__all__ = [
    "PhysicalConstants",
    "CODATA2018",
    "ROUNDED_TEXTBOOK",
    "fine_structure_constant",
    "schwinger_field",
    "xi_constant",
    "xi_from_alpha",
    "photon_energy",
]


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float  # J s
    h: float  # J s
    e: float  # C
    m_e: float  # kg
    eps0: float  # F/m
    c: float  # m/s

    def __post_init__(self) -> None:
        for name in ("hbar", "h", "e", "m_e", "eps0", "c"):
            if not getattr(self, name) > 0:
                raise DomainError(f"physical constant {name!r} must be positive")
        if not math.isclose(self.h, 2.0 * math.pi * self.hbar, rel_tol=1e-14):
            raise DomainError("h and hbar are inconsistent (h != 2*pi*hbar)")

    @property
    def mu0(self) -> float:
        """Vacuum permeability, 1/(eps0 c^2)."""
        return 1.0 / (self.eps0 * self.c**2)

    def with_values(self, **changes: float) -> PhysicalConstants:
        """Copy with some constants replaced; ``h`` follows ``hbar`` if only one is given."""
        if "hbar" in changes and "h" not in changes:
            changes["h"] = 2.0 * math.pi * changes["hbar"]
        elif "h" in changes and "hbar" not in changes:
            changes["hbar"] = changes["h"] / (2.0 * math.pi)
        return replace(self, **changes)


_H = 6.62607015e-34

CODATA2018 = PhysicalConstants(
    hbar=_H / (2.0 * math.pi),
    h=_H,
    e=1.602176634e-19,
    m_e=9.1093837015e-31,
    eps0=8.8541878128e-12,
    c=299792458.0,
)

# Three-figure values (e = 1.6e-19 C, c = 3e8 m/s, m_e = 9.1e-31 kg) often
# used for hand estimates. Not used by default.
ROUNDED_TEXTBOOK = CODATA2018.with_values(e=1.6e-19, c=3.0e8, m_e=9.1e-31)


def fine_structure_constant(k: PhysicalConstants = CODATA2018) -> float:
    """alpha = e^2 / (4 pi eps0 hbar c)."""
    return k.e**2 / (4.0 * math.pi * k.eps0 * k.hbar * k.c)


def schwinger_field(k: PhysicalConstants = CODATA2018) -> float:
    """Critical field E_S = m_e^2 c^3 / (e hbar) in V/m."""
    return k.m_e**2 * k.c**3 / (k.e * k.hbar)


def xi_constant(k: PhysicalConstants = CODATA2018) -> float:
    """Birefringence coefficient xi = hbar e^4 / (180 pi eps0 m_e^4 c^7) in m^2/V^2."""
    return k.hbar * k.e**4 / (180.0 * math.pi * k.eps0 * k.m_e**4 * k.c**7)


def xi_from_alpha(k: PhysicalConstants = CODATA2018) -> float:
    """Same coefficient written as alpha / (45 E_S^2)."""
    return fine_structure_constant(k) / (45.0 * schwinger_field(k) ** 2)


def photon_energy(lambda_p: float, k: PhysicalConstants = CODATA2018) -> float:
    """Energy h c / lambda of one photon of vacuum wavelength ``lambda_p`` (m)."""
    if not lambda_p > 0:
        raise DomainError(f"wavelength must be positive, got {lambda_p!r}")
    return k.h * k.c / lambda_p
