"""Vacuum refraction indices in a strong pump field and the induced probe phase.

The pump is a linearly polarised Gaussian beam focused to waist ``w0``; its
peak field ``E_L`` is taken constant over the depth of focus ``b = 2 z_R``
and the probe counter-propagates through that region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .constants import (
    CODATA2018,
    PhysicalConstants,
    fine_structure_constant,
    schwinger_field,
    xi_constant,
)
from .errors import DomainError, FieldValidityError

__all__ = [
    "Polarization",
    "ProbeMode",
    "PumpLaser",
    "ProbeBeam",
    "BeamGeometry",
    "rayleigh_distance",
    "refraction_index_excess",
    "refraction_indices",
    "qed_phase_shift",
    "qed_phase_shift_via_index",
    "qed_phase_shifts",
    "kappa_constant",
    "relativistic_invariants",
    "euler_kockel_lagrangian",
    "nonlinear_lagrangian",
    "constitutive_fields",
]

# Probe polarisation relative to the pump polarisation -> coefficient on 2*xi*E_L^2.
_POLARIZATION_FACTOR = {"parallel": 4.0, "perpendicular": 7.0}


class Polarization(str, Enum):
    PARALLEL = "parallel"
    PERPENDICULAR = "perpendicular"


class ProbeMode(str, Enum):
    CW = "cw"
    PULSED = "pulsed"


@dataclass(frozen=True)
class PumpLaser:
    """Petawatt pump at focus. SI units throughout."""

    name: str
    E_L: float
    tau_L: float
    lambda_L: float = 820e-9
    w0: float = 3e-6

    def __post_init__(self) -> None:
        for field in ("E_L", "tau_L", "lambda_L", "w0"):
            if not getattr(self, field) > 0:
                raise DomainError(f"{self.name}: {field} must be positive")
        if self.E_L >= schwinger_field():
            raise FieldValidityError(
                f"{self.name}: E_L={self.E_L:.3e} V/m is not below the Schwinger field"
            )

    @property
    def B_L(self) -> float:
        return self.E_L / CODATA2018.c

    @property
    def geometry(self) -> BeamGeometry:
        return rayleigh_distance(self.w0, self.lambda_L)


@dataclass(frozen=True)
class ProbeBeam:
    lambda_p: float = 532e-9
    polarization: Polarization = Polarization.PARALLEL
    power: float = 1.0
    mode: ProbeMode = ProbeMode.CW
    pulse_duration: float | None = None
    spectral_width: float | None = None  # rad/s, pulsed only

    def __post_init__(self) -> None:
        object.__setattr__(self, "polarization", Polarization(self.polarization))
        object.__setattr__(self, "mode", ProbeMode(self.mode))
        if not self.lambda_p > 0:
            raise DomainError("probe wavelength must be positive")
        if not self.power > 0:
            raise DomainError("probe power must be positive")
        if self.mode is ProbeMode.PULSED:
            if self.pulse_duration is None or not self.pulse_duration > 0:
                raise DomainError("pulsed probe needs a positive pulse_duration")
            if self.spectral_width is not None and self.spectral_width < 0:
                raise DomainError("spectral_width must be non-negative")

    @property
    def omega_p(self) -> float:
        return 2.0 * math.pi * CODATA2018.c / self.lambda_p


@dataclass(frozen=True)
class BeamGeometry:
    z_R: float
    b: float

    def __post_init__(self) -> None:
        if self.b != 2.0 * self.z_R:
            raise DomainError("depth of focus must equal twice the Rayleigh distance")


def rayleigh_distance(w0: float, lambda_L: float) -> BeamGeometry:
    """Rayleigh distance pi w0^2 / lambda_L and depth of focus 2 z_R."""
    if not (w0 > 0 and lambda_L > 0):
        raise DomainError("waist and wavelength must be positive")
    z_R = math.pi * w0**2 / lambda_L
    return BeamGeometry(z_R=z_R, b=2.0 * z_R)


def refraction_index_excess(
    E_L: float, k: PhysicalConstants = CODATA2018
) -> tuple[float, float]:
    """Return (n_par - 1, n_perp - 1) for a counter-propagating probe.

    The indices are 1 + {2; 7/2} xi (E^2 + 2 c E B + c^2 B^2). For a plane-wave
    pump B_L = E_L / c and the bracket is 4 E_L^2, giving {8; 14} xi E_L^2.
    """
    if E_L < 0:
        raise DomainError("field amplitude must be non-negative")
    if E_L >= schwinger_field(k):
        raise FieldValidityError(
            f"E_L={E_L:.3e} V/m is not below the Schwinger field {schwinger_field(k):.3e}"
        )
    B_L = E_L / k.c
    crossed = E_L**2 + 2.0 * k.c * E_L * B_L + (k.c * B_L) ** 2
    xi = xi_constant(k)
    return 2.0 * xi * crossed, 3.5 * xi * crossed


def refraction_indices(E_L: float, k: PhysicalConstants = CODATA2018) -> tuple[float, float]:
    """Vacuum refraction indices (n_par, n_perp) seen by the probe.

    Note that 1 + 1e-9 keeps only ~7 significant digits of the excess; use
    :func:`refraction_index_excess` when the deviation itself matters.
    """
    d_par, d_perp = refraction_index_excess(E_L, k)
    return 1.0 + d_par, 1.0 + d_perp


def qed_phase_shift(
    pump: PumpLaser, probe: ProbeBeam, k: PhysicalConstants = CODATA2018
) -> float:
    """Closed-form phase 8 pi^2 w0^2 xi / (lambda_p lambda_L) * {4; 7} * E_L^2."""
    if pump.E_L >= schwinger_field(k):
        raise FieldValidityError("pump field is not below the Schwinger field")
    factor = _POLARIZATION_FACTOR[Polarization(probe.polarization).value]
    return (
        8.0 * math.pi**2 * pump.w0**2 * xi_constant(k)
        / (probe.lambda_p * pump.lambda_L)
        * factor * pump.E_L**2
    )


def qed_phase_shift_via_index(
    pump: PumpLaser, probe: ProbeBeam, k: PhysicalConstants = CODATA2018
) -> float:
    """Same phase computed as (omega_p b / c) (n - 1)."""
    geom = rayleigh_distance(pump.w0, pump.lambda_L)
    d_par, d_perp = refraction_index_excess(pump.E_L, k)
    dn = d_par if Polarization(probe.polarization) is Polarization.PARALLEL else d_perp
    omega_p = 2.0 * math.pi * k.c / probe.lambda_p
    return omega_p * geom.b / k.c * dn


def qed_phase_shifts(
    pump: PumpLaser, lambda_p: float = 532e-9, k: PhysicalConstants = CODATA2018
) -> tuple[float, float]:
    """(parallel, perpendicular) phase shifts for one pump and probe wavelength."""
    return tuple(
        qed_phase_shift(pump, ProbeBeam(lambda_p=lambda_p, polarization=pol), k)
        for pol in (Polarization.PARALLEL, Polarization.PERPENDICULAR)
    )


def kappa_constant(k: PhysicalConstants = CODATA2018) -> float:
    """Euler-Kockel coupling 2 alpha^2 hbar^3 / (45 m_e^4 c^5)."""
    alpha = fine_structure_constant(k)
    return 2.0 * alpha**2 * k.hbar**3 / (45.0 * k.m_e**4 * k.c**5)


def _check_kappa_matches_xi() -> None:
    # Both couplings derive from alpha and E_S: 2 xi = 4 pi eps0 kappa.
    lhs = 2.0 * xi_constant()
    rhs = 4.0 * math.pi * CODATA2018.eps0 * kappa_constant()
    if not math.isclose(lhs, rhs, rel_tol=1e-12):
        raise RuntimeError("kappa and xi constants are inconsistent")


_check_kappa_matches_xi()


def relativistic_invariants(E, B, k: PhysicalConstants = CODATA2018) -> tuple[float, float]:
    """Field invariants F = eps0/2 (E^2 - c^2 B^2) and G = sqrt(eps0/mu0) E.B (J/m^3)."""
    E = np.asarray(E, dtype=float)
    B = np.asarray(B, dtype=float)
    if E.shape != (3,) or B.shape != (3,):
        raise DomainError("E and B must be 3-vectors")
    F = 0.5 * k.eps0 * (E @ E - k.c**2 * (B @ B))
    G = math.sqrt(k.eps0 / k.mu0) * float(E @ B)
    return float(F), G


def nonlinear_lagrangian(E, B, k: PhysicalConstants = CODATA2018) -> float:
    """Lowest-order vacuum correction kappa (4 F^2 + 7 G^2)."""
    F, G = relativistic_invariants(E, B, k)
    return kappa_constant(k) * (4.0 * F**2 + 7.0 * G**2)


def euler_kockel_lagrangian(E, B, k: PhysicalConstants = CODATA2018) -> float:
    """Maxwell term plus the lowest-order vacuum nonlinearity, in J/m^3."""
    F, _ = relativistic_invariants(E, B, k)
    return F + nonlinear_lagrangian(E, B, k)


def constitutive_fields(E, B, k: PhysicalConstants = CODATA2018) -> tuple[np.ndarray, np.ndarray]:
    """D = dL/dE and H = -dL/dB for the Euler-Kockel Lagrangian.

    D = eps0 (1 + 8 kappa F) E + 14 eps0 c kappa G B
    H = (1/mu0) (1 + 8 kappa F) B - 14 eps0 c kappa G E
    """
    E = np.asarray(E, dtype=float)
    B = np.asarray(B, dtype=float)
    F, G = relativistic_invariants(E, B, k)
    kappa = kappa_constant(k)
    scale = 1.0 + 8.0 * kappa * F
    D = k.eps0 * scale * E + 14.0 * k.eps0 * k.c * kappa * G * B
    H = scale * B / k.mu0 - 14.0 * k.eps0 * k.c * kappa * G * E
    return D, H
