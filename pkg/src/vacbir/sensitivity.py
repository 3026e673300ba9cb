"""Closed-form phase sensitivities for a balanced Mach-Zehnder interferometer.

Conventions: port 1 carries the coherent amplitude ``alpha = |alpha| e^{i theta}``,
port 0 is vacuum or squeezed vacuum S(r) with real r >= 0, and ``phi`` is the
total internal phase (experimenter bias plus the QED shift). Output port 4 is
the dark port at ``phi = pi`` for coherent light.

Detection-scheme results follow from Delta phi = Delta O / |d<O>/dphi| with the
observable moments in :func:`difference_moments` and :func:`single_detector_moments`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from .constants import CODATA2018, photon_energy
from .errors import (
    AboveThresholdError,
    DegenerateStateError,
    DomainError,
    SingularPhaseError,
)

__all__ = [
    "Coherent",
    "CoherentSqueezedVacuum",
    "DualSqueezedCoherent",
    "InputStateSpec",
    "DetectionScheme",
    "LossModel",
    "SensitivityEstimate",
    "SqueezerConfig",
    "total_phase",
    "mean_photon_number",
    "sql_bound",
    "required_cw_power",
    "csv_bound",
    "heisenberg_limit",
    "hl_squeezing_requirement",
    "csv_high_power_approx",
    "sqc_bound",
    "sqc_bound_approx",
    "pulsed_sql_scaling",
    "coherent_sensitivity",
    "difference_moments",
    "single_detector_moments",
    "csv_sensitivity",
    "csv_optimal_phase",
    "csv_single_detector_optimum",
    "optimal_phase",
    "best_sensitivity",
    "lossy_sql",
    "lossy_csv",
    "repeated_measurements",
    "squeezing_db_to_r",
    "squeezing_r_to_db",
    "cavity_linewidth",
    "quadrature_variance_spectrum",
    "required_bandwidth",
]

# |sin| below this counts as a zero of the phase factor.
PHASE_EPS = 1e-12
# | |alpha|^2 - sinh^2 r | / max(|alpha|^2, sinh^2 r) below this is degenerate.
DEGENERACY_RTOL = 1e-4


# --------------------------------------------------------------------------- types


@dataclass(frozen=True)
class Coherent:
    alpha_mag: float
    theta_alpha: float = 0.0

    def __post_init__(self) -> None:
        if self.alpha_mag < 0:
            raise DomainError("alpha_mag must be non-negative")

    @property
    def r(self) -> float:
        return 0.0

    @property
    def mean_photons(self) -> float:
        return self.alpha_mag**2


@dataclass(frozen=True)
class CoherentSqueezedVacuum:
    alpha_mag: float
    r: float
    theta_alpha: float = 0.0

    def __post_init__(self) -> None:
        if self.alpha_mag < 0 or self.r < 0:
            raise DomainError("alpha_mag and r must be non-negative")

    @property
    def mean_photons(self) -> float:
        return self.alpha_mag**2 + math.sinh(self.r) ** 2


@dataclass(frozen=True)
class DualSqueezedCoherent:
    """Identical squeezed coherent states D(alpha) S(r)|0> in both ports."""

    alpha_mag: float
    r: float

    def __post_init__(self) -> None:
        if self.alpha_mag < 0 or self.r < 0:
            raise DomainError("alpha_mag and r must be non-negative")

    @property
    def n_tot(self) -> float:
        return 2.0 * (self.alpha_mag**2 + math.sinh(self.r) ** 2)

    @property
    def mean_photons(self) -> float:
        return self.n_tot

    @property
    def beta_tot(self) -> float:
        """Fraction of the photons carried by squeezing, 2 sinh^2 r / N_tot."""
        return 2.0 * math.sinh(self.r) ** 2 / self.n_tot

    @classmethod
    def optimal_for(cls, n_tot: float) -> DualSqueezedCoherent:
        """Symmetric state with beta_tot = 2/3 at the given total photon number."""
        if not n_tot > 0:
            raise DomainError("n_tot must be positive")
        sinh2 = n_tot / 3.0
        return cls(alpha_mag=math.sqrt(n_tot / 2.0 - sinh2), r=math.asinh(math.sqrt(sinh2)))


InputStateSpec = Union[Coherent, CoherentSqueezedVacuum, DualSqueezedCoherent]


class DetectionScheme(str, Enum):
    DIFFERENCE = "difference"  # N_4 - N_5
    SINGLE = "single"  # N_4 alone


@dataclass(frozen=True)
class LossModel:
    sigma: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.sigma < 1.0:
            raise DomainError(f"loss ratio must lie in [0, 1), got {self.sigma}")


@dataclass(frozen=True)
class SensitivityEstimate:
    value: float
    scheme: str
    operating_phase: float | None = None
    assumptions: tuple[str, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class SqueezerConfig:
    """Sub-threshold OPA: pump ratio p = P/P_th, detection efficiency and cavity."""

    p: float
    eta_d: float = 1.0
    cavity_T: float = 0.1
    cavity_loss_L: float = 0.0
    cavity_length_l: float = 1.0

    def __post_init__(self) -> None:
        if self.p < 0:
            raise DomainError("pump ratio must be non-negative")
        if self.p >= 1:
            raise AboveThresholdError(f"pump ratio p={self.p} is at or above threshold")
        if not 0.0 <= self.eta_d <= 1.0:
            raise DomainError("eta_d must lie in [0, 1]")

    @property
    def linewidth(self) -> float:
        return cavity_linewidth(self.cavity_T, self.cavity_loss_L, self.cavity_length_l)


def _positive(name: str, value: float) -> None:
    if not value > 0:
        raise DomainError(f"{name} must be positive, got {value!r}")


def _check_degenerate(alpha_mag: float, r: float) -> float:
    signal = alpha_mag**2 - math.sinh(r) ** 2
    scale = max(alpha_mag**2, math.sinh(r) ** 2)
    if scale == 0 or abs(signal) <= DEGENERACY_RTOL * scale:
        raise DegenerateStateError(
            f"|alpha|^2={alpha_mag**2:.6g} equals sinh^2 r={math.sinh(r)**2:.6g}: "
            "the mean signal does not depend on the phase"
        )
    return abs(signal)


# ------------------------------------------------------------ theoretical bounds


def total_phase(phi_exp: float, dphi_qed: float) -> float:
    """Internal phase seen by the detectors: bias plus QED shift."""
    return phi_exp + dphi_qed


def mean_photon_number(P: float, tau: float, lambda_p: float) -> float:
    """Photons delivered by power ``P`` during ``tau``: P tau / (h c / lambda_p)."""
    _positive("power", P)
    _positive("duration", tau)
    return P * tau / photon_energy(lambda_p)


def sql_bound(N: float) -> float:
    _positive("photon number", N)
    return 1.0 / math.sqrt(N)


def required_cw_power(dphi: float, tau: float, lambda_p: float) -> float:
    """CW power whose shot-noise limit over ``tau`` equals ``dphi``."""
    _positive("phase", dphi)
    _positive("duration", tau)
    return photon_energy(lambda_p) / (tau * dphi**2)


def csv_bound(alpha_mag: float, r: float) -> float:
    """Best coherent-plus-squeezed-vacuum sensitivity 1/sqrt(|alpha|^2 e^{2r} + sinh^2 r)."""
    if alpha_mag < 0 or r < 0:
        raise DomainError("alpha_mag and r must be non-negative")
    radicand = alpha_mag**2 * math.exp(2.0 * r) + math.sinh(r) ** 2
    if radicand == 0:
        raise DomainError("empty input state (alpha = 0 and r = 0)")
    return 1.0 / math.sqrt(radicand)


def heisenberg_limit(N: float) -> float:
    _positive("photon number", N)
    return 1.0 / N


def hl_squeezing_requirement(N: float) -> float:
    """Squeezing r with sinh^2 r = N/2, the split that reaches the Heisenberg limit."""
    _positive("photon number", N)
    return math.asinh(math.sqrt(N / 2.0))


def csv_high_power_approx(alpha_mag: float, r: float) -> float:
    """e^{-r}/|alpha|, valid when |alpha|^2 >> sinh^2 r."""
    _positive("alpha_mag", alpha_mag)
    if r < 0:
        raise DomainError("r must be non-negative")
    return math.exp(-r) / alpha_mag


def sqc_bound(N_tot: float) -> float:
    """Squeezed coherent light in both ports at beta_tot = 2/3 (exact expression)."""
    _positive("N_tot", N_tot)
    info = 8.0 * N_tot**2 * (2.0 + math.sqrt(1.0 + 3.0 / N_tot)) / 9.0 + 4.0 * N_tot
    return 1.0 / math.sqrt(info)


def sqc_bound_approx(N_tot: float) -> float:
    """Large-N form 1/((4/3) N_tot)."""
    _positive("N_tot", N_tot)
    return 3.0 / (4.0 * N_tot)


def pulsed_sql_scaling(N: float, delta_omega: float, omega_l: float) -> float:
    """Shot-noise scaling for a pulsed probe of spectral width ``delta_omega``."""
    _positive("photon number", N)
    _positive("carrier frequency", omega_l)
    if delta_omega < 0:
        raise DomainError("spectral width must be non-negative")
    return 1.0 / (2.0 * math.sqrt(N) * math.sqrt((delta_omega / omega_l) ** 2 + 1.0))


# ------------------------------------------------------------- detection schemes


def coherent_sensitivity(alpha_mag: float, phi: float, scheme: DetectionScheme) -> float:
    """Coherent light in port 1, vacuum in port 0."""
    _positive("alpha_mag", alpha_mag)
    scheme = DetectionScheme(scheme)
    s = abs(math.sin(phi)) if scheme is DetectionScheme.DIFFERENCE else abs(math.sin(phi / 2))
    if s < PHASE_EPS:
        raise SingularPhaseError(f"{scheme.value} detection diverges at phi={phi}")
    return 1.0 / (alpha_mag * s)


def _cross_term_variance(alpha_mag: float, theta_alpha: float, r: float) -> float:
    # Var(a1^+ a0 + a1 a0^+) for coherent (port 1) x squeezed vacuum (port 0).
    a2 = alpha_mag**2
    return (
        math.sinh(r) ** 2
        + a2 * math.exp(-2.0 * r)
        + a2 * math.sinh(2.0 * r) * (1.0 - math.cos(2.0 * theta_alpha))
    )


def difference_moments(
    alpha_mag: float, theta_alpha: float, r: float, phi: float
) -> tuple[float, float, float]:
    """Mean, variance and d(mean)/dphi of N_d = N_4 - N_5."""
    a2 = alpha_mag**2
    sh2 = math.sinh(r) ** 2
    mean = math.cos(phi) * (a2 - sh2)
    var = (
        math.cos(phi) ** 2 * (2.0 * sh2 * math.cosh(r) ** 2 + a2)
        + math.sin(phi) ** 2 * _cross_term_variance(alpha_mag, theta_alpha, r)
    )
    slope = -math.sin(phi) * (a2 - sh2)
    return mean, var, slope


def single_detector_moments(
    alpha_mag: float, theta_alpha: float, r: float, phi: float
) -> tuple[float, float, float]:
    """Mean, variance and d(mean)/dphi of N_4."""
    a2 = alpha_mag**2
    sh2 = math.sinh(r) ** 2
    s2 = math.sin(phi / 2) ** 2
    c2 = math.cos(phi / 2) ** 2
    mean = s2 * sh2 + c2 * a2
    var = (
        s2**2 * 2.0 * sh2 * math.cosh(r) ** 2
        + c2**2 * a2
        + math.sin(phi) ** 2 / 4.0 * _cross_term_variance(alpha_mag, theta_alpha, r)
    )
    slope = -math.sin(phi) / 2.0 * (a2 - sh2)
    return mean, var, slope


def csv_sensitivity(
    alpha_mag: float,
    theta_alpha: float,
    r: float,
    phi: float,
    scheme: DetectionScheme,
) -> float:
    """Coherent light in port 1 with squeezed vacuum in port 0.

    The variance/slope ratio is simplified analytically so the dark-fringe
    limit of pure coherent light (r = 0, phi = pi, single detector) stays finite.
    """
    if alpha_mag < 0 or r < 0:
        raise DomainError("alpha_mag and r must be non-negative")
    scheme = DetectionScheme(scheme)
    signal = _check_degenerate(alpha_mag, r)
    a2 = alpha_mag**2
    sh2 = math.sinh(r) ** 2
    pair = 2.0 * sh2 * math.cosh(r) ** 2  # Var(n_0) = sinh^2(2r)/2
    cross = _cross_term_variance(alpha_mag, theta_alpha, r)

    if scheme is DetectionScheme.DIFFERENCE:
        s, c = math.sin(phi), math.cos(phi)
        if abs(s) < PHASE_EPS:
            raise SingularPhaseError(f"difference detection diverges at phi={phi}")
        ratio = (a2 + pair) * (c / s) ** 2 + cross
    else:
        s, c = math.sin(phi / 2), math.cos(phi / 2)
        if abs(s) < PHASE_EPS and a2 > 0:
            raise SingularPhaseError(f"single detection diverges at phi={phi}")
        if abs(c) < PHASE_EPS and pair > 0:
            raise SingularPhaseError(f"single detection diverges at phi={phi} for r > 0")
        squeeze_term = pair * (s / c) ** 2 if pair > 0 else 0.0
        coherent_term = a2 * (c / s) ** 2 if a2 > 0 else 0.0
        ratio = squeeze_term + coherent_term + cross
    return math.sqrt(ratio) / signal


def csv_optimal_phase(alpha_mag: float, r: float) -> tuple[float, bool]:
    """Single-detector optimum in (0, pi].

    Returns ``(phi_opt, finite)``; for r = 0 there is no interior optimum and
    the coherent dark-fringe point ``pi`` is returned with ``finite=False``.
    """
    _positive("alpha_mag", alpha_mag)
    if r < 0:
        raise DomainError("r must be non-negative")
    if r == 0:
        return math.pi, False
    return 2.0 * math.atan(math.sqrt(math.sqrt(2.0) * alpha_mag / math.sinh(2.0 * r))), True


def csv_single_detector_optimum(alpha_mag: float, r: float) -> float:
    """Single-detector sensitivity at its optimal phase (theta_alpha = 0)."""
    _positive("alpha_mag", alpha_mag)
    if r < 0:
        raise DomainError("r must be non-negative")
    signal = _check_degenerate(alpha_mag, r)
    radicand = (
        math.sinh(r) ** 2
        + math.sqrt(2.0) * alpha_mag * math.sinh(2.0 * r)
        + alpha_mag**2 * math.exp(-2.0 * r)
    )
    return math.sqrt(radicand) / signal


def optimal_phase(state: InputStateSpec, scheme: DetectionScheme) -> float:
    """Operating phase that minimises the detection-scheme sensitivity."""
    scheme = DetectionScheme(scheme)
    if isinstance(state, DualSqueezedCoherent):
        raise DomainError("no detection-scheme formula for squeezed light in both ports")
    if scheme is DetectionScheme.DIFFERENCE:
        return math.pi / 2
    return csv_optimal_phase(state.alpha_mag, state.r)[0]


def best_sensitivity(
    state: InputStateSpec, scheme: DetectionScheme, phi: float | None = None
) -> SensitivityEstimate:
    """Sensitivity of ``state`` under ``scheme`` at ``phi`` (optimal when None)."""
    scheme = DetectionScheme(scheme)
    if isinstance(state, DualSqueezedCoherent):
        raise DomainError("no detection-scheme formula for squeezed light in both ports")
    assumptions = ["squeeze phase 0"]
    if phi is None:
        phi = optimal_phase(state, scheme)
        assumptions.append("optimal operating phase")
    if isinstance(state, Coherent):
        value = coherent_sensitivity(state.alpha_mag, phi, scheme)
    else:
        value = csv_sensitivity(state.alpha_mag, state.theta_alpha, state.r, phi, scheme)
    return SensitivityEstimate(value, scheme.value, phi, tuple(assumptions))


# ------------------------------------------------------------ losses, repetition


def lossy_sql(alpha_mag: float, sigma: float) -> float:
    """Shot-noise limit after losing a fraction ``sigma`` of the photons."""
    _positive("alpha_mag", alpha_mag)
    LossModel(sigma)
    return 1.0 / (math.sqrt(1.0 - sigma) * alpha_mag)


def lossy_csv(alpha_mag: float, r: float, sigma: float) -> float:
    """Approximate coherent-plus-squeezed-vacuum sensitivity with photon loss."""
    _positive("alpha_mag", alpha_mag)
    if r < 0:
        raise DomainError("r must be non-negative")
    LossModel(sigma)
    num = math.sqrt(sigma + (1.0 - sigma) * math.exp(-2.0 * r))
    den = math.sqrt((1.0 - sigma) * alpha_mag**2 + sigma * (1.0 - sigma) * math.sinh(r) ** 2)
    return num / den


def repeated_measurements(dphi_single: float, N_exp: int) -> float:
    if N_exp < 1:
        raise DomainError("at least one measurement is required")
    return dphi_single / math.sqrt(N_exp)


def squeezing_db_to_r(db: float) -> float:
    if db < 0:
        raise DomainError("squeezing in dB must be non-negative")
    return db * math.log(10.0) / 20.0


def squeezing_r_to_db(r: float) -> float:
    if r < 0:
        raise DomainError("r must be non-negative")
    return 20.0 * r / math.log(10.0)


# --------------------------------------------------------------- OPA squeezing


def cavity_linewidth(T: float, L: float, l: float) -> float:
    """Decay rate c (T + L) / l in rad/s."""
    if T < 0 or L < 0 or not T + L > 0:
        raise DomainError("mirror transmission plus round-trip loss must be positive")
    _positive("cavity length", l)
    return CODATA2018.c * (T + L) / l


def quadrature_variance_spectrum(cfg: SqueezerConfig, Omega: float) -> tuple[float, float]:
    """(anti-squeezed, squeezed) quadrature variances at sideband ``Omega``; vacuum = 1."""
    x = Omega / cfg.linewidth
    sp = math.sqrt(cfg.p)
    anti = 1.0 + cfg.eta_d * 4.0 * sp / ((1.0 - sp) ** 2 + x**2)
    squeezed = 1.0 - cfg.eta_d * 4.0 * sp / ((1.0 + sp) ** 2 + x**2)
    return anti, squeezed


def required_bandwidth(tau_L: float) -> float:
    """Detection bandwidth ~ 1/tau_L (Hz) needed to resolve the pump pulse."""
    _positive("pulse duration", tau_L)
    return 1.0 / tau_L
