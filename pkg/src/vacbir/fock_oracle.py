"""Brute-force photon statistics of a Mach-Zehnder interferometer in Fock space.

Input states are built on a truncated single-mode basis ``0..n_max`` and
propagated through BS . exp(i phi n_1) . BS, where the 50:50 beam splitter is
exp(i pi/4 (a0^+ a1 + a0 a1^+)). Both operations conserve the total photon
number, so the propagation is done block by block on n_0 + n_1 = n and is exact
for the truncated input: the only approximation is the input truncation,
reported by :func:`truncation_error`.

With this convention output mode 0 is port 4, i.e. up to a phase
a_4 = -sin(phi/2) a_0 + cos(phi/2) a_1 and a_5 = cos(phi/2) a_0 + sin(phi/2) a_1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from .errors import DomainError, SingularPhaseError, TruncationWarning
from .sensitivity import (
    Coherent,
    CoherentSqueezedVacuum,
    DetectionScheme,
    DualSqueezedCoherent,
    InputStateSpec,
    coherent_sensitivity,
    csv_sensitivity,
    difference_moments,
    single_detector_moments,
)

__all__ = [
    "DEFAULT_N_MAX",
    "TRUNCATION_GATE",
    "Observable",
    "TwoModeFockState",
    "OracleReport",
    "MomentCheck",
    "annihilation",
    "coherent_fock",
    "squeezed_vacuum_fock",
    "displaced_squeezed_fock",
    "input_state",
    "truncation_error",
    "mzi_output_state",
    "MZIPropagator",
    "observable_stats",
    "numeric_sensitivity",
    "moment_checks",
    "adequate_n_max",
]

DEFAULT_N_MAX = 40
TRUNCATION_GATE = 1e-10
DEFAULT_STEP = 1e-4
# Offset used to take the limit at a dark fringe where slope and noise both vanish.
DARK_FRINGE_OFFSET = 1e-3


class Observable(str, Enum):
    N_D = "N_d"
    N_4 = "N_4"


# ------------------------------------------------------------------ single mode


def annihilation(dim: int) -> np.ndarray:
    """Truncated lowering operator on ``dim`` Fock states."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)


def _top_weight(probs: np.ndarray) -> float:
    n_max = probs.shape[0] - 1
    cut = math.ceil(0.9 * n_max)
    return float(probs[cut:].sum()) if n_max > 0 else 0.0


def _warn_if_truncated(amps: np.ndarray, what: str) -> None:
    weight = _top_weight(np.abs(amps) ** 2)
    if weight > TRUNCATION_GATE:
        warnings.warn(
            f"{what}: {weight:.2e} of the probability sits in the top 10% of the "
            f"basis (n_max={amps.shape[0] - 1}); increase n_max",
            TruncationWarning,
            stacklevel=3,
        )


def coherent_fock(alpha: complex, n_max: int = DEFAULT_N_MAX) -> np.ndarray:
    """Amplitudes e^{-|alpha|^2/2} alpha^n / sqrt(n!) for n = 0..n_max."""
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    alpha = complex(alpha)
    n = np.arange(n_max + 1)
    if alpha == 0:
        amps = np.zeros(n_max + 1, dtype=complex)
        amps[0] = 1.0
        return amps
    mag, arg = abs(alpha), np.angle(alpha)
    log_mag = -0.5 * mag**2 + n * math.log(mag) - 0.5 * gammaln(n + 1)
    amps = np.exp(log_mag) * np.exp(1j * n * arg)
    _warn_if_truncated(amps, f"coherent state alpha={alpha}")
    return amps


def _pad_dim(n_max: int) -> int:
    # Exponentiate on a larger space so edge effects of the cut stay out of 0..n_max.
    return 3 * (n_max + 1) + 20


def squeezed_vacuum_fock(r: float, n_max: int = DEFAULT_N_MAX) -> np.ndarray:
    """S(r)|0> with S(r) = exp(r/2 (a^2 - a^+2)), by matrix exponentiation."""
    if r < 0:
        raise DomainError("r must be non-negative")
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    dim = _pad_dim(n_max)
    a = annihilation(dim)
    gen = 0.5 * r * (a @ a - a.T @ a.T)
    amps = expm(gen)[: n_max + 1, 0].astype(complex)
    _warn_if_truncated(amps, f"squeezed vacuum r={r}")
    return amps


def displaced_squeezed_fock(alpha: complex, r: float, n_max: int = DEFAULT_N_MAX) -> np.ndarray:
    """D(alpha) S(r)|0>, both operators exponentiated on a padded basis."""
    if r < 0:
        raise DomainError("r must be non-negative")
    dim = _pad_dim(n_max)
    a = annihilation(dim).astype(complex)
    ad = a.conj().T
    vac = np.zeros(dim, dtype=complex)
    vac[0] = 1.0
    sq = expm(0.5 * r * (a @ a - ad @ ad)) @ vac
    alpha = complex(alpha)
    amps = (expm(alpha * ad - alpha.conjugate() * a) @ sq)[: n_max + 1]
    _warn_if_truncated(amps, f"squeezed coherent state alpha={alpha}, r={r}")
    return amps


# -------------------------------------------------------------------- two modes


@dataclass(frozen=True)
class TwoModeFockState:
    """Amplitudes indexed by (n_0, n_1)."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 2:
            raise DomainError("two-mode amplitudes must be a 2-D array")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def product(cls, mode0: np.ndarray, mode1: np.ndarray) -> TwoModeFockState:
        return cls(np.outer(mode0, mode1))

    @property
    def n_max(self) -> int:
        return max(self.amplitudes.shape) - 1

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sqrt(self.probabilities.sum()))

    def normalized(self) -> TwoModeFockState:
        nrm = self.norm()
        if nrm == 0:
            raise DomainError("cannot normalise the zero vector")
        return TwoModeFockState(self.amplitudes / nrm)

    def mode_means(self) -> tuple[float, float]:
        p = self.probabilities / self.probabilities.sum()
        n0 = np.arange(p.shape[0])
        n1 = np.arange(p.shape[1])
        return float(p.sum(axis=1) @ n0), float(p.sum(axis=0) @ n1)


def input_state(spec: InputStateSpec, n_max: int = DEFAULT_N_MAX) -> TwoModeFockState:
    """Port 0 / port 1 product state for an input specification (not renormalised)."""
    if isinstance(spec, Coherent):
        vac = coherent_fock(0.0, n_max)
        return TwoModeFockState.product(vac, coherent_fock(_alpha(spec), n_max))
    if isinstance(spec, CoherentSqueezedVacuum):
        return TwoModeFockState.product(
            squeezed_vacuum_fock(spec.r, n_max), coherent_fock(_alpha(spec), n_max)
        )
    if isinstance(spec, DualSqueezedCoherent):
        mode = displaced_squeezed_fock(spec.alpha_mag, spec.r, n_max)
        return TwoModeFockState.product(mode, mode)
    raise DomainError(f"unsupported input specification {spec!r}")


def _alpha(spec) -> complex:
    return spec.alpha_mag * complex(math.cos(spec.theta_alpha), math.sin(spec.theta_alpha))


def truncation_error(state) -> float:
    """Probability weight in the top 10% of the truncated basis.

    Accepts a single-mode amplitude vector or a :class:`TwoModeFockState`; for
    two modes the weight of states with either occupation in its top 10%.
    """
    if isinstance(state, TwoModeFockState):
        p = state.probabilities
        total = p.sum()
        if total == 0:
            return 0.0
        d0, d1 = p.shape
        cut0 = math.ceil(0.9 * (d0 - 1)) if d0 > 1 else d0
        cut1 = math.ceil(0.9 * (d1 - 1)) if d1 > 1 else d1
        inner = p[:cut0, :cut1].sum()
        return float((total - inner) / total)
    p = np.abs(np.asarray(state)) ** 2
    total = p.sum()
    return _top_weight(p) / total if total else 0.0


# -------------------------------------------------------------------- MZI


@lru_cache(maxsize=None)
def _beam_splitter_block(n: int) -> np.ndarray:
    # Generator a0^+ a1 + a0 a1^+ on |k, n-k>, k = n_0 = 0..n.
    k = np.arange(n)
    off = np.sqrt((k + 1.0) * (n - k))
    gen = np.diag(off, -1) + np.diag(off, 1)
    return expm(0.25j * math.pi * gen)


class MZIPropagator:
    """Reusable propagation of one input state through the MZI at many phases.

    The first beam splitter does not depend on phi and is applied once. The
    input's truncation error and cutoff are kept for reporting.
    """

    def __init__(self, state: TwoModeFockState):
        self.truncation_tail = truncation_error(state)
        self.n_max = state.n_max
        state = state.normalized()
        d0, d1 = state.amplitudes.shape
        self.d_out = d0 + d1 - 1
        self._blocks: list[tuple[int, np.ndarray, np.ndarray]] = []
        amps = state.amplitudes
        for n in range(self.d_out):
            k = np.arange(n + 1)
            valid = (k < d0) & (n - k < d1)
            v = np.zeros(n + 1, dtype=complex)
            v[valid] = amps[k[valid], n - k[valid]]
            if not v.any():
                continue
            self._blocks.append((n, k, _beam_splitter_block(n) @ v))

    def _outputs(self, phi: float):
        for n, k, first in self._blocks:
            phase = np.exp(1j * phi * (n - k))
            yield n, k, _beam_splitter_block(n) @ (phase * first)

    def state(self, phi: float) -> TwoModeFockState:
        out = np.zeros((self.d_out, self.d_out), dtype=complex)
        for n, k, w in self._outputs(phi):
            out[k, n - k] = w
        return TwoModeFockState(out)

    def stats(self, phi: float) -> dict[Observable, tuple[float, float]]:
        """Mean and variance of N_d and N_4 at phase ``phi``."""
        s4 = s44 = sd = sdd = 0.0
        for n, k, w in self._outputs(phi):
            p = w.real**2 + w.imag**2
            nd = 2.0 * k - n
            s4 += p @ k
            s44 += p @ (k * k)
            sd += p @ nd
            sdd += p @ (nd * nd)
        return {
            Observable.N_4: (float(s4), float(s44 - s4**2)),
            Observable.N_D: (float(sd), float(sdd - sd**2)),
        }


def mzi_output_state(state: TwoModeFockState, phi: float) -> TwoModeFockState:
    """Output state for total internal phase ``phi`` (input is renormalised first)."""
    return MZIPropagator(state).state(phi)


def observable_stats(state: TwoModeFockState, observable: Observable) -> tuple[float, float]:
    """Exact mean and variance of N_d = n_4 - n_5 or N_4 = n_4 on an output state."""
    observable = Observable(observable)
    p = state.probabilities
    total = p.sum()
    if total == 0:
        raise DomainError("empty state")
    p = p / total
    n4 = np.arange(p.shape[0])[:, None]
    n5 = np.arange(p.shape[1])[None, :]
    values = n4 - n5 if observable is Observable.N_D else n4 + 0 * n5
    mean = float((p * values).sum())
    second = float((p * values**2).sum())
    return mean, second - mean**2


# ------------------------------------------------------------------ sensitivity


@dataclass(frozen=True)
class OracleReport:
    spec: str
    scheme: str
    phi: float
    phi_evaluated: float
    mean: float
    variance: float
    derivative: float
    numeric_sensitivity: float
    truncation_tail: float
    closed_form_value: float | None
    relative_error: float | None
    n_max: int
    dphi_step: float
    gated: bool

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.__dataclass_fields__}


def _observable_for(scheme: DetectionScheme) -> Observable:
    return Observable.N_D if DetectionScheme(scheme) is DetectionScheme.DIFFERENCE else Observable.N_4


def _closed_form(spec: InputStateSpec, phi: float, scheme: DetectionScheme) -> float | None:
    if isinstance(spec, Coherent):
        return coherent_sensitivity(spec.alpha_mag, phi, scheme)
    if isinstance(spec, CoherentSqueezedVacuum):
        return csv_sensitivity(spec.alpha_mag, spec.theta_alpha, spec.r, phi, scheme)
    return None


def _richardson_slope(prop: MZIPropagator, obs: Observable, phi: float, h: float) -> float:
    def central(step: float) -> float:
        plus = prop.stats(phi + step)[obs][0]
        minus = prop.stats(phi - step)[obs][0]
        return (plus - minus) / (2.0 * step)

    return (4.0 * central(h / 2) - central(h)) / 3.0


def numeric_sensitivity(
    spec: InputStateSpec,
    phi: float,
    scheme: DetectionScheme,
    dphi_step: float = DEFAULT_STEP,
    n_max: int = DEFAULT_N_MAX,
    propagator: MZIPropagator | None = None,
) -> OracleReport:
    """Delta O / |d<O>/dphi| from Fock-space moments and a Richardson-refined slope.

    At a dark fringe, where both the noise and the slope vanish, the ratio is
    evaluated at ``phi - DARK_FRINGE_OFFSET`` (its limit); a vanishing slope
    with finite noise raises :class:`SingularPhaseError`. A prebuilt
    ``propagator`` for ``spec`` may be passed to reuse work; ``n_max`` is then
    taken from it.
    """
    scheme = DetectionScheme(scheme)
    obs = _observable_for(scheme)
    if propagator is None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            propagator = MZIPropagator(input_state(spec, n_max))
    prop = propagator
    tail, n_max = prop.truncation_tail, prop.n_max
    scale = max(spec.mean_photons, 1.0)

    phi_eval = phi
    mean, var = prop.stats(phi)[obs]
    slope = _richardson_slope(prop, obs, phi, dphi_step)
    if abs(slope) < 1e-9 * scale:
        if var < 1e-12 * scale:
            phi_eval = phi - DARK_FRINGE_OFFSET
            mean, var = prop.stats(phi_eval)[obs]
            slope = _richardson_slope(prop, obs, phi_eval, dphi_step)
        else:
            raise SingularPhaseError(f"d<{obs.value}>/dphi vanishes at phi={phi}")
    value = math.sqrt(max(var, 0.0)) / abs(slope)

    closed = _closed_form(spec, phi, scheme)
    rel = abs(value - closed) / closed if closed is not None else None
    return OracleReport(
        spec=repr(spec),
        scheme=scheme.value,
        phi=phi,
        phi_evaluated=phi_eval,
        mean=mean,
        variance=var,
        derivative=slope,
        numeric_sensitivity=value,
        truncation_tail=tail,
        closed_form_value=closed,
        relative_error=rel,
        n_max=n_max,
        dphi_step=dphi_step,
        gated=tail >= TRUNCATION_GATE,
    )


@dataclass(frozen=True)
class MomentCheck:
    observable: str
    phi: float
    numeric_mean: float
    closed_mean: float
    numeric_variance: float
    closed_variance: float

    @staticmethod
    def _err(num: float, ref: float) -> float:
        # Relative error with a 1e-3 floor so zero crossings of the mean are comparable.
        return abs(num - ref) / max(abs(ref), 1e-3)

    @property
    def mean_error(self) -> float:
        return self._err(self.numeric_mean, self.closed_mean)

    @property
    def variance_error(self) -> float:
        return self._err(self.numeric_variance, self.closed_variance)


def moment_checks(
    spec: Coherent | CoherentSqueezedVacuum,
    phis,
    n_max: int = DEFAULT_N_MAX,
    propagator: MZIPropagator | None = None,
) -> list[MomentCheck]:
    """Numeric vs closed-form mean and variance of N_d and N_4 at each phase."""
    if isinstance(spec, DualSqueezedCoherent):
        raise DomainError("closed-form moments exist only for a vacuum or squeezed-vacuum port 0")
    if propagator is None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            propagator = MZIPropagator(input_state(spec, n_max))
    closed_fns = {Observable.N_D: difference_moments, Observable.N_4: single_detector_moments}
    checks = []
    for phi in phis:
        stats = propagator.stats(phi)
        for obs, fn in closed_fns.items():
            mean, var, _ = fn(spec.alpha_mag, spec.theta_alpha, spec.r, phi)
            checks.append(MomentCheck(obs.value, phi, *stats[obs][:1], mean, stats[obs][1], var))
    return checks


def adequate_n_max(
    spec: InputStateSpec,
    gate: float = TRUNCATION_GATE,
    start: int = DEFAULT_N_MAX,
    step: int = 20,
    limit: int = 200,
) -> int:
    """Smallest n_max in ``start, start+step, ...`` whose truncation error is below ``gate``."""
    n_max = start
    while n_max <= limit:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            err = truncation_error(input_state(spec, n_max))
        if err < gate:
            return n_max
        n_max += step
    raise DomainError(f"no n_max <= {limit} brings the truncation error below {gate}")
