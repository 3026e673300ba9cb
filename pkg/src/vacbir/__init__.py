"""Vacuum birefringence detection with a Mach-Zehnder interferometer.

Predicted QED phase shifts in a petawatt pump focus, phase sensitivities for
classical and squeezed probe light, feasibility tables per facility, and a
truncated Fock-space simulator that checks the sensitivity formulas.
"""

__version__ = "0.1.0"

from .constants import CODATA2018, PhysicalConstants, photon_energy, schwinger_field, xi_constant
from .errors import (
    AboveThresholdError,
    ConfigError,
    DegenerateStateError,
    DomainError,
    FieldValidityError,
    SingularPhaseError,
    TruncationWarning,
    VacbirError,
)
from .feasibility import Facility, Scenario, built_in_facilities, evaluate_scenario, table1_report, table2_report
from .qed_phase import Polarization, ProbeBeam, ProbeMode, PumpLaser, qed_phase_shift, qed_phase_shifts
from .sensitivity import Coherent, CoherentSqueezedVacuum, DetectionScheme, DualSqueezedCoherent

__all__ = [
    "__version__",
    "CODATA2018",
    "PhysicalConstants",
    "photon_energy",
    "schwinger_field",
    "xi_constant",
    "AboveThresholdError",
    "ConfigError",
    "DegenerateStateError",
    "DomainError",
    "FieldValidityError",
    "SingularPhaseError",
    "TruncationWarning",
    "VacbirError",
    "Facility",
    "Scenario",
    "built_in_facilities",
    "evaluate_scenario",
    "table1_report",
    "table2_report",
    "Polarization",
    "ProbeBeam",
    "ProbeMode",
    "PumpLaser",
    "qed_phase_shift",
    "qed_phase_shifts",
    "Coherent",
    "CoherentSqueezedVacuum",
    "DetectionScheme",
    "DualSqueezedCoherent",
]
