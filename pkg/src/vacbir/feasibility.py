"""Facility registry and feasibility evaluation: predicted QED phase vs achievable sensitivity."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Union

import jsonschema

from .constants import CODATA2018, PhysicalConstants
from .errors import ConfigError, DomainError
from .qed_phase import Polarization, ProbeBeam, ProbeMode, PumpLaser, qed_phase_shifts
from .sensitivity import (
    Coherent,
    CoherentSqueezedVacuum,
    DetectionScheme,
    LossModel,
    best_sensitivity,
    csv_bound,
    csv_high_power_approx,
    heisenberg_limit,
    lossy_csv,
    lossy_sql,
    mean_photon_number,
    pulsed_sql_scaling,
    repeated_measurements,
    sql_bound,
    sqc_bound,
)

__all__ = [
    "Facility",
    "Bound",
    "Verdict",
    "Scenario",
    "FeasibilityRow",
    "TableCell",
    "TableReport",
    "TABLE_TOLERANCE",
    "FACILITY_SCHEMA",
    "SCENARIO_SCHEMA",
    "built_in_facilities",
    "load_facilities",
    "facility_registry",
    "find_facility",
    "evaluate_scenario",
    "load_scenarios",
    "table1_report",
    "table2_report",
]

TABLE_TOLERANCE = 0.05


@dataclass(frozen=True)
class Facility:
    pump: PumpLaser
    note: str = ""

    @property
    def name(self) -> str:
        return self.pump.name


def built_in_facilities() -> list[Facility]:
    """The four petawatt-class pumps, all focused to w0 = 3 um at 820 nm."""
    return [
        Facility(PumpLaser("ELI-NP", 1e15, 22e-15), "10 PW, Extreme Light Infrastructure - Nuclear Physics"),
        Facility(PumpLaser("ELI-BL", 1e15, 150e-15), "10 PW, Extreme Light Infrastructure - Beamlines"),
        Facility(PumpLaser("Vulcan", 1e14, 500e-15), "1 PW, Rutherford Appleton Laboratory"),
        Facility(PumpLaser("LFEX", 1e14, 1e-11), "1 PW, Institute of Laser Engineering, Osaka"),
    ]


_POSITIVE = {"type": "number", "exclusiveMinimum": 0}

FACILITY_SCHEMA = {
    "type": "object",
    "required": ["facilities"],
    "additionalProperties": False,
    "properties": {
        "facilities": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "E_L", "tau_L"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "E_L": _POSITIVE,
                    "tau_L": _POSITIVE,
                    "lambda_L": _POSITIVE,
                    "w0": _POSITIVE,
                    "note": {"type": "string"},
                },
            },
        }
    },
}


def _read_json(path: str | Path, schema: dict) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read file ({exc.strerror})") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    try:
        jsonschema.validate(data, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{path}: field '{where}': {exc.message}") from exc
    return data


def load_facilities(path: str | Path) -> list[Facility]:
    """Facilities from a JSON file ``{"facilities": [{name, E_L, tau_L, ...}]}``."""
    data = _read_json(path, FACILITY_SCHEMA)
    out = []
    for i, entry in enumerate(data["facilities"]):
        note = entry.pop("note", "user-defined")
        try:
            out.append(Facility(PumpLaser(**entry), note))
        except DomainError as exc:
            raise ConfigError(f"{path}: field 'facilities/{i}': {exc}") from exc
    return out


def facility_registry(path: str | Path | None = None) -> list[Facility]:
    """Built-in facilities followed by any from ``path``; names must stay unique."""
    registry = built_in_facilities()
    if path is not None:
        seen = {f.name.lower() for f in registry}
        for fac in load_facilities(path):
            if fac.name.lower() in seen:
                raise ConfigError(f"{path}: field 'name': duplicate facility {fac.name!r}")
            seen.add(fac.name.lower())
            registry.append(fac)
    return registry


def find_facility(name: str, registry: Iterable[Facility] | None = None) -> Facility:
    registry = list(registry) if registry is not None else built_in_facilities()
    for fac in registry:
        if fac.name.lower() == name.lower():
            return fac
    known = ", ".join(f.name for f in registry)
    raise ConfigError(f"unknown facility {name!r} (known: {known})")


# ------------------------------------------------------------------- scenarios


class Bound(str, Enum):
    SQL = "sql"
    HL = "hl"
    CSV = "csv"  # exact optimum 1/sqrt(|a|^2 e^{2r} + sinh^2 r)
    CSV_APPROX = "csv_approx"  # e^{-r}/|a|
    SQC = "sqc"
    PULSED_SQL = "pulsed_sql"


class Verdict(str, Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"


Method = Union[Bound, DetectionScheme]


def _method(value) -> Method:
    if isinstance(value, (Bound, DetectionScheme)):
        return value
    for enum in (Bound, DetectionScheme):
        try:
            return enum(value)
        except ValueError:
            pass
    raise DomainError(f"unknown method {value!r}")


@dataclass(frozen=True)
class Scenario:
    """One probe configuration against one facility.

    The probe delivers N = P tau_L / (h c / lambda_p) photons over the pump
    duration; they form the coherent amplitude |alpha|^2 = N, with squeezing
    ``r`` added on top where the method uses it.
    """

    facility: Facility
    probe: ProbeBeam
    method: Method
    r: float = 0.0
    losses: LossModel = field(default_factory=LossModel)
    n_exp: int = 1
    reference: Polarization = Polarization.PARALLEL

    def __post_init__(self) -> None:
        object.__setattr__(self, "method", _method(self.method))
        object.__setattr__(self, "reference", Polarization(self.reference))
        if self.r < 0:
            raise DomainError("r must be non-negative")
        if int(self.n_exp) != self.n_exp or self.n_exp < 1:
            raise DomainError("n_exp must be a positive integer")

    @property
    def photons(self) -> float:
        return mean_photon_number(self.probe.power, self.facility.pump.tau_L, self.probe.lambda_p)


@dataclass(frozen=True)
class FeasibilityRow:
    facility: str
    method: str
    r: float
    power: float
    photons: float
    dphi_qed_par: float
    dphi_qed_perp: float
    dphi_achievable: float
    margin: float
    verdict: Verdict
    margin_perp: float
    verdict_perp: Verdict
    reference: Polarization

    def as_dict(self) -> dict:
        out = {}
        for name in self.__dataclass_fields__:
            value = getattr(self, name)
            out[name] = value.value if isinstance(value, Enum) else value
        return out


def _single_shot(s: Scenario, N: float) -> float:
    sigma = s.losses.sigma
    alpha = math.sqrt(N)
    m = s.method

    if m in (Bound.SQL, Bound.PULSED_SQL) or (isinstance(m, DetectionScheme) and s.r == 0):
        if m is Bound.PULSED_SQL:
            if s.probe.mode is not ProbeMode.PULSED:
                raise DomainError("pulsed_sql requires a pulsed probe")
            width = s.probe.spectral_width or 0.0
            base = pulsed_sql_scaling(N, width, s.probe.omega_p)
        elif m is Bound.SQL:
            base = sql_bound(N)
        else:
            base = best_sensitivity(Coherent(alpha), m).value
        return base * lossy_sql(alpha, sigma) / lossy_sql(alpha, 0.0)

    if m in (Bound.HL, Bound.SQC):
        if sigma:
            raise DomainError(f"no loss model for the {m.value} bound")
        return heisenberg_limit(N) if m is Bound.HL else sqc_bound(N)

    if sigma:
        return lossy_csv(alpha, s.r, sigma)
    if m is Bound.CSV:
        return csv_bound(alpha, s.r)
    if m is Bound.CSV_APPROX:
        return csv_high_power_approx(alpha, s.r)
    return best_sensitivity(CoherentSqueezedVacuum(alpha, s.r), m).value


def evaluate_scenario(s: Scenario, k: PhysicalConstants = CODATA2018) -> FeasibilityRow:
    """Achievable sensitivity at the method's optimum, with losses and sqrt(n_exp) averaging."""
    par, perp = qed_phase_shifts(s.facility.pump, s.probe.lambda_p, k)
    N = s.photons
    achievable = repeated_measurements(_single_shot(s, N), int(s.n_exp))
    ref, other = (par, perp) if s.reference is Polarization.PARALLEL else (perp, par)

    def verdict(target: float) -> Verdict:
        return Verdict.FEASIBLE if achievable <= target else Verdict.INFEASIBLE

    return FeasibilityRow(
        facility=s.facility.name,
        method=s.method.value,
        r=s.r,
        power=s.probe.power,
        photons=N,
        dphi_qed_par=par,
        dphi_qed_perp=perp,
        dphi_achievable=achievable,
        margin=achievable / ref,
        verdict=verdict(ref),
        margin_perp=achievable / perp,
        verdict_perp=verdict(perp),
        reference=s.reference,
    )


SCENARIO_SCHEMA = {
    "definitions": {
        "scenario": {
            "type": "object",
            "required": ["facility", "method"],
            "additionalProperties": False,
            "properties": {
                "facility": {"type": "string"},
                "method": {"enum": [m.value for m in Bound] + [m.value for m in DetectionScheme]},
                "r": {"type": "number", "minimum": 0},
                "sigma": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                "n_exp": {"type": "integer", "minimum": 1},
                "reference": {"enum": [p.value for p in Polarization]},
                "probe": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "lambda_p": _POSITIVE,
                        "power": _POSITIVE,
                        "mode": {"enum": [m.value for m in ProbeMode]},
                        "pulse_duration": _POSITIVE,
                        "spectral_width": {"type": "number", "minimum": 0},
                    },
                },
            },
        }
    },
    "oneOf": [
        {"$ref": "#/definitions/scenario"},
        {
            "type": "object",
            "required": ["scenarios"],
            "additionalProperties": False,
            "properties": {
                "scenarios": {"type": "array", "items": {"$ref": "#/definitions/scenario"}},
            },
        },
    ],
}


def load_scenarios(path: str | Path, registry: Iterable[Facility] | None = None) -> list[Scenario]:
    """Scenarios from a JSON file holding one scenario object or ``{"scenarios": [...]}``."""
    data = _read_json(path, SCENARIO_SCHEMA)
    entries = data["scenarios"] if "scenarios" in data else [data]
    registry = list(registry) if registry is not None else built_in_facilities()
    out = []
    for i, e in enumerate(entries):
        try:
            out.append(
                Scenario(
                    facility=find_facility(e["facility"], registry),
                    probe=ProbeBeam(**e.get("probe", {})),
                    method=e["method"],
                    r=e.get("r", 0.0),
                    losses=LossModel(e.get("sigma", 0.0)),
                    n_exp=e.get("n_exp", 1),
                    reference=e.get("reference", "parallel"),
                )
            )
        except (DomainError, ConfigError) as exc:
            raise ConfigError(f"{path}: scenario {i}: {exc}") from exc
    return out


# ---------------------------------------------------------------------- tables


@dataclass(frozen=True)
class TableCell:
    column: str
    row: FeasibilityRow
    published_value: float
    published_bold: bool

    @property
    def value(self) -> float:
        return self.row.dphi_achievable

    @property
    def relative_error(self) -> float:
        return abs(self.value - self.published_value) / self.published_value

    @property
    def within_tolerance(self) -> bool:
        return self.relative_error <= TABLE_TOLERANCE

    @property
    def bold(self) -> bool:
        return self.row.verdict is Verdict.FEASIBLE

    @property
    def bold_matches(self) -> bool:
        return self.bold == self.published_bold


@dataclass(frozen=True)
class TableReport:
    title: str
    cells: tuple[TableCell, ...]

    @property
    def value_failures(self) -> list[TableCell]:
        return [c for c in self.cells if not c.within_tolerance]

    @property
    def bold_failures(self) -> list[TableCell]:
        return [c for c in self.cells if not c.bold_matches]

    @property
    def passed(self) -> bool:
        return not self.value_failures and not self.bold_failures


# Published values and bold flags, row order ELI-NP, ELI-BL, Vulcan, LFEX.
_TABLE1_REFERENCE = {
    "ELI-NP": ((4e-4, False), (1.8e-4, False), (4.1e-8, True), (4.1e-9, True)),
    "ELI-BL": ((1.5e-4, False), (7e-5, False), (1.5e-8, True), (1.5e-9, True)),
    "Vulcan": ((8.6e-5, False), (3.8e-5, False), (8.6e-9, False), (8.6e-10, True)),
    "LFEX": ((1.9e-5, False), (8.6e-6, False), (1.9e-9, True), (1.9e-10, True)),
}
_TABLE1_COLUMNS = (
    ("CW P=100 W", ProbeMode.CW, 100.0),
    ("CW P=500 W", ProbeMode.CW, 500.0),
    ("pulsed P=1e10 W", ProbeMode.PULSED, 1e10),
    ("pulsed P=1e12 W", ProbeMode.PULSED, 1e12),
)

_TABLE2_REFERENCE = {
    "ELI-NP": ((1.6e-6, False), (1.6e-7, True), (8.7e-6, False), (7e-7, True)),
    "ELI-BL": ((2.5e-7, True), (2.5e-8, True), (3.3e-6, False), (2.7e-7, True)),
    "Vulcan": ((7e-8, False), (7e-9, True), (1.8e-6, False), (1.5e-7, False)),
    "LFEX": ((3.7e-9, True), (3.7e-10, True), (4.7e-7, False), (3e-8, False)),
}
_TABLE2_COLUMNS = (
    ("HL P=10 W", Bound.HL, 10.0, 0.0),
    ("HL P=100 W", Bound.HL, 100.0, 0.0),
    ("CSV P=200 W r=3.5", Bound.CSV_APPROX, 200.0, 3.5),
    ("CSV P=200 W r=6", Bound.CSV_APPROX, 200.0, 6.0),
)


def table1_report(reference: Polarization = Polarization.PARALLEL) -> TableReport:
    """Shot-noise sensitivities for CW and pulsed probes at 532 nm."""
    cells = []
    for fac in built_in_facilities():
        for (label, mode, power), (val, bold) in zip(_TABLE1_COLUMNS, _TABLE1_REFERENCE[fac.name]):
            probe = ProbeBeam(power=power, mode=mode, pulse_duration=fac.pump.tau_L if mode is ProbeMode.PULSED else None)
            row = evaluate_scenario(Scenario(fac, probe, Bound.SQL, reference=reference))
            cells.append(TableCell(label, row, val, bold))
    return TableReport("Table I: shot-noise limited sensitivity", tuple(cells))


def table2_report(reference: Polarization = Polarization.PARALLEL) -> TableReport:
    """Heisenberg limit and squeezed-vacuum sensitivities for a CW probe at 532 nm."""
    cells = []
    for fac in built_in_facilities():
        for (label, bound, power, r), (val, bold) in zip(_TABLE2_COLUMNS, _TABLE2_REFERENCE[fac.name]):
            row = evaluate_scenario(Scenario(fac, ProbeBeam(power=power), bound, r=r, reference=reference))
            cells.append(TableCell(label, row, val, bold))
    return TableReport("Table II: non-classical light", tuple(cells))
