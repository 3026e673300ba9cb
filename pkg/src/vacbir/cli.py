"""Command-line interface: ``vacbir <command> [options]``.

Exit codes: 0 success, 1 a ``--check`` or oracle comparison failed,
2 usage, configuration or domain error.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import operator
import sys
import warnings
from typing import Any, Sequence

import numpy as np

from . import __version__
from .errors import SingularPhaseError, TruncationWarning, VacbirError
from .feasibility import (
    TABLE_TOLERANCE,
    evaluate_scenario,
    facility_registry,
    find_facility,
    load_scenarios,
    table1_report,
    table2_report,
)
from .fock_oracle import (
    DEFAULT_STEP,
    TRUNCATION_GATE,
    adequate_n_max,
    numeric_sensitivity,
)
from .qed_phase import Polarization, ProbeBeam, qed_phase_shift, qed_phase_shift_via_index
from .sensitivity import (
    Coherent,
    CoherentSqueezedVacuum,
    DetectionScheme,
    SqueezerConfig,
    best_sensitivity,
    lossy_csv,
    lossy_sql,
    optimal_phase,
    quadrature_variance_spectrum,
    repeated_measurements,
)

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2
FORMATS = ("table", "csv", "json")


class UsageError(VacbirError):
    pass


# --------------------------------------------------------------------- parsing

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_phase(text: str) -> float:
    """Evaluate a phase such as ``1.2``, ``pi/2`` or ``2*pi/3``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError

    try:
        return ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse phase {text!r}; use a number or an expression in pi") from None


def parse_params(text: str, names: Sequence[str]) -> dict[str, float]:
    """``alpha=2,r=0.5`` or positional ``2,0.5`` -> {'alpha': 2.0, 'r': 0.5}."""
    out: dict[str, float] = {}
    for i, part in enumerate(p for p in text.split(",") if p.strip()):
        if "=" in part:
            key, val = (s.strip() for s in part.split("=", 1))
        elif i < len(names):
            key, val = names[i], part.strip()
        else:
            raise UsageError(f"too many values in {text!r}")
        if key not in names:
            raise UsageError(f"unknown parameter {key!r} in {text!r} (expected {', '.join(names)})")
        try:
            out[key] = parse_phase(val) if key == "theta" else float(val)
        except ValueError:
            raise UsageError(f"parameter {key!r} is not a number: {val!r}") from None
    return out


def parse_scheme(text: str) -> DetectionScheme:
    aliases = {"diff": "difference", "difference": "difference", "single": "single"}
    try:
        return DetectionScheme(aliases[text.lower()])
    except KeyError:
        raise UsageError(f"unknown scheme {text!r} (use diff or single)") from None


def parse_state(kind: str, params: str):
    if kind == "coherent":
        p = parse_params(params, ("alpha", "theta"))
        if "alpha" not in p:
            raise UsageError("coherent state needs alpha")
        return Coherent(p["alpha"], p.get("theta", 0.0))
    if kind == "csv":
        p = parse_params(params, ("alpha", "r", "theta"))
        if "alpha" not in p or "r" not in p:
            raise UsageError("csv state needs alpha and r")
        return CoherentSqueezedVacuum(p["alpha"], p["r"], p.get("theta", 0.0))
    raise UsageError(f"unknown state kind {kind!r} (use coherent or csv)")


# ---------------------------------------------------------------------- output


def _fmt(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return str(value).lower() if isinstance(value, bool) else "-"
    if isinstance(value, (int, np.integer)):
        return str(value)
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.3e}"
    return str(value)


def render(report: dict, columns: Sequence[tuple[str, str]], fmt: str) -> str:
    """Render ``report['rows']`` as an aligned table, CSV, or the whole report as JSON."""
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True)
    headers = [h for _, h in columns]
    body = [[_fmt(row.get(k)) for k, _ in columns] for row in report["rows"]]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(headers)
        writer.writerows(body)
        return buf.getvalue().rstrip("\n")
    widths = [max(len(h), *(len(r[i]) for r in body)) if body else len(h) for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in body]
    for note in report.get("notes", []):
        lines.append(f"# {note}")
    return "\n".join(lines)


def _emit(args, report: dict, columns) -> None:
    print(render(report, columns, args.format))


# -------------------------------------------------------------------- commands


def cmd_facilities(args) -> int:
    rows = [
        {
            "name": f.name,
            "E_L": f.pump.E_L,
            "tau_L": f.pump.tau_L,
            "lambda_L": f.pump.lambda_L,
            "w0": f.pump.w0,
            "note": f.note,
        }
        for f in facility_registry(args.facilities)
    ]
    _emit(
        args,
        {"command": "facilities", "rows": rows},
        [("name", "name"), ("E_L", "E_L [V/m]"), ("tau_L", "tau_L [s]"),
         ("lambda_L", "lambda_L [m]"), ("w0", "w0 [m]"), ("note", "note")],
    )
    return EXIT_OK


def cmd_phase_shift(args) -> int:
    fac = find_facility(args.facility, facility_registry(args.facilities))
    pols = list(Polarization) if args.polarization == "both" else [Polarization(args.polarization)]
    rows, ok = [], True
    for pol in pols:
        probe = ProbeBeam(lambda_p=args.lambda_p, polarization=pol)
        closed = qed_phase_shift(fac.pump, probe)
        via = qed_phase_shift_via_index(fac.pump, probe)
        rel = abs(closed - via) / closed
        ok &= rel <= 1e-12
        rows.append({"facility": fac.name, "polarization": pol.value, "dphi_closed_form": closed,
                     "dphi_via_index": via, "relative_difference": rel, "agree": rel <= 1e-12})
    _emit(
        args,
        {"command": "phase-shift", "lambda_p": args.lambda_p, "rows": rows},
        [("facility", "facility"), ("polarization", "polarization"),
         ("dphi_closed_form", "dphi_closed_form [rad]"), ("dphi_via_index", "dphi_via_index [rad]"),
         ("relative_difference", "rel_diff"), ("agree", "agree")],
    )
    return EXIT_OK if ok else EXIT_CHECK


def cmd_sensitivity(args) -> int:
    state = Coherent(args.coherent) if args.coherent is not None else parse_state("csv", args.csv)
    scheme = parse_scheme(args.scheme)
    notes = []
    if args.phase == "optimal":
        phi = optimal_phase(state, scheme)
        est = best_sensitivity(state, scheme, phi)
        notes.append("optimal operating phase")
    else:
        phi = parse_phase(args.phase)
        est = best_sensitivity(state, scheme, phi)
    value = est.value
    if args.sigma:
        if args.phase != "optimal":
            raise UsageError("losses are modelled only at the optimal phase (use --phase optimal)")
        if isinstance(state, Coherent):
            value = lossy_sql(state.alpha_mag, args.sigma)
        else:
            value = lossy_csv(state.alpha_mag, state.r, args.sigma)
            notes.append("lossy CSV uses the high-power approximation")
    value = repeated_measurements(value, args.n_exp)
    row = {"state": type(state).__name__, "alpha": state.alpha_mag, "r": state.r,
           "theta_alpha": state.theta_alpha, "scheme": scheme.value, "phi": phi,
           "sigma": args.sigma, "n_exp": args.n_exp, "dphi": value}
    _emit(
        args,
        {"command": "sensitivity", "rows": [row], "notes": notes},
        [("state", "state"), ("alpha", "|alpha|"), ("r", "r"), ("scheme", "scheme"),
         ("phi", "phi [rad]"), ("sigma", "sigma"), ("n_exp", "n_exp"), ("dphi", "dphi [rad]")],
    )
    return EXIT_OK


_TABLE_COLUMNS = [
    ("facility", "facility"), ("column", "column"), ("dphi_achievable", "dphi [rad]"),
    ("published_value", "published [rad]"), ("relative_error", "rel_err"),
    ("dphi_qed_par", "dphi_qed_par [rad]"), ("dphi_qed_perp", "dphi_qed_perp [rad]"),
    ("verdict", "verdict"), ("published_bold", "published_bold"), ("status", "status"),
]
_SCENARIO_COLUMNS = [
    ("facility", "facility"), ("method", "method"), ("r", "r"), ("power", "P [W]"),
    ("photons", "N"), ("dphi_achievable", "dphi [rad]"), ("dphi_qed_par", "dphi_qed_par [rad]"),
    ("dphi_qed_perp", "dphi_qed_perp [rad]"), ("margin", "margin"), ("verdict", "verdict"),
    ("margin_perp", "margin_perp"), ("verdict_perp", "verdict_perp"),
]


def cmd_feasibility(args) -> int:
    if args.table:
        report = (table1_report if args.table == 1 else table2_report)(Polarization(args.reference))
        rows = []
        for c in report.cells:
            row = c.row.as_dict()
            status = "ok" if c.within_tolerance and c.bold_matches else (
                "value" if not c.within_tolerance else "bold")
            row.update(column=c.column, published_value=c.published_value, relative_error=c.relative_error,
                       published_bold=c.published_bold, status=status)
            rows.append(row)
        notes = [f"tolerance {TABLE_TOLERANCE:.0%}; verdict against {args.reference} polarization"]
        if args.check:
            notes.append(f"{len(report.value_failures)} value and {len(report.bold_failures)} bold mismatches")
        _emit(args, {"command": "feasibility", "table": args.table, "rows": rows, "notes": notes},
              _TABLE_COLUMNS)
        return EXIT_CHECK if args.check and not report.passed else EXIT_OK

    scenarios = load_scenarios(args.scenario, facility_registry(args.facilities))
    rows = [evaluate_scenario(s).as_dict() for s in scenarios]
    _emit(args, {"command": "feasibility", "scenario": str(args.scenario), "rows": rows}, _SCENARIO_COLUMNS)
    if args.check and any(r["verdict"] != "feasible" for r in rows):
        return EXIT_CHECK
    return EXIT_OK


def parse_case(text: str):
    """``kind:params@phase:scheme``, e.g. ``coherent:2@pi/2:diff`` or ``csv:2,0.5@optimal:single``."""
    try:
        head, tail = text.split("@", 1)
        kind, params = head.split(":", 1)
        phase, scheme = tail.rsplit(":", 1)
    except ValueError:
        raise UsageError(f"malformed case {text!r}; expected kind:params@phase:scheme") from None
    state = parse_state(kind.strip().lower(), params)
    scheme = parse_scheme(scheme.strip())
    phi = optimal_phase(state, scheme) if phase.strip() == "optimal" else parse_phase(phase)
    return state, phi, scheme


def default_suite():
    cases = []
    for alpha in (0.5, 1.0, 2.0, 3.0):
        for r in (0.0, 0.3, 0.5):
            state = Coherent(alpha) if r == 0 else CoherentSqueezedVacuum(alpha, r)
            for k in range(1, 6):
                for scheme in DetectionScheme:
                    cases.append((state, k * math.pi / 6, scheme))
    return cases


def cmd_oracle(args) -> int:
    cases = [parse_case(c) for c in args.case] if args.case else default_suite()
    rows, failed = [], False
    n_max_cache: dict = {}
    for state, phi, scheme in cases:
        if args.n_max is not None:
            n_max = args.n_max
        else:
            if state not in n_max_cache:
                n_max_cache[state] = adequate_n_max(state)
            n_max = n_max_cache[state]
        row = {"state": repr(state), "phi": phi, "scheme": scheme.value, "n_max": n_max}
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", TruncationWarning)
                rep = numeric_sensitivity(state, phi, scheme, dphi_step=DEFAULT_STEP, n_max=n_max)
        except SingularPhaseError as exc:
            row.update(status="singular", detail=str(exc))
            rows.append(row)
            continue
        row.update(numeric=rep.numeric_sensitivity, closed_form=rep.closed_form_value,
                   relative_error=rep.relative_error, truncation_tail=rep.truncation_tail)
        if rep.gated:
            row["status"] = "skipped (truncation)"
        elif rep.relative_error is not None and rep.relative_error > args.threshold:
            row["status"] = "FAIL"
            failed = True
        else:
            row["status"] = "ok"
        rows.append(row)
    notes = [f"threshold {args.threshold:g}; truncation gate {TRUNCATION_GATE:g}"]
    _emit(
        args,
        {"command": "oracle", "rows": rows, "notes": notes},
        [("state", "state"), ("phi", "phi [rad]"), ("scheme", "scheme"), ("n_max", "n_max"),
         ("numeric", "numeric [rad]"), ("closed_form", "closed_form [rad]"),
         ("relative_error", "rel_err"), ("truncation_tail", "tail"), ("status", "status")],
    )
    return EXIT_CHECK if failed else EXIT_OK


def cmd_spectrum(args) -> int:
    cfg = SqueezerConfig(p=args.p, eta_d=args.eta, cavity_T=args.T, cavity_loss_L=args.L,
                         cavity_length_l=args.l)
    omega_max = args.omega_max if args.omega_max is not None else 5.0 * cfg.linewidth
    rows = []
    for omega in np.linspace(args.omega_min, omega_max, args.points):
        anti, sq = quadrature_variance_spectrum(cfg, float(omega))
        rows.append({"Omega": float(omega), "anti_squeezed": anti, "squeezed": sq, "product": anti * sq})
    _emit(
        args,
        {"command": "spectrum", "linewidth": cfg.linewidth, "rows": rows},
        [("Omega", "Omega [rad/s]"), ("anti_squeezed", "var_anti"), ("squeezed", "var_squeezed"),
         ("product", "product")],
    )
    return EXIT_OK


# ---------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="table", help="output format")
    common.add_argument("--facilities", metavar="FILE", help="JSON file with extra facilities")

    parser = argparse.ArgumentParser(prog="vacbir", description="Vacuum birefringence interferometry calculator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("facilities", parents=[common], help="list pump facilities")
    p.set_defaults(func=cmd_facilities)

    p = sub.add_parser("phase-shift", parents=[common], help="predicted QED phase shift")
    p.add_argument("facility")
    p.add_argument("--lambda-p", type=float, default=532e-9, help="probe wavelength [m]")
    p.add_argument("--polarization", choices=["parallel", "perpendicular", "both"], default="both")
    p.set_defaults(func=cmd_phase_shift)

    p = sub.add_parser("sensitivity", parents=[common], help="detection-scheme phase sensitivity")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--coherent", type=float, metavar="ALPHA", help="coherent amplitude |alpha|")
    g.add_argument("--csv", metavar="alpha=A,r=R[,theta=T]", help="coherent plus squeezed vacuum")
    p.add_argument("--scheme", default="diff", help="diff or single")
    p.add_argument("--phase", default="optimal", help="'optimal' or an expression such as pi/2")
    p.add_argument("--sigma", type=float, default=0.0, help="photon loss fraction")
    p.add_argument("--n-exp", type=int, default=1, help="number of repeated measurements")
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("feasibility", parents=[common], help="feasibility tables and scenarios")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--table", type=int, choices=[1, 2])
    g.add_argument("--scenario", metavar="FILE")
    p.add_argument("--check", action="store_true", help="exit 1 on any mismatch or infeasible row")
    p.add_argument("--reference", choices=["parallel", "perpendicular"], default="parallel",
                   help="polarization used for the table verdicts")
    p.set_defaults(func=cmd_feasibility)

    p = sub.add_parser("oracle", parents=[common], help="Fock-space check of closed forms")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--suite", choices=["default"], default="default")
    g.add_argument("--case", action="append", metavar="kind:params@phase:scheme")
    p.add_argument("--n-max", type=int, default=None, help="Fock cutoff (default: escalate until gated)")
    p.add_argument("--threshold", type=float, default=0.01, help="maximum relative error")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("spectrum", parents=[common], help="OPA quadrature variance spectrum")
    p.add_argument("--p", type=float, required=True, help="pump ratio P/P_th")
    p.add_argument("--eta", type=float, default=1.0, help="detection efficiency")
    p.add_argument("--T", type=float, default=0.1, help="output mirror transmission")
    p.add_argument("--L", type=float, default=0.0, help="round-trip loss")
    p.add_argument("--l", type=float, default=1.0, help="cavity length [m]")
    p.add_argument("--omega-min", type=float, default=0.0)
    p.add_argument("--omega-max", type=float, default=None)
    p.add_argument("--points", type=int, default=11)
    p.set_defaults(func=cmd_spectrum)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VacbirError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
