"""Command-line front end: JSON run reports and CSV sweep emitters.

Every subcommand prints a single JSON report object on standard output
(CSV files are written for tabular sweeps) and uses the exit-code
contract: 0 ok, 1 input/IO error, 2 mathematical infeasibility or
non-convergence, 64 usage error.  All numbers are rendered with 17
significant digits so emitted values round-trip doubles exactly.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from typing import Any, Sequence

from .core import Distribution, QParam, Spectrum, validate_distribution
from .entropy import (
    SweepTable,
    bg_entropy,
    compose,
    tsallis_entropy,
    two_state_sweep,
    uncertainty,
)
from .errors import (
    BracketError,
    ConvergenceError,
    DomainError,
    InfeasibleError,
    NonConvergenceError,
    QentropyError,
    RangeError,
)
from .maxent import (
    escort_distribution,
    maxent_distribution,
    mean_energy,
    solve_beta,
    stationarity_residual,
)
from .shift import (
    RESIDUAL_BOUND,
    domain_interval,
    feasibility,
    partition_value,
    solve_shift,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_USAGE = 64


# --- rendering -----------------------------------------------------------

def format_number(value: float) -> str:
    """Render a float with 17 significant digits (lossless for doubles)."""
    if isinstance(value, float) and not math.isfinite(value):
        raise ValueError(f"cannot render non-finite value {value!r}")
    return format(float(value), ".17g")


def dumps_report(obj: Any) -> str:
    """Serialize a report to JSON with 17-significant-digit floats."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_number(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {dumps_report(v)}" for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps_report(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_sweep_csv(table: SweepTable, path: str) -> None:
    """Write a sweep table as RFC-4180-style CSV with LF line endings."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(table.headers)
        for row in table.rows:
            writer.writerow([format_number(v) for v in row])


def read_sweep_csv(path: str) -> SweepTable:
    """Parse a CSV emitted by :func:`write_sweep_csv` back into a table."""
    with open(path, "r", newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        headers = tuple(next(reader))
        rows = tuple(tuple(float(cell) for cell in row) for row in reader if row)
    return SweepTable(headers, rows)


# --- report plumbing -----------------------------------------------------

def _report(command: str, inputs: dict, q: float | None, results: dict, status: str) -> dict:
    return {
        "command": command,
        "inputs": inputs,
        "q": q,
        "results": results,
        "status": status,
    }


def _emit(report: dict, checks: Sequence[tuple[str, float, float]] = ()) -> int:
    """Print the report; re-check residual contracts before claiming ok."""
    if report["status"] == "ok":
        for name, value, bound in checks:
            if not abs(value) <= bound:
                report["status"] = "error"
                report["results"]["violated_contract"] = name
                break
    sys.stdout.write(dumps_report(report) + "\n")
    if report["status"] == "ok":
        return EXIT_OK
    return EXIT_INFEASIBLE if report["status"] == "infeasible" else EXIT_ERROR


def _fail(command: str, inputs: dict, q: float | None, exc: Exception, status: str) -> int:
    report = _report(command, inputs, q, {"message": str(exc), "error": type(exc).__name__}, status)
    sys.stdout.write(dumps_report(report) + "\n")
    print(f"qentropy {command}: {exc}", file=sys.stderr)
    return EXIT_INFEASIBLE if status == "infeasible" else EXIT_ERROR


def load_spectrum(path: str) -> Spectrum:
    """Read a spectrum file: JSON object {"values": [...], "label": optional}."""
    with open(path, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    if not isinstance(payload, dict) or "values" not in payload:
        raise ValueError(f"{path}: expected an object with a 'values' array")
    values = payload["values"]
    if not isinstance(values, list) or not values:
        raise ValueError(f"{path}: 'values' must be a non-empty array")
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ValueError(f"{path}: non-finite or non-numeric entry {v!r}")
    label = payload.get("label")
    if label is not None and not isinstance(label, str):
        raise ValueError(f"{path}: 'label' must be a string")
    return Spectrum(values)


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise ValueError(f"bad {what} list {text!r}: {exc}") from None


_INPUT_ERRORS = (OSError, ValueError, json.JSONDecodeError, QentropyError)


# --- subcommand handlers -------------------------------------------------

def _cmd_shift(args: argparse.Namespace) -> int:
    inputs = {"spectrum": args.spectrum, "tol": args.tol,
              "closed_forms": not args.no_closed_form}
    try:
        spectrum = load_spectrum(args.spectrum)
        qp = QParam(args.q)
    except _INPUT_ERRORS as exc:
        return _fail("shift", inputs, args.q, exc, "error")
    inputs["values"] = list(spectrum.values)
    report_feas = feasibility(spectrum, qp)
    feas_dict = {
        "endpoint_value": report_feas.endpoint_value,
        "sufficient_bound": report_feas.sufficient_bound,
        "feasible": report_feas.feasible,
    }
    try:
        solution = solve_shift(spectrum, qp, tol=args.tol,
                               use_closed_forms=not args.no_closed_form)
    except (InfeasibleError, ConvergenceError) as exc:
        report = _report("shift", inputs, qp.q,
                         {"message": str(exc), "error": type(exc).__name__,
                          "feasibility": feas_dict},
                         "infeasible")
        sys.stdout.write(dumps_report(report) + "\n")
        print(f"qentropy shift: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except _INPUT_ERRORS as exc:
        return _fail("shift", inputs, qp.q, exc, "error")
    results = {
        "a0": solution.a0,
        "residual": solution.residual,
        "method": solution.method.value,
        "bracket": list(solution.bracket),
        "iterations": solution.iterations,
        "feasibility": feas_dict,
    }
    report = _report("shift", inputs, qp.q, results, "ok")
    return _emit(report, checks=[("shift residual", solution.residual, RESIDUAL_BOUND)])


def _cmd_entropy(args: argparse.Namespace) -> int:
    inputs = {"probs": args.probs, "spectrum": args.spectrum}
    try:
        qp = QParam(args.q)
        if args.probs is not None:
            dist = validate_distribution(_parse_floats(args.probs, "probability"))
            extra = {}
        else:
            spectrum = load_spectrum(args.spectrum)
            inputs["values"] = list(spectrum.values)
            from .shift import shifted_distribution

            dist, solution = shifted_distribution(spectrum, qp)
            extra = {"p": list(dist.probs), "a0": solution.a0,
                     "residual": solution.residual}
    except (InfeasibleError, ConvergenceError) as exc:
        return _fail("entropy", inputs, args.q, exc, "infeasible")
    except _INPUT_ERRORS as exc:
        return _fail("entropy", inputs, args.q, exc, "error")
    results = {
        "uncertainty": uncertainty(dist, qp),
        "tsallis_same_index": tsallis_entropy(dist, qp.q),
        "bg_entropy": bg_entropy(dist),
        **extra,
    }
    return _emit(_report("entropy", inputs, qp.q, results, "ok"))


def _cmd_sweep(args: argparse.Namespace) -> int:
    inputs = {"q": args.q, "points": args.points, "out": args.out,
              "partition": bool(args.partition)}
    if args.partition and args.spectrum is None:
        print("qentropy sweep: error: --partition requires --spectrum", file=sys.stderr)
        return EXIT_USAGE
    if not args.partition and (args.a_min is not None or args.a_max is not None):
        print("qentropy sweep: error: --a-min/--a-max apply to --partition only",
              file=sys.stderr)
        return EXIT_USAGE
    try:
        q_values = _parse_floats(args.q, "q")
        if not q_values:
            raise ValueError("need at least one q value")
        if args.partition and len(q_values) != 1:
            print("qentropy sweep: error: --partition takes exactly one q value",
                  file=sys.stderr)
            return EXIT_USAGE
        if args.partition:
            table = _partition_table(args, q_values, inputs)
        else:
            table = two_state_sweep([QParam(v) for v in q_values], args.points)
    except (InfeasibleError, ConvergenceError) as exc:
        return _fail("sweep", inputs, None, exc, "infeasible")
    except _INPUT_ERRORS as exc:
        return _fail("sweep", inputs, None, exc, "error")
    try:
        write_sweep_csv(table, args.out)
    except OSError as exc:
        return _fail("sweep", inputs, None, exc, "error")
    results = {"rows": len(table.rows), "columns": list(table.headers), "path": args.out}
    return _emit(_report("sweep", inputs, None, results, "ok"))


def _partition_table(args: argparse.Namespace, q_values: list[float], inputs: dict) -> SweepTable:
    """Tabulate (a, f(a)) on a grid clipped to the valid shift domain."""
    spectrum = load_spectrum(args.spectrum)
    qp = QParam(q_values[0])
    inputs["spectrum"] = args.spectrum
    inputs["values"] = list(spectrum.values)
    lo_dom, hi_dom = domain_interval(spectrum, qp)
    # keep strictly inside an open upper endpoint, where f diverges
    if math.isfinite(hi_dom):
        hi_dom -= 1e-13 * (1.0 + abs(hi_dom))
    a_min, a_max = args.a_min, args.a_max
    if a_min is None or a_max is None:
        try:
            center = solve_shift(spectrum, qp).a0
        except InfeasibleError:
            center = lo_dom  # no crossing; plot from the endpoint rightward
        width = 2.0 * (1.0 + spectrum.x_max - spectrum.x_min)
        if a_min is None:
            a_min = center - width
        if a_max is None:
            a_max = center + width
    a_min = max(a_min, lo_dom)
    a_max = min(a_max, hi_dom)
    if not a_min < a_max:
        raise DomainError("requested shift range lies outside the valid domain")
    if args.points < 2:
        raise ValueError("partition sweep needs at least 2 grid points")
    grid = [a_min + (a_max - a_min) * i / (args.points - 1) for i in range(args.points)]
    rows = tuple((a, partition_value(a, spectrum, qp)) for a in grid)
    return SweepTable(("a", "f"), rows)


def _cmd_maxent(args: argparse.Namespace) -> int:
    inputs = {"spectrum": args.spectrum, "beta": args.beta, "target_u": args.target_u}
    try:
        spectrum = load_spectrum(args.spectrum)
        qp = QParam(args.q)
    except _INPUT_ERRORS as exc:
        return _fail("maxent", inputs, args.q, exc, "error")
    inputs["values"] = list(spectrum.values)
    try:
        if args.beta is not None:
            beta = args.beta
            dist, solution = maxent_distribution(qp, spectrum, beta)
        else:
            beta, dist = solve_beta(qp, spectrum, args.target_u)
            _, solution = maxent_distribution(qp, spectrum, beta)
    except (InfeasibleError, ConvergenceError, BracketError, RangeError) as exc:
        return _fail("maxent", inputs, qp.q, exc, "infeasible")
    except _INPUT_ERRORS as exc:
        return _fail("maxent", inputs, qp.q, exc, "error")
    try:
        stationarity = stationarity_residual(qp, spectrum, beta)
    except DomainError:
        stationarity = None  # a boundary probability of exactly 0
    achieved = mean_energy(dist, spectrum)
    results = {
        "p": list(dist.probs),
        "beta": beta,
        "achieved_u": achieved,
        "a0": solution.a0,
        "residual": solution.residual,
        "stationarity_residual": stationarity,
    }
    checks = [("shift residual", solution.residual, RESIDUAL_BOUND)]
    if args.target_u is not None:
        checks.append(("achieved energy", achieved - args.target_u, 1e-9))
    if stationarity is not None:
        checks.append(("stationarity residual", stationarity, 1e-8))
    return _emit(_report("maxent", inputs, qp.q, results, "ok"), checks=checks)


def _cmd_compose(args: argparse.Namespace) -> int:
    inputs = {"probs_a": args.probs_a, "probs_b": args.probs_b}
    try:
        qp = QParam(args.q)
        dist_a = validate_distribution(_parse_floats(args.probs_a, "probability"))
        dist_b = validate_distribution(_parse_floats(args.probs_b, "probability"))
    except _INPUT_ERRORS as exc:
        return _fail("compose", inputs, args.q, exc, "error")
    result = compose(dist_a, dist_b, qp)
    results = {
        "i_a": result.i_a,
        "i_b": result.i_b,
        "formula_value": result.formula_value,
        "direct_value": result.direct_value,
        "nonextensive_term": result.nonextensive_term,
        "mismatch": result.formula_value - result.direct_value,
    }
    checks = [("composition identity", result.formula_value - result.direct_value, 1e-12)]
    return _emit(_report("compose", inputs, qp.q, results, "ok"), checks=checks)


def _cmd_escort(args: argparse.Namespace) -> int:
    inputs = {"spectrum": args.spectrum, "beta": args.beta,
              "damping": args.damping, "max_iter": args.max_iter, "tol": args.tol}
    try:
        spectrum = load_spectrum(args.spectrum)
        if not (math.isfinite(args.q_tilde) and args.q_tilde > 0.0):
            raise RangeError(f"q_tilde must be a finite real > 0, got {args.q_tilde!r}")
    except _INPUT_ERRORS as exc:
        return _fail("escort", inputs, args.q_tilde, exc, "error")
    inputs["values"] = list(spectrum.values)

    def comparison(p_escort: Distribution) -> dict:
        try:
            reference, _ = maxent_distribution(QParam(args.q_tilde), spectrum, args.beta)
        except (InfeasibleError, ConvergenceError):
            return {"maxent_p": None, "difference": None, "max_abs_difference": None}
        diff = [pe - pm for pe, pm in zip(p_escort.probs, reference.probs)]
        return {
            "maxent_p": list(reference.probs),
            "difference": diff,
            "max_abs_difference": max(abs(d) for d in diff),
        }

    try:
        solution = escort_distribution(
            args.q_tilde, spectrum, args.beta,
            damping=args.damping, tol=args.tol, max_iter=args.max_iter,
        )
    except NonConvergenceError as exc:
        last = exc.solution
        results = {"message": str(exc), "error": type(exc).__name__}
        if last is not None:
            results.update({
                "p": list(last.p.probs),
                "residual": last.residual,
                "iterations": last.iterations,
                "converged": last.converged,
            })
        report = _report("escort", inputs, args.q_tilde, results, "infeasible")
        sys.stdout.write(dumps_report(report) + "\n")
        print(f"qentropy escort: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except _INPUT_ERRORS as exc:
        return _fail("escort", inputs, args.q_tilde, exc, "error")
    results = {
        "p": list(solution.p.probs),
        "residual": solution.residual,
        "iterations": solution.iterations,
        "converged": solution.converged,
        **comparison(solution.p),
    }
    checks = [("escort residual", solution.residual, args.tol)]
    return _emit(_report("escort", inputs, args.q_tilde, results, "ok"), checks=checks)


# --- parser --------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """ArgumentParser with the project's usage exit code (64)."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="qentropy",
        description="q-exponential shift normalization, uncertainty measure, and MaxEnt tools",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p_shift = sub.add_parser("shift", help="solve the normalizing shift for a spectrum")
    p_shift.add_argument("spectrum", help="path to a JSON spectrum file")
    p_shift.add_argument("--q", type=float, required=True, help="deformation index (> 0)")
    p_shift.add_argument("--tol", type=float, default=1e-12, help="solver tolerance")
    p_shift.add_argument("--no-closed-form", action="store_true",
                         help="force the generic bracketed solve")
    p_shift.set_defaults(handler=_cmd_shift)

    p_entropy = sub.add_parser("entropy", help="evaluate the uncertainty measure")
    source = p_entropy.add_mutually_exclusive_group(required=True)
    source.add_argument("--probs", help="comma-separated probability list")
    source.add_argument("--spectrum", help="spectrum file; probabilities come from the shift solve")
    p_entropy.add_argument("--q", type=float, required=True, help="deformation index (> 0)")
    p_entropy.set_defaults(handler=_cmd_entropy)

    p_sweep = sub.add_parser("sweep", help="emit CSV sweeps (two-state curves or partition sums)")
    p_sweep.add_argument("--q", required=True,
                         help="comma-separated q values (one value in partition mode)")
    p_sweep.add_argument("--points", type=int, default=201, help="grid size")
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    p_sweep.add_argument("--partition", action="store_true",
                         help="tabulate the partition sum f(a) instead of entropy curves")
    p_sweep.add_argument("--spectrum", help="spectrum file (partition mode)")
    p_sweep.add_argument("--a-min", type=float, default=None, help="lower shift bound")
    p_sweep.add_argument("--a-max", type=float, default=None, help="upper shift bound")
    p_sweep.set_defaults(handler=_cmd_sweep)

    p_maxent = sub.add_parser("maxent", help="constrained maximizer at a given beta or mean energy")
    p_maxent.add_argument("spectrum", help="path to a JSON spectrum file")
    p_maxent.add_argument("--q", type=float, required=True, help="deformation index (> 0)")
    knob = p_maxent.add_mutually_exclusive_group(required=True)
    knob.add_argument("--beta", type=float, help="energy multiplier")
    knob.add_argument("--target-u", type=float, help="target mean energy to invert for beta")
    p_maxent.set_defaults(handler=_cmd_maxent)

    p_compose = sub.add_parser("compose", help="composition identity for two independent systems")
    p_compose.add_argument("--probs-a", required=True, help="comma-separated probabilities of A")
    p_compose.add_argument("--probs-b", required=True, help="comma-separated probabilities of B")
    p_compose.add_argument("--q", type=float, required=True, help="deformation index (> 0)")
    p_compose.set_defaults(handler=_cmd_compose)

    p_escort = sub.add_parser("escort", help="solve the self-referential escort distribution")
    p_escort.add_argument("spectrum", help="path to a JSON spectrum file")
    p_escort.add_argument("--q-tilde", type=float, required=True, help="escort index (> 0)")
    p_escort.add_argument("--beta", type=float, required=True, help="energy multiplier")
    p_escort.add_argument("--damping", type=float, default=0.5, help="fixed-point damping in (0, 1]")
    p_escort.add_argument("--max-iter", type=int, default=10000, help="iteration cap")
    p_escort.add_argument("--tol", type=float, default=1e-10, help="fixed-point residual tolerance")
    p_escort.set_defaults(handler=_cmd_escort)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
