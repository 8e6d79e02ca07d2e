"""Command-line entry point.

Examples::

    fourphoton run --scheme ghz
    fourphoton run --scheme superposition --bell-default
    fourphoton run --circuit scheme2.circ --phases "0,90;-45,45;-45,45;-45,45" --units deg

Exit codes: 0 ok, 2 parse error, 3 empty post-selection, 4 invariant failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import re
import sys
from collections.abc import Sequence
from pathlib import Path

from fourphoton import oracle
from fourphoton._version import __version__
from fourphoton.bell import PhaseSettings
from fourphoton.circuitfile import ParsedCircuit, bundled_circuit, parse_circuit_file
from fourphoton.errors import CircuitParseError, EmptyPostselectionError, ModeError
from fourphoton.optics import UNITARITY_TOL
from fourphoton.postselect import (
    SchemeResult,
    run_pipeline,
    scheme_ghz,
    scheme_superposition,
)
from fourphoton.report import Report, build_report

log = logging.getLogger("fourphoton")

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_EMPTY = 3
EXIT_INVARIANT = 4

SCHEMES = {
    "ghz": (scheme_ghz, "scheme1.circ"),
    "superposition": (scheme_superposition, "scheme2.circ"),
}

VERIFY_TOL = 1e-12

_ANGLE = re.compile(
    r"""^\s*(?P<sign>[+-])?\s*
        (?P<num>(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?)?\s*
        (?P<pi>\*?\s*pi)?\s*
        (?:/\s*(?P<den>\d+(\.\d*)?))?\s*
        (?P<unit>deg|rad)?\s*$""",
    re.VERBOSE,
)


class InvariantError(RuntimeError):
    pass


def parse_angle(text: str, units: str = "rad") -> float:
    """``"90"``, ``"-45deg"``, ``"pi/2"``, ``"3pi/4"``, ``"1.5708rad"`` -> radians.

    A per-value suffix overrides ``units``.
    """
    m = _ANGLE.match(text)
    if not m or not (m["num"] or m["pi"]):
        raise ValueError(f"cannot parse angle {text!r}")
    value = float(m["num"]) if m["num"] else 1.0
    if m["pi"]:
        value *= math.pi
    if m["den"]:
        value /= float(m["den"])
    if m["sign"] == "-":
        value = -value
    unit = m["unit"] or units
    return math.radians(value) if unit == "deg" else value


def parse_phases(text: str, units: str = "rad") -> PhaseSettings:
    """``"a,b;c,d;..."`` with one ``first,second`` pair per party."""
    pairs = []
    for i, chunk in enumerate(text.split(";"), start=1):
        parts = chunk.split(",")
        if len(parts) != 2:
            raise ValueError(f"party {i}: expected two comma-separated phases, got {chunk!r}")
        pairs.append((parse_angle(parts[0], units), parse_angle(parts[1], units)))
    return PhaseSettings(tuple(pairs))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fourphoton",
        description="Four-photon entanglement from second-order PDC: simulation and Bell analysis.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a generation scheme and optionally a Bell analysis")
    which = run.add_mutually_exclusive_group(required=True)
    which.add_argument("--scheme", choices=sorted(SCHEMES))
    which.add_argument("--circuit", type=Path, help="circuit file")
    bell = run.add_mutually_exclusive_group()
    bell.add_argument("--bell-default", action="store_true", help="analyzer phases 0,pi/2 ; -pi/4,pi/4 (x3)")
    bell.add_argument("--phases", help='per-party phase pairs, e.g. "0,90;-45,45;-45,45;-45,45"')
    run.add_argument("--units", choices=("rad", "deg"), default="rad")
    run.add_argument("--verify", action="store_true", help="cross-check against the polynomial oracle")
    run.add_argument("--output", choices=("json", "text"), default="json")
    run.add_argument("-v", "--verbose", action="store_true")
    return parser


def _oracle_check(parsed: ParsedCircuit, result: SchemeResult) -> None:
    if parsed.circuit.unitarity_error() > UNITARITY_TOL:
        raise InvariantError("circuit transfer matrix is not unitary")
    poly = oracle.from_fock(parsed.source.build())
    for e in parsed.circuit.elements:
        poly = oracle.substitute(poly, oracle.element_rules(e.mode_map), strict=False)
    amps = oracle.coincidence_amplitudes(poly, parsed.pattern.parties)
    prob = sum(abs(a) ** 2 for a in amps.values())
    if abs(prob - result.success_probability) > VERIFY_TOL:
        raise InvariantError(
            f"oracle probability {prob!r} != simulated {result.success_probability!r}"
        )
    scale = math.sqrt(prob)
    for bits, a in result.register.as_dict(tol=0).items():
        if abs(amps.get(bits, 0) / scale - a) > VERIFY_TOL:
            raise InvariantError(f"oracle amplitude mismatch on {bits}")


def run_report(args: argparse.Namespace) -> tuple[Report | None, int]:
    try:
        if args.circuit is not None:
            name = args.circuit.stem
            parsed = parse_circuit_file(args.circuit.read_text(encoding="utf-8"))
            if parsed.pattern is None:
                raise CircuitParseError("no postselect declared")
            result = run_pipeline(parsed.source.build(), parsed.circuit, parsed.pattern)
        else:
            name = args.scheme
            build, circ = SCHEMES[name]
            parsed = parse_circuit_file(bundled_circuit(circ))
            result = build()
        settings = None
        if args.bell_default:
            settings = PhaseSettings.paper_default()
        elif args.phases is not None:
            settings = parse_phases(args.phases, args.units)
            if settings.n_parties != result.register.n_parties:
                raise ValueError(
                    f"--phases lists {settings.n_parties} parties, register has {result.register.n_parties}"
                )
    except (CircuitParseError, ModeError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return None, EXIT_PARSE
    except EmptyPostselectionError as exc:
        log.error("empty post-selection: %s", exc)
        return None, EXIT_EMPTY

    try:
        if abs(result.register.norm() - 1) > VERIFY_TOL:
            raise InvariantError("register is not normalized")
        report, tensor = build_report(name, result, settings)
        if args.verify:
            _oracle_check(parsed, result)
            if tensor is not None and tensor.round_trip_error() > VERIFY_TOL:
                raise InvariantError("tensor does not reconstruct its sampled correlations")
            log.info("verify: oracle, unitarity and tensor round-trip checks passed")
    except InvariantError as exc:
        log.error("invariant failure: %s", exc)
        return None, EXIT_INVARIANT
    return report, EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    log.handlers[:] = [handler]
    log.propagate = False
    log.setLevel(logging.INFO if args.verbose else logging.WARNING)
    report, code = run_report(args)
    if report is not None:
        sys.stdout.write(report.to_json() if args.output == "json" else report.to_text())
    return code


if __name__ == "__main__":
    sys.exit(main())
