"""Line-oriented circuit file format.

::

    # comment
    modes <label>...
    source pdc2 <a> <b>
    hwp <mode>
    bs <in> -> <out_t> <out_r> <+|->
    pbs <in1> <in2> -> <outH1> <outV1>
    postselect <mode>...

One directive per line; elements apply in file order. Every spatial label must
appear on a ``modes`` line before it is used.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import NamedTuple

from fourphoton.errors import CircuitModeError, CircuitParseError, ModeError, UndeclaredModeError
from fourphoton.fock import FockState, pdc_second_order
from fourphoton.optics import (
    Circuit,
    LinearElement,
    make_beam_splitter,
    make_half_wave_plate,
    make_pbs,
)
from fourphoton.postselect import CoincidencePattern

_TOKEN = re.compile(r"\S+")


@dataclass(frozen=True)
class SourceSpec:
    kind: str
    modes: tuple[str, ...]

    def build(self) -> FockState:
        if self.kind == "pdc2":
            return pdc_second_order(*self.modes)
        raise ValueError(f"unknown source {self.kind!r}")


class ParsedCircuit(NamedTuple):
    circuit: Circuit
    source: SourceSpec
    pattern: CoincidencePattern | None


class _Tok(NamedTuple):
    text: str
    col: int


def _tokens(line: str) -> list[_Tok]:
    line = line.split("#", 1)[0]
    return [_Tok(m.group(), m.start() + 1) for m in _TOKEN.finditer(line)]


def parse_circuit_file(text: str) -> ParsedCircuit:
    declared: list[str] = []
    elements: list[LinearElement] = []
    source: SourceSpec | None = None
    pattern: CoincidencePattern | None = None

    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = _tokens(line)
        if not toks:
            continue
        head, args = toks[0], toks[1:]

        def need(n: int, usage: str) -> None:
            if len(args) != n:
                col = args[n].col if len(args) > n else len(line.rstrip()) + 1
                raise CircuitParseError(f"expected `{usage}`", lineno, col)

        def declared_label(tok: _Tok) -> str:
            if tok.text not in declared:
                raise UndeclaredModeError(f"undeclared mode {tok.text!r}", lineno, tok.col)
            return tok.text

        def arrow(tok: _Tok) -> None:
            if tok.text != "->":
                raise CircuitParseError(f"expected '->', got {tok.text!r}", lineno, tok.col)

        try:
            if head.text == "modes":
                if not args:
                    raise CircuitParseError("`modes` needs at least one label", lineno, head.col)
                for t in args:
                    if t.text in declared:
                        raise CircuitModeError(f"mode {t.text!r} declared twice", lineno, t.col)
                    if t.text in ("->", "+", "-"):
                        raise CircuitParseError(f"invalid mode label {t.text!r}", lineno, t.col)
                    declared.append(t.text)
            elif head.text == "source":
                need(3, "source pdc2 <a> <b>")
                if args[0].text != "pdc2":
                    raise CircuitParseError(f"unknown source {args[0].text!r}", lineno, args[0].col)
                if source is not None:
                    raise CircuitParseError("second source line", lineno, head.col)
                a, b = declared_label(args[1]), declared_label(args[2])
                if a == b:
                    raise CircuitModeError("source modes must differ", lineno, args[2].col)
                source = SourceSpec("pdc2", (a, b))
            elif head.text == "hwp":
                need(1, "hwp <mode>")
                elements.append(make_half_wave_plate(declared_label(args[0])))
            elif head.text == "bs":
                need(5, "bs <in> -> <out_t> <out_r> <+|->")
                arrow(args[1])
                if args[4].text not in ("+", "-"):
                    raise CircuitParseError(
                        f"beam splitter sign must be + or -, got {args[4].text!r}", lineno, args[4].col
                    )
                a, t, r = (declared_label(x) for x in (args[0], args[2], args[3]))
                elements.append(make_beam_splitter(a, None, t, r, args[4].text))
            elif head.text == "pbs":
                need(5, "pbs <in1> <in2> -> <outH1> <outV1>")
                arrow(args[2])
                i1, i2, oh, ov = (declared_label(x) for x in (args[0], args[1], args[3], args[4]))
                elements.append(make_pbs(i1, i2, oh, ov))
            elif head.text == "postselect":
                if not args:
                    raise CircuitParseError("`postselect` needs at least one mode", lineno, head.col)
                if pattern is not None:
                    raise CircuitParseError("second postselect line", lineno, head.col)
                labels = [declared_label(t) for t in args]
                if len(set(labels)) != len(labels):
                    raise CircuitModeError("duplicate postselect mode", lineno, args[0].col)
                pattern = CoincidencePattern(tuple(labels))
            else:
                raise CircuitParseError(f"unknown directive {head.text!r}", lineno, head.col)
        except CircuitParseError:
            raise
        except ModeError as exc:
            raise CircuitModeError(str(exc), lineno, head.col) from exc

    if source is None:
        raise CircuitParseError("no source declared")
    try:
        circuit = Circuit(tuple(declared), tuple(elements))
    except ModeError as exc:
        raise CircuitModeError(str(exc)) from exc
    return ParsedCircuit(circuit, source, pattern)


def load_circuit_file(path: str | Path) -> ParsedCircuit:
    return parse_circuit_file(Path(path).read_text(encoding="utf-8"))


def bundled_circuit(name: str) -> str:
    """Text of a circuit shipped with the package, e.g. ``"scheme1.circ"``."""
    return resources.files("fourphoton").joinpath("circuits", name).read_text(encoding="utf-8")
