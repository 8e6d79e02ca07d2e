"""Passive linear optical elements acting on polarization-resolved Fock states.

An element maps each of its input creation operators to a linear combination
of output creation operators. Application to a Fock state rewrites every
occupation vector as a creation-operator monomial, substitutes each operator
by its image and re-expands with the bosonic ladder factors. Modes an element
does not touch pass through unchanged.

Beam splitter coefficients are real (+-1/sqrt2); no i-on-reflection phase.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from fourphoton.errors import ModeError
from fourphoton.fock import (
    POLARIZATIONS,
    FockState,
    Mode,
    OccupationVector,
    apply_creation,
    check_labels,
    vacuum,
)

UNITARITY_TOL = 1e-12
_S = 1 / math.sqrt(2)

ModeMap = Mapping[Mode, tuple[tuple[Mode, complex], ...]]


@dataclass(frozen=True)
class LinearElement:
    """Linear map from input creation operators to output creation operators.

    ``aux_spatial`` names auxiliary input ports added only to complete the map
    to a unitary; a circuit never needs to declare them.
    """

    name: str
    mode_map: ModeMap
    aux_spatial: frozenset[str] = frozenset()

    @property
    def inputs(self) -> tuple[Mode, ...]:
        return tuple(sorted(self.mode_map))

    @property
    def outputs(self) -> tuple[Mode, ...]:
        return tuple(sorted({m for img in self.mode_map.values() for m, _ in img}))

    def spatial_labels(self) -> set[str]:
        return {m.spatial for m in self.inputs} | {m.spatial for m in self.outputs}

    def matrix(self) -> tuple[tuple[Mode, ...], tuple[Mode, ...], np.ndarray]:
        """``(inputs, outputs, U)`` with ``U[row=output, col=input]``."""
        ins, outs = self.inputs, self.outputs
        row = {m: i for i, m in enumerate(outs)}
        u = np.zeros((len(outs), len(ins)), dtype=complex)
        for j, m in enumerate(ins):
            for o, c in self.mode_map[m]:
                u[row[o], j] += c
        return ins, outs, u

    def unitarity_error(self) -> float:
        _, _, u = self.matrix()
        if u.shape[0] != u.shape[1]:
            return math.inf
        return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def _element(name: str, rules: dict[Mode, list[tuple[Mode, complex]]], aux: Iterable[str] = ()) -> LinearElement:
    frozen = {m: tuple((o, complex(c)) for o, c in img) for m, img in rules.items()}
    return LinearElement(name, frozen, frozenset(aux))


def make_beam_splitter(
    in_a: str, in_aux: str | None, out_t: str, out_r: str, sign: str | int = "+"
) -> LinearElement:
    """Polarization-independent 50:50 beam splitter.

    ``in_a -> (out_t + sign*out_r)/sqrt2`` for both polarizations; the auxiliary
    port takes the complementary sign. ``in_aux=None`` names it ``<in_a>~aux``.
    """
    s = _parse_sign(sign)
    if in_aux is None:
        in_aux = f"{in_a}~aux"
    check_labels([in_a, in_aux, out_t, out_r], None)
    rules: dict[Mode, list[tuple[Mode, complex]]] = {}
    for p in POLARIZATIONS:
        t, r = Mode(out_t, p), Mode(out_r, p)
        rules[Mode(in_a, p)] = [(t, _S), (r, s * _S)]
        rules[Mode(in_aux, p)] = [(t, _S), (r, -s * _S)]
    sym = "+" if s > 0 else "-"
    return _element(f"bs {in_a} -> {out_t} {out_r} {sym}", rules, aux=[in_aux])


def _parse_sign(sign: str | int) -> int:
    if sign in ("+", 1, "+1"):
        return 1
    if sign in ("-", -1, "-1"):
        return -1
    raise ModeError(f"beam splitter sign must be + or -, got {sign!r}")


def make_pbs(in1: str, in2: str, out_for_in1_h: str, out_for_in1_v: str) -> LinearElement:
    """Polarizing beam splitter in the H/V basis.

    ``in1`` sends H to ``out_for_in1_h`` and V to ``out_for_in1_v``; ``in2`` is
    routed complementarily (H to ``out_for_in1_v``, V to ``out_for_in1_h``).
    """
    if in1 == in2:
        raise ModeError(f"PBS inputs must differ, got {in1!r} twice")
    if out_for_in1_h == out_for_in1_v:
        raise ModeError(
            f"PBS routing is not a permutation: both polarizations of {in1!r} go to {out_for_in1_h!r}"
        )
    rules = {
        Mode(in1, "H"): [(Mode(out_for_in1_h, "H"), 1.0)],
        Mode(in1, "V"): [(Mode(out_for_in1_v, "V"), 1.0)],
        Mode(in2, "H"): [(Mode(out_for_in1_v, "H"), 1.0)],
        Mode(in2, "V"): [(Mode(out_for_in1_h, "V"), 1.0)],
    }
    return _element(f"pbs {in1} {in2} -> {out_for_in1_h} {out_for_in1_v}", rules)


def make_half_wave_plate(target: str) -> LinearElement:
    """Half-wave plate at 45 degrees: swaps H and V on one spatial mode."""
    if not target:
        raise ModeError("empty spatial label")
    rules = {
        Mode(target, "H"): [(Mode(target, "V"), 1.0)],
        Mode(target, "V"): [(Mode(target, "H"), 1.0)],
    }
    return _element(f"hwp {target}", rules)


def identity_element(spatial: Iterable[str] = ()) -> LinearElement:
    rules = {Mode(s, p): [(Mode(s, p), 1.0)] for s in spatial for p in POLARIZATIONS}
    return _element("id", rules)


def apply_element(state: FockState, e: LinearElement) -> FockState:
    """Evolve ``state`` through ``e`` by monomial substitution."""
    passthrough = state.modes() - set(e.mode_map)
    clash = passthrough & set(e.outputs)
    if clash:
        raise ModeError(
            f"{e.name}: output modes {sorted(map(str, clash))} are already occupied upstream"
        )
    out = FockState({}, state.photon_number)
    for occ, amp in state.terms.items():
        out = out + amp * _evolve_occupation(occ, e.mode_map)
    return out


def _evolve_occupation(occ: OccupationVector, mode_map: ModeMap) -> FockState:
    # |n_1..n_k> = prod_m (a_m^+)^{n_m} / sqrt(n_m!) |0>
    partial = vacuum()
    scale = 1.0
    for m, n in occ.items:
        image = mode_map.get(m, ((m, 1.0),))
        scale /= math.sqrt(math.factorial(n))
        for _ in range(n):
            nxt = FockState({}, partial.photon_number + 1)
            for target, c in image:
                nxt = nxt + c * apply_creation(partial, target)
            partial = nxt
    return partial * scale


@dataclass(frozen=True)
class Circuit:
    """Declared spatial modes plus an ordered list of elements."""

    spatial_modes: tuple[str, ...]
    elements: tuple[LinearElement, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "spatial_modes", tuple(self.spatial_modes))
        object.__setattr__(self, "elements", tuple(self.elements))
        check_labels(self.spatial_modes, None)
        declared = set(self.spatial_modes)
        for e in self.elements:
            missing = sorted(e.spatial_labels() - declared - e.aux_spatial)
            if missing:
                raise ModeError(f"{e.name}: undeclared spatial modes {missing}")

    def then(self, *elements: LinearElement) -> Circuit:
        return Circuit(self.spatial_modes, self.elements + elements)

    def transfer_matrix(self) -> tuple[tuple[Mode, ...], tuple[Mode, ...], np.ndarray]:
        """Composite map from the circuit's source modes to its final live modes.

        Source modes are element inputs not produced by an earlier element.
        ``U[row=final mode, col=source mode]``.
        """
        sources: set[Mode] = set()
        live: dict[Mode, dict[Mode, complex]] = {}  # live mode -> coefficients over sources
        for e in self.elements:
            for m in e.inputs:
                if m not in live:
                    if m in sources:
                        raise ModeError(f"{e.name}: mode {m} consumed twice")
                    sources.add(m)
                    live[m] = {m: 1.0}
            new_live = {m: v for m, v in live.items() if m not in e.mode_map}
            clash = set(new_live) & set(e.outputs)
            if clash:
                raise ModeError(f"{e.name}: outputs {sorted(map(str, clash))} already live")
            for m in e.inputs:
                for o, c in e.mode_map[m]:
                    acc = new_live.setdefault(o, {})
                    for src, a in live[m].items():
                        acc[src] = acc.get(src, 0j) + c * a
            live = new_live
        ordered = tuple(sorted(sources))
        finals = tuple(sorted(live))
        col = {m: j for j, m in enumerate(ordered)}
        u = np.zeros((len(finals), len(ordered)), dtype=complex)
        for i, f in enumerate(finals):
            for src, a in live[f].items():
                u[i, col[src]] += a
        return ordered, finals, u

    def unitarity_error(self) -> float:
        _, _, u = self.transfer_matrix()
        if u.shape[0] != u.shape[1]:
            return math.inf
        return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def apply_circuit(state: FockState, c: Circuit) -> FockState:
    declared = set(c.spatial_modes)
    stray = sorted({m.spatial for m in state.modes()} - declared)
    if stray:
        raise ModeError(f"state occupies undeclared spatial modes {stray}")
    return reduce(apply_element, c.elements, state)

