"""Fourfold-coincidence post-selection and the two generation pipelines.

Bit convention for qubit registers: H -> 0, V -> 1, parties in the listed order,
first party is the most significant bit. A bitstring is written with letters,
e.g. ``"HVVH"``.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from fourphoton.errors import EmptyPostselectionError, ZeroStateError
from fourphoton.fock import PRUNE_TOL, FockState, check_labels, pdc_second_order
from fourphoton.optics import (
    Circuit,
    apply_circuit,
    make_beam_splitter,
    make_half_wave_plate,
    make_pbs,
)

PAPER_PARTIES = ("d1", "d2", "d3", "d4")
PAPER_MODES = ("a1", "a2", "d1", "d2", "d3", "d4", "D1", "D2")


@dataclass(frozen=True)
class CoincidencePattern:
    parties: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "parties", tuple(self.parties))
        if not self.parties:
            raise ValueError("coincidence pattern needs at least one party")
        check_labels(self.parties, None)


def bitstrings(n: int) -> list[str]:
    """All ``2**n`` polarization strings in register index order."""
    return ["".join(b) for b in itertools.product("HV", repeat=n)]


def bit_index(bits: str) -> int:
    return int(bits.translate(str.maketrans("HV", "01")), 2)


@dataclass(frozen=True)
class QubitRegister:
    """Normalized n-party polarization state; ``amplitudes[i]`` for bitstring ``i``."""

    parties: tuple[str, ...]
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "parties", tuple(self.parties))
        amps = np.asarray(self.amplitudes, dtype=complex).copy()
        if amps.shape != (2 ** len(self.parties),):
            raise ValueError(
                f"expected {2 ** len(self.parties)} amplitudes for {len(self.parties)} parties"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_dict(cls, parties: Sequence[str], amps: Mapping[str, complex], normalize: bool = True) -> QubitRegister:
        vec = np.zeros(2 ** len(parties), dtype=complex)
        for bits, a in amps.items():
            if len(bits) != len(parties):
                raise ValueError(f"bitstring {bits!r} does not match {len(parties)} parties")
            vec[bit_index(bits)] = a
        if normalize:
            n = np.linalg.norm(vec)
            if n <= PRUNE_TOL:
                raise ZeroStateError("zero register")
            vec = vec / n
        return cls(tuple(parties), vec)

    @property
    def n_parties(self) -> int:
        return len(self.parties)

    def amplitude(self, bits: str) -> complex:
        return complex(self.amplitudes[bit_index(bits)])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def as_dict(self, tol: float = PRUNE_TOL) -> dict[str, complex]:
        """Nonzero amplitudes keyed by bitstring, in index order."""
        return {
            b: complex(a)
            for b, a in zip(bitstrings(self.n_parties), self.amplitudes)
            if abs(a) >= tol
        }

    def canonical_phase(self) -> QubitRegister:
        """Global phase making the first nonzero amplitude (index order) real positive."""
        nz = np.flatnonzero(np.abs(self.amplitudes) >= PRUNE_TOL)
        if nz.size == 0:
            raise ZeroStateError("zero register")
        lead = self.amplitudes[nz[0]]
        return QubitRegister(self.parties, self.amplitudes * (abs(lead) / lead))

    def flipped(self) -> QubitRegister:
        """Simultaneous H<->V on every party (reverses the index order)."""
        return QubitRegister(self.parties, self.amplitudes[::-1])

    def overlap(self, other: QubitRegister) -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __str__(self) -> str:
        return " + ".join(f"({a:.6g})|{b}>" for b, a in self.as_dict().items())


@dataclass(frozen=True)
class SchemeResult:
    register: QubitRegister
    success_probability: float
    raw_state: FockState


def coincidence_component(state: FockState, parties: Iterable[str]) -> dict[str, complex]:
    """Amplitudes of the kept terms (one photon per party, nothing elsewhere)."""
    parties = tuple(parties)
    index = {p: i for i, p in enumerate(parties)}
    kept: dict[str, complex] = {}
    for occ, amp in state.items():
        bits = [""] * len(parties)
        ok = True
        for m, n in occ.items:
            i = index.get(m.spatial)
            if i is None or n != 1 or bits[i]:
                ok = False
                break
            bits[i] = m.pol
        if ok and all(bits):
            kept["".join(bits)] = amp
    return kept


def project_coincidence(state: FockState, pattern: CoincidencePattern) -> SchemeResult:
    """Keep exactly one photon (either polarization) in each party, zero elsewhere."""
    kept = coincidence_component(state, pattern.parties)
    prob = sum(abs(a) ** 2 for a in kept.values())
    if prob < PRUNE_TOL:
        raise EmptyPostselectionError(
            f"no amplitude with one photon in each of {', '.join(pattern.parties)}"
        )
    register = QubitRegister.from_dict(pattern.parties, kept)
    return SchemeResult(register, float(prob), state)


def ghz_circuit() -> Circuit:
    """BS on a1 (+), BS on a2 (-), then a PBS joining the D1/D2 outputs."""
    return Circuit(
        PAPER_MODES,
        (
            make_beam_splitter("a1", None, "d1", "D1", "+"),
            make_beam_splitter("a2", None, "d4", "D2", "-"),
            make_pbs("D1", "D2", "d3", "d2"),
        ),
    )


def superposition_circuit() -> Circuit:
    """The GHZ circuit with a half-wave plate on a2 ahead of its beam splitter."""
    ghz = ghz_circuit()
    return Circuit(ghz.spatial_modes, (make_half_wave_plate("a2"),) + ghz.elements)


def run_pipeline(source: FockState, circuit: Circuit, pattern: CoincidencePattern) -> SchemeResult:
    return project_coincidence(apply_circuit(source, circuit), pattern)


def scheme_ghz() -> SchemeResult:
    return run_pipeline(
        pdc_second_order("a1", "a2"), ghz_circuit(), CoincidencePattern(PAPER_PARTIES)
    )


def scheme_superposition() -> SchemeResult:
    return run_pipeline(
        pdc_second_order("a1", "a2"), superposition_circuit(), CoincidencePattern(PAPER_PARTIES)
    )


def pattern_probabilities(state: FockState, parties: Sequence[str]) -> dict[str, float]:
    """Probability of each polarization-resolved one-photon-per-party outcome."""
    kept = coincidence_component(state, parties)
    return {b: abs(kept.get(b, 0)) ** 2 for b in bitstrings(len(parties))}


def register_close(r1: QubitRegister, r2: QubitRegister, tol: float = 1e-12, up_to_phase: bool = False) -> bool:
    if r1.parties != r2.parties:
        return False
    if up_to_phase:
        return math.isclose(abs(r1.overlap(r2)), 1.0, abs_tol=tol)
    return bool(np.max(np.abs(r1.amplitudes - r2.amplitudes)) <= tol)
