"""Sparse bosonic number-state algebra over polarization-resolved modes.

A mode is a (spatial label, polarization) pair. States are stored as a sparse
map from occupation vectors to complex amplitudes and are always number-definite:
every stored occupation carries the same total photon number.

Canonical ordering
------------------
Modes sort lexicographically by spatial label, then H before V. Occupation
vectors sort by their ``(mode, count)`` items in that mode order. All
serialization and phase fixing goes through this ordering.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import NamedTuple

from fourphoton.errors import ModeError, NumberSectorError, ZeroStateError

PRUNE_TOL = 1e-12
POLARIZATIONS = ("H", "V")


class Mode(NamedTuple):
    spatial: str
    pol: str

    def __str__(self) -> str:
        return f"{self.spatial}{self.pol}"

    @classmethod
    def parse(cls, text: str) -> Mode:
        """``"a1H"`` -> ``Mode("a1", "H")``. The last character is the polarization."""
        if len(text) < 2 or text[-1] not in POLARIZATIONS:
            raise ModeError(f"cannot parse mode {text!r}; expected <spatial><H|V>")
        return cls(text[:-1], text[-1])


def mode(spatial: str, pol: str) -> Mode:
    if pol not in POLARIZATIONS:
        raise ModeError(f"polarization must be H or V, got {pol!r}")
    if not spatial:
        raise ModeError("empty spatial label")
    return Mode(spatial, pol)


def _as_mode(m: Mode | str) -> Mode:
    if isinstance(m, Mode):
        return mode(m.spatial, m.pol)
    return Mode.parse(m)


@dataclass(frozen=True, order=True)
class OccupationVector:
    """Photon counts per mode; absent modes hold zero photons."""

    items: tuple[tuple[Mode, int], ...] = ()

    @classmethod
    def from_counts(cls, counts: Mapping[Mode | str, int]) -> OccupationVector:
        merged: dict[Mode, int] = {}
        for m, n in counts.items():
            if n < 0:
                raise ValueError(f"negative photon count {n} for mode {m}")
            if n:
                key = _as_mode(m)
                merged[key] = merged.get(key, 0) + int(n)
        return cls(tuple(sorted(merged.items())))

    def count(self, m: Mode) -> int:
        for k, n in self.items:
            if k == m:
                return n
        return 0

    def total(self) -> int:
        return sum(n for _, n in self.items)

    def modes(self) -> tuple[Mode, ...]:
        return tuple(k for k, _ in self.items)

    def as_dict(self) -> dict[Mode, int]:
        return dict(self.items)

    def raised(self, m: Mode) -> OccupationVector:
        counts = self.as_dict()
        counts[m] = counts.get(m, 0) + 1
        return OccupationVector(tuple(sorted(counts.items())))

    def __str__(self) -> str:
        if not self.items:
            return "|0>"
        return "|" + ",".join(f"{n}_{m}" for m, n in self.items) + ">"


def occupation(**kwargs: int) -> OccupationVector:
    """Keyword shorthand: ``occupation(a1H=2, a2V=2)``."""
    return OccupationVector.from_counts(kwargs)


@dataclass(frozen=True)
class FockState:
    """Number-definite superposition of occupation vectors.

    Amplitudes with modulus below ``PRUNE_TOL`` are dropped on construction.
    An empty ``terms`` map is the zero vector of the given photon-number sector.
    """

    terms: Mapping[OccupationVector, complex]
    photon_number: int
    _sorted: tuple[tuple[OccupationVector, complex], ...] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        if self.photon_number < 0:
            raise NumberSectorError("photon number must be non-negative")
        clean: dict[OccupationVector, complex] = {}
        for occ, amp in self.terms.items():
            if occ.total() != self.photon_number:
                raise NumberSectorError(
                    f"{occ} holds {occ.total()} photons, state sector is {self.photon_number}"
                )
            amp = complex(amp)
            if abs(amp) >= PRUNE_TOL:
                clean[occ] = amp
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_sorted", tuple(sorted(clean.items(), key=lambda t: t[0])))

    @classmethod
    def from_amplitudes(
        cls, amplitudes: Mapping[OccupationVector, complex], photon_number: int | None = None
    ) -> FockState:
        """Build a state, inferring the photon number from the first term."""
        if photon_number is None:
            if not amplitudes:
                raise NumberSectorError("cannot infer photon number of an empty state")
            photon_number = next(iter(amplitudes)).total()
        return cls(dict(amplitudes), photon_number)

    def amplitude(self, occ: OccupationVector | Mapping[Mode | str, int]) -> complex:
        if not isinstance(occ, OccupationVector):
            occ = OccupationVector.from_counts(occ)
        return self.terms.get(occ, 0j)

    def items(self) -> tuple[tuple[OccupationVector, complex], ...]:
        """Terms in canonical order."""
        return self._sorted

    def modes(self) -> set[Mode]:
        return {m for occ in self.terms for m in occ.modes()}

    def __iter__(self) -> Iterator[OccupationVector]:
        return iter(occ for occ, _ in self._sorted)

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: FockState) -> FockState:
        if not isinstance(other, FockState):
            return NotImplemented
        if other.photon_number != self.photon_number:
            raise NumberSectorError(
                f"cannot add {self.photon_number}- and {other.photon_number}-photon states"
            )
        out = dict(self.terms)
        for occ, amp in other.terms.items():
            out[occ] = out.get(occ, 0j) + amp
        return FockState(out, self.photon_number)

    def __sub__(self, other: FockState) -> FockState:
        return self + (-1) * other

    def __mul__(self, scalar: complex) -> FockState:
        return FockState({o: scalar * a for o, a in self.terms.items()}, self.photon_number)

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> FockState:
        return self * (1 / scalar)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({amp:.6g}){occ}" for occ, amp in self._sorted)


def basis_state(counts: Mapping[Mode | str, int]) -> FockState:
    occ = OccupationVector.from_counts(counts)
    return FockState({occ: 1.0}, occ.total())


def vacuum() -> FockState:
    return FockState({OccupationVector(): 1.0}, 0)


def apply_creation(state: FockState, m: Mode | str) -> FockState:
    """Apply a creation operator: ``|n> -> sqrt(n+1) |n+1>`` on mode ``m``."""
    m = _as_mode(m)
    out: dict[OccupationVector, complex] = {}
    for occ, amp in state.terms.items():
        out[occ.raised(m)] = amp * math.sqrt(occ.count(m) + 1)
    return FockState(out, state.photon_number + 1)


def inner_product(s1: FockState, s2: FockState) -> complex:
    """``<s1|s2>``; conjugate-linear in the first argument."""
    if s1.photon_number != s2.photon_number:
        return 0j
    small, large = (s1, s2) if len(s1) <= len(s2) else (s2, s1)
    total = 0j
    for occ in small.terms:
        if occ in large.terms:
            total += s1.terms[occ].conjugate() * s2.terms[occ]
    return total


def norm(state: FockState) -> float:
    return math.sqrt(sum(abs(a) ** 2 for a in state.terms.values()))


def normalize(state: FockState) -> FockState:
    n = norm(state)
    if n <= PRUNE_TOL:
        raise ZeroStateError("cannot normalize a zero state")
    return state / n


def canonical_phase(state: FockState) -> FockState:
    """Rotate the global phase so the first term in canonical order is real positive."""
    if not state.terms:
        raise ZeroStateError("zero state has no phase")
    lead = state.items()[0][1]
    return state * (abs(lead) / lead)


def states_close(s1: FockState, s2: FockState, tol: float = 1e-12) -> bool:
    """Amplitude-wise comparison (no phase freedom)."""
    if s1.photon_number != s2.photon_number:
        return False
    keys = set(s1.terms) | set(s2.terms)
    return all(abs(s1.amplitude(k) - s2.amplitude(k)) <= tol for k in keys)


def superpose(states: Iterable[tuple[complex, FockState]], photon_number: int) -> FockState:
    out = FockState({}, photon_number)
    for c, s in states:
        out = out + c * s
    return out


def check_labels(labels: Iterable[str], declared: Iterable[str] | None) -> None:
    labels = list(labels)
    if len(set(labels)) != len(labels):
        raise ModeError(f"duplicate spatial labels in {labels}")
    if declared is not None:
        declared = set(declared)
        missing = [x for x in labels if x not in declared]
        if missing:
            raise ModeError(f"undeclared spatial labels {missing}")


def pdc_second_order(a1: str = "a1", a2: str = "a2", declared: Iterable[str] | None = None) -> FockState:
    """Normalized second-order emission of a polarization-entangled pair source.

    ``(a1H+ a2V+ - a1V+ a2H+)^2 |0> / (2 sqrt 3)``, built by ladder algebra.
    The result has three terms: ``|2,2>`` twice with amplitude ``1/sqrt3`` and
    the cross term ``|1,1,1,1>`` with ``-1/sqrt3``.
    """
    check_labels([a1, a2], declared)
    pair_terms = [
        (1.0, Mode(a1, "H"), Mode(a2, "V")),
        (-1.0, Mode(a1, "V"), Mode(a2, "H")),
    ]
    state = FockState({}, 4)
    for c1, m1, n1 in pair_terms:
        for c2, m2, n2 in pair_terms:
            s = vacuum()
            for m in (m1, n1, m2, n2):
                s = apply_creation(s, m)
            state = state + (c1 * c2) * s
    return state / (2 * math.sqrt(3))
