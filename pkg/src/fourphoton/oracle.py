"""Independent referee: commutative creation-operator polynomials.

States are written as polynomials in creation operators acting on the vacuum,
optical elements as substitution rules on the operators. Nothing here touches
the ladder-operator state evolution in ``fock``/``optics``; the only shared
pieces are the ``Mode`` label and the ``FockState`` container that ``to_fock``
fills in directly.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence

from fourphoton.errors import ModeError
from fourphoton.fock import PRUNE_TOL, FockState, Mode, OccupationVector

Monomial = tuple[Mode, ...]  # sorted multiset of creation operators
Rules = Mapping[Mode, Sequence[tuple[Mode, complex]]]


class OperatorPolynomial:
    """Map from sorted operator multisets to coefficients."""

    __slots__ = ("monomials",)

    def __init__(self, monomials: Mapping[Monomial, complex] | None = None):
        clean: dict[Monomial, complex] = {}
        for factors, c in (monomials or {}).items():
            key = tuple(sorted(factors))
            clean[key] = clean.get(key, 0j) + complex(c)
        self.monomials = {k: c for k, c in clean.items() if abs(c) >= PRUNE_TOL}

    @classmethod
    def one(cls) -> OperatorPolynomial:
        return cls({(): 1.0})

    @classmethod
    def monomial(cls, *factors: Mode, coefficient: complex = 1.0) -> OperatorPolynomial:
        return cls({tuple(factors): coefficient})

    @classmethod
    def linear(cls, terms: Iterable[tuple[Mode, complex]]) -> OperatorPolynomial:
        out: dict[Monomial, complex] = {}
        for m, c in terms:
            out[(m,)] = out.get((m,), 0j) + c
        return cls(out)

    def coefficient(self, *factors: Mode) -> complex:
        return self.monomials.get(tuple(sorted(factors)), 0j)

    def degrees(self) -> set[int]:
        return {len(k) for k in self.monomials}

    def __add__(self, other: OperatorPolynomial) -> OperatorPolynomial:
        out = dict(self.monomials)
        for k, c in other.monomials.items():
            out[k] = out.get(k, 0j) + c
        return OperatorPolynomial(out)

    def __sub__(self, other: OperatorPolynomial) -> OperatorPolynomial:
        return self + other.scaled(-1)

    def __mul__(self, other: OperatorPolynomial | complex) -> OperatorPolynomial:
        if not isinstance(other, OperatorPolynomial):
            return self.scaled(other)
        out: dict[Monomial, complex] = {}
        for k1, c1 in self.monomials.items():
            for k2, c2 in other.monomials.items():
                key = tuple(sorted(k1 + k2))
                out[key] = out.get(key, 0j) + c1 * c2
        return OperatorPolynomial(out)

    def __rmul__(self, scalar: complex) -> OperatorPolynomial:
        return self.scaled(scalar)

    def scaled(self, scalar: complex) -> OperatorPolynomial:
        return OperatorPolynomial({k: scalar * c for k, c in self.monomials.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OperatorPolynomial):
            return NotImplemented
        keys = set(self.monomials) | set(other.monomials)
        return all(abs(self.coefficient(*k) - other.coefficient(*k)) < PRUNE_TOL for k in keys)

    def __repr__(self) -> str:
        body = " + ".join(
            f"({c:.6g})" + "".join(str(m) for m in k) for k, c in sorted(self.monomials.items())
        )
        return f"OperatorPolynomial({body or '0'})"


def poly_pow(p: OperatorPolynomial, n: int) -> OperatorPolynomial:
    if n < 0:
        raise ValueError("negative power")
    out = OperatorPolynomial.one()
    for _ in range(n):
        out = out * p
    return out


def substitute(p: OperatorPolynomial, rules: Rules, strict: bool = True) -> OperatorPolynomial:
    """Replace every operator by its linear image and re-expand.

    With ``strict`` every operator in ``p`` must have a rule; otherwise missing
    operators map to themselves.
    """
    images: dict[Mode, OperatorPolynomial] = {}
    out = OperatorPolynomial()
    for factors, c in p.monomials.items():
        term = OperatorPolynomial({(): c})
        for m in factors:
            if m not in images:
                if m in rules:
                    images[m] = OperatorPolynomial.linear(rules[m])
                elif strict:
                    raise ModeError(f"no substitution rule for {m}")
                else:
                    images[m] = OperatorPolynomial.linear([(m, 1.0)])
            term = term * images[m]
        out = out + term
    return out


def to_fock(p: OperatorPolynomial) -> FockState:
    """Act on the vacuum: ``prod (a_m^+)^{k_m} |0> = prod sqrt(k_m!) |k>``."""
    degrees = p.degrees()
    if len(degrees) > 1:
        raise ValueError(f"polynomial mixes degrees {sorted(degrees)}")
    amps: dict[OccupationVector, complex] = {}
    for factors, c in p.monomials.items():
        counts = Counter(factors)
        weight = math.prod(math.sqrt(math.factorial(k)) for k in counts.values())
        occ = OccupationVector(tuple(sorted(counts.items())))
        amps[occ] = amps.get(occ, 0j) + c * weight
    return FockState(amps, degrees.pop() if degrees else 0)


def from_fock(state: FockState) -> OperatorPolynomial:
    """Inverse of ``to_fock``: ``|k> = prod (a_m^+)^{k_m} / sqrt(k_m!) |0>``."""
    out: dict[Monomial, complex] = {}
    for occ, amp in state.terms.items():
        factors: list[Mode] = []
        weight = 1.0
        for m, k in occ.items:
            factors.extend([m] * k)
            weight *= math.sqrt(math.factorial(k))
        out[tuple(factors)] = amp / weight
    return OperatorPolynomial(out)


def coincidence_amplitudes(p: OperatorPolynomial, parties: Sequence[str]) -> dict[str, complex]:
    """Coefficients of monomials with exactly one operator per party and none elsewhere.

    Such monomials have unit ladder weight, so the coefficient is the amplitude.
    """
    out: dict[str, complex] = {}
    for factors, c in p.monomials.items():
        if len(factors) != len(parties):
            continue
        by_party = {m.spatial: m.pol for m in factors}
        if len(by_party) == len(parties) and set(by_party) == set(parties):
            out["".join(by_party[x] for x in parties)] = c
    return out


# Substitution rules written out by hand for the two generation schemes.

_R = 1 / math.sqrt(2)


def _h(s: str) -> Mode:
    return Mode(s, "H")


def _v(s: str) -> Mode:
    return Mode(s, "V")


def source_polynomial(a1: str = "a1", a2: str = "a2") -> OperatorPolynomial:
    """``(a1H a2V - a1V a2H)^2 / (2 sqrt3)``."""
    singlet = OperatorPolynomial.monomial(_h(a1), _v(a2)) - OperatorPolynomial.monomial(_v(a1), _h(a2))
    return poly_pow(singlet, 2).scaled(1 / (2 * math.sqrt(3)))


HWP_A2: dict[Mode, list[tuple[Mode, complex]]] = {
    _h("a2"): [(_v("a2"), 1.0)],
    _v("a2"): [(_h("a2"), 1.0)],
}

BEAM_SPLITTERS: dict[Mode, list[tuple[Mode, complex]]] = {
    _h("a1"): [(_h("d1"), _R), (_h("D1"), _R)],
    _v("a1"): [(_v("d1"), _R), (_v("D1"), _R)],
    _h("a2"): [(_h("d4"), _R), (_h("D2"), -_R)],
    _v("a2"): [(_v("d4"), _R), (_v("D2"), -_R)],
}

PBS_D1_D2: dict[Mode, list[tuple[Mode, complex]]] = {
    _v("D1"): [(_v("d2"), 1.0)],
    _h("D1"): [(_h("d3"), 1.0)],
    _v("D2"): [(_v("d3"), 1.0)],
    _h("D2"): [(_h("d2"), 1.0)],
}

PARTIES = ("d1", "d2", "d3", "d4")


def scheme_polynomial(with_hwp: bool) -> OperatorPolynomial:
    p = source_polynomial()
    if with_hwp:
        p = substitute(p, HWP_A2, strict=False)
    p = substitute(p, BEAM_SPLITTERS, strict=False)
    return substitute(p, PBS_D1_D2, strict=False)


def scheme_coincidences(with_hwp: bool) -> tuple[dict[str, complex], float]:
    """Unnormalized coincidence amplitudes and their total probability."""
    amps = coincidence_amplitudes(scheme_polynomial(with_hwp), PARTIES)
    return amps, sum(abs(a) ** 2 for a in amps.values())


def element_rules(mode_map: Mapping[Mode, Sequence[tuple[Mode, complex]]]) -> dict[Mode, list[tuple[Mode, complex]]]:
    """Copy an element's mode map into plain substitution rules."""
    return {m: list(img) for m, img in mode_map.items()}
