import itertools
import math

import numpy as np
import pytest

from fourphoton.fock import FockState, Mode, OccupationVector

PAPER_SPATIAL = ("a1", "a2", "d1", "d2", "d3", "d4", "D1", "D2")

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def random_state(rng, spatial=PAPER_SPATIAL, photons=4, n_terms=6) -> FockState:
    """Random normalized number-definite state over the given spatial modes."""
    modes = [Mode(s, p) for s in spatial for p in "HV"]
    amps: dict[OccupationVector, complex] = {}
    while len(amps) < n_terms:
        picks = rng.choice(len(modes), size=photons)
        counts: dict[Mode, int] = {}
        for i in picks:
            counts[modes[i]] = counts.get(modes[i], 0) + 1
        amps[OccupationVector.from_counts(counts)] = complex(rng.normal(), rng.normal())
    s = FockState(amps, photons)
    n = math.sqrt(sum(abs(a) ** 2 for a in s.terms.values()))
    return s / n


def brute_projection(amps: dict[str, complex], outcome, phases) -> complex:
    """<m_1,phi_1|...<m_n,phi_n|psi> by explicit sum over basis kets.

    <m,phi|H> = m e^{i phi}/sqrt2, <m,phi|V> = 1/sqrt2.
    """
    total = 0j
    for bits, a in amps.items():
        f = 1 + 0j
        for b, m, phi in zip(bits, outcome, phases):
            f *= (m * complex(math.cos(phi), math.sin(phi)) if b == "H" else 1) / math.sqrt(2)
        total += f * a
    return total


def brute_correlation(amps: dict[str, complex], phases) -> float:
    n = len(phases)
    e = 0.0
    for outcome in itertools.product((1, -1), repeat=n):
        e += math.prod(outcome) * abs(brute_projection(amps, outcome, phases)) ** 2
    return e


SQ10 = math.sqrt(10)
GHZ_AMPS = {"HVVH": 1 / math.sqrt(2), "VHHV": 1 / math.sqrt(2)}
SUPERPOSITION_AMPS = {"HVVH": 1 / SQ10, "VHHV": 1 / SQ10, "HHHH": -2 / SQ10, "VVVV": -2 / SQ10}
