"""Polarization-analyzer correlations and the LHV correlation-tensor test.

Each party measures in the basis ``|m, phi> = (|V> + m e^{-i phi} |H>) / sqrt2``
with outcome ``m = +-1``. The n-party correlation is the expectation of the
product of outcomes. With two phase settings per party, sampling the
correlation on the ``2**n`` setting grid and expanding it over the per-party
vectors ``v1 = (1, 1)``, ``v2 = (1, -1)`` gives a tensor ``q``; local
hidden-variable models satisfy ``sum |q| <= 1``.

White noise enters as ``V |psi><psi| + (1 - V) I / 2**n``. The maximally mixed
state has zero correlation for these analyzers, so every correlation (and so
every ``q``) scales by ``V`` and the critical visibility is ``1 / sum |q|``.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import reduce

import numpy as np

from fourphoton.errors import DegenerateTensorError
from fourphoton.postselect import QubitRegister

VIOLATION_TOL = 1e-12

# columns are v^1 = (1, 1) and v^2 = (1, -1); the matrix is its own inverse up to 1/2
_V = np.array([[1.0, 1.0], [1.0, -1.0]])
_V_INV = _V / 2


@dataclass(frozen=True)
class PhaseSettings:
    """Two analyzer phases (radians) per party; index 0 is setting k=1."""

    phases: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        phases = tuple((float(a), float(b)) for a, b in self.phases)
        if not phases:
            raise ValueError("need at least one party")
        if not all(math.isfinite(x) for pair in phases for x in pair):
            raise ValueError("phases must be finite")
        object.__setattr__(self, "phases", phases)

    @classmethod
    def paper_default(cls) -> PhaseSettings:
        q = math.pi / 4
        return cls(((0.0, math.pi / 2), (-q, q), (-q, q), (-q, q)))

    @property
    def n_parties(self) -> int:
        return len(self.phases)

    def grid(self, setting_index: Sequence[int]) -> tuple[float, ...]:
        """Phases for one grid point; ``setting_index`` entries are 0 or 1."""
        return tuple(self.phases[x][k] for x, k in enumerate(setting_index))

    def swapped(self, party: int) -> PhaseSettings:
        p = list(self.phases)
        p[party] = p[party][::-1]
        return PhaseSettings(tuple(p))


def analyzer_state(m: int, phi: float) -> np.ndarray:
    """``[H, V]`` amplitudes of ``|m, phi>``."""
    if m not in (1, -1):
        raise ValueError(f"analyzer outcome must be +1 or -1, got {m}")
    s = 1 / math.sqrt(2)
    return np.array([m * np.exp(-1j * phi) * s, s], dtype=complex)


def _outcome_amplitudes(reg: QubitRegister, phases: Sequence[float]) -> np.ndarray:
    """Projections onto every analyzer product state, shape ``(2,)*n``.

    Axis x index 0 is m_x = +1, index 1 is m_x = -1.
    """
    n = reg.n_parties
    if len(phases) != n:
        raise ValueError(f"need {n} phases, got {len(phases)}")
    psi = reg.amplitudes.reshape((2,) * n)
    for x, phi in enumerate(phases):
        # rows: outcome, cols: H/V; bra takes the complex conjugate
        bras = np.stack([analyzer_state(1, phi), analyzer_state(-1, phi)]).conj()
        psi = np.moveaxis(np.tensordot(bras, psi, axes=([1], [x])), 0, x)
    return psi


def outcome_probabilities(reg: QubitRegister, phases: Sequence[float], visibility: float = 1.0) -> np.ndarray:
    """Joint outcome probabilities, shape ``(2,)*n``, index 0 meaning m = +1."""
    p = np.abs(_outcome_amplitudes(reg, phases)) ** 2
    if visibility != 1.0:
        p = visibility * p + (1 - visibility) / p.size
    return p


def outcome_probability(
    reg: QubitRegister, outcome: Sequence[int], phases: Sequence[float], visibility: float = 1.0
) -> float:
    idx = tuple(0 if m == 1 else 1 for m in outcome)
    if len(idx) != reg.n_parties or any(m not in (1, -1) for m in outcome):
        raise ValueError(f"outcome must hold {reg.n_parties} entries of +-1, got {outcome}")
    return float(outcome_probabilities(reg, phases, visibility)[idx])


def _parity(n: int) -> np.ndarray:
    sign = np.array([1.0, -1.0])
    return reduce(np.multiply.outer, [sign] * n)


def correlation(reg: QubitRegister, phases: Sequence[float], visibility: float = 1.0) -> float:
    """Expectation of m_1 m_2 ... m_n."""
    p = outcome_probabilities(reg, phases, visibility)
    return float(np.sum(_parity(reg.n_parties) * p))


def closed_form_correlation_superposition(phases: Sequence[float]) -> float:
    """Correlation of ``[(|HVVH>+|VHHV>) - 2(|HHHH>+|VVVV>)]/sqrt10``."""
    p1, p2, p3, p4 = phases
    return 0.8 * math.cos(p1 + p2 + p3 + p4) + 0.2 * math.cos(p1 - p2 - p3 + p4)


def closed_form_correlation_ghz(phases: Sequence[float]) -> float:
    """Correlation of ``(|HVVH> + |VHHV>)/sqrt2``."""
    p1, p2, p3, p4 = phases
    return math.cos(p1 - p2 - p3 + p4)


@dataclass(frozen=True)
class CorrelationTensor:
    """Tensor ``q[k_1-1, ..., k_n-1]`` with the grid samples it was inverted from."""

    q: np.ndarray
    settings: PhaseSettings
    samples: np.ndarray

    def reconstruct(self) -> np.ndarray:
        """Correlations on the setting grid rebuilt from ``q``."""
        return _transform(self.q, _V)

    def round_trip_error(self) -> float:
        return float(np.max(np.abs(self.reconstruct() - self.samples)))

    @property
    def lhv_sum(self) -> float:
        return lhv_sum(self)

    def flat(self) -> list[float]:
        """Row-major over (k_1, ..., k_n)."""
        return [float(x) for x in self.q.ravel()]


def _transform(t: np.ndarray, mat: np.ndarray) -> np.ndarray:
    """Apply ``mat`` along every axis: ``out[j..] = sum_k mat[j,k] t[k..]``."""
    for axis in range(t.ndim):
        t = np.moveaxis(np.tensordot(mat, t, axes=([1], [axis])), 0, axis)
    return t


def sample_grid(reg: QubitRegister, settings: PhaseSettings, visibility: float = 1.0) -> np.ndarray:
    n = settings.n_parties
    if n != reg.n_parties:
        raise ValueError(f"settings for {n} parties, register has {reg.n_parties}")
    grid = np.empty((2,) * n)
    # sorted index order keeps the reduction bit-stable
    for idx in itertools.product((0, 1), repeat=n):
        grid[idx] = correlation(reg, settings.grid(idx), visibility)
    return grid


def correlation_tensor(reg: QubitRegister, settings: PhaseSettings, visibility: float = 1.0) -> CorrelationTensor:
    samples = sample_grid(reg, settings, visibility)
    q = _transform(samples, _V_INV)
    return CorrelationTensor(q, settings, samples)


def lhv_sum(t: CorrelationTensor) -> float:
    return float(np.sum(np.abs(t.q)))


@dataclass(frozen=True)
class BellVerdict:
    sum: float
    violated: bool
    margin: float


def bell_verdict(t: CorrelationTensor) -> BellVerdict:
    s = lhv_sum(t)
    return BellVerdict(s, s > 1 + VIOLATION_TOL, s - 1)


def critical_visibility(t: CorrelationTensor) -> float:
    """Smallest white-noise visibility at which ``V * sum|q|`` still reaches 1."""
    s = lhv_sum(t)
    if s <= VIOLATION_TOL:
        raise DegenerateTensorError("correlation tensor is zero; no visibility threshold")
    return 1 / s
