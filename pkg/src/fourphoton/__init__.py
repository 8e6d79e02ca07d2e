"""Polarization-resolved Fock-space simulation of four-photon entanglement
from second-order parametric down-conversion, with a Bell-nonlocality analyzer.
"""

from fourphoton.errors import (
    CircuitParseError,
    DegenerateTensorError,
    EmptyPostselectionError,
    FourPhotonError,
    ModeError,
    NumberSectorError,
    UndeclaredModeError,
    ZeroStateError,
)
from fourphoton.fock import (
    FockState,
    Mode,
    OccupationVector,
    apply_creation,
    canonical_phase,
    inner_product,
    norm,
    normalize,
    pdc_second_order,
    vacuum,
)
from fourphoton.optics import (
    Circuit,
    LinearElement,
    apply_circuit,
    apply_element,
    make_beam_splitter,
    make_half_wave_plate,
    make_pbs,
)
from fourphoton.postselect import (
    CoincidencePattern,
    QubitRegister,
    SchemeResult,
    project_coincidence,
    scheme_ghz,
    scheme_superposition,
)
from fourphoton.bell import (
    CorrelationTensor,
    PhaseSettings,
    analyzer_state,
    bell_verdict,
    closed_form_correlation_superposition,
    correlation,
    correlation_tensor,
    critical_visibility,
    lhv_sum,
    outcome_probability,
)

from fourphoton._version import __version__

__all__ = [
    "__version__",
    "CircuitParseError",
    "DegenerateTensorError",
    "EmptyPostselectionError",
    "FourPhotonError",
    "ModeError",
    "NumberSectorError",
    "UndeclaredModeError",
    "ZeroStateError",
    "FockState",
    "Mode",
    "OccupationVector",
    "apply_creation",
    "canonical_phase",
    "inner_product",
    "norm",
    "normalize",
    "pdc_second_order",
    "vacuum",
    "Circuit",
    "LinearElement",
    "apply_circuit",
    "apply_element",
    "make_beam_splitter",
    "make_half_wave_plate",
    "make_pbs",
    "CoincidencePattern",
    "QubitRegister",
    "SchemeResult",
    "project_coincidence",
    "scheme_ghz",
    "scheme_superposition",
    "CorrelationTensor",
    "PhaseSettings",
    "analyzer_state",
    "bell_verdict",
    "closed_form_correlation_superposition",
    "correlation",
    "correlation_tensor",
    "critical_visibility",
    "lhv_sum",
    "outcome_probability",
]
