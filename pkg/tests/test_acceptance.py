"""Exit criteria. Each test records one PASS/FAIL line, printed in the terminal summary."""

import json
import math
from pathlib import Path

import numpy as np

from conftest import ACCEPTANCE_RESULTS, random_state
from fourphoton.bell import (
    PhaseSettings,
    bell_verdict,
    closed_form_correlation_ghz,
    closed_form_correlation_superposition,
    correlation,
    correlation_tensor,
    critical_visibility,
    lhv_sum,
    outcome_probabilities,
)
from fourphoton.cli import main
from fourphoton.fock import norm
from fourphoton.optics import apply_circuit, make_beam_splitter, make_half_wave_plate, make_pbs
from fourphoton.oracle import scheme_coincidences
from fourphoton.postselect import (
    PAPER_PARTIES,
    QubitRegister,
    bitstrings,
    ghz_circuit,
    scheme_ghz,
    scheme_superposition,
    superposition_circuit,
)

SQ2, SQ10 = math.sqrt(2), math.sqrt(10)
PAPER = PhaseSettings.paper_default()
CIRCUITS = Path(__file__).parents[1] / "src" / "fourphoton" / "circuits"
GOLDEN = Path(__file__).parent / "golden"


def record(name, ok, detail=""):
    ACCEPTANCE_RESULTS.append((name, bool(ok), detail))
    print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
    assert ok, f"{name}: {detail}"


def register_error(reg, expected):
    return max(abs(reg.amplitude(b) - expected.get(b, 0)) for b in bitstrings(4))


def test_c1_scheme1_ghz_register():
    reg = scheme_ghz().register
    err = register_error(reg, {"HVVH": 1 / SQ2, "VHHV": 1 / SQ2})
    record("C1 scheme-1 register = (|HVVH>+|VHHV>)/sqrt2", err < 1e-12, f"max err {err:.2e}")


def test_c2_scheme2_superposition_register():
    reg = scheme_superposition().register
    expected = {"HVVH": 1 / SQ10, "VHHV": 1 / SQ10, "HHHH": -2 / SQ10, "VVVV": -2 / SQ10}
    err = register_error(reg, expected)
    record("C2 scheme-2 register = [(HVVH+VHHV) - 2(HHHH+VVVV)]/sqrt10", err < 1e-12, f"max err {err:.2e}")


def test_c3_success_probabilities_with_oracle():
    p1, p2 = scheme_ghz().success_probability, scheme_superposition().success_probability
    _, o1 = scheme_coincidences(with_hwp=False)
    _, o2 = scheme_coincidences(with_hwp=True)
    errs = [abs(p1 - 1 / 24), abs(p2 - 5 / 24), abs(o1 - p1), abs(o2 - p2)]
    record(
        "C3 success probabilities 1/24, 5/24, oracle-confirmed",
        max(errs) < 1e-12,
        f"p1={p1:.12f} p2={p2:.12f} oracle diff {max(errs[2:]):.1e}",
    )


def test_c4_correlation_closed_forms():
    rng = np.random.default_rng(4)
    sup, ghz = scheme_superposition().register, scheme_ghz().register
    e_sup = max(
        abs(correlation(sup, ph) - closed_form_correlation_superposition(ph))
        for ph in rng.uniform(0, 2 * math.pi, size=(1000, 4))
    )
    e_ghz = max(
        abs(correlation(ghz, ph) - closed_form_correlation_ghz(ph))
        for ph in rng.uniform(0, 2 * math.pi, size=(100, 4))
    )
    record(
        "C4 correlation matches closed forms",
        e_sup < 1e-10 and e_ghz < 1e-10,
        f"superposition {e_sup:.1e} (1000 tuples), GHZ {e_ghz:.1e} (100 tuples)",
    )


def test_c5_lhv_sum_and_magnitudes():
    t = correlation_tensor(scheme_superposition().register, PAPER)
    s = lhv_sum(t)
    mags = np.abs(t.q).ravel()
    big = int(np.sum(np.isclose(mags, 1 / (4 * SQ2), atol=1e-12, rtol=0)))
    small = int(np.sum(np.isclose(mags, 3 / (20 * SQ2), atol=1e-12, rtol=0)))
    ok = abs(s - 16 / (5 * SQ2)) < 1e-12 and big == 8 and small == 8
    record("C5 sum|q| = 16/(5 sqrt2), magnitudes 8x1/(4sqrt2) + 8x3/(20sqrt2)", ok, f"sum={s:.12f}")


def test_c6_bell_verdict():
    v = bell_verdict(correlation_tensor(scheme_superposition().register, PAPER))
    ok = v.violated and abs(v.margin - (8 * SQ2 / 5 - 1)) < 1e-12
    record("C6 Bell bound violated, margin 8sqrt2/5 - 1", ok, f"margin={v.margin:.9f}")


def test_c7_critical_visibility_and_noise_linearity():
    reg = scheme_superposition().register
    vc = critical_visibility(correlation_tensor(reg, PAPER))
    rng = np.random.default_rng(7)
    lin = 0.0
    for ph in rng.uniform(0, 2 * math.pi, size=(50, 4)):
        e = correlation(reg, ph)
        for v in (0.0, 0.5, 1.0):
            lin = max(lin, abs(correlation(reg, ph, visibility=v) - v * e))
    ok = abs(vc - 5 * SQ2 / 16) < 1e-12 and lin < 1e-12
    record("C7 critical visibility 5sqrt2/16, linear in V", ok, f"V_c={vc:.9f} linearity err {lin:.1e}")


def test_c8_property_suites():
    rng = np.random.default_rng(8)
    elements = [
        make_beam_splitter("a1", None, "d1", "D1", "+"),
        make_beam_splitter("a2", None, "d4", "D2", "-"),
        make_pbs("D1", "D2", "d3", "d2"),
        make_half_wave_plate("a2"),
    ]
    unit = max(e.unitarity_error() for e in elements)
    unit = max(unit, ghz_circuit().unitarity_error(), superposition_circuit().unitarity_error())

    norm_err, number_ok = 0.0, True
    for _ in range(100):
        s = random_state(rng, spatial=("a1", "a2"))
        for c in (ghz_circuit(), superposition_circuit()):
            out = apply_circuit(s, c)
            norm_err = max(norm_err, abs(norm(out) - norm(s)))
            number_ok &= out.photon_number == s.photon_number

    complete, round_trip = 0.0, 0.0
    for _ in range(100):
        v = rng.normal(size=16) + 1j * rng.normal(size=16)
        reg = QubitRegister(PAPER_PARTIES, v / np.linalg.norm(v))
        complete = max(complete, abs(outcome_probabilities(reg, rng.uniform(0, 7, 4)).sum() - 1))
        round_trip = max(round_trip, correlation_tensor(reg, PAPER).round_trip_error())

    hhhh = QubitRegister.from_dict(PAPER_PARTIES, {"HHHH": 1.0})
    product_sum = lhv_sum(correlation_tensor(hhhh, PAPER))

    ok = (
        unit < 1e-12 and norm_err < 1e-10 and number_ok and complete < 1e-12
        and round_trip < 1e-12 and product_sum <= 1
    )
    record(
        "C8 property suites",
        ok,
        f"unitarity {unit:.1e}, norm {norm_err:.1e}, completeness {complete:.1e}, "
        f"round-trip {round_trip:.1e}, |HHHH> sum {product_sum:.3g}",
    )


def test_c9_cli_golden_files(capsys):
    ok, notes = True, []
    for n, scheme in ((1, "ghz"), (2, "superposition")):
        runs = []
        for _ in range(2):
            code = main(["run", "--circuit", str(CIRCUITS / f"scheme{n}.circ"), "--bell-default"])
            runs.append(capsys.readouterr().out)
            ok &= code == 0
        main(["run", "--scheme", scheme, "--bell-default"])
        programmatic = json.loads(capsys.readouterr().out)
        from_file = json.loads(runs[0])
        programmatic.pop("scheme")
        from_file.pop("scheme")
        same = runs[0] == runs[1] == (GOLDEN / f"scheme{n}.json").read_text()
        ok &= same and programmatic == from_file
        notes.append(f"scheme{n}: byte-identical={same}")
    record("C9 CLI golden reports", ok, ", ".join(notes))
