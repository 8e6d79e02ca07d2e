import json
import math
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from fourphoton.circuitfile import bundled_circuit, parse_circuit_file
from fourphoton.cli import main, parse_angle, parse_phases
from fourphoton.errors import CircuitParseError, ModeError, UndeclaredModeError
from fourphoton.fock import states_close
from fourphoton.optics import apply_circuit
from fourphoton.postselect import register_close, run_pipeline, scheme_ghz, scheme_superposition
from fourphoton.report import REPORT_SCHEMA, Report

GOLDEN = Path(__file__).parent / "golden"
CIRCUITS = Path(__file__).parents[1] / "src" / "fourphoton" / "circuits"


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# circuit files


@pytest.mark.parametrize(
    "name, scheme", [("scheme1.circ", scheme_ghz), ("scheme2.circ", scheme_superposition)]
)
def test_bundled_circuit_matches_programmatic(name, scheme):
    circuit, source, pattern = parse_circuit_file(bundled_circuit(name))
    res = run_pipeline(source.build(), circuit, pattern)
    ref = scheme()
    assert register_close(res.register, ref.register, 1e-15)
    assert res.success_probability == ref.success_probability
    assert states_close(res.raw_state, ref.raw_state, 1e-15)
    assert pattern.parties == ("d1", "d2", "d3", "d4")


def test_duplicate_bs_output():
    text = "modes a1 a2 d1\nsource pdc2 a1 a2\nbs a1 -> d1 d1 +\n"
    with pytest.raises(ModeError) as info:
        parse_circuit_file(text)
    assert info.value.line == 3


def test_empty_file():
    with pytest.raises(CircuitParseError, match="no source declared"):
        parse_circuit_file("")
    with pytest.raises(CircuitParseError, match="no source declared"):
        parse_circuit_file("# only a comment\n\n")


def test_undeclared_mode_has_location():
    text = "modes a1 a2 d1 D1\nsource pdc2 a1 a2\nbs a1 -> d1 X1 +\n"
    with pytest.raises(UndeclaredModeError) as info:
        parse_circuit_file(text)
    assert (info.value.line, info.value.column) == (3, 13)
    assert "X1" in str(info.value)


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("modes a1 a2\nsource pdc3 a1 a2\n", 2, 8),
        ("modes a1 a2 b c\nsource pdc2 a1 a2\nbs a1 => b c +\n", 3, 7),
        ("modes a1 a2 b c\nsource pdc2 a1 a2\nbs a1 -> b c *\n", 3, 14),
        ("modes a1 a2\nsource pdc2 a1 a2\nmirror a1\n", 3, 1),
        ("modes a1 a2\nsource pdc2 a1\n", 2, 15),
        ("modes a1 a1\n", 1, 10),
    ],
)
def test_syntax_errors_carry_line_and_column(text, line, col):
    with pytest.raises(CircuitParseError) as info:
        parse_circuit_file(text)
    assert (info.value.line, info.value.column) == (line, col)


def test_comments_and_blank_lines_ignored():
    text = bundled_circuit("scheme1.circ").replace("\n", "   # trailing\n\n")
    circuit, _, _ = parse_circuit_file(text)
    assert len(circuit.elements) == 3


# angle parsing


@pytest.mark.parametrize(
    "text, units, expected",
    [
        ("0", "rad", 0.0),
        ("1.5", "rad", 1.5),
        ("90", "deg", math.pi / 2),
        ("-45deg", "rad", -math.pi / 4),
        ("pi/2", "rad", math.pi / 2),
        ("-pi/4", "rad", -math.pi / 4),
        ("3pi/4", "rad", 3 * math.pi / 4),
        ("0.5rad", "deg", 0.5),
    ],
)
def test_parse_angle(text, units, expected):
    assert parse_angle(text, units) == pytest.approx(expected, abs=1e-15)


def test_parse_angle_rejects_garbage():
    for bad in ("", "deg", "1..2", "pi pi"):
        with pytest.raises(ValueError):
            parse_angle(bad)


def test_parse_phases():
    s = parse_phases("0,90;-45,45;-45,45;-45,45", "deg")
    assert s.n_parties == 4
    with pytest.raises(ValueError):
        parse_phases("0;1,2")


# end-to-end


def test_run_superposition_bell_default(capsys):
    code, out, _ = run_cli(capsys, "run", "--scheme", "superposition", "--bell-default")
    assert code == 0
    d = json.loads(out)
    assert d["lhv_sum"] == pytest.approx(2.2627417, abs=1e-7)
    assert d["critical_visibility"] == pytest.approx(0.4419417, abs=1e-7)
    assert d["violated"] is True
    assert d["margin"] == pytest.approx(1.2627417, abs=1e-7)
    jsonschema.validate(d, REPORT_SCHEMA)


def test_run_ghz(capsys):
    code, out, _ = run_cli(capsys, "run", "--scheme", "ghz")
    d = json.loads(out)
    assert code == 0
    assert d["register"] == {"HVVH": [0.707106781, 0.0], "VHHV": [0.707106781, 0.0]}
    assert d["probability"] == pytest.approx(0.0416667, abs=1e-7)
    assert d["q_tensor"] is None and d["violated"] is None
    jsonschema.validate(d, REPORT_SCHEMA)


def test_degrees_path_equals_default_settings(capsys):
    _, deg, _ = run_cli(
        capsys, "run", "--circuit", str(CIRCUITS / "scheme2.circ"),
        "--phases", "0,90;-45,45;-45,45;-45,45", "--units", "deg",
    )
    _, default, _ = run_cli(capsys, "run", "--circuit", str(CIRCUITS / "scheme2.circ"), "--bell-default")
    assert deg == default


@pytest.mark.parametrize("n", [1, 2])
def test_golden_reports(capsys, n):
    outputs = []
    for _ in range(2):
        code, out, _ = run_cli(capsys, "run", "--circuit", str(CIRCUITS / f"scheme{n}.circ"), "--bell-default")
        assert code == 0
        outputs.append(out)
    assert outputs[0] == outputs[1]
    assert outputs[0] == (GOLDEN / f"scheme{n}.json").read_text()


@pytest.mark.parametrize("n, scheme", [(1, "ghz"), (2, "superposition")])
def test_golden_matches_programmatic_pipeline(capsys, n, scheme):
    _, out, _ = run_cli(capsys, "run", "--scheme", scheme, "--bell-default")
    programmatic = json.loads(out)
    golden = json.loads((GOLDEN / f"scheme{n}.json").read_text())
    assert golden.pop("scheme") == f"scheme{n}"
    assert programmatic.pop("scheme") == scheme
    assert golden == programmatic


def test_golden_without_bell(capsys):
    _, out, _ = run_cli(capsys, "run", "--circuit", str(CIRCUITS / "scheme1.circ"))
    assert out == (GOLDEN / "scheme1_nobell.json").read_text()


def test_report_round_trip():
    for f in ("scheme1.json", "scheme2.json", "scheme1_nobell.json"):
        text = (GOLDEN / f).read_text()
        assert Report.from_json(text).to_json() == text


def test_verify_mode(capsys):
    for args in (("--scheme", "ghz"), ("--circuit", str(CIRCUITS / "scheme2.circ"))):
        code, _, err = run_cli(capsys, "run", *args, "--bell-default", "--verify", "-v")
        assert code == 0
        assert "checks passed" in err


def test_text_output(capsys):
    code, out, _ = run_cli(capsys, "run", "--scheme", "superposition", "--bell-default", "--output", "text")
    assert code == 0
    assert "lhv_sum: 2.2627417" in out
    assert "HHHH: -0.632455532" in out


def test_exit_code_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.circ"
    bad.write_text("modes a1 a2 d1\nsource pdc2 a1 a2\nbs a1 -> d1 d1 +\n")
    code, out, err = run_cli(capsys, "run", "--circuit", str(bad))
    assert code == 2 and out == ""
    assert "line 3" in err
    empty = tmp_path / "empty.circ"
    empty.write_text("")
    assert run_cli(capsys, "run", "--circuit", str(empty))[0] == 2
    assert run_cli(capsys, "run", "--scheme", "ghz", "--phases", "0,1;2")[0] == 2


def test_exit_code_empty_postselection(capsys, tmp_path):
    # no optics: the source never puts one photon in each of a1, a2
    f = tmp_path / "none.circ"
    f.write_text("modes a1 a2\nsource pdc2 a1 a2\npostselect a1 a2\n")
    code, out, err = run_cli(capsys, "run", "--circuit", str(f))
    assert code == 3 and out == ""
    assert "post-selection" in err


def test_other_postselection_patterns(capsys, tmp_path):
    # coincidences on the four BS outputs, no PBS
    f = tmp_path / "bs.circ"
    f.write_text(
        "modes a1 a2 d1 D1 d4 D2\nsource pdc2 a1 a2\nbs a1 -> d1 D1 +\nbs a2 -> d4 D2 -\n"
        "postselect d1 D1 d4 D2\n"
    )
    code, out, _ = run_cli(capsys, "run", "--circuit", str(f), "--verify")
    assert code == 0
    assert json.loads(out)["probability"] > 0


def test_exit_code_invariant_failure(capsys, monkeypatch):
    monkeypatch.setattr("fourphoton.cli.oracle.coincidence_amplitudes", lambda poly, parties: {})
    code, out, err = run_cli(capsys, "run", "--scheme", "ghz", "--verify")
    assert code == 4 and out == ""
    assert "invariant failure" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "fourphoton", "run", "--scheme", "ghz"],
        capture_output=True, text=True, check=True,
    )
    assert json.loads(proc.stdout)["scheme"] == "ghz"


def test_source_state_through_circuit_file_matches_library():
    circuit, source, _ = parse_circuit_file(bundled_circuit("scheme2.circ"))
    assert states_close(apply_circuit(source.build(), circuit), scheme_superposition().raw_state, 1e-15)
