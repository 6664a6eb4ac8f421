import math

import pytest

from phonon_gw.scenario import ScenarioError, Sweep, load_scenario, parse_scenario

BASE = """
[cavity]
length_m = 1e-6
sound_speed_m_per_s = 1e-2
max_mode = 24
atom_mass_kg = 1.44316e-25

[wave]
amplitude = 0
duration_s = 1000
resonant_pair = 1, 2

[state]
mode_pair = 2, 1
squeezing_r = 1.5

[estimation]
num_probes = 1e6
qfi_method = closed_derived
figure_of_merit = sqrt_omega
"""


def test_parse_defaults():
    scn = parse_scenario(BASE, "x.ini")
    assert scn.mode_pair == (2, 1)
    assert scn.frequency_unit == "angular"
    assert scn.d_eps == 1e-5
    assert scn.output_format == "csv" and scn.output_path is None
    assert scn.drive_frequency() == pytest.approx(2 * math.pi * 15000, rel=1e-15)
    inp = scn.estimation_input()
    assert inp.probes == 1e6 and inp.squeezing == 1.5


def test_frequency_hz_route():
    scn = parse_scenario(BASE.replace("resonant_pair = 1, 2", "frequency_hz = 15000"))
    assert scn.drive_frequency() == pytest.approx(2 * math.pi * 15000, rel=1e-15)


@pytest.mark.parametrize(
    "old,new,line,needle",
    [
        ("squeezing_r = 1.5", "squeezing_r = lots", 15, "expected a number"),
        ("max_mode = 24\n", "", 2, "missing required field 'max_mode'"),
        ("resonant_pair = 1, 2", "resonant_pair = 1, 3", 11, "even"),
        ("duration_s = 1000", "duration_s = 1000\nfrequency_hz = 3", 8, "exactly one"),
        ("mode_pair = 2, 1", "mode_pair = 2, 30", 14, "max_mode"),
        ("qfi_method = closed_derived", "qfi_method = guess", 19, "must be one of"),
        ("length_m = 1e-6", "length_m = 1e-6\ncolour = red", 4, "unknown field"),
    ],
)
def test_parse_diagnostics(old, new, line, needle):
    with pytest.raises(ScenarioError) as info:
        parse_scenario(BASE.replace(old, new), "bad.ini")
    msg = str(info.value)
    assert msg.startswith(f"bad.ini:{line}:")
    assert needle in msg


def test_unknown_section():
    with pytest.raises(ScenarioError, match="unknown section"):
        parse_scenario(BASE + "\n[extra]\nx = 1\n")


def test_sweep_bounds_ordered():
    text = BASE + "\n[sweep]\nvariable = duration_s\nfrom = 10\nto = 5\npoints = 3\nscale = linear\n"
    with pytest.raises(ScenarioError, match="ordered"):
        parse_scenario(text)


def test_sweep2_needs_sweep():
    text = BASE + "\n[sweep2]\nvariable = duration_s\nfrom = 1\nto = 5\npoints = 3\nscale = linear\n"
    with pytest.raises(ScenarioError, match="needs a \\[sweep\\]"):
        parse_scenario(text)


def test_log_sweep_endpoints_exact():
    vals = Sweep("duration_s", 100.0, 2000.0, 5, "log").values()
    assert vals[0] == 100.0 and vals[-1] == 2000.0
    assert all(b / a == pytest.approx(vals[1] / vals[0]) for a, b in zip(vals, vals[1:]))


def test_with_value_is_a_copy():
    scn = parse_scenario(BASE)
    other = scn.with_value("squeezing_r", 3.0)
    assert other.squeezing_r == 3.0 and scn.squeezing_r == 1.5


def test_load_missing_file(tmp_path):
    with pytest.raises(ScenarioError, match="cannot read"):
        load_scenario(tmp_path / "nope.ini")


def test_shipped_scenarios_parse():
    from pathlib import Path

    files = sorted((Path(__file__).parents[1] / "scenarios").glob("*.ini"))
    assert len(files) >= 7
    for f in files:
        load_scenario(f)
