import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polariton_nhqc.pulses import (
    Envelope,
    OutOfRangeError,
    compile_single_loop,
    compile_single_qubit_dct,
    compile_two_qubit,
    dct_phase_table,
    drive_value,
    format_table,
    parse_table,
    phases,
    segment_areas,
    two_qubit_amplitudes,
)

TWO_PI = 2 * np.pi
OMEGA0 = TWO_PI * 20e6
WM, WP = TWO_PI * 7.6e9, TWO_PI * 8.4e9


@pytest.mark.parametrize("kind", ["square", "sin2"])
@settings(max_examples=20, deadline=None)
@given(half_area=st.floats(0.1, 4.0))
def test_half_area_is_exact(kind, half_area):
    env = Envelope.for_half_area(kind, OMEGA0, half_area)
    assert np.isclose(env.area / 2, half_area)


def test_envelope_validation():
    with pytest.raises(ValueError):
        Envelope("triangle", OMEGA0, 1e-8)
    with pytest.raises(ValueError):
        Envelope("square", -1.0, 1e-8)


def test_dct_sequence_structure():
    seq = compile_single_qubit_dct(np.pi, np.pi / 2, 0.0, "square", OMEGA0, WM, WP)
    assert len(seq.segments) == 6
    # total half area 2 pi, i.e. two pi-loops of the bright state
    assert np.isclose(seq.total_half_area, 2 * np.pi)
    assert np.isclose(seq.duration, 4 * np.pi / OMEGA0)
    assert np.allclose(segment_areas(seq), [s.half_area for s in seq.segments], rtol=1e-9)
    # phase differences phi1 - phi2 are the gate's phi throughout
    assert all(np.isclose(p1 - p2, 0.0) for p1, p2 in phases(seq))


def test_single_loop_phases():
    gamma, phi = 0.7, 0.3
    seq = compile_single_loop(gamma, 0.4, phi, "sin2", OMEGA0, WM, WP)
    (a1, b1), (a2, b2) = phases(seq)
    assert np.isclose(a1, phi + np.pi) and np.isclose(b1, np.pi)
    assert np.isclose(a2, phi + gamma) and np.isclose(b2, gamma)
    assert np.allclose(segment_areas(seq), np.pi / 2, rtol=1e-9)


def test_dct_table_layout():
    rows = dct_phase_table(1.0, 0.5)
    assert [r[0] for r in rows] == pytest.approx([np.pi / 4, np.pi / 2, np.pi / 4] * 2)


def test_drive_value_and_range():
    seq = compile_single_loop(np.pi, np.pi / 2, 0.0, "square", OMEGA0, WM, WP)
    t = np.linspace(0, seq.duration, 11)
    f = drive_value(seq, t)
    assert np.all(np.abs(f) <= OMEGA0 * np.sqrt(2) + 1e-6)
    assert isinstance(drive_value(seq, 0.0), float)
    with pytest.raises(OutOfRangeError):
        drive_value(seq, seq.duration * 1.01)
    with pytest.raises(OutOfRangeError):
        drive_value(seq, -1e-12)


def test_table_round_trip():
    seq = compile_single_qubit_dct(np.pi, np.pi / 4, 0.2, "sin2", OMEGA0, WM, WP)
    back = parse_table(format_table(seq))
    assert len(back.segments) == len(seq.segments)
    for a, b in zip(seq.segments, back.segments):
        assert np.isclose(a.duration, b.duration, rtol=1e-12)
        assert np.isclose(a.half_area, b.half_area, rtol=1e-12)
        assert (a.phi1, a.phi2, a.theta) == pytest.approx((b.phi1, b.phi2, b.theta))
        assert np.isclose(a.omega1, b.omega1, rtol=1e-12)


def test_strong_drive_warns():
    with pytest.warns(UserWarning):
        compile_single_loop(np.pi, 0.5, 0.0, "square", OMEGA0, WM, WP, coupling=OMEGA0)


def test_two_qubit_sequence():
    seq = compile_two_qubit(np.pi, np.pi / 2, 0.0, "square", TWO_PI * 5e6 * np.sqrt(2), TWO_PI * 3e9, TWO_PI * 2.7e9)
    assert len(seq.segments) == 2
    jc, vt = two_qubit_amplitudes(1.0, 1.0)
    assert np.isclose(jc, np.sqrt(2)) and np.isclose(vt, np.pi / 2)
