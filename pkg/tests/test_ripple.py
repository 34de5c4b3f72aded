"""Triangle-ripple harmonics and AC conduction loss."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from flatwire.errors import ExtrapolationError, ValidationError
from flatwire.ripple import (
    ConverterPoint,
    SqrtFrequencyEsr,
    TabulatedEsr,
    ac_loss_simplified,
    ac_loss_spectrum,
    harmonic_current,
    harmonic_valid,
    inductance_from_ripple,
    odd_power_sum,
    reconstruct_current,
    resonant_frequency,
    ripple_current,
)

POINT = ConverterPoint(output_voltage=50.0, switching_frequency=100e3,
                       inductance=82.8e-6, esr_at_fs=0.425)


# ------------------------------------------------------------ closed forms

def test_resonant_frequency_value():
    assert resonant_frequency(82.8e-6, 100e-12) == pytest.approx(1.749e6, rel=1e-3)


def test_resonant_frequency_quarter_capacitance_doubles():
    f1 = resonant_frequency(82.8e-6, 100e-12)
    f2 = resonant_frequency(82.8e-6, 400e-12)
    assert f1 == pytest.approx(2 * f2, rel=1e-12)


def test_resonant_frequency_identity_case():
    # L*C = 1/(2*pi)^2 puts the resonance exactly at 1 Hz
    assert resonant_frequency(1.0, 1.0 / (2 * math.pi) ** 2) == pytest.approx(1.0)


def test_ripple_value():
    assert POINT.ripple_peak_to_peak == pytest.approx(3.02, abs=0.005)
    assert ripple_current(50.0, 82.8e-6, 100e3) == pytest.approx(3.0193, abs=1e-3)


def test_inductance_from_ripple_roundtrip():
    i_pp = ripple_current(50.0, 82.8e-6, 100e3)
    assert inductance_from_ripple(50.0, i_pp, 100e3) == pytest.approx(82.8e-6, rel=1e-14)


@given(st.floats(min_value=1.0, max_value=400.0),
       st.floats(min_value=1e-6, max_value=1e-3),
       st.floats(min_value=1e3, max_value=1e6))
def test_ripple_roundtrip_property(vo, ind, fs):
    i_pp = ripple_current(vo, ind, fs)
    assert inductance_from_ripple(vo, i_pp, fs) == pytest.approx(ind, rel=1e-12)


def test_doubling_fs_halves_ripple():
    assert ripple_current(50.0, 82.8e-6, 200e3) == pytest.approx(
        ripple_current(50.0, 82.8e-6, 100e3) / 2, rel=1e-14)


def test_duty_other_than_half_rejected():
    with pytest.raises(ValidationError):
        ConverterPoint(output_voltage=50.0, switching_frequency=100e3,
                       inductance=82.8e-6, duty=0.4)


# -------------------------------------------------------------- harmonics

def test_fundamental_value_and_triangle_oracle():
    i1 = harmonic_current(1, POINT)
    assert i1 == pytest.approx(1.224, abs=2e-3)
    # triangle-wave fundamental: (8/pi^2) * (I_pp/2)
    i_pp = POINT.ripple_peak_to_peak
    assert i1 == pytest.approx(8 / math.pi**2 * i_pp / 2, rel=1e-12)


def test_harmonic_one_over_h_squared():
    assert harmonic_current(3, POINT) == pytest.approx(harmonic_current(1, POINT) / 9,
                                                       rel=1e-14)


def test_even_harmonics_vanish():
    assert harmonic_current(2, POINT) == 0.0
    assert harmonic_current(10, POINT) == 0.0


def test_harmonic_index_validated():
    with pytest.raises(ValueError):
        harmonic_current(0, POINT)
    with pytest.raises(ValueError):
        harmonic_current(1.5, POINT)


def test_validity_against_resonance():
    point = ConverterPoint(output_voltage=50.0, switching_frequency=100e3,
                           inductance=82.8e-6, esr_at_fs=0.425,
                           parasitic_capacitance=100e-12)
    f_r = point.resonant_frequency
    assert harmonic_valid(1, point)
    bad_h = int(math.ceil(f_r / 100e3))
    assert not harmonic_valid(bad_h + 2, point)
    result = ac_loss_spectrum(point, SqrtFrequencyEsr(0.425, 100e3), h_max=25)
    assert result.warnings
    assert not all(result.spectrum.valid)


# ------------------------------------------------------------ loss spectrum

def test_truncation_constant():
    s = odd_power_sum(25, 3.5)
    assert abs(s - 1.0270) <= 5e-4
    assert f"{s:.4g}" == "1.027"


def test_truncation_tail_below_point1_percent():
    s25 = odd_power_sum(25, 3.5)
    s_inf = odd_power_sum(20001, 3.5)  # converged far past machine relevance
    assert s_inf > s25
    assert (s_inf - s25) / s_inf < 1e-3


def test_sqrt_rule_spectrum_equals_closed_form():
    esr = SqrtFrequencyEsr(0.425, 100e3)
    result = ac_loss_spectrum(POINT, esr, h_max=25)
    coefficient = 2 * 0.425 * 50.0**2 / (math.pi**4 * 82.8e-6**2 * 100e3**2)
    assert result.p_ac == pytest.approx(coefficient * odd_power_sum(25, 3.5), rel=1e-12)


def test_simplified_matches_spectrum_to_4_digits():
    esr = SqrtFrequencyEsr(0.425, 100e3)
    spectrum = ac_loss_spectrum(POINT, esr, h_max=25).p_ac
    simplified = ac_loss_simplified(POINT, h_max=25)
    assert simplified == pytest.approx(spectrum, rel=1e-12)


def test_simplified_reference_value():
    # 1.027 * 8 * 0.425 * 3.02^2 / pi^4 with I_pp from the operating point
    assert ac_loss_simplified(POINT) == pytest.approx(0.327, abs=1.5e-3)


def test_simplified_quadratic_in_ripple():
    double_ripple = ConverterPoint(output_voltage=100.0, switching_frequency=100e3,
                                   inductance=82.8e-6, esr_at_fs=0.425)
    assert ac_loss_simplified(double_ripple) == pytest.approx(
        4 * ac_loss_simplified(POINT), rel=1e-12)


def test_single_term_sum():
    esr = SqrtFrequencyEsr(0.425, 100e3)
    result = ac_loss_spectrum(POINT, esr, h_max=1)
    assert result.p_ac == pytest.approx(0.5 * 0.425 * harmonic_current(1, POINT) ** 2,
                                        rel=1e-12)


def test_flat_esr_approaches_triangle_rms():
    # with frequency-independent ESR the loss tends to Rac * Ipp^2/12,
    # the mean square of the ideal triangle; h_max = 25 lands within 0.5 %
    flat = TabulatedEsr(frequencies=(1.0, 1e9), resistances=(0.425, 0.425))
    p25 = ac_loss_spectrum(POINT, flat, h_max=25).p_ac
    i_pp = POINT.ripple_peak_to_peak
    exact = 0.425 * i_pp**2 / 12
    assert p25 == pytest.approx(exact, rel=5e-3)
    # time-domain oracle: RMS of the reconstructed waveform
    t = np.linspace(0.0, 1 / 100e3, 20001)
    wave = reconstruct_current(POINT, 25, t)
    p_time = 0.425 * float(np.mean(wave[:-1] ** 2))
    assert p25 == pytest.approx(p_time, rel=5e-3)


def test_tabulated_esr_no_extrapolation():
    table = TabulatedEsr(frequencies=(100e3, 1e6), resistances=(0.4, 1.3))
    with pytest.raises(ExtrapolationError):
        ac_loss_spectrum(POINT, table, h_max=25)  # 25*fs = 2.5 MHz > 1 MHz


def test_spectrum_strictly_decreasing_odd_only():
    result = ac_loss_spectrum(POINT, SqrtFrequencyEsr(0.425, 100e3), h_max=25)
    assert all(h % 2 == 1 for h in result.spectrum.harmonics)
    currents = result.spectrum.currents
    assert all(b < a for a, b in zip(currents, currents[1:]))


def test_sqrt_rule_vs_solved_esr_table(proto_response_10k_200k):
    # the sqrt(f) scaling is an approximation of the solved Rac(f); on the
    # reference design the two loss totals agree within 15 % with the
    # switching frequency at 10 kHz and harmonics spanning 10-190 kHz
    response = proto_response_10k_200k
    fs = 10e3
    idx = response.frequencies.index(fs)
    point = ConverterPoint(output_voltage=50.0, switching_frequency=fs,
                           inductance=abs(response.inductance[idx]),
                           esr_at_fs=response.rac[idx])
    table = TabulatedEsr(frequencies=response.frequencies, resistances=response.rac)
    p_table = ac_loss_spectrum(point, table, h_max=19).p_ac
    p_sqrt = ac_loss_spectrum(point, SqrtFrequencyEsr(response.rac[idx], fs),
                              h_max=19).p_ac
    assert abs(p_sqrt - p_table) / p_table < 0.15


# ------------------------------------------------------- waveform identity

def test_reconstruction_peak_to_peak():
    t = np.linspace(0.0, 1 / 100e3, 40001)
    i_pp = POINT.ripple_peak_to_peak

    # At h_max = 25 the partial Fourier sum of the triangle reaches only
    # sum(odd h<=25) h^-2 / (pi^2/8) = 98.442 % of the true amplitude.
    wave25 = reconstruct_current(POINT, 25, t)
    p2p25 = float(wave25.max() - wave25.min())
    partial = sum(h**-2 for h in range(1, 26, 2)) / (math.pi**2 / 8)
    assert p2p25 / i_pp == pytest.approx(partial, abs=1e-6)
    assert p2p25 / i_pp == pytest.approx(0.98442, abs=1e-4)

    # the 1 % reconstruction bound holds once the tail is small enough
    wave101 = reconstruct_current(POINT, 101, t)
    p2p101 = float(wave101.max() - wave101.min())
    assert abs(p2p101 - i_pp) / i_pp < 0.01
