"""Converter-side ripple current and AC conduction loss.

A buck-type converter at 50 % duty impresses a square-wave voltage of
amplitude V_o on the inductor, so the current is a triangle wave. Its
odd-harmonic amplitudes are I_h = 2*V_o/((pi*h)^2 * L * f_s); even
harmonics vanish by symmetry. The total AC conduction loss is
P = (1/2) * sum_h Rac(h*f_s) * I_h^2 with Rac either tabulated or scaled
as sqrt(f) from its value at the switching frequency. The model is
derived at 50 % duty (where ripple is maximum) and other duty cycles are
rejected rather than approximated.

All currents are peak amplitudes of their harmonic phasors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ExtrapolationError, ValidationError


@dataclass(frozen=True)
class ConverterPoint:
    """One converter operating point.

    output_voltage        V_o [V]
    switching_frequency   f_s [Hz]
    inductance            L at f_s [H]
    esr_at_fs             winding ESR at f_s [ohm] (optional; needed for
                          the sqrt-f loss rule)
    parasitic_capacitance C_p [F] (optional; enables the harmonic
                          validity check against the self-resonance)
    duty                  fixed at 0.5, the model's validity domain
    """

    output_voltage: float
    switching_frequency: float
    inductance: float
    esr_at_fs: float | None = None
    parasitic_capacitance: float | None = None
    duty: float = 0.5

    def __post_init__(self):
        violations = []
        if not self.output_voltage > 0:
            violations.append(("ripple.output_voltage", "must be > 0"))
        if not self.switching_frequency > 0:
            violations.append(("ripple.switching_frequency", "must be > 0"))
        if not self.inductance > 0:
            violations.append(("ripple.inductance", "must be > 0"))
        if self.esr_at_fs is not None and not self.esr_at_fs > 0:
            violations.append(("ripple.esr_at_fs", "must be > 0"))
        if self.parasitic_capacitance is not None and not self.parasitic_capacitance > 0:
            violations.append(("ripple.parasitic_capacitance", "must be > 0"))
        if abs(self.duty - 0.5) > 1e-12:
            violations.append(("ripple.duty",
                               "the harmonic model is only valid at 50 % duty"))
        if violations:
            raise ValidationError(violations)

    @property
    def ripple_peak_to_peak(self) -> float:
        return ripple_current(self.output_voltage, self.inductance,
                              self.switching_frequency)

    @property
    def resonant_frequency(self) -> float | None:
        if self.parasitic_capacitance is None:
            return None
        return resonant_frequency(self.inductance, self.parasitic_capacitance)


def resonant_frequency(inductance: float, capacitance: float) -> float:
    """First self-resonance f_r = 1/(2*pi*sqrt(L*C))."""
    if inductance <= 0 or capacitance <= 0:
        raise ValueError("inductance and capacitance must be > 0")
    return 1.0 / (2.0 * math.pi * math.sqrt(inductance * capacitance))


def inductance_from_ripple(output_voltage: float, ripple_pp: float,
                           switching_frequency: float) -> float:
    """L = V_o / (2 * I_pp * f_s) at 50 % duty."""
    if min(output_voltage, ripple_pp, switching_frequency) <= 0:
        raise ValueError("all inputs must be > 0")
    return output_voltage / (2.0 * ripple_pp * switching_frequency)


def ripple_current(output_voltage: float, inductance: float,
                   switching_frequency: float) -> float:
    """Peak-to-peak ripple I_pp = V_o / (2 * L * f_s), the inverse of
    inductance_from_ripple."""
    if min(output_voltage, inductance, switching_frequency) <= 0:
        raise ValueError("all inputs must be > 0")
    return output_voltage / (2.0 * inductance * switching_frequency)


def harmonic_current(h: int, point: ConverterPoint) -> float:
    """Peak amplitude of harmonic h: 2*V_o/((pi*h)^2*L*f_s) for odd h,
    zero for even h (square-wave voltage symmetry)."""
    if not (isinstance(h, (int, np.integer)) and h >= 1):
        raise ValueError(f"harmonic index must be a positive integer, got {h!r}")
    if h % 2 == 0:
        return 0.0
    return 2.0 * point.output_voltage / (
        (math.pi * h) ** 2 * point.inductance * point.switching_frequency
    )


def harmonic_valid(h: int, point: ConverterPoint) -> bool:
    """The harmonic series is trusted only below the self-resonance:
    h*f_s < f_r. Always true when no parasitic capacitance is given."""
    f_r = point.resonant_frequency
    return f_r is None or h * point.switching_frequency < f_r


@dataclass(frozen=True)
class HarmonicSpectrum:
    """Odd harmonics only; amplitudes strictly decrease with h."""

    harmonics: tuple[int, ...]
    currents: tuple[float, ...]
    losses: tuple[float, ...]
    valid: tuple[bool, ...]


@dataclass(frozen=True)
class SqrtFrequencyEsr:
    """Rac(f) = Rac(f_s) * sqrt(f/f_s), the flat-wire scaling rule."""

    esr_at_fs: float
    switching_frequency: float

    def __call__(self, frequency: float) -> float:
        return self.esr_at_fs * math.sqrt(frequency / self.switching_frequency)


@dataclass(frozen=True)
class TabulatedEsr:
    """Linear interpolation of a measured/solved Rac(f) table; no silent
    extrapolation."""

    frequencies: tuple[float, ...]
    resistances: tuple[float, ...]

    def __post_init__(self):
        if len(self.frequencies) != len(self.resistances) or len(self.frequencies) < 2:
            raise ValueError("need at least two (frequency, resistance) samples")
        if any(b <= a for a, b in zip(self.frequencies, self.frequencies[1:])):
            raise ValueError("frequencies must be strictly increasing")

    def __call__(self, frequency: float) -> float:
        lo, hi = self.frequencies[0], self.frequencies[-1]
        if frequency < lo - 1e-12 * hi or frequency > hi * (1 + 1e-12):
            raise ExtrapolationError(
                f"Rac requested at {frequency:.6g} Hz outside the tabulated "
                f"range [{lo:.6g}, {hi:.6g}] Hz"
            )
        return float(np.interp(frequency, self.frequencies, self.resistances))


EsrModel = Callable[[float], float]


@dataclass(frozen=True)
class SpectrumResult:
    spectrum: HarmonicSpectrum
    p_ac: float
    warnings: tuple[str, ...]


def ac_loss_spectrum(point: ConverterPoint, esr_model: EsrModel,
                     h_max: int = 25) -> SpectrumResult:
    """P_ac = (1/2) * sum over odd h <= h_max of Rac(h*f_s) * I_h^2.

    Harmonics at or above the self-resonance (when C_p is known) are still
    summed but flagged, and a warning is attached to the result.
    """
    if h_max < 1:
        raise ValueError("h_max must be >= 1")
    harmonics = tuple(range(1, h_max + 1, 2))
    currents = tuple(harmonic_current(h, point) for h in harmonics)
    resistances = [esr_model(h * point.switching_frequency) for h in harmonics]
    losses = tuple(0.5 * r * i**2 for r, i in zip(resistances, currents))
    valid = tuple(harmonic_valid(h, point) for h in harmonics)
    warnings = []
    if not all(valid):
        first_bad = harmonics[valid.index(False)]
        warnings.append(
            f"harmonics from h={first_bad} lie at or above the self-resonance "
            f"({point.resonant_frequency:.4g} Hz); amplitudes there are not trusted"
        )
    return SpectrumResult(
        spectrum=HarmonicSpectrum(harmonics=harmonics, currents=currents,
                                  losses=losses, valid=valid),
        p_ac=float(sum(losses)),
        warnings=tuple(warnings),
    )


def odd_power_sum(h_max: int, exponent: float = 3.5) -> float:
    """sum of h^(-exponent) over odd h <= h_max; with exponent 3.5 and
    h_max 25 this is the 1.027 truncation constant of the sqrt-f rule."""
    return float(sum(h ** (-exponent) for h in range(1, h_max + 1, 2)))


def ac_loss_simplified(point: ConverterPoint, h_max: int = 25) -> float:
    """Closed-form sqrt-f loss: the 25-harmonic truncation collapses to
    S * 2*Rac*V_o^2/(pi^4*L^2*f_s^2) = S * 8*Rac*I_pp^2/pi^4 with
    S = 1.027. Both printed forms are evaluated and must agree."""
    if point.esr_at_fs is None:
        raise ValueError("ac_loss_simplified needs esr_at_fs on the operating point")
    s = odd_power_sum(h_max)
    v_form = s * (2.0 * point.esr_at_fs * point.output_voltage**2
                  / (math.pi**4 * point.inductance**2 * point.switching_frequency**2))
    i_pp = point.ripple_peak_to_peak
    i_form = s * (8.0 * point.esr_at_fs * i_pp**2 / math.pi**4)
    if not math.isclose(v_form, i_form, rel_tol=1e-12):
        raise AssertionError(f"algebraically identical forms diverged: {v_form!r} vs {i_form!r}")
    return v_form


def reconstruct_current(point: ConverterPoint, h_max: int,
                        times: Sequence[float]) -> np.ndarray:
    """Ripple waveform from the truncated harmonic series.

    i(t) = sum over odd h of (-1)^((h-1)/2) * I_h * sin(2*pi*h*f_s*t);
    the signs place the triangle apex at t = T/4.
    """
    t = np.asarray(times, dtype=float)
    result = np.zeros_like(t)
    for h in range(1, h_max + 1, 2):
        sign = -1.0 if (h - 1) // 2 % 2 else 1.0
        result += sign * harmonic_current(h, point) * np.sin(
            2.0 * math.pi * h * point.switching_frequency * t
        )
    return result
