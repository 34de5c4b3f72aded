"""DC resistance of the flat-wire coil.

Three closed forms with increasing approximation, plus an adaptive
quadrature oracle. All treat the coil as conductances in parallel across
the radial depth: dG = sigma * t dr / l(r), where l(r) is the length of
the current path at radius r.

helical  l(r) = 2*pi*N*sqrt(r^2 + (h/(2*pi*N))^2), the true helix length;
         exact for any turn count.
planar   l(r) = 2*pi*N*r, discrete circular turns; the helical form
         reduces to this when the pitch term h/(2*pi*N) is negligible.
average  l(r) = 2*pi*N*R_av with R_av the mid-depth radius; the familiar
         "mean length turn over area" first estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .design import CoilSpec
from .errors import GeometryError, NumericalError

LENGTH_MODELS = ("helical", "planar", "average")

#: Linear temperature coefficient of copper resistivity [1/K].
COPPER_TEMP_COEFF = 0.00393


@dataclass(frozen=True)
class DcrResult:
    """resistance [ohm], the length model used, and the equivalent length
    [m] of a uniform bar with the same resistance and cross-section."""

    resistance: float
    model: str
    length: float


def _check(coil: CoilSpec) -> None:
    if coil.radial_depth <= 0:
        raise GeometryError(
            "conductor radial depth must be > 0; the conductance integral is empty"
        )


def _result(coil: CoilSpec, resistance: float, model: str) -> DcrResult:
    length = resistance * coil.conductivity * coil.thickness * coil.radial_depth
    return DcrResult(resistance=resistance, model=model, length=length)


def _pitch_radius(coil: CoilSpec) -> float:
    # Radius below which the helix pitch dominates the path length.
    return coil.height / (2.0 * math.pi * coil.turns)


def dcr_helical(coil: CoilSpec) -> DcrResult:
    """Exact helix-length DC resistance.

    Integrating dG = sigma*t dr / (2*pi*N*sqrt(r^2 + c^2)) with
    c = h/(2*pi*N) gives R = 2*pi*N / (sigma*t*ln[(b + sqrt(b^2+c^2)) /
    (a + sqrt(a^2+c^2))]), a/b the inner/outer radii.
    """
    _check(coil)
    a = coil.inner_radius
    b = coil.outer_radius
    c = _pitch_radius(coil)
    log_term = math.log((b + math.hypot(b, c)) / (a + math.hypot(a, c)))
    resistance = 2.0 * math.pi * coil.turns / (coil.conductivity * coil.thickness * log_term)
    return _result(coil, resistance, "helical")


def dcr_planar(coil: CoilSpec) -> DcrResult:
    """Circular-turn approximation: R = 2*pi*N / (sigma*t*ln(b/a))."""
    _check(coil)
    log_term = math.log(coil.outer_radius / coil.inner_radius)
    resistance = 2.0 * math.pi * coil.turns / (coil.conductivity * coil.thickness * log_term)
    return _result(coil, resistance, "planar")


def dcr_average(coil: CoilSpec) -> DcrResult:
    """Mean-radius estimate: R = 2*pi*N*R_av / (sigma*t*D)."""
    _check(coil)
    resistance = (
        2.0 * math.pi * coil.turns * coil.average_radius
        / (coil.conductivity * coil.thickness * coil.radial_depth)
    )
    return _result(coil, resistance, "average")


def dcr_quadrature(coil: CoilSpec, length_model: str = "planar") -> DcrResult:
    """Adaptive quadrature of the conductance integral; the oracle the
    closed forms are checked against (relative tolerance 1e-10)."""
    _check(coil)
    if length_model not in LENGTH_MODELS:
        raise ValueError(f"unknown length model {length_model!r}; expected one of {LENGTH_MODELS}")

    n = coil.turns
    c = _pitch_radius(coil)
    r_av = coil.average_radius

    def path_length(r: float) -> float:
        if length_model == "helical":
            return 2.0 * math.pi * n * math.hypot(r, c)
        if length_model == "planar":
            return 2.0 * math.pi * n * r
        return 2.0 * math.pi * n * r_av

    sigma_t = coil.conductivity * coil.thickness
    conductance, abserr = quad(
        lambda r: sigma_t / path_length(r),
        coil.inner_radius,
        coil.outer_radius,
        epsabs=0.0,
        epsrel=1e-12,
        limit=200,
    )
    if not math.isfinite(conductance) or conductance <= 0:
        raise NumericalError(f"conductance quadrature failed (G={conductance!r})")
    if abserr > 1e-10 * conductance:
        raise NumericalError(
            f"conductance quadrature did not converge: est. error {abserr:.3e} of {conductance:.6e}"
        )
    return _result(coil, 1.0 / conductance, f"quadrature:{length_model}")


def conductivity_at_temperature(
    temp_celsius: float,
    reference_conductivity: float = 5.8e7,
    reference_temp_celsius: float = 20.0,
) -> float:
    """Copper conductivity at a winding temperature.

    Uses the linear resistivity law rho(T) = rho_ref*(1 + alpha*(T-T_ref))
    with alpha = 0.393 %/K; at 100 C copper loses about 24 % conductivity.
    """
    factor = 1.0 + COPPER_TEMP_COEFF * (temp_celsius - reference_temp_celsius)
    if factor <= 0:
        raise ValueError(f"temperature {temp_celsius!r} C is below the validity of the linear law")
    return reference_conductivity / factor
