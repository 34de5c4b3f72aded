"""Parametric description of a flat-wire inductor on a gapped core.

The geometry is axisymmetric: a round centre leg carrying a stack of air
gaps, a cylindrical outer return shell whose cross-section area matches
the real core's outer legs (so the magnetic circuit is preserved), and a
helical coil of flat wire wound edge-on in the window. Designs are
immutable after construction and safe to share between workers.

Units are SI throughout. Axial positions inside the window are measured
upward from the window bottom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ValidationError

#: Conductivity of annealed copper at room temperature [S/m].
COPPER_CONDUCTIVITY = 5.8e7

#: Default relative permeability of the (linear) ferrite core.
DEFAULT_PERMEABILITY = 3000.0

#: Relative tolerance for the area-conservation checks between the
#: axisymmetric equivalent geometry and the datasheet effective area.
AREA_CONSERVATION_TOL = 0.05


@dataclass(frozen=True)
class CoilSpec:
    """Flat-wire helical coil: annular turns stacked along the axis.

    inner_radius   r at the inside of the winding [m]
    radial_depth   conductor extent in r [m]
    thickness      conductor extent in z (one turn) [m]
    spacing        axial gap between adjacent turns [m]
    turns          number of turns
    conductivity   conductor conductivity [S/m]
    """

    inner_radius: float
    radial_depth: float
    thickness: float
    spacing: float
    turns: int
    conductivity: float = COPPER_CONDUCTIVITY

    @property
    def height(self) -> float:
        """Total axial height of the winding stack [m]."""
        return self.turns * self.thickness + (self.turns - 1) * self.spacing

    @property
    def average_radius(self) -> float:
        """Mid-depth radius of the winding [m]."""
        return self.inner_radius + self.radial_depth / 2.0

    @property
    def outer_radius(self) -> float:
        return self.inner_radius + self.radial_depth


@dataclass(frozen=True)
class GapSpec:
    """One air gap in the centre leg.

    position  axial centre of the gap above the window bottom [m]
    length    axial gap length [m]
    """

    position: float
    length: float

    @property
    def bottom(self) -> float:
        return self.position - self.length / 2.0

    @property
    def top(self) -> float:
        return self.position + self.length / 2.0


@dataclass(frozen=True)
class CoreSpec:
    """Axisymmetric equivalent of a gapped ferrite core.

    center_leg_radius    radius of the round centre leg [m]
    window_width         radial width of the winding window [m]
    window_height        axial height of the winding window [m]
    outer_leg_thickness  radial thickness of the outer return shell [m]
    effective_area       datasheet effective cross-section per path
                         segment [m^2]
    segment_lengths      magnetic path lengths [m]; the first entry is the
                         centre leg (gross, including gap space), the rest
                         close the loop through the yokes and outer shell
    gaps                 air gaps in the centre leg, bottom to top
    permeability         relative permeability of the (linear) core
    yoke_thickness       axial depth of the top/bottom plates used by the
                         field mesh; derived area-preserving if omitted
    """

    center_leg_radius: float
    window_width: float
    window_height: float
    outer_leg_thickness: float
    effective_area: float
    segment_lengths: tuple[float, ...]
    gaps: tuple[GapSpec, ...]
    permeability: float = DEFAULT_PERMEABILITY
    yoke_thickness: float | None = None

    @property
    def window_outer_radius(self) -> float:
        return self.center_leg_radius + self.window_width

    @property
    def outer_radius(self) -> float:
        return self.window_outer_radius + self.outer_leg_thickness

    @property
    def total_gap_length(self) -> float:
        return sum(g.length for g in self.gaps)

    def resolved_yoke_thickness(self) -> float:
        """Yoke plate depth; defaults to carrying effective_area at the
        mean window radius."""
        if self.yoke_thickness is not None:
            return self.yoke_thickness
        r_mid = 0.5 * (self.center_leg_radius + self.window_outer_radius)
        return self.effective_area / (2.0 * math.pi * r_mid)


@dataclass(frozen=True)
class Clearances:
    """Radial clearances between the coil and the core.

    inner  coil inner surface to centre leg [m]
    outer  coil outer surface to outer shell [m]
    """

    inner: float
    outer: float


@dataclass(frozen=True)
class FringingModel:
    """Gap fringing permeance model for the reluctance network.

    The default "arc" model routes flux leaving the cylindrical gap rim
    through quarter-circular arc shells: permeance per unit rim perimeter
    (mu0/pi) * ln(1 + pi*reach/g), with reach equal to the gap length
    unless overridden. ``scale`` multiplies the resulting permeance and is
    the documented tuning knob (scale=2 models both face edges fringing
    independently). "none" disables fringing elements.
    """

    model: str = "arc"
    scale: float = 1.0
    reach: float | None = None


@dataclass(frozen=True)
class InductorDesign:
    """Complete inductor description.

    series_resistance is the DC lead/winding resistance used by the
    terminal-impedance model; when None, consumers fall back to the
    computed planar DC resistance of the coil.
    """

    coil: CoilSpec
    core: CoreSpec
    clearances: Clearances
    series_resistance: float | None = None
    fringing: FringingModel = field(default_factory=FringingModel)


@dataclass(frozen=True)
class DerivedDims:
    """Dimensions derived from a design; all lengths in metres."""

    coil_height: float
    average_radius: float
    coil_outer_radius: float
    axial_fill: float       # coil height / window height
    radial_fill: float      # conductor depth / window width
    conductor_fill: float   # conductor cross-section / window cross-section


def derived_dims(design: InductorDesign) -> DerivedDims:
    """Pure helper collecting the dimensions every other module needs."""
    coil = design.coil
    core = design.core
    window_area = core.window_width * core.window_height
    return DerivedDims(
        coil_height=coil.height,
        average_radius=coil.average_radius,
        coil_outer_radius=coil.outer_radius,
        axial_fill=coil.height / core.window_height,
        radial_fill=coil.radial_depth / core.window_width,
        conductor_fill=coil.turns * coil.thickness * coil.radial_depth / window_area,
    )


def validate(design: InductorDesign) -> list[tuple[str, str]]:
    """Check every invariant; returns all violations as (field, message)."""
    v: list[tuple[str, str]] = []
    coil = design.coil
    core = design.core
    cl = design.clearances

    def positive(value: float, name: str, label: str) -> None:
        if not value > 0:
            v.append((name, f"{label} must be > 0, got {value!r}"))

    positive(coil.inner_radius, "coil.inner_radius", "coil inner radius")
    positive(coil.radial_depth, "coil.radial_depth", "conductor radial depth")
    positive(coil.thickness, "coil.thickness", "conductor thickness")
    if coil.spacing < 0:
        v.append(("coil.spacing", f"turn spacing must be >= 0, got {coil.spacing!r}"))
    if not (isinstance(coil.turns, int) and coil.turns >= 1):
        v.append(("coil.turns", f"turn count must be an integer >= 1, got {coil.turns!r}"))
    positive(coil.conductivity, "coil.conductivity", "conductivity")

    positive(core.center_leg_radius, "core.center_leg_radius", "centre leg radius")
    positive(core.window_width, "core.window_width", "window width")
    positive(core.window_height, "core.window_height", "window height")
    positive(core.outer_leg_thickness, "core.outer_leg_thickness", "outer shell thickness")
    positive(core.effective_area, "core.effective_area", "effective area")
    if core.permeability <= 1:
        v.append(("core.permeability", f"relative permeability must be > 1, got {core.permeability!r}"))
    if not core.segment_lengths:
        v.append(("core.segment_lengths", "at least one core path segment is required"))
    for k, length in enumerate(core.segment_lengths):
        if not length > 0:
            v.append((f"core.segment_lengths[{k}]", f"segment length must be > 0, got {length!r}"))
    if core.yoke_thickness is not None and not core.yoke_thickness > 0:
        v.append(("core.yoke_thickness", f"yoke thickness must be > 0, got {core.yoke_thickness!r}"))

    gap_ok = True
    for k, gap in enumerate(core.gaps):
        if not gap.length > 0:
            v.append((f"core.gaps[{k}].length", f"gap length must be > 0, got {gap.length!r}"))
            gap_ok = False
        if gap.bottom < -1e-12 or gap.top > core.window_height + 1e-12:
            v.append((f"core.gaps[{k}].position",
                      "gap extends outside the window "
                      f"[{gap.bottom!r}, {gap.top!r}] vs height {core.window_height!r}"))
            gap_ok = False
    if gap_ok and len(core.gaps) > 1:
        ordered = sorted(core.gaps, key=lambda g: g.bottom)
        for lower, upper in zip(ordered, ordered[1:]):
            if upper.bottom < lower.top - 1e-12:
                v.append(("core.gaps", f"gaps at {lower.position!r} and {upper.position!r} overlap"))
                break

    # Area conservation of the axisymmetric equivalent: the reshaped part
    # of the geometry is the outer return (square legs mapped onto a
    # cylindrical shell); its cross-section must carry the datasheet
    # effective area for the magnetic circuit to be preserved. The centre
    # pole is physically round and keeps its real radius.
    if (core.center_leg_radius > 0 and core.effective_area > 0
            and core.window_width > 0 and core.outer_leg_thickness > 0):
        r_inner = core.window_outer_radius
        shell_area = math.pi * (core.outer_radius**2 - r_inner**2)
        if abs(shell_area - core.effective_area) > AREA_CONSERVATION_TOL * core.effective_area:
            v.append(("core.outer_leg_thickness",
                      f"outer shell area {shell_area:.4g} m^2 does not conserve the "
                      f"effective area {core.effective_area:.4g} m^2 (tol {AREA_CONSERVATION_TOL:.0%})"))

    if cl.inner < 0:
        v.append(("clearances.inner", f"inner clearance must be >= 0, got {cl.inner!r}"))
    if cl.outer < 0:
        v.append(("clearances.outer", f"outer clearance must be >= 0, got {cl.outer!r}"))
    if core.window_width > 0:
        span = cl.inner + coil.radial_depth + cl.outer
        if abs(span - core.window_width) > 1e-9 + 1e-6 * core.window_width:
            v.append(("clearances",
                      f"inner + radial_depth + outer = {span!r} must equal "
                      f"window width {core.window_width!r}"))

    if coil.turns >= 1 and coil.thickness > 0 and coil.height > core.window_height + 1e-12:
        v.append(("coil", f"coil height {coil.height!r} exceeds window height {core.window_height!r}"))
    if coil.inner_radius < core.center_leg_radius + cl.inner - 1e-12:
        v.append(("coil.inner_radius",
                  f"coil inner radius {coil.inner_radius!r} lies inside "
                  f"centre leg + inner clearance {core.center_leg_radius + cl.inner!r}"))

    if design.series_resistance is not None and not design.series_resistance > 0:
        v.append(("electrical.series_resistance",
                  f"series resistance must be > 0, got {design.series_resistance!r}"))

    fr = design.fringing
    if fr.model not in ("arc", "none"):
        v.append(("fringing.model", f"unknown fringing model {fr.model!r} (arc|none)"))
    if fr.scale < 0:
        v.append(("fringing.scale", f"fringing scale must be >= 0, got {fr.scale!r}"))
    if fr.reach is not None and not fr.reach > 0:
        v.append(("fringing.reach", f"fringing reach must be > 0, got {fr.reach!r}"))

    return v


def require_valid(design: InductorDesign) -> InductorDesign:
    """Raise ValidationError listing every violation; return the design."""
    violations = validate(design)
    if violations:
        raise ValidationError(violations)
    return design
