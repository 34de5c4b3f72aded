"""Built-in reference designs."""

from __future__ import annotations

from .design import (
    Clearances,
    CoilSpec,
    CoreSpec,
    GapSpec,
    InductorDesign,
    require_valid,
)


def prototype() -> InductorDesign:
    """41-turn flat-wire inductor on a PQ 40/40-class core with five 1 mm
    distributed gaps.

    The core is the axisymmetric equivalent of the real part: the centre
    pole keeps its physical radius (7.45 mm), while the square outer legs
    become a cylindrical shell whose cross-section conserves the datasheet
    effective area (201 mm^2). Path segments sum to the datasheet
    effective length of 102 mm. Gaps are evenly distributed over the
    29.5 mm window.
    """
    window_height = 29.5e-3
    gaps = tuple(
        GapSpec(position=position, length=1.0e-3)
        for position in (2.95e-3, 8.85e-3, 14.75e-3, 20.65e-3, 26.55e-3)
    )
    return require_valid(InductorDesign(
        coil=CoilSpec(
            inner_radius=9.0e-3,
            radial_depth=8.0e-3,
            thickness=0.58e-3,
            spacing=0.13e-3,
            turns=41,
        ),
        core=CoreSpec(
            center_leg_radius=7.45e-3,
            window_width=11.05e-3,
            window_height=window_height,
            outer_leg_thickness=1.655e-3,
            effective_area=201e-6,
            segment_lengths=(29.5e-3, 21.5e-3, 29.5e-3, 21.5e-3),
            gaps=gaps,
            yoke_thickness=5.5e-3,
        ),
        clearances=Clearances(inner=1.55e-3, outer=1.5e-3),
    ))
