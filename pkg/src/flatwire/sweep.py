"""Design-parameter sweeps.

Each sweep varies one parameter over a strictly monotone value list and
reports, per point: DC resistance, AC resistance and inductance magnitude
at the study frequency, and the DC/AC loss at the specified excitation.
A window-closure rule keeps the geometry consistent: clearance sweeps let
the conductor depth absorb the change (window width fixed), thickness
sweeps let the turn spacing absorb it (stack height fixed).

Points that produce an invalid design are reported as failed rows; the
sweep continues.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .design import GapSpec, InductorDesign, require_valid, validate
from .errors import FlatwireError, ValidationError
from .mesh import MeshPolicy
from . import dcr as dcr_mod
from . import field as field_mod
from . import post as post_mod

PARAMETERS = ("inner-clearance", "outer-clearance", "thickness", "spacing",
              "gap-count", "frequency")
CLOSURES = ("auto", "radial-depth", "spacing", "none")

_DEFAULT_CLOSURE = {
    "inner-clearance": "radial-depth",
    "outer-clearance": "radial-depth",
    "thickness": "spacing",
    "spacing": "none",
    "gap-count": "none",
    "frequency": "none",
}


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: parameter name, SI values, closure rule, and the
    excitation used for the loss columns (DC bias current plus a peak AC
    ripple current at ``frequency``)."""

    parameter: str
    values: tuple[float, ...]
    closure: str = "auto"
    frequency: float = 100e3
    dc_current: float = 15.0
    ac_current: float = 5.0

    def __post_init__(self):
        if self.parameter not in PARAMETERS:
            raise ValueError(f"unknown sweep parameter {self.parameter!r}; expected {PARAMETERS}")
        if self.closure not in CLOSURES:
            raise ValueError(f"unknown closure rule {self.closure!r}; expected {CLOSURES}")
        if len(self.values) < 2:
            raise ValueError("a sweep needs at least two values")
        diffs = [b - a for a, b in zip(self.values, self.values[1:])]
        if not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
            raise ValueError("sweep values must be strictly monotone")
        if self.frequency < 0 or self.dc_current < 0 or self.ac_current < 0:
            raise ValueError("frequency and currents must be >= 0")

    def resolved_closure(self) -> str:
        return _DEFAULT_CLOSURE[self.parameter] if self.closure == "auto" else self.closure


@dataclass(frozen=True)
class SweepRow:
    value: float
    dcr: float | None
    rac: float | None
    dc_loss: float | None
    ac_loss: float | None
    inductance_abs: float | None
    status: str  # "ok" or "failed: <reason>"


def apply_parameter(design: InductorDesign, parameter: str, value: float,
                    closure: str) -> InductorDesign:
    """Return the design at one sweep point (validated)."""
    coil = design.coil
    core = design.core
    cl = design.clearances

    if parameter == "inner-clearance":
        delta = value - cl.inner
        new_coil = replace(coil,
                           inner_radius=core.center_leg_radius + value,
                           radial_depth=coil.radial_depth - delta
                           if closure == "radial-depth" else coil.radial_depth)
        new_cl = replace(cl, inner=value)
        return require_valid(replace(design, coil=new_coil, clearances=new_cl))

    if parameter == "outer-clearance":
        delta = value - cl.outer
        new_coil = replace(coil,
                           radial_depth=coil.radial_depth - delta
                           if closure == "radial-depth" else coil.radial_depth)
        new_cl = replace(cl, outer=value)
        return require_valid(replace(design, coil=new_coil, clearances=new_cl))

    if parameter == "thickness":
        if closure == "spacing" and coil.turns > 1:
            # keep the stack height fixed
            spacing = (coil.height - coil.turns * value) / (coil.turns - 1)
            new_coil = replace(coil, thickness=value, spacing=spacing)
        else:
            new_coil = replace(coil, thickness=value)
        return require_valid(replace(design, coil=new_coil))

    if parameter == "spacing":
        return require_valid(replace(design, coil=replace(coil, spacing=value)))

    if parameter == "gap-count":
        count = int(round(value))
        if count < 1 or abs(count - value) > 1e-9:
            raise ValidationError([("sweep.values", f"gap count must be a positive integer, got {value!r}")])
        total = core.total_gap_length
        length = total / count
        height = core.window_height
        gaps = tuple(GapSpec(position=height * (2 * k + 1) / (2 * count), length=length)
                     for k in range(count))
        return require_valid(replace(design, core=replace(core, gaps=gaps)))

    if parameter == "frequency":
        return require_valid(design)

    raise ValueError(f"unknown sweep parameter {parameter!r}")


def _solve_point(args):
    design, parameter, value, closure, frequency, dc_current, ac_current, policy, source_model = args
    try:
        point = apply_parameter(design, parameter, value, closure)
        freq = value if parameter == "frequency" else frequency
        solution = field_mod.solve_design(point, freq, policy=policy,
                                          source_model=source_model)
        rac = post_mod.ac_resistance(solution)
        l_abs = abs(post_mod.inductance(solution))
        dc_resistance = dcr_mod.dcr_planar(point.coil).resistance
        return SweepRow(
            value=value,
            dcr=dc_resistance,
            rac=rac,
            dc_loss=dc_current**2 * dc_resistance,
            ac_loss=0.5 * rac * ac_current**2,
            inductance_abs=l_abs,
            status="ok",
        )
    except (FlatwireError, ValueError) as exc:
        reason = str(exc).splitlines()[0]
        return SweepRow(value=value, dcr=None, rac=None, dc_loss=None,
                        ac_loss=None, inductance_abs=None,
                        status=f"failed: {reason}")


def run_sweep(design: InductorDesign, spec: SweepSpec,
              policy: MeshPolicy | None = None, jobs: int = 1,
              source_model: str = "voltage") -> tuple[SweepRow, ...]:
    """Evaluate every sweep point; rows come back in value order."""
    closure = spec.resolved_closure()
    if policy is None:
        max_f = max(spec.values) if spec.parameter == "frequency" else spec.frequency
        policy = MeshPolicy(max_frequency=max_f)
    tasks = [
        (design, spec.parameter, value, closure, spec.frequency,
         spec.dc_current, spec.ac_current, policy, source_model)
        for value in spec.values
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_solve_point, tasks))
    else:
        rows = [_solve_point(task) for task in tasks]
    return tuple(rows)
