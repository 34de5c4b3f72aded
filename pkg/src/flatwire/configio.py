"""Config file I/O.

Designs are described in a flat TOML document with [coil], [core],
[clearances] and optional [electrical] / [fringing] sections. Lengths
accept "mm"/"m" unit suffixes, areas "mm2"/"m2"; bare numbers are SI.
``schema_text()`` returns the annotated schema the CLI prints.
"""

from __future__ import annotations

from pathlib import Path

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .design import (
    Clearances,
    CoilSpec,
    CoreSpec,
    FringingModel,
    GapSpec,
    InductorDesign,
    require_valid,
)
from .errors import ConfigError
from .units import format_area, format_length, parse_area, parse_length

_KNOWN_SECTIONS = {"coil", "core", "clearances", "electrical", "fringing"}
_KNOWN_KEYS = {
    "coil": {"inner_radius", "radial_depth", "thickness", "spacing", "turns", "conductivity"},
    "core": {
        "center_leg_radius", "window_width", "window_height", "outer_leg_thickness",
        "effective_area", "segment_lengths", "permeability", "yoke_thickness", "gaps",
    },
    "clearances": {"inner", "outer"},
    "electrical": {"series_resistance"},
    "fringing": {"model", "scale", "reach"},
}


def _section(data: dict, name: str, required: bool = True) -> dict:
    if name not in data:
        if required:
            raise ConfigError(f"missing required section [{name}]")
        return {}
    section = data[name]
    if not isinstance(section, dict):
        raise ConfigError(f"[{name}] must be a table")
    unknown = set(section) - _KNOWN_KEYS[name]
    if unknown:
        raise ConfigError(f"[{name}] has unknown key(s): {', '.join(sorted(unknown))}")
    return section


def _require(section: dict, section_name: str, key: str):
    if key not in section:
        raise ConfigError(f"missing required key {section_name}.{key}")
    return section[key]


def _number(value, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{field}: expected a number, got {value!r}")
    return float(value)


def load_design(text: str) -> InductorDesign:
    """Parse a config document and return a validated design.

    Raises ConfigError for parse/schema problems and ValidationError
    (listing every violated invariant) for a well-formed but inconsistent
    design.
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from exc

    unknown = set(data) - _KNOWN_SECTIONS
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")

    coil_t = _section(data, "coil")
    core_t = _section(data, "core")
    clear_t = _section(data, "clearances")
    elec_t = _section(data, "electrical", required=False)
    fring_t = _section(data, "fringing", required=False)

    turns = _require(coil_t, "coil", "turns")
    if isinstance(turns, bool) or not isinstance(turns, int):
        raise ConfigError(f"coil.turns: expected an integer, got {turns!r}")
    coil = CoilSpec(
        inner_radius=parse_length(_require(coil_t, "coil", "inner_radius"), "coil.inner_radius"),
        radial_depth=parse_length(_require(coil_t, "coil", "radial_depth"), "coil.radial_depth"),
        thickness=parse_length(_require(coil_t, "coil", "thickness"), "coil.thickness"),
        spacing=parse_length(_require(coil_t, "coil", "spacing"), "coil.spacing"),
        turns=turns,
        conductivity=_number(coil_t.get("conductivity", CoilSpec.conductivity), "coil.conductivity"),
    )

    seg_raw = _require(core_t, "core", "segment_lengths")
    if not isinstance(seg_raw, list):
        raise ConfigError("core.segment_lengths: expected an array of lengths")
    segments = tuple(
        parse_length(item, f"core.segment_lengths[{k}]") for k, item in enumerate(seg_raw)
    )

    gaps_raw = core_t.get("gaps", [])
    if not isinstance(gaps_raw, list):
        raise ConfigError("core.gaps: expected an array of {position, length} tables")
    gaps = []
    for k, item in enumerate(gaps_raw):
        if not isinstance(item, dict) or set(item) != {"position", "length"}:
            raise ConfigError(f"core.gaps[{k}]: expected exactly the keys position and length")
        gaps.append(GapSpec(
            position=parse_length(item["position"], f"core.gaps[{k}].position"),
            length=parse_length(item["length"], f"core.gaps[{k}].length"),
        ))

    yoke = core_t.get("yoke_thickness")
    core = CoreSpec(
        center_leg_radius=parse_length(_require(core_t, "core", "center_leg_radius"), "core.center_leg_radius"),
        window_width=parse_length(_require(core_t, "core", "window_width"), "core.window_width"),
        window_height=parse_length(_require(core_t, "core", "window_height"), "core.window_height"),
        outer_leg_thickness=parse_length(_require(core_t, "core", "outer_leg_thickness"), "core.outer_leg_thickness"),
        effective_area=parse_area(_require(core_t, "core", "effective_area"), "core.effective_area"),
        segment_lengths=segments,
        gaps=tuple(gaps),
        permeability=_number(core_t.get("permeability", CoreSpec.permeability), "core.permeability"),
        yoke_thickness=None if yoke is None else parse_length(yoke, "core.yoke_thickness"),
    )

    clearances = Clearances(
        inner=parse_length(_require(clear_t, "clearances", "inner"), "clearances.inner"),
        outer=parse_length(_require(clear_t, "clearances", "outer"), "clearances.outer"),
    )

    series = elec_t.get("series_resistance")
    if series is not None:
        series = _number(series, "electrical.series_resistance")

    reach = fring_t.get("reach")
    fringing = FringingModel(
        model=fring_t.get("model", FringingModel.model),
        scale=_number(fring_t.get("scale", FringingModel.scale), "fringing.scale"),
        reach=None if reach is None else parse_length(reach, "fringing.reach"),
    )
    if not isinstance(fringing.model, str):
        raise ConfigError(f"fringing.model: expected a string, got {fringing.model!r}")

    return require_valid(InductorDesign(
        coil=coil, core=core, clearances=clearances,
        series_resistance=series, fringing=fringing,
    ))


def load_design_file(path: str | Path) -> InductorDesign:
    return load_design(Path(path).read_text(encoding="utf-8"))


def dump_design(design: InductorDesign) -> str:
    """Serialize a design to config text; reloading restores it exactly."""
    coil = design.coil
    core = design.core
    lines = [
        "[coil]",
        f"inner_radius = \"{format_length(coil.inner_radius)}\"",
        f"radial_depth = \"{format_length(coil.radial_depth)}\"",
        f"thickness = \"{format_length(coil.thickness)}\"",
        f"spacing = \"{format_length(coil.spacing)}\"",
        f"turns = {coil.turns}",
        f"conductivity = {coil.conductivity!r}",
        "",
        "[core]",
        f"center_leg_radius = \"{format_length(core.center_leg_radius)}\"",
        f"window_width = \"{format_length(core.window_width)}\"",
        f"window_height = \"{format_length(core.window_height)}\"",
        f"outer_leg_thickness = \"{format_length(core.outer_leg_thickness)}\"",
        f"effective_area = \"{format_area(core.effective_area)}\"",
        "segment_lengths = [%s]" % ", ".join(f"\"{format_length(s)}\"" for s in core.segment_lengths),
        f"permeability = {core.permeability!r}",
    ]
    if core.yoke_thickness is not None:
        lines.append(f"yoke_thickness = \"{format_length(core.yoke_thickness)}\"")
    for gap in core.gaps:
        lines += [
            "",
            "[[core.gaps]]",
            f"position = \"{format_length(gap.position)}\"",
            f"length = \"{format_length(gap.length)}\"",
        ]
    lines += [
        "",
        "[clearances]",
        f"inner = \"{format_length(design.clearances.inner)}\"",
        f"outer = \"{format_length(design.clearances.outer)}\"",
    ]
    if design.series_resistance is not None:
        lines += ["", "[electrical]", f"series_resistance = {design.series_resistance!r}"]
    fr = design.fringing
    lines += ["", "[fringing]", f"model = \"{fr.model}\"", f"scale = {fr.scale!r}"]
    if fr.reach is not None:
        lines.append(f"reach = \"{format_length(fr.reach)}\"")
    return "\n".join(lines) + "\n"


def schema_text() -> str:
    """Annotated config schema, printed by the `schema` CLI command."""
    return """\
# flatwire design config (TOML)
#
# Lengths accept explicit unit suffixes: "9.0 mm" or "0.009 m".
# Areas accept "201 mm2" or "201 mm^2" or SI values. Bare numbers are SI.
# Axial positions inside the window are measured up from the window bottom.

[coil]                      # flat wire wound edge-on into a helical stack
inner_radius = "9.0 mm"     # radius at the inside of the winding
radial_depth = "8.0 mm"     # conductor extent in r
thickness = "0.58 mm"       # conductor extent in z per turn
spacing = "0.13 mm"         # axial air gap between adjacent turns (>= 0)
turns = 41                  # integer >= 1
conductivity = 5.8e7        # S/m, optional (default: copper 5.8e7)

[core]                      # axisymmetric equivalent of the gapped core
center_leg_radius = "7.45 mm"   # physical radius of the round centre pole
window_width = "11.05 mm"       # radial window width
window_height = "29.5 mm"       # axial window height
outer_leg_thickness = "1.655 mm"# return-shell thickness; the mapped outer
                                # legs must conserve the effective area:
                                # pi*((r+t)^2 - r^2) = effective_area with
                                # r = leg radius + window width
effective_area = "201 mm2"      # datasheet effective cross-section A_e
segment_lengths = ["29.5 mm", "21.5 mm", "29.5 mm", "21.5 mm"]
                                # magnetic path pieces; [0] is the centre
                                # leg (gross, including gap space), the
                                # rest close the loop; sum = datasheet l_e
permeability = 3000             # relative, optional (default 3000)
yoke_thickness = "5.5 mm"       # optional; top/bottom plate depth for the
                                # field mesh (derived if omitted)

[[core.gaps]]               # one block per air gap in the centre leg
position = "2.95 mm"        # gap centre above the window bottom
length = "1.0 mm"

[clearances]
inner = "1.55 mm"           # coil to centre leg; inner + radial_depth +
outer = "1.5 mm"            # outer must equal window_width

[electrical]                # optional
series_resistance = 12.0e-3 # ohm; DC lead resistance R for the terminal
                            # impedance (default: computed planar DCR)

[fringing]                  # optional; gap fringing model for the
model = "arc"               # reluctance network: "arc" or "none"
scale = 1.0                 # multiplies the arc permeance (2.0 = both
                            # face edges fringe independently)
# reach = "1.0 mm"          # arc outer radius; default: the gap length
"""
