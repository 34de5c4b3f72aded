"""Command-line interface.

Subcommands: schema, dcr, mec, solve, sweep, ripple. Every analysis
command writes deterministic CSV files plus a run manifest into the
output directory (--out-dir, FLATWIRE_OUT_DIR, or ./flatwire-out) and
prints a summary table; --csv switches the stdout summary to CSV.

Exit codes: 0 success, 2 config/validation error, 3 numerical failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from . import dcr as dcr_mod
from . import mec as mec_mod
from . import post as post_mod
from . import ripple as ripple_mod
from . import sweep as sweep_mod
from .configio import load_design, schema_text
from .design import derived_dims
from .errors import (
    ConfigError,
    FlatwireError,
    GeometryError,
    NumericalError,
    TopologyError,
    ValidationError,
)
from .field import FieldProblem, assemble, solve_field
from .mesh import MeshPolicy, build_mesh

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

_FLOAT_FORMAT = "{:.12e}"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return _FLOAT_FORMAT.format(value)
    return str(value)


def parse_frequency_list(text: str) -> list[float]:
    """Parse "0,100k,1M" or "log:1k:1M:21" into Hz values."""

    def one(token: str) -> float:
        token = token.strip()
        factor = 1.0
        for suffix, f in (("k", 1e3), ("K", 1e3), ("M", 1e6), ("G", 1e9)):
            if token.endswith(suffix):
                token = token[: -len(suffix)]
                factor = f
                break
        try:
            return float(token) * factor
        except ValueError:
            raise ConfigError(f"cannot parse frequency {token!r}") from None

    if text.startswith("log:"):
        parts = text.split(":")
        if len(parts) != 4:
            raise ConfigError("log range must be log:<fmin>:<fmax>:<count>")
        fmin, fmax = one(parts[1]), one(parts[2])
        try:
            count = int(parts[3])
        except ValueError:
            raise ConfigError(f"cannot parse point count {parts[3]!r}") from None
        if fmin <= 0 or fmax <= fmin or count < 2:
            raise ConfigError("log range needs 0 < fmin < fmax and count >= 2")
        ratio = (fmax / fmin) ** (1.0 / (count - 1))
        return [fmin * ratio**k for k in range(count)]
    values = [one(token) for token in text.split(",") if token.strip()]
    if not values:
        raise ConfigError("empty frequency list")
    return values


def parse_value_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse value list {text!r}") from None


class OutputWriter:
    """Collects CSV outputs plus the run manifest for one command."""

    def __init__(self, out_dir: Path, command: str, parameters: dict,
                 config_text: str | None):
        self.out_dir = out_dir
        self.command = command
        self.parameters = parameters
        self.config_sha256 = (
            hashlib.sha256(config_text.encode("utf-8")).hexdigest()
            if config_text is not None else None
        )
        self.outputs: list[str] = []

    def write_csv(self, name: str, header: list[str], rows: list[list]) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / name
        lines = [",".join(header)]
        lines += [",".join(_fmt(cell) for cell in row) for row in rows]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        self.outputs.append(name)
        return path

    def finish(self) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        manifest = {
            "tool": "flatwire",
            "version": __version__,
            "command": self.command,
            "config_sha256": self.config_sha256,
            "parameters": self.parameters,
            "outputs": self.outputs,
        }
        path = self.out_dir / f"{self.command}_manifest.json"
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
        return path


def _print_table(header: list[str], rows: list[list], csv_mode: bool) -> None:
    if csv_mode:
        print(",".join(header))
        for row in rows:
            print(",".join(_fmt(cell) for cell in row))
        return
    cells = [[_fmt(c) if not isinstance(c, str) else c for c in row] for row in rows]
    widths = [max(len(h), *(len(r[k]) for r in cells)) if cells else len(h)
              for k, h in enumerate(header)]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for row in cells:
        print("  ".join(c.ljust(w) for c, w in zip(row, widths)))


def _load_config(args) -> tuple[str, object]:
    path = args.config if args.config else getattr(args, "config_flag", None)
    if not path:
        raise ConfigError("no config file given (positional argument or --config)")
    text = Path(path).read_text(encoding="utf-8")
    return text, load_design(text)


def _resolve_out_dir(args) -> Path:
    if args.out_dir:
        return Path(args.out_dir)
    env = os.environ.get("FLATWIRE_OUT_DIR")
    return Path(env) if env else Path("flatwire-out")


# ----------------------------------------------------------------- commands


def cmd_schema(args) -> int:
    print(schema_text(), end="")
    return EXIT_OK


def cmd_dcr(args) -> int:
    config_text, design = _load_config(args)
    coil = design.coil
    if args.temperature is not None:
        sigma = dcr_mod.conductivity_at_temperature(args.temperature)
        coil = replace(coil, conductivity=sigma)
    results = [
        dcr_mod.dcr_planar(coil),
        dcr_mod.dcr_helical(coil),
        dcr_mod.dcr_average(coil),
        dcr_mod.dcr_quadrature(coil, "helical"),
    ]
    header = ["model", "resistance_ohm", "equivalent_length_m"]
    rows = [[r.model, r.resistance, r.length] for r in results]
    writer = OutputWriter(_resolve_out_dir(args), "dcr",
                          {"temperature_c": args.temperature}, config_text)
    writer.write_csv("dcr.csv", header, rows)
    writer.finish()
    _print_table(header, rows, args.csv)
    dims = derived_dims(design)
    if not args.csv:
        print(f"\ncoil height: {dims.coil_height * 1e3:.3f} mm, "
              f"average radius: {dims.average_radius * 1e3:.3f} mm")
    return EXIT_OK


def cmd_mec(args) -> int:
    config_text, design = _load_config(args)
    network = mec_mod.build_network(design)
    r0 = mec_mod.total_reluctance(network).real
    l0 = mec_mod.zero_freq_inductance(network, design.coil.turns)

    writer = OutputWriter(_resolve_out_dir(args), "mec",
                          {"freqs": args.freqs, "q_from": args.q_from,
                           "q_tau": args.q_tau}, config_text)
    el_header = ["element", "kind", "reluctance_at_dc_per_henry"]
    el_rows = [[el.label, el.kind, el.value(0.0).real] for el in network.elements]
    writer.write_csv("mec_elements.csv", el_header, el_rows)
    _print_table(el_header, el_rows, args.csv)
    if not args.csv:
        print(f"\ntotal reluctance R0: {r0:.6e} A-turn/Wb")
        print(f"zero-frequency inductance L0: {l0 * 1e6:.3f} uH")

    if args.freqs:
        if args.q_from:
            q_model = _eddy_factor_from_csv(Path(args.q_from))
        elif args.q_tau is not None:
            q_model = mec_mod.FirstOrderEddyFactor(tau=args.q_tau)
        else:
            q_model = lambda omega: 0.0 + 0.0j  # noqa: E731 - ideal winding
        freqs = parse_frequency_list(args.freqs)
        r_lead = design.series_resistance
        if r_lead is None:
            r_lead = dcr_mod.dcr_planar(design.coil).resistance
        result = mec_mod.terminal_impedance(r_lead, design.coil.turns, network,
                                            q_model, freqs)
        header = ["f_hz", "z_re_ohm", "z_im_ohm", "l_abs_h", "q_re", "q_im"]
        rows = []
        for f, z, lc in zip(result.frequencies, result.z, result.inductance_complex):
            q = q_model(2.0 * math.pi * f)
            rows.append([f, z.real, z.imag, abs(lc), q.real, q.imag])
        writer.write_csv("mec_impedance.csv", header, rows)
        _print_table(header, rows, args.csv)
    writer.finish()
    return EXIT_OK


def _eddy_factor_from_csv(path: Path) -> mec_mod.EddyFactor:
    """Rebuild an eddy factor from a solve/mec CSV with f_hz,q_re,q_im."""
    lines = path.read_text(encoding="utf-8").strip().splitlines()
    header = lines[0].split(",")
    try:
        fi = header.index("f_hz")
        qr = header.index("q_re")
        qi = header.index("q_im")
    except ValueError:
        raise ConfigError(f"{path}: need columns f_hz,q_re,q_im") from None
    freqs = []
    values = []
    for line in lines[1:]:
        cells = line.split(",")
        f = float(cells[fi])
        if f > 0:
            freqs.append(f)
            values.append(complex(float(cells[qr]), float(cells[qi])))
    if not freqs:
        raise ConfigError(f"{path}: no positive-frequency rows")
    order = sorted(range(len(freqs)), key=lambda k: freqs[k])
    return mec_mod.EddyFactor(
        frequencies=tuple(freqs[k] for k in order),
        values=tuple(values[k] for k in order),
    )


def cmd_solve(args) -> int:
    config_text, design = _load_config(args)
    freqs = parse_frequency_list(args.freq)
    if any(f < 0 for f in freqs):
        raise ConfigError("frequencies must be >= 0")
    policy = MeshPolicy(
        max_frequency=max(freqs),
        cells_per_skin_depth=args.cells_per_skin_depth,
        padding_core_diameters=args.padding,
    )
    response = post_mod.frequency_response(
        design, freqs, policy=policy, source_model=args.source_model,
        current=args.current,
    )
    header = ["f_hz", "rac_ohm", "l_re_h", "l_im_h", "l_abs_h",
              "q_re", "q_im", "loss_gap_adjacent_w", "loss_remainder_w"]
    rows = [
        [f, rac, l.real, l.imag, abs(l), q.real, q.imag, near, rest]
        for f, rac, l, q, near, rest in zip(
            response.frequencies, response.rac, response.inductance,
            response.q, response.loss_gap_adjacent, response.loss_remainder)
    ]
    writer = OutputWriter(_resolve_out_dir(args), "solve", {
        "freq": args.freq,
        "cells_per_skin_depth": args.cells_per_skin_depth,
        "padding": args.padding,
        "source_model": args.source_model,
        "current_a": args.current,
    }, config_text)
    writer.write_csv("solve.csv", header, rows)

    turn_header = ["f_hz", "turn", "loss_w", "gap_adjacent_loss_w"]
    turn_rows = [
        [f, turn + 1, loss, near]
        for f, losses, nears in zip(response.frequencies, response.per_turn_loss,
                                    response.per_turn_gap_adjacent)
        for turn, (loss, near) in enumerate(zip(losses, nears))
    ]
    writer.write_csv("turn_losses.csv", turn_header, turn_rows)

    if args.dump_fields:
        grid = build_mesh(design, policy)
        for f in freqs:
            problem = FieldProblem(grid=grid, frequency=f, current=args.current,
                                   source_model=args.source_model)
            solution = solve_field(assemble(problem))
            dump_header = ["r_m", "z_m", "a_re_wb_per_m", "a_im_wb_per_m",
                           "j_abs_a_per_m2", "loss_density_w_per_m3"]
            currents = post_mod.current_density(solution)
            density = post_mod.loss_map(solution, design).density
            a = solution.vector_potential()
            a_cell = 0.25 * (a[:-1, :-1] + a[:-1, 1:] + a[1:, :-1] + a[1:, 1:])
            dump_rows = []
            for j, zc in enumerate(grid.z_centers):
                for i, rc in enumerate(grid.r_centers):
                    dump_rows.append([rc, zc, a_cell[j, i].real, a_cell[j, i].imag,
                                      abs(currents.j_total[j, i]), density[j, i]])
            writer.write_csv(f"field_{f:.0f}hz.csv", dump_header, dump_rows)

    writer.finish()
    _print_table(header, rows, args.csv)
    if not args.csv:
        print(f"\nzero-frequency inductance L0: {response.l0 * 1e6:.3f} uH")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config_text, design = _load_config(args)
    spec = sweep_mod.SweepSpec(
        parameter=args.parameter,
        values=tuple(parse_value_list(args.values)),
        closure=args.closure,
        frequency=args.frequency,
        dc_current=args.dc_current,
        ac_current=args.ac_current,
    )
    rows_data = sweep_mod.run_sweep(design, spec, jobs=args.jobs,
                                    source_model=args.source_model)
    header = ["value_si", "dcr_ohm", "rac_ohm", "dc_loss_w", "ac_loss_w",
              "l_abs_h", "status"]
    rows = [[r.value, r.dcr, r.rac, r.dc_loss, r.ac_loss, r.inductance_abs, r.status]
            for r in rows_data]
    writer = OutputWriter(_resolve_out_dir(args), "sweep", {
        "parameter": args.parameter,
        "values": args.values,
        "closure": args.closure,
        "frequency_hz": args.frequency,
        "dc_current_a": args.dc_current,
        "ac_current_a": args.ac_current,
        "jobs": args.jobs,
    }, config_text)
    writer.write_csv("sweep.csv", header, rows)
    writer.finish()
    _print_table(header, rows, args.csv)
    return EXIT_OK


def cmd_ripple(args) -> int:
    if args.from_solve:
        inductance, esr = _point_from_solve_csv(Path(args.from_solve), args.fs)
        if args.inductance is not None:
            inductance = args.inductance
        if args.rac is not None:
            esr = args.rac
    else:
        inductance, esr = args.inductance, args.rac
    if inductance is None:
        raise ConfigError("need --inductance or --from-solve")
    point = ripple_mod.ConverterPoint(
        output_voltage=args.vo,
        switching_frequency=args.fs,
        inductance=inductance,
        esr_at_fs=esr,
        parasitic_capacitance=args.cp,
    )
    if args.rac_csv:
        esr_model = _esr_table_from_csv(Path(args.rac_csv))
    elif esr is not None:
        esr_model = ripple_mod.SqrtFrequencyEsr(esr_at_fs=esr, switching_frequency=args.fs)
    else:
        raise ConfigError("need --rac, --rac-csv or --from-solve for the ESR model")
    result = ripple_mod.ac_loss_spectrum(point, esr_model, h_max=args.h_max)

    header = ["h", "f_hz", "i_h_a", "rac_ohm", "p_h_w", "valid"]
    rows = [
        [h, h * args.fs, i, esr_model(h * args.fs), p, v]
        for h, i, p, v in zip(result.spectrum.harmonics, result.spectrum.currents,
                              result.spectrum.losses, result.spectrum.valid)
    ]
    writer = OutputWriter(_resolve_out_dir(args), "ripple", {
        "vo_v": args.vo, "fs_hz": args.fs, "inductance_h": inductance,
        "rac_ohm": esr, "cp_f": args.cp, "h_max": args.h_max,
        "dc_current_a": args.dc_current, "dcr_ohm": args.dcr,
    }, None)
    writer.write_csv("ripple_spectrum.csv", header, rows)

    summary_header = ["quantity", "value"]
    summary = [
        ["ripple_pp_a", point.ripple_peak_to_peak],
        ["p_ac_w", result.p_ac],
    ]
    if esr is not None:
        summary.append(["p_ac_simplified_w", ripple_mod.ac_loss_simplified(point, args.h_max)])
    if args.cp is not None:
        summary.append(["resonant_frequency_hz", point.resonant_frequency])
    if args.dc_current is not None and args.dcr is not None:
        summary.append(["p_dc_w", args.dc_current**2 * args.dcr])
    writer.write_csv("ripple_summary.csv", summary_header, summary)
    writer.finish()

    _print_table(header, rows, args.csv)
    print()
    _print_table(summary_header, summary, args.csv)
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return EXIT_OK


def _point_from_solve_csv(path: Path, fs: float) -> tuple[float, float]:
    """Pull |L| and Rac at the switching frequency from a solve CSV."""
    table = _esr_table_from_csv(path)
    lines = path.read_text(encoding="utf-8").strip().splitlines()
    header = lines[0].split(",")
    fi = header.index("f_hz")
    li = header.index("l_abs_h")
    freqs, l_values = [], []
    for line in lines[1:]:
        cells = line.split(",")
        freqs.append(float(cells[fi]))
        l_values.append(float(cells[li]))
    if not (min(freqs) <= fs <= max(freqs)):
        raise ConfigError(f"{path}: switching frequency {fs:g} Hz outside solved range")
    order = sorted(range(len(freqs)), key=lambda k: freqs[k])
    inductance = float(np.interp(fs, [freqs[k] for k in order], [l_values[k] for k in order]))
    return inductance, table(fs)


def _esr_table_from_csv(path: Path) -> ripple_mod.TabulatedEsr:
    lines = path.read_text(encoding="utf-8").strip().splitlines()
    header = lines[0].split(",")
    try:
        fi = header.index("f_hz")
        ri = header.index("rac_ohm")
    except ValueError:
        raise ConfigError(f"{path}: need columns f_hz,rac_ohm") from None
    pairs = []
    for line in lines[1:]:
        cells = line.split(",")
        pairs.append((float(cells[fi]), float(cells[ri])))
    pairs.sort()
    if len(pairs) < 2:
        raise ConfigError(f"{path}: need at least two rows to interpolate Rac")
    return ripple_mod.TabulatedEsr(
        frequencies=tuple(f for f, _ in pairs),
        resistances=tuple(r for _, r in pairs),
    )


# -------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default=None,
                        help="output directory (default: $FLATWIRE_OUT_DIR or ./flatwire-out)")
    common.add_argument("--jobs", type=int, default=1,
                        help="parallel workers for sweeps (default 1)")
    common.add_argument("--csv", action="store_true",
                        help="print machine-readable CSV instead of a table")
    common.add_argument("--config", dest="config_flag", default=None,
                        help="config file (alternative to the positional argument)")

    parser = argparse.ArgumentParser(
        prog="flatwire",
        description="Flat-wire inductor analysis: DC resistance, reluctance "
                    "network, axisymmetric eddy-current field solves, "
                    "sensitivity sweeps and converter ripple losses.",
    )
    parser.add_argument("--version", action="version", version=f"flatwire {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schema", parents=[common], help="print the annotated config schema")
    p.set_defaults(func=cmd_schema)

    p = sub.add_parser("dcr", parents=[common], help="DC resistance by all models")
    p.add_argument("config", nargs="?", help="design config file")
    p.add_argument("--temperature", type=float, default=None,
                   help="winding temperature in C; rescales copper conductivity")
    p.set_defaults(func=cmd_dcr)

    p = sub.add_parser("mec", parents=[common],
                       help="reluctance network: R0, L0, optionally Z(f)")
    p.add_argument("config", nargs="?")
    p.add_argument("--freqs", default=None, help='e.g. "0,10k,100k" or "log:1k:1M:13"')
    p.add_argument("--q-from", default=None,
                   help="CSV with f_hz,q_re,q_im columns (a solve output) for the eddy factor")
    p.add_argument("--q-tau", type=float, default=None,
                   help="first-order eddy factor time constant [s]")
    p.set_defaults(func=cmd_mec)

    p = sub.add_parser("solve", parents=[common],
                       help="axisymmetric eddy-current field solve")
    p.add_argument("config", nargs="?")
    p.add_argument("--freq", required=True, help='e.g. "0,100k" or "log:1k:1M:13"')
    p.add_argument("--cells-per-skin-depth", type=float, default=3.0)
    p.add_argument("--padding", type=float, default=1.0,
                   help="air padding in core diameters")
    p.add_argument("--source-model", choices=["voltage", "uniform"], default="voltage")
    p.add_argument("--current", type=float, default=1.0, help="terminal current [A peak]")
    p.add_argument("--dump-fields", action="store_true",
                   help="also write per-frequency field grids")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", parents=[common], help="sensitivity sweep")
    p.add_argument("config", nargs="?")
    p.add_argument("--parameter", required=True, choices=sweep_mod.PARAMETERS)
    p.add_argument("--values", required=True,
                   help="comma-separated SI values, strictly monotone")
    p.add_argument("--closure", default="auto", choices=sweep_mod.CLOSURES,
                   help="which parameter absorbs the change (default: auto)")
    p.add_argument("--frequency", type=float, default=100e3,
                   help="field-solve frequency for Rac/L columns [Hz]")
    p.add_argument("--dc-current", type=float, default=15.0)
    p.add_argument("--ac-current", type=float, default=5.0,
                   help="peak AC current for the loss column [A]")
    p.add_argument("--source-model", choices=["voltage", "uniform"], default="voltage")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ripple", parents=[common],
                       help="triangle-ripple harmonic spectrum and AC loss")
    p.add_argument("--vo", type=float, required=True,
                   help="output voltage [V]; at the model's fixed 50 %% duty this "
                        "is also the square-wave amplitude across the inductor "
                        "(input voltage = 2*Vo)")
    p.add_argument("--fs", type=float, required=True, help="switching frequency [Hz]")
    p.add_argument("--inductance", type=float, default=None, help="L at fs [H]")
    p.add_argument("--rac", type=float, default=None, help="winding ESR at fs [ohm]")
    p.add_argument("--rac-csv", default=None,
                   help="CSV with f_hz,rac_ohm columns (tabulated ESR)")
    p.add_argument("--from-solve", default=None,
                   help="pull L and Rac at fs from a solve CSV")
    p.add_argument("--cp", type=float, default=None, help="parasitic capacitance [F]")
    p.add_argument("--h-max", type=int, default=25)
    p.add_argument("--dc-current", type=float, default=None,
                   help="DC bias for the separate I^2*DCR line item [A]")
    p.add_argument("--dcr", type=float, default=None, help="DC resistance [ohm]")
    p.set_defaults(func=cmd_ripple)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValidationError, GeometryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, TopologyError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except FlatwireError as exc:  # fallback for future error kinds
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
