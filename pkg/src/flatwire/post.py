"""Post-processing of field solutions.

Quadratures here mirror the assembly's (corner weights for linear
functionals, the blended bilinear mass for quadratic ones), so the
discrete identities - net turn current, terminal power balance, per-cell
losses summing to the total - hold to round-off rather than to
discretization accuracy.

Convention: currents and densities are peak phasors, so time-average
powers carry the 1/2; the axisymmetric volume element is 2*pi*r dr dz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .design import InductorDesign
from .errors import NumericalError
from .field import (
    MASS_BLEND,
    FieldProblem,
    FieldSolution,
    _corner_quadrature,
    assemble,
    solve_field,
)
from .mec import EddyFactor
from .mesh import MeshPolicy, build_mesh


@dataclass(frozen=True)
class CurrentDensity:
    """Cell-centred densities [A/m^2]; zero outside conductor cells."""

    j_source: np.ndarray
    j_eddy: np.ndarray
    j_total: np.ndarray


def current_density(solution: FieldSolution) -> CurrentDensity:
    """Split the azimuthal current into source and induced eddy parts,
    J_eddy = -j*omega*sigma*A_phi."""
    grid = solution.grid
    a = solution.vector_potential()
    a_cell = 0.25 * (a[:-1, :-1] + a[:-1, 1:] + a[1:, :-1] + a[1:, 1:])
    conductor = grid.turn_id > 0
    j_eddy = np.where(conductor, -1j * solution.omega * grid.conductivity * a_cell, 0.0)
    j_source = solution.source_density_cells()
    return CurrentDensity(j_source=j_source, j_eddy=j_eddy, j_total=j_source + j_eddy)


def _corner_total_density(solution: FieldSolution):
    """Per conductor cell: corner nodes quadrature data and the total
    current density evaluated at the corners."""
    grid = solution.grid
    turn, nodes, weights, radii, sigmas = _corner_quadrature(grid)
    u = solution.flux_potential.ravel()
    a_corner = u[nodes] / radii
    amp = solution.source_amplitude[turn]
    if solution.problem.source_model == "voltage":
        j_src = amp[:, None] / radii
    else:
        j_src = amp[:, None] * np.ones_like(radii)
    j_tot = j_src - 1j * solution.omega * sigmas[:, None] * a_corner
    return turn, nodes, weights, radii, sigmas, j_tot


def _per_cell_loss(solution: FieldSolution):
    """Time-average ohmic loss per conductor cell [W] plus cell indices.

    P_cell = 1/2 * (2*pi/sigma) * quad(|J|^2 * r) with the same blended
    bilinear quadrature the assembly uses for the eddy term (radius split
    symmetrically as sqrt(r_n*r_m)), so the cell losses are nonnegative
    and their sum balances the terminal input power.
    """
    grid = solution.grid
    turn, _nodes, weights, radii, sigmas, j_tot = _corner_total_density(solution)
    y = j_tot * np.sqrt(radii)
    quad = np.einsum("cn,nm,cm->c", np.conj(y), MASS_BLEND, y).real
    p_cell = math.pi / sigmas * (4.0 * weights) * quad
    jz, ir = np.nonzero(grid.turn_id > 0)
    return turn, jz, ir, p_cell


def ac_resistance(solution: FieldSolution) -> float:
    """Effective series resistance from dissipated power: Rac = 2P/|I|^2."""
    current = solution.problem.current
    if current == 0:
        raise NumericalError("zero terminal current")
    return 2.0 * total_loss(solution) / abs(current) ** 2


def total_loss(solution: FieldSolution) -> float:
    """Total time-average conductor loss [W]."""
    _turn, _jz, _ir, p_cell = _per_cell_loss(solution)
    return float(np.sum(p_cell))


def inductance(solution: FieldSolution) -> complex:
    """Complex inductance from flux linkage.

    Each turn links the area-average of 2*pi*r*A_phi over its cross
    section; L = lambda / I.
    """
    grid = solution.grid
    turn, nodes, weights, _radii, _sigmas = _corner_quadrature(grid)
    u = solution.flux_potential.ravel()
    n_turns = grid.n_turns
    linked = np.zeros(n_turns, dtype=complex)
    areas = np.zeros(n_turns)
    np.add.at(linked, turn, np.sum(weights[:, None] * u[nodes], axis=1))
    np.add.at(areas, turn, 4.0 * weights)
    lam = 2.0 * math.pi * np.sum(linked / areas)
    return lam / solution.problem.current


def terminal_voltage(solution: FieldSolution) -> complex:
    """Terminal voltage V = sum_k 2*pi*amp_k/sigma_k (voltage source
    model only); the basis of the discrete power balance."""
    if solution.problem.source_model != "voltage":
        raise NumericalError("terminal voltage is defined for the voltage source model")
    grid = solution.grid
    sigma = np.zeros(grid.n_turns)
    counts = np.zeros(grid.n_turns)
    mask = grid.turn_id > 0
    np.add.at(sigma, grid.turn_id[mask] - 1, grid.conductivity[mask])
    np.add.at(counts, grid.turn_id[mask] - 1, 1.0)
    sigma /= counts
    if np.any(sigma <= 0):
        raise NumericalError("terminal voltage undefined for non-conducting turns")
    return complex(np.sum(2.0 * math.pi * solution.source_amplitude / sigma))


def input_power(solution: FieldSolution) -> float:
    """Terminal real input power (1/2)*Re(V*conj(I)) [W]."""
    v = terminal_voltage(solution)
    return 0.5 * (v * np.conj(solution.problem.current)).real


def extract_eddy_factor(frequencies, inductances, l0: float) -> EddyFactor:
    """Invert L = L0/(1+q) into a tabulated eddy factor.

    Feeding the result back through the reluctance model reproduces the
    tabulated inductances exactly.
    """
    freqs = [float(f) for f in frequencies]
    values = []
    for f, l_value in zip(freqs, inductances):
        l_value = complex(l_value)
        if l_value == 0:
            raise NumericalError(f"cannot extract eddy factor at {f!r} Hz: L = 0")
        values.append(l0 / l_value - 1.0)
    pairs = sorted((f, q) for f, q in zip(freqs, values) if f > 0)
    return EddyFactor(
        frequencies=tuple(f for f, _ in pairs),
        values=tuple(q for _, q in pairs),
    )


@dataclass(frozen=True)
class LossMap:
    """Spatial loss decomposition of one solution.

    density           (nz, nr) time-average dissipation density [W/m^3]
    per_turn          total loss per turn [W]
    per_turn_gap_adjacent   loss within the gap-adjacent band per turn
    gap_adjacent      loss in conductor cells within twice the gap length
                      of a gap rim [W]
    remainder         the rest of the conductor loss [W]
    currents          the source/eddy/total densities the map was built on
    """

    density: np.ndarray
    per_turn: np.ndarray
    per_turn_gap_adjacent: np.ndarray
    gap_adjacent: float
    remainder: float
    total: float
    currents: CurrentDensity


def gap_adjacent_mask(solution: FieldSolution, design: InductorDesign) -> np.ndarray:
    """Conductor cells within 2*g (Euclidean) of any gap rim."""
    grid = solution.grid
    r_mid = grid.r_centers[None, :]
    z_mid = grid.z_centers[:, None]
    mask = np.zeros((grid.nz, grid.nr), dtype=bool)
    r_leg = design.core.center_leg_radius
    for gap in design.core.gaps:
        dr = np.maximum(r_mid - r_leg, 0.0)
        dz = np.maximum.reduce([np.zeros_like(z_mid), gap.bottom - z_mid, z_mid - gap.top])
        near = np.hypot(dr, dz) <= 2.0 * gap.length
        mask |= near
    return mask & (grid.turn_id > 0)


def loss_map(solution: FieldSolution, design: InductorDesign) -> LossMap:
    grid = solution.grid
    turn, jz, ir, p_cell = _per_cell_loss(solution)
    dr, dz = grid.cell_sizes()
    volume = 2.0 * math.pi * grid.r_centers[ir] * dr[ir] * dz[jz]
    density = np.zeros((grid.nz, grid.nr))
    density[jz, ir] = p_cell / volume

    per_turn = np.zeros(grid.n_turns)
    np.add.at(per_turn, turn, p_cell)
    near = gap_adjacent_mask(solution, design)[jz, ir]
    per_turn_near = np.zeros(grid.n_turns)
    np.add.at(per_turn_near, turn[near], p_cell[near])
    total = float(np.sum(p_cell))
    gap_adjacent = float(np.sum(p_cell[near]))
    return LossMap(
        density=density,
        per_turn=per_turn,
        per_turn_gap_adjacent=per_turn_near,
        gap_adjacent=gap_adjacent,
        remainder=total - gap_adjacent,
        total=total,
        currents=current_density(solution),
    )


@dataclass(frozen=True)
class FrequencyResponse:
    """Tabulated response of one design over a frequency list.

    rac        effective series resistance [ohm]
    inductance complex inductance [H]
    q          eddy factor L0/L - 1 (0 at f = 0)
    loss_gap_adjacent / loss_remainder  conductor loss split [W] at the
               solve current
    l0         zero-frequency inductance [H]
    """

    frequencies: tuple[float, ...]
    rac: tuple[float, ...]
    inductance: tuple[complex, ...]
    q: tuple[complex, ...]
    loss_gap_adjacent: tuple[float, ...]
    loss_remainder: tuple[float, ...]
    per_turn_loss: tuple[tuple[float, ...], ...]
    per_turn_gap_adjacent: tuple[tuple[float, ...], ...]
    l0: float

    def eddy_factor(self) -> EddyFactor:
        positive = [(f, q) for f, q in zip(self.frequencies, self.q) if f > 0]
        return EddyFactor(
            frequencies=tuple(f for f, _ in positive),
            values=tuple(q for _, q in positive),
        )


def frequency_response(
    design: InductorDesign,
    frequencies,
    policy=None,
    source_model: str = "voltage",
    current: float = 1.0,
    grid=None,
) -> FrequencyResponse:
    """Solve the field problem over a frequency list and tabulate.

    A zero-frequency solve is always included (it provides L0 for the
    eddy factor) whether or not 0 appears in the list.
    """
    freqs = sorted({float(f) for f in frequencies})
    if any(f < 0 for f in freqs):
        raise ValueError("frequencies must be >= 0")
    if grid is None:
        if policy is None:
            policy = MeshPolicy(max_frequency=max(freqs) if freqs else 0.0)
        grid = build_mesh(design, policy)

    solutions: dict[float, FieldSolution] = {}
    for f in sorted(set(freqs) | {0.0}):
        problem = FieldProblem(grid=grid, frequency=f, current=current,
                               source_model=source_model)
        solutions[f] = solve_field(assemble(problem))
    l0 = abs(inductance(solutions[0.0]))

    rac = []
    l_list = []
    q_list = []
    near_list = []
    rest_list = []
    per_turn = []
    per_turn_near = []
    for f in freqs:
        sol = solutions[f]
        rac.append(ac_resistance(sol))
        l_value = inductance(sol)
        l_list.append(l_value)
        q_list.append(0.0 + 0.0j if f == 0.0 else l0 / l_value - 1.0)
        lm = loss_map(sol, design)
        near_list.append(lm.gap_adjacent)
        rest_list.append(lm.remainder)
        per_turn.append(tuple(lm.per_turn.tolist()))
        per_turn_near.append(tuple(lm.per_turn_gap_adjacent.tolist()))
    return FrequencyResponse(
        frequencies=tuple(freqs),
        rac=tuple(rac),
        inductance=tuple(l_list),
        q=tuple(q_list),
        loss_gap_adjacent=tuple(near_list),
        loss_remainder=tuple(rest_list),
        per_turn_loss=tuple(per_turn),
        per_turn_gap_adjacent=tuple(per_turn_near),
        l0=l0,
    )
