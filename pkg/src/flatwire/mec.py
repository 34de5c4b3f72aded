"""Magnetic equivalent circuit of the gapped-core inductor.

The network is a ladder: the centre-leg branch chains the leg's core
piece with one element per air gap (each gap shunted by its fringing
permeance), a window-leakage element sits in parallel across that stack,
and the yoke/outer-shell core pieces close the loop. The coil appears as
an MMF source of N*i ampere-turns in series with the centre-leg branch.

Eddy currents in the winding enter through a dimensionless, frequency
dependent factor q(omega) that scales the total reluctance,
R_t = R0 * (1 + q), so the terminal inductance is L0 / (1 + q). q is
normally extracted from field-solver runs (post.extract_eddy_factor); a
first-order j*omega*tau form is available for quick studies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from scipy.constants import mu_0

from .design import FringingModel, InductorDesign
from .errors import ExtrapolationError, NumericalError, TopologyError

ReluctanceValue = Union[complex, float, Callable[[float], complex]]


@dataclass(frozen=True)
class NetworkElement:
    """One reluctance branch between two nodes.

    ``reluctance`` is a value in A-turn/Wb or a function of omega
    returning one (eddy elements evaluate to 0 at omega = 0).
    ``mmf_turns`` is the series MMF per ampere of terminal current,
    oriented from node_a to node_b.
    """

    kind: str  # gap | core | fringing | window-leakage | eddy
    label: str
    node_a: int
    node_b: int
    reluctance: ReluctanceValue
    mmf_turns: float = 0.0

    def value(self, omega: float = 0.0) -> complex:
        if callable(self.reluctance):
            return complex(self.reluctance(omega))
        return complex(self.reluctance)


@dataclass(frozen=True)
class ReluctanceNetwork:
    n_nodes: int
    elements: tuple[NetworkElement, ...]

    def source_elements(self) -> tuple[NetworkElement, ...]:
        return tuple(el for el in self.elements if el.mmf_turns != 0.0)


@dataclass(frozen=True)
class FluxSolution:
    """Branch fluxes [Wb] and node magnetic potentials [A-turn]."""

    potentials: np.ndarray
    fluxes: dict[str, complex]
    source_flux: complex


def _fringing_permeance(gap_length: float, rim_radius: float, model: FringingModel) -> float:
    """Permeance of the fringing paths around one gap [Wb/A-turn].

    Arc model: flux leaving the cylindrical gap rim follows circular arcs;
    a shell at distance x from the rim adds a path length of pi*x on top
    of the gap itself, giving P = scale * mu0 * perimeter / pi *
    ln(1 + pi*reach/g), with the reach defaulting to the gap length.
    """
    if model.model == "none" or model.scale == 0.0:
        return 0.0
    reach = model.reach if model.reach is not None else gap_length
    perimeter = 2.0 * math.pi * rim_radius
    return model.scale * mu_0 * perimeter / math.pi * math.log1p(math.pi * reach / gap_length)


def build_network(
    design: InductorDesign,
    *,
    fringing: FringingModel | None = None,
    window_leakage: bool = True,
    infinite_core: bool = False,
) -> ReluctanceNetwork:
    """Assemble the ladder network for a design.

    ``infinite_core`` drops every core piece (ideal iron), leaving the
    gaps to close the loop on their own; combined with
    ``fringing=FringingModel(model="none")`` and ``window_leakage=False``
    this exposes the bare series gap reluctance.
    """
    core = design.core
    coil = design.coil
    fringing = design.fringing if fringing is None else fringing

    mu_core = mu_0 * core.permeability
    area = core.effective_area

    # The main loop as an ordered list of series pieces; fringing shunts
    # ride along with their gap.
    pieces: list[tuple[str, str, float, float]] = []  # kind, label, reluctance, shunt permeance

    leg_core_length = core.segment_lengths[0] - core.total_gap_length
    if leg_core_length <= 0:
        raise TopologyError(
            f"gaps ({core.total_gap_length!r} m) consume the whole centre-leg "
            f"segment ({core.segment_lengths[0]!r} m)"
        )
    if not infinite_core:
        pieces.append(("core", "core:leg", leg_core_length / (mu_core * area), 0.0))
    for k, gap in enumerate(core.gaps):
        perm = _fringing_permeance(gap.length, core.center_leg_radius, fringing)
        pieces.append(("gap", f"gap:{k}", gap.length / (mu_0 * area), perm))
    n_center = len(pieces)
    if not infinite_core:
        for k, seg_length in enumerate(core.segment_lengths[1:], start=1):
            pieces.append(("core", f"core:return{k}", seg_length / (mu_core * area), 0.0))

    if not pieces:
        raise TopologyError("infinite_core without gaps leaves no reluctance in the loop")

    # Chain the pieces into a ring: piece i runs from node i to node i+1,
    # the last one back to node 0. The coil MMF sits in the series part of
    # the loop (the first return piece) so that the window-leakage shunt
    # parallels only the centre-leg stack: leakage flux crosses the window
    # inside the coil bore and therefore links the full winding.
    n_pieces = len(pieces)
    mmf_piece = n_center if n_pieces > n_center else 0
    elements: list[NetworkElement] = []
    for i, (kind, label, value, shunt) in enumerate(pieces):
        a, b = i, (i + 1) % n_pieces
        mmf = float(coil.turns) if i == mmf_piece else 0.0
        elements.append(NetworkElement(kind, label, a, b, value, mmf))
        if shunt > 0.0:
            elements.append(NetworkElement("fringing", label.replace("gap", "fringing"),
                                           a, b, 1.0 / shunt))

    if window_leakage:
        top = n_center % n_pieces
        if top == 0:
            raise TopologyError(
                "window leakage across the centre-leg stack is not representable "
                "with an ideal return path; disable one of the two"
            )
        # Leakage across the window: the annulus between the centre leg
        # and the coil inner radius, traversed axially over the coil
        # height. Leakage through the coil body itself belongs to the
        # eddy factor, not to the zero-frequency network.
        annulus = math.pi * (coil.inner_radius**2 - core.center_leg_radius**2)
        if annulus > 0:
            elements.append(NetworkElement(
                "window-leakage", "leakage:window", 0, top,
                coil.height / (mu_0 * annulus),
            ))

    return ReluctanceNetwork(n_nodes=n_pieces, elements=tuple(elements))


def _connected(network: ReluctanceNetwork) -> bool:
    adjacency: dict[int, list[int]] = {}
    for el in network.elements:
        adjacency.setdefault(el.node_a, []).append(el.node_b)
        adjacency.setdefault(el.node_b, []).append(el.node_a)
    seen = {0}
    frontier = [0]
    while frontier:
        for peer in adjacency.get(frontier.pop(), []):
            if peer not in seen:
                seen.add(peer)
                frontier.append(peer)
    return len(seen) == network.n_nodes


def solve_flux(network: ReluctanceNetwork, terminal_current: float,
               omega: float = 0.0) -> FluxSolution:
    """Nodal solve: flux conservation at every node, MMF drops around
    loops. Branch flux (a to b) is (U_a - U_b + F) / R.

    Zero-reluctance branches (eddy elements at omega = 0) are contracted;
    their fluxes are recovered from the node balances afterwards.
    """
    if network.n_nodes < 1:
        raise TopologyError("empty network")
    if not _connected(network):
        raise TopologyError("network graph is not connected")

    n = network.n_nodes
    values = [el.value(omega) for el in network.elements]

    # Contract zero-reluctance branches (union-find).
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for el, r in zip(network.elements, values):
        if r == 0:
            if el.mmf_turns:
                raise TopologyError(f"source branch {el.label} has zero reluctance")
            a, b = find(el.node_a), find(el.node_b)
            if a != b:
                parent[max(a, b)] = min(a, b)

    groups = sorted({find(i) for i in range(n)})
    reduced = {g: k for k, g in enumerate(groups)}
    m = len(groups)

    g_full = np.zeros((m, m), dtype=complex)
    rhs_full = np.zeros(m, dtype=complex)
    for el, r in zip(network.elements, values):
        if r == 0:
            continue
        g = 1.0 / r
        a, b = reduced[find(el.node_a)], reduced[find(el.node_b)]
        g_full[a, a] += g
        g_full[b, b] += g
        g_full[a, b] -= g
        g_full[b, a] -= g
        if el.mmf_turns:
            f = el.mmf_turns * terminal_current
            rhs_full[a] -= f * g
            rhs_full[b] += f * g

    reduced_potentials = np.zeros(m, dtype=complex)
    if m > 1:
        try:
            reduced_potentials[1:] = np.linalg.solve(g_full[1:, 1:], rhs_full[1:])
        except np.linalg.LinAlgError as exc:
            raise TopologyError(f"singular network: {exc}") from exc
    potentials = np.array([reduced_potentials[reduced[find(i)]] for i in range(n)])

    fluxes: dict[str, complex] = {}
    zero_indices = [k for k, r in enumerate(values) if r == 0]
    for k, (el, r) in enumerate(zip(network.elements, values)):
        if r == 0:
            continue
        f = el.mmf_turns * terminal_current
        fluxes[el.label] = (potentials[el.node_a] - potentials[el.node_b] + f) / r

    if zero_indices:
        # Flux through contracted branches from the original node
        # balances: unknowns are the zero-R branch fluxes.
        incidence = np.zeros((n, len(zero_indices)))
        balance = np.zeros(n, dtype=complex)
        for k, (el, r) in enumerate(zip(network.elements, values)):
            if r == 0:
                col = zero_indices.index(k)
                incidence[el.node_a, col] += 1.0   # flux leaves node_a
                incidence[el.node_b, col] -= 1.0
            else:
                flux = fluxes[el.label]
                balance[el.node_a] += flux
                balance[el.node_b] -= flux
        solution, *_ = np.linalg.lstsq(incidence, -balance, rcond=None)
        residual = incidence @ solution + balance
        if np.max(np.abs(residual)) > 1e-9 * (1.0 + np.max(np.abs(balance))):
            raise TopologyError("zero-reluctance branch fluxes are underdetermined")
        for col, k in enumerate(zero_indices):
            fluxes[network.elements[k].label] = complex(solution[col])

    source_flux = sum(fluxes[el.label] for el in network.elements if el.mmf_turns)
    return FluxSolution(potentials=potentials, fluxes=fluxes, source_flux=complex(source_flux))


def total_reluctance(network: ReluctanceNetwork, omega: float = 0.0) -> complex:
    """Source-seen total reluctance R = F / phi."""
    sources = network.source_elements()
    if not sources:
        raise TopologyError("network has no MMF source")
    turns = sum(el.mmf_turns for el in sources)
    solution = solve_flux(network, 1.0, omega)
    return turns / solution.source_flux


def zero_freq_inductance(network: ReluctanceNetwork, turns: int) -> float:
    """L0 = N^2 / R0 with R0 the zero-frequency source-seen reluctance."""
    r0 = total_reluctance(network, 0.0)
    if abs(r0.imag) > 1e-9 * abs(r0):
        raise NumericalError(f"zero-frequency reluctance is not real: {r0!r}")
    return turns**2 / r0.real


@dataclass(frozen=True)
class EddyFactor:
    """Tabulated eddy reluctance factor q(omega), linearly interpolated.

    The table is anchored at q(0) = 0; evaluation above the last tabulated
    frequency raises ExtrapolationError rather than extrapolating.
    Frequencies are in Hz, positive and strictly increasing.
    """

    frequencies: tuple[float, ...]
    values: tuple[complex, ...]

    def __post_init__(self):
        freqs = self.frequencies
        if len(freqs) != len(self.values):
            raise ValueError("frequencies and values must have equal length")
        if not freqs:
            raise ValueError("empty eddy factor table")
        if freqs[0] <= 0 or any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise ValueError("frequencies must be positive and strictly increasing")
        for f, q in zip(freqs, self.values):
            if complex(q).real < -1e-9:
                raise ValueError(f"Re q must be >= 0, got {q!r} at {f!r} Hz")

    def __call__(self, omega: float) -> complex:
        if omega == 0.0:
            return 0.0 + 0.0j
        freq = omega / (2.0 * math.pi)
        if freq > self.frequencies[-1] * (1.0 + 1e-12):
            raise ExtrapolationError(
                f"eddy factor requested at {freq:.6g} Hz, above tabulated "
                f"maximum {self.frequencies[-1]:.6g} Hz"
            )
        freq = min(freq, self.frequencies[-1])
        table_f = (0.0,) + self.frequencies
        table_q = (0.0 + 0.0j,) + tuple(complex(v) for v in self.values)
        for left in range(len(table_f) - 1):
            if table_f[left] <= freq <= table_f[left + 1]:
                w = (freq - table_f[left]) / (table_f[left + 1] - table_f[left])
                return table_q[left] * (1.0 - w) + table_q[left + 1] * w
        raise ExtrapolationError(f"eddy factor table lookup failed at {freq!r} Hz")


@dataclass(frozen=True)
class FirstOrderEddyFactor:
    """q(omega) = j*omega*tau; a single-pole stand-in for quick studies."""

    tau: float

    def __call__(self, omega: float) -> complex:
        return 1j * omega * self.tau


EddyFactorModel = Callable[[float], complex]


def apply_eddy_factor(network: ReluctanceNetwork, q_model: EddyFactorModel,
                      omega: float) -> complex:
    """Total reluctance with eddy effects: R_t = R0 * (1 + q(omega))."""
    q0 = complex(q_model(0.0))
    if q0 != 0:
        raise ValueError(f"eddy factor must vanish at omega=0, got {q0!r}")
    r0 = total_reluctance(network, 0.0).real
    return r0 * (1.0 + complex(q_model(omega)))


def with_eddy_element(network: ReluctanceNetwork, q_model: EddyFactorModel) -> ReluctanceNetwork:
    """Insert the frequency-dependent eddy reluctance R0*q(omega) in
    series with the source branch, so R_t appears in the ladder itself."""
    r0 = total_reluctance(network, 0.0).real
    sources = network.source_elements()
    if len(sources) != 1:
        raise TopologyError("expected exactly one source branch")
    src = sources[0]
    eddy_node = network.n_nodes
    rebuilt = [
        NetworkElement(el.kind, el.label, el.node_a, eddy_node, el.reluctance, el.mmf_turns)
        if el is src else el
        for el in network.elements
    ]
    rebuilt.append(NetworkElement(
        "eddy", "eddy:winding", eddy_node, src.node_b,
        lambda omega: r0 * complex(q_model(omega)),
    ))
    return ReluctanceNetwork(n_nodes=network.n_nodes + 1, elements=tuple(rebuilt))


@dataclass(frozen=True)
class TerminalImpedance:
    """Terminal impedance over a frequency list.

    z                    V/I [ohm]
    inductance_complex   N^2 / R_t [H]
    inductance_series    Im(Z - R_lead)/omega [H] (the series-model L)
    """

    frequencies: tuple[float, ...]
    z: tuple[complex, ...]
    inductance_complex: tuple[complex, ...]
    inductance_series: tuple[float, ...]
    r_lead: float
    turns: int


def coupled_system_impedance(r_lead: float, turns: int, r_total: complex,
                             omega: float) -> complex:
    """Solve the 2x2 coupled electric-magnetic system for Z = V/I:
    [[R_lead, j*omega*N], [-N, R_t]] [I, phi]^T = [V, 0]^T with V = 1."""
    matrix = np.array([[r_lead, 1j * omega * turns], [-turns, r_total]], dtype=complex)
    try:
        current, _flux = np.linalg.solve(matrix, np.array([1.0, 0.0], dtype=complex))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular terminal system: {exc}") from exc
    if current == 0:
        raise NumericalError("terminal system produced zero current under voltage drive")
    return 1.0 / current


def terminal_impedance(
    r_lead: float,
    turns: int,
    network: ReluctanceNetwork,
    q_model: EddyFactorModel,
    frequencies: Sequence[float],
) -> TerminalImpedance:
    """Z(j*omega) = R_lead + j*omega*N^2/R_t over a frequency list [Hz]."""
    r0 = total_reluctance(network, 0.0).real
    z_list: list[complex] = []
    lc_list: list[complex] = []
    ls_list: list[float] = []
    for f in frequencies:
        if f < 0:
            raise ValueError(f"negative frequency {f!r}")
        omega = 2.0 * math.pi * f
        if r_lead == 0.0 and omega == 0.0:
            raise NumericalError(
                "terminal system is singular at omega=0 with zero lead resistance"
            )
        r_t = r0 * (1.0 + complex(q_model(omega)))
        l_complex = turns**2 / r_t
        z = r_lead + 1j * omega * l_complex
        z_list.append(z)
        lc_list.append(l_complex)
        ls_list.append((z - r_lead).imag / omega if omega > 0 else turns**2 / r_t.real)
    return TerminalImpedance(
        frequencies=tuple(float(f) for f in frequencies),
        z=tuple(z_list),
        inductance_complex=tuple(lc_list),
        inductance_series=tuple(ls_list),
        r_lead=r_lead,
        turns=turns,
    )
