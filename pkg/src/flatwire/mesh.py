"""Structured r-z grids for the axisymmetric eddy-current solver.

``build_mesh`` turns a design into a tensor-product grid covering the
core plus an air padding on every open side. Region boundaries (turn
faces, gap faces, core surfaces) always coincide with grid lines, and
conductor cells are refined so that no edge exceeds one third (by
default) of the skin depth at the policy's target frequency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.constants import mu_0

from .design import InductorDesign
from .errors import GeometryError

MATERIAL_AIR = 0
MATERIAL_CORE = 1
MATERIAL_CONDUCTOR = 2

_EPS = 1e-12


def skin_depth(frequency: float, conductivity: float, mu_r: float = 1.0) -> float:
    """delta = sqrt(2 / (omega * mu * sigma)); infinite at DC."""
    if frequency <= 0.0:
        return math.inf
    omega = 2.0 * math.pi * frequency
    return math.sqrt(2.0 / (omega * mu_0 * mu_r * conductivity))


@dataclass(frozen=True)
class MeshPolicy:
    """Resolution policy for ``build_mesh``.

    max_frequency          highest frequency the grid will be solved at
    cells_per_skin_depth   conductor edge length <= delta / this
    padding_core_diameters air padding on open sides, in core diameters
    resolution_scale       integer multiplier on every region's cell count
    """

    max_frequency: float = 100e3
    cells_per_skin_depth: float = 3.0
    padding_core_diameters: float = 1.0
    resolution_scale: int = 1

    def doubled(self) -> "MeshPolicy":
        return replace(self, resolution_scale=self.resolution_scale * 2)


@dataclass(frozen=True)
class Grid:
    """Tensor grid with cell-wise materials.

    r_edges, z_edges   cell edge coordinates [m], strictly increasing
    material           (nz, nr) cell material id
    turn_id            (nz, nr) turn index 1..N for conductor cells, else 0
    conductivity       (nz, nr) [S/m]
    mu_r               (nz, nr) relative permeability
    """

    r_edges: np.ndarray
    z_edges: np.ndarray
    material: np.ndarray
    turn_id: np.ndarray
    conductivity: np.ndarray
    mu_r: np.ndarray

    def __post_init__(self):
        for name in ("r_edges", "z_edges", "material", "turn_id", "conductivity", "mu_r"):
            getattr(self, name).setflags(write=False)
        if np.any(np.diff(self.r_edges) <= 0) or np.any(np.diff(self.z_edges) <= 0):
            raise GeometryError("grid edge coordinates must be strictly increasing")

    @property
    def nr(self) -> int:
        return len(self.r_edges) - 1

    @property
    def nz(self) -> int:
        return len(self.z_edges) - 1

    @property
    def r_centers(self) -> np.ndarray:
        return 0.5 * (self.r_edges[:-1] + self.r_edges[1:])

    @property
    def z_centers(self) -> np.ndarray:
        return 0.5 * (self.z_edges[:-1] + self.z_edges[1:])

    @property
    def n_turns(self) -> int:
        return int(self.turn_id.max(initial=0))

    def cell_sizes(self) -> tuple[np.ndarray, np.ndarray]:
        return np.diff(self.r_edges), np.diff(self.z_edges)


def make_grid(r_edges, z_edges, material, turn_id, conductor_sigma: float,
              core_mu_r: float) -> Grid:
    """Assemble a Grid from edge arrays and a material map; conductivity
    and permeability follow the material ids."""
    material = np.asarray(material, dtype=np.uint8)
    turn_id = np.asarray(turn_id, dtype=np.int32)
    sigma = np.where(material == MATERIAL_CONDUCTOR, conductor_sigma, 0.0)
    mu_r = np.where(material == MATERIAL_CORE, core_mu_r, 1.0)
    return Grid(
        r_edges=np.asarray(r_edges, dtype=float),
        z_edges=np.asarray(z_edges, dtype=float),
        material=material,
        turn_id=turn_id,
        conductivity=sigma.astype(float),
        mu_r=mu_r.astype(float),
    )


def _subdivide(a: float, b: float, target: float, scale: int) -> np.ndarray:
    """Uniform edges over [a, b], endpoints included. The base count is
    ceil(length/target), times ``scale`` so doubling the policy doubles
    every region's cell count exactly."""
    length = b - a
    if length <= 0:
        return np.array([a])
    base = max(1, math.ceil(length / target - 1e-9))
    return np.linspace(a, b, base * scale + 1)


def _pad_down(boundary: float, length: float, scale: int,
              base_count: int = 9, ratio: float = 1.4) -> np.ndarray:
    """Geometrically growing padding below ``boundary`` (both ends
    included), smallest cell adjacent to the boundary."""
    return np.sort(boundary - _pad_up(0.0, length, scale, base_count, ratio))


def _pad_up(boundary: float, length: float, scale: int,
            base_count: int = 9, ratio: float = 1.4) -> np.ndarray:
    """Geometrically growing padding above ``boundary`` (both ends
    included), smallest cell adjacent to the boundary."""
    n = base_count * scale
    rho = ratio ** (1.0 / scale)
    weights = np.concatenate([[0.0], np.cumsum(rho ** np.arange(n))])
    return boundary + length * weights / weights[-1]


def _dedup(edges: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    edges = np.unique(edges)
    keep = np.concatenate([[True], np.diff(edges) > tol])
    return edges[keep]


def build_mesh(design: InductorDesign, policy: MeshPolicy) -> Grid:
    """Discretize a design.

    The window bottom sits at z = 0 and the coil stack is centred in the
    window. Padding extends one core diameter (by default) beyond the
    outer shell radially and beyond each yoke axially; the outer boundary
    carries the zero-potential condition.
    """
    coil = design.coil
    core = design.core
    cl = design.clearances
    if cl.inner < 0 or cl.outer < 0:
        raise GeometryError("negative clearances cannot be meshed")
    if coil.height > core.window_height + 1e-12:
        raise GeometryError("coil does not fit the window axially")

    scale = policy.resolution_scale
    delta = skin_depth(policy.max_frequency, coil.conductivity)
    cond_target = delta / policy.cells_per_skin_depth  # inf at DC

    r_leg = core.center_leg_radius
    r_in = coil.inner_radius
    r_out = coil.outer_radius
    r_window = core.window_outer_radius
    r_shell = core.outer_radius
    yoke = core.resolved_yoke_thickness()
    height = core.window_height
    pad = policy.padding_core_diameters * 2.0 * r_shell

    # --- radial edges ---
    r_parts = [
        _subdivide(0.0, r_leg, r_leg / 8, scale),
        _subdivide(r_leg, r_in, max(r_in - r_leg, _EPS) / 4, scale),
        _subdivide(r_in, r_out, min(coil.radial_depth / 8, cond_target), scale),
        _subdivide(r_out, r_window, max(r_window - r_out, _EPS) / 4, scale),
        _subdivide(r_window, r_shell, core.outer_leg_thickness / 3, scale),
        _pad_up(r_shell, pad, scale),
    ]
    r_edges = _dedup(np.concatenate(r_parts))

    # --- axial keypoints inside the window ---
    z_coil0 = 0.5 * (height - coil.height)
    pitch = coil.thickness + coil.spacing
    turn_spans = [
        (z_coil0 + k * pitch, z_coil0 + k * pitch + coil.thickness)
        for k in range(coil.turns)
    ]
    gap_spans = [(g.bottom, g.top) for g in core.gaps]
    keys = sorted({0.0, height,
                   *(min(max(v, 0.0), height) for a, b in turn_spans + gap_spans
                     for v in (a, b))})

    def window_target(a: float, b: float) -> float:
        mid = 0.5 * (a + b)
        candidates = [b - a]  # one cell by default
        if any(ta - _EPS <= mid <= tb + _EPS for ta, tb in turn_spans):
            candidates.append(min(coil.thickness / 2, cond_target))
        elif z_coil0 - _EPS <= mid <= z_coil0 + coil.height + _EPS and coil.spacing > 0:
            candidates.append(min(coil.spacing, cond_target))
        for ga, gb in gap_spans:
            if ga - _EPS <= mid <= gb + _EPS:
                candidates.append((gb - ga) / 4)
                break
        return max(min(candidates), 1e-9)

    z_parts = [_pad_down(-yoke, pad, scale),
               _subdivide(-yoke, 0.0, yoke / 3, scale)]
    for a, b in zip(keys[:-1], keys[1:]):
        z_parts.append(_subdivide(a, b, window_target(a, b), scale))
    z_parts.append(_subdivide(height, height + yoke, yoke / 3, scale))
    z_parts.append(_pad_up(height + yoke, pad, scale))
    z_edges = _dedup(np.concatenate(z_parts))

    # --- material map (cell centres against the exact region bounds) ---
    nr, nz = len(r_edges) - 1, len(z_edges) - 1
    r_mid = 0.5 * (r_edges[:-1] + r_edges[1:])[None, :]
    z_mid = 0.5 * (z_edges[:-1] + z_edges[1:])[:, None]
    material = np.full((nz, nr), MATERIAL_AIR, dtype=np.uint8)
    turn_id = np.zeros((nz, nr), dtype=np.int32)

    in_window_z = (z_mid > 0.0) & (z_mid < height)
    leg = (r_mid < r_leg) & in_window_z
    for ga, gb in gap_spans:
        leg &= ~((z_mid > ga) & (z_mid < gb))
    material[leg] = MATERIAL_CORE
    shell = (r_mid > r_window) & (r_mid < r_shell) & in_window_z
    material[shell] = MATERIAL_CORE
    yoke_z = ((z_mid > -yoke) & (z_mid < 0.0)) | ((z_mid > height) & (z_mid < height + yoke))
    material[np.broadcast_to(yoke_z, (nz, nr)) & (np.broadcast_to(r_mid < r_shell, (nz, nr)))] = MATERIAL_CORE

    radial_in_coil = (r_mid > r_in) & (r_mid < r_out)
    for k, (ta, tb) in enumerate(turn_spans, start=1):
        cells = radial_in_coil & (z_mid > ta) & (z_mid < tb)
        material[cells] = MATERIAL_CONDUCTOR
        turn_id[cells] = k

    return make_grid(r_edges, z_edges, material, turn_id,
                     conductor_sigma=coil.conductivity, core_mu_r=core.permeability)
