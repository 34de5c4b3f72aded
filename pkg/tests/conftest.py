"""Shared fixtures.

Field solves are expensive (seconds each), so the prototype solutions at
DC and 100 kHz are session-scoped and shared by the post-processing,
property and acceptance tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pytest

from flatwire.design import (
    Clearances,
    CoilSpec,
    CoreSpec,
    GapSpec,
    InductorDesign,
    require_valid,
)
from flatwire.field import FieldProblem, assemble, solve_field
from flatwire.mesh import MeshPolicy, build_mesh
from flatwire.presets import prototype


@pytest.fixture(scope="session")
def proto():
    return prototype()


@pytest.fixture(scope="session")
def proto_policy():
    return MeshPolicy(max_frequency=100e3)


@pytest.fixture(scope="session")
def proto_grid(proto, proto_policy):
    return build_mesh(proto, proto_policy)


@pytest.fixture(scope="session")
def proto_solution_dc(proto_grid):
    problem = FieldProblem(grid=proto_grid, frequency=0.0, current=1.0)
    return solve_field(assemble(problem))


@pytest.fixture(scope="session")
def proto_solution_100k(proto_grid):
    problem = FieldProblem(grid=proto_grid, frequency=100e3, current=1.0)
    return solve_field(assemble(problem))


def make_mini_design() -> InductorDesign:
    """Small five-turn design for fast solver tests; mirror-symmetric
    about the window mid-plane."""
    return require_valid(InductorDesign(
        coil=CoilSpec(
            inner_radius=6.0e-3,
            radial_depth=4.0e-3,
            thickness=1.0e-3,
            spacing=0.5e-3,
            turns=5,
        ),
        core=CoreSpec(
            center_leg_radius=5.0e-3,
            window_width=6.5e-3,
            window_height=9.0e-3,
            outer_leg_thickness=1.04e-3,
            effective_area=78.5e-6,
            segment_lengths=(9.0e-3, 8.0e-3, 9.0e-3, 8.0e-3),
            gaps=(GapSpec(position=3.0e-3, length=0.8e-3),
                  GapSpec(position=6.0e-3, length=0.8e-3)),
            permeability=2000.0,
            yoke_thickness=3.0e-3,
        ),
        clearances=Clearances(inner=1.0e-3, outer=1.5e-3),
    ))


@pytest.fixture(scope="session")
def mini_design():
    return make_mini_design()


@pytest.fixture(scope="session")
def mini_grid(mini_design):
    return build_mesh(mini_design, MeshPolicy(max_frequency=50e3))


@pytest.fixture(scope="session")
def mini_solution_50k(mini_grid):
    problem = FieldProblem(grid=mini_grid, frequency=50e3, current=1.0)
    return solve_field(assemble(problem))


@pytest.fixture(scope="session")
def proto_response_10k_200k(proto, proto_policy):
    """Prototype frequency response across the converter band, used to
    compare the tabulated ESR against the sqrt(f) scaling rule."""
    from flatwire import post

    return post.frequency_response(
        proto, [10e3, 30e3, 50e3, 100e3, 200e3], policy=proto_policy)


@dataclass
class SlabBenchmark:
    """Skin-effect slab: computed vs analytic cosh profile.

    A wide annular strip (60 mm) at a 3 m radius carrying 1 A at 100 kHz
    emulates the 1D conductive slab; the analytic transverse profile is
    J(z) proportional to cosh((1+j) z/delta). Errors are pointwise on |J|
    down the strip's radial centre line, cells at delta/4.
    """

    grid: object
    solution: object
    z_cells: np.ndarray
    j_cells: np.ndarray
    profile: np.ndarray            # analytic, corner-averaged like j_cells
    err_net_normalized: np.ndarray  # amplitude pinned by the net current
    err_ls: np.ndarray              # amplitude fitted in least squares


def _pad_up(boundary, length, n=20, ratio=1.4):
    w = np.cumsum(ratio ** np.arange(n))
    return boundary + length * w / w[-1]


@pytest.fixture(scope="session")
def slab_benchmark():
    from flatwire.mesh import MATERIAL_CONDUCTOR, make_grid, skin_depth
    from flatwire import post

    sigma = 5.8e7
    freq = 100e3
    delta = skin_depth(freq, sigma)
    thickness = 2e-3
    width = 60e-3
    radius = 3.0
    nz_slab = 40  # 0.05 mm cells: four per skin depth

    r_strip = np.linspace(radius - width / 2, radius + width / 2, 31)
    r_edges = np.unique(np.concatenate([
        np.sort(2 * (radius - width / 2) - _pad_up(radius - width / 2, 0.27)),
        r_strip,
        _pad_up(radius + width / 2, 0.27),
    ]))
    z_strip = np.linspace(-thickness / 2, thickness / 2, nz_slab + 1)
    z_edges = np.unique(np.concatenate([
        np.sort(-_pad_up(thickness / 2, 0.119)),
        z_strip,
        _pad_up(thickness / 2, 0.119),
    ]))
    nr, nz = len(r_edges) - 1, len(z_edges) - 1
    r_mid = 0.5 * (r_edges[:-1] + r_edges[1:])
    z_mid = 0.5 * (z_edges[:-1] + z_edges[1:])
    material = np.zeros((nz, nr), dtype=np.uint8)
    turn_id = np.zeros((nz, nr), dtype=np.int32)
    inside = ((np.abs(z_mid[:, None]) < thickness / 2)
              & (np.abs(r_mid[None, :] - radius) < width / 2))
    material[inside] = MATERIAL_CONDUCTOR
    turn_id[inside] = 1
    grid = make_grid(r_edges, z_edges, material, turn_id,
                     conductor_sigma=sigma, core_mu_r=1.0)

    solution = solve_field(assemble(FieldProblem(grid=grid, frequency=freq, current=1.0)))
    currents = post.current_density(solution)
    icol = int(np.argmin(np.abs(grid.r_centers - radius)))
    rows = np.nonzero(grid.turn_id[:, icol] == 1)[0]
    j_cells = currents.j_total[rows, icol]
    k = (1 + 1j) / delta
    z_lo = grid.z_edges[rows]
    z_hi = grid.z_edges[rows + 1]
    profile = 0.5 * (np.cosh(k * z_lo) + np.cosh(k * z_hi))

    dz = np.diff(grid.z_edges)[rows]
    amp_net = np.sum(j_cells * dz) / np.sum(profile * dz)
    err_net = np.abs(np.abs(j_cells) - np.abs(amp_net * profile)) / np.abs(amp_net * profile)
    amp_ls = np.vdot(profile, j_cells) / np.vdot(profile, profile)
    err_ls = np.abs(j_cells - amp_ls * profile) / np.abs(amp_ls * profile)
    return SlabBenchmark(
        grid=grid, solution=solution,
        z_cells=grid.z_centers[rows], j_cells=j_cells, profile=amp_net * profile,
        err_net_normalized=err_net, err_ls=err_ls,
    )
