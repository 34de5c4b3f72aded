"""Grid construction: sizing rules, tagging, policy contracts."""

import dataclasses

import numpy as np
import pytest

from flatwire.design import Clearances
from flatwire.errors import GeometryError
from flatwire.mesh import (
    MATERIAL_AIR,
    MATERIAL_CONDUCTOR,
    MATERIAL_CORE,
    Grid,
    MeshPolicy,
    build_mesh,
    make_grid,
    skin_depth,
)


def test_skin_depth_reference_value():
    # copper at 100 kHz
    assert skin_depth(100e3, 5.8e7) == pytest.approx(0.209e-3, abs=1e-6)
    assert skin_depth(0.0, 5.8e7) == np.inf


def test_conductor_cells_within_skin_limit(proto, proto_grid):
    delta = skin_depth(100e3, proto.coil.conductivity)
    dr, dz = proto_grid.cell_sizes()
    jz, ir = np.nonzero(proto_grid.material == MATERIAL_CONDUCTOR)
    assert dr[ir].max() <= delta / 3 * (1 + 1e-9)
    assert dz[jz].max() <= delta / 3 * (1 + 1e-9)
    # the documented number: cells no larger than 0.0696 mm at 100 kHz
    assert dr[ir].max() <= 0.0697e-3


def test_every_conductor_cell_has_exactly_one_turn(proto, proto_grid):
    conductor = proto_grid.material == MATERIAL_CONDUCTOR
    assert np.all(proto_grid.turn_id[conductor] >= 1)
    assert np.all(proto_grid.turn_id[~conductor] == 0)
    assert proto_grid.n_turns == proto.coil.turns
    # every turn is populated; counts differ only where gap keylines add
    # a subdivision inside a turn span
    counts = np.bincount(proto_grid.turn_id[conductor])[1:]
    assert counts.min() > 0
    assert counts.max() <= 1.25 * counts.min()


def test_turn_areas_exact(proto, proto_grid):
    dr, dz = proto_grid.cell_sizes()
    area = np.outer(dz, dr)
    total = area[proto_grid.material == MATERIAL_CONDUCTOR].sum()
    expected = proto.coil.turns * proto.coil.thickness * proto.coil.radial_depth
    assert total == pytest.approx(expected, rel=1e-12)


def test_region_boundaries_are_grid_lines(proto, proto_grid):
    for r_key in (proto.core.center_leg_radius, proto.coil.inner_radius,
                  proto.coil.outer_radius, proto.core.window_outer_radius,
                  proto.core.outer_radius):
        assert np.min(np.abs(proto_grid.r_edges - r_key)) < 1e-12
    for gap in proto.core.gaps:
        assert np.min(np.abs(proto_grid.z_edges - gap.bottom)) < 1e-12
        assert np.min(np.abs(proto_grid.z_edges - gap.top)) < 1e-12


def test_padding_extends_one_core_diameter(proto, proto_grid):
    pad = 2.0 * proto.core.outer_radius
    assert proto_grid.r_edges[-1] >= proto.core.outer_radius + pad - 1e-12
    yoke = proto.core.resolved_yoke_thickness()
    assert proto_grid.z_edges[0] <= -yoke - pad + 1e-12
    assert proto_grid.z_edges[-1] >= proto.core.window_height + yoke + pad - 1e-12


def test_dc_policy_allows_coarse_conductor(proto):
    grid = build_mesh(proto, MeshPolicy(max_frequency=0.0))
    dr, _ = grid.cell_sizes()
    jz, ir = np.nonzero(grid.material == MATERIAL_CONDUCTOR)
    # 8 radial cells across the 8 mm depth instead of 115
    assert dr[ir].max() == pytest.approx(1e-3, rel=1e-9)


def test_doubling_policy_doubles_cell_counts(proto, proto_policy, proto_grid):
    doubled = build_mesh(proto, proto_policy.doubled())
    assert doubled.nr == 2 * proto_grid.nr
    assert doubled.nz == 2 * proto_grid.nz
    n_cond = int(np.sum(proto_grid.material == MATERIAL_CONDUCTOR))
    n_cond2 = int(np.sum(doubled.material == MATERIAL_CONDUCTOR))
    assert n_cond2 == 4 * n_cond


def test_material_map_regions(proto, proto_grid):
    # a cell inside the first gap must be air, its neighbours in the leg core
    gap = proto.core.gaps[0]
    i_leg = np.searchsorted(proto_grid.r_edges, proto.core.center_leg_radius / 2) - 1
    j_gap = np.searchsorted(proto_grid.z_edges, gap.position) - 1
    assert proto_grid.material[j_gap, i_leg] == MATERIAL_AIR
    j_above = np.searchsorted(proto_grid.z_edges, gap.top + 0.3e-3) - 1
    assert proto_grid.material[j_above, i_leg] == MATERIAL_CORE
    assert proto_grid.conductivity[j_gap, i_leg] == 0.0
    assert proto_grid.mu_r[j_above, i_leg] == proto.core.permeability


def test_negative_clearance_rejected(proto):
    bad = dataclasses.replace(proto, clearances=Clearances(inner=-1e-3, outer=1.5e-3))
    with pytest.raises(GeometryError):
        build_mesh(bad, MeshPolicy(max_frequency=0.0))


def test_nonmonotonic_edges_rejected():
    with pytest.raises(GeometryError):
        make_grid([0.0, 1e-3, 1e-3], [0.0, 1e-3],
                  np.zeros((1, 2)), np.zeros((1, 2)), 5.8e7, 1000.0)


def test_grid_arrays_immutable(proto_grid):
    with pytest.raises(ValueError):
        proto_grid.material[0, 0] = MATERIAL_CORE
