import numpy as np
import pytest

import eitlab as el
from eitlab.geometry import (InvalidSpecError, NoChainError, TooCoarseError,
                             mesh_hash, read_mesh, write_mesh)


def test_single_region_partition():
    p = el.build_partition(1)
    assert len(p.regions) == 1
    interior = [s for s in p.interfaces if s.index >= 2]
    assert interior == []
    assert p.interfaces[0].y == 0.0


def test_three_strip_interfaces_and_chain():
    p = el.build_partition(3)
    heights = {s.index: s.y for s in p.interfaces}
    assert heights[2] == pytest.approx(1 / 3)
    assert heights[3] == pytest.approx(2 / 3)
    ch = el.build_chain(p, 3)
    assert ch.regions == (1, 2, 3)
    assert ch.links == (2, 3)


def test_extension_partition_geometry():
    p = el.build_partition(2, with_extension=True)
    assert len(p.regions) == 3
    assert p.region_by_label(0).thickness == pytest.approx(p.r0)
    s1 = p.interface_by_index(1)
    assert s1.y == 0.0 and s1.below == 0 and s1.above == 1
    # deep part of the extension is in K and at depth >= r0/2 below the edge
    k0_point = (0.9, -p.r0 / 2 - 0.05)
    assert p.chain_set_contains(k0_point)
    assert 0.0 - k0_point[1] >= p.r0 / 2
    ch = el.build_chain(p, 2)
    assert ch.regions == (0, 1, 2)


def test_marked_points_carry_interface_ball():
    p = el.build_partition(4)
    for s in p.interfaces:
        px = s.point[0]
        assert px - p.r0 / 3 >= s.x0 - 1e-12
        assert px + p.r0 / 3 <= s.x1 + 1e-12


def test_invalid_specs():
    with pytest.raises(InvalidSpecError):
        el.build_partition(0)
    with pytest.raises(InvalidSpecError):
        el.build_partition(-2)
    with pytest.raises(InvalidSpecError):
        el.build_partition(2, rect=(0, 0, 1, 0))


def test_chain_trivial_and_errors():
    p = el.build_partition(4)
    assert el.build_chain(p, 4).regions == (1, 2, 3, 4)
    assert el.build_chain(p, 1).regions == (1,)
    with pytest.raises(NoChainError):
        el.build_chain(p, 9)


def test_uw_labels_partition_omega():
    p = el.build_partition(4, with_extension=True)
    for k in range(0, 5):
        u = p.u_labels(k)
        w = p.w_labels(k)
        assert u & w == set()
        # together they cover every label; the extension always sits in W
        assert u | w == set(p.labels)
        assert 0 in w


def test_mesh_conformity():
    p = el.build_partition(2)
    m = el.generate_mesh(p, 0.25)
    cens = m.centroids()
    for tri, reg, c in zip(m.triangles, m.tri_region, cens):
        r = p.region_by_label(reg)
        assert r.contains(c)
        for v in m.nodes[tri]:
            assert r.contains(v, tol=1e-12)


def test_structured_node_count():
    # h = 1/m with interfaces on grid lines: (m+1)^2 nodes
    p = el.build_partition(2)
    m = el.generate_mesh(p, 1 / 8)
    assert m.n_nodes == 9 * 9
    assert m.n_triangles == 2 * 8 * 8


def test_too_coarse():
    p = el.build_partition(2)
    with pytest.raises(TooCoarseError):
        el.generate_mesh(p, 0.6)
    with pytest.raises(TooCoarseError):
        el.generate_mesh(p, 0.5)   # h equal to the strip thickness
    with pytest.raises(InvalidSpecError):
        el.generate_mesh(p, 0.0)


def test_refinement_nesting():
    p = el.build_partition(3)
    coarse = el.generate_mesh(p, 1 / 6)
    fine = el.generate_mesh(p, 1 / 12)
    fine_set = {(round(x, 12), round(y, 12)) for x, y in fine.nodes}
    for x, y in coarse.nodes:
        assert (round(x, 12), round(y, 12)) in fine_set


def test_triangle_orientation_and_quality():
    p = el.build_partition(3)
    m = el.generate_mesh(p, 1 / 12)
    assert np.all(m.areas() > 0)
    assert m.min_angle_deg() >= 20.0


def test_boundary_loop_ccw_closed():
    p = el.build_partition(2)
    m = el.generate_mesh(p, 1 / 8)
    bn = m.boundary_nodes
    assert len(np.unique(bn)) == len(bn)
    pts = m.nodes[bn]
    # shoelace signed area of the boundary polygon is positive (CCW)
    x, y = pts[:, 0], pts[:, 1]
    area2 = np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
    assert area2 > 0
    # edges close up
    edges = m.boundary_edges
    assert edges[-1][1] == edges[0][0]


def test_interface_edges_on_rows():
    p = el.build_partition(2)
    m = el.generate_mesh(p, 1 / 8)
    for idx, edges in m.interface_edges.items():
        yline = p.interface_by_index(idx).y
        for i, j in edges:
            assert m.nodes[i][1] == pytest.approx(yline)
            assert m.nodes[j][1] == pytest.approx(yline)


def test_disk_mesh_basics():
    m = el.generate_disk_mesh(1 / 16)
    assert np.all(m.areas() > 0)
    assert m.min_angle_deg() >= 20.0
    r = np.linalg.norm(m.nodes[m.boundary_nodes], axis=1)
    assert np.allclose(r, 1.0, atol=1e-12)
    # boundary walks counterclockwise
    th = np.unwrap(np.arctan2(m.nodes[m.boundary_nodes, 1],
                              m.nodes[m.boundary_nodes, 0]))
    assert np.all(np.diff(th) > 0)


def test_mesh_io_roundtrip(tmp_path):
    p = el.build_partition(2, with_extension=True)
    m = el.generate_mesh(p, 1 / 8)
    path = tmp_path / "mesh.txt"
    write_mesh(m, path)
    first = path.read_text()
    assert first.splitlines()[0] == f"mesh v1 {m.n_nodes} {m.n_triangles} {len(m.boundary_edges)}"
    m2 = read_mesh(path)
    assert np.array_equal(m2.triangles, m.triangles)
    assert np.array_equal(m2.tri_region, m.tri_region)
    assert np.allclose(m2.nodes, m.nodes)
    assert np.array_equal(m2.boundary_nodes, m.boundary_nodes)
    # hash is stable across identical meshes
    assert mesh_hash(m) == mesh_hash(el.generate_mesh(p, 1 / 8))


def test_chain_set_column():
    p = el.build_partition(3)
    assert p.chain_set_contains((0.5, 0.5))
    assert p.chain_set_contains((0.4, 1 / 3))      # touches the interface
    assert not p.chain_set_contains((0.1, 0.5))    # outside the middle third
    assert not p.chain_set_contains((0.5, 1.2))
