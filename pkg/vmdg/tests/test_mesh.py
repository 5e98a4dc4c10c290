"""
Phase mesh tests - counting, neighbors, refinement
"""
import math

import pytest

from ..solver.errors import MeshError
from ..solver.mesh import Side, make_mesh, neighbor


class TestMeshCounts:
    def test_one_v_axis_counts(self):
        """Test 4 x 4 cells give 16 phase cells, 4 x-edges per v-row, 2 cutoff edges per column"""
        mesh = make_mesh((0.0, 2.0 * math.pi), [(-6.0, 6.0)], 4, [4])
        assert mesh.n_cells == 16
        x_edges = [e for e in mesh.interior_edges() if e.axis == 0]
        assert len(x_edges) == 16
        for iv in range(4):
            row = [e for e in x_edges if mesh.multi_index(e.owner_cell)[1] == iv]
            assert len(row) == 4
        boundary = mesh.boundary_edges()
        assert len(boundary) == 8
        for ix in range(4):
            column = [e for e in boundary if mesh.multi_index(e.owner_cell)[0] == ix]
            assert len(column) == 2

    def test_two_v_axes_counts(self):
        """Test 8 x (4, 4) cells give 128 phase cells and 128 cutoff edges"""
        mesh = make_mesh((0.0, 1.0), [(-1.0, 1.0), (-1.0, 1.0)], 8, [4, 4])
        assert mesh.n_cells == 128
        brute = sum(1 for cell in range(mesh.n_cells) for e in mesh.edges(cell)
                    if e.neighbor_cell is None)
        assert brute == 128
        assert len(mesh.boundary_edges()) == 128

    def test_measure_and_widths(self):
        """Test the phase measure is the product of the axis lengths"""
        mesh = make_mesh((0.0, 2.0), [(-1.0, 1.0), (-3.0, 3.0)], 4, [2, 6])
        assert mesh.measure == pytest.approx(2.0 * 2.0 * 6.0)
        assert mesh.cell_measure * mesh.n_cells == pytest.approx(mesh.measure)
        assert mesh.h_x == pytest.approx(0.5)
        assert mesh.d_v == 2


class TestNeighbors:
    def test_single_cell_is_own_periodic_neighbor(self):
        """Test a one-cell x-axis wraps onto itself"""
        mesh = make_mesh((0.0, 1.0), [(-1.0, 1.0)], 1, [3])
        for cell in range(mesh.n_cells):
            x_edges = [e for e in mesh.edges(cell) if e.axis == 0]
            assert all(e.neighbor_cell == cell for e in x_edges)

    def test_periodic_wrap_low_edge(self):
        """Test cell 0's x-low neighbor on a 4-cell x-axis is cell 3"""
        mesh = make_mesh((0.0, 1.0), [(-1.0, 1.0)], 4, [2])
        edge = next(e for e in mesh.edges(0) if e.axis == 0 and e.side == Side.LOW)
        assert neighbor(mesh, 0, edge) == mesh.flat_index((3, 0))

    def test_cutoff_high_edge_absent(self):
        """Test the v-high edge of the last velocity cell has no neighbor"""
        mesh = make_mesh((0.0, 1.0), [(-1.0, 1.0)], 4, [2])
        cell = mesh.flat_index((1, 1))
        edge = next(e for e in mesh.edges(cell) if e.axis == 1 and e.side == Side.HIGH)
        assert neighbor(mesh, cell, edge) is None
        assert edge.is_boundary

    def test_matches_brute_force_adjacency(self):
        """Test every edge neighbor against index arithmetic"""
        mesh = make_mesh((0.0, 1.0), [(-1.0, 1.0), (-2.0, 2.0)], 3, [2, 4])
        for cell in range(mesh.n_cells):
            idx = mesh.multi_index(cell)
            for edge in mesh.edges(cell):
                target = list(idx)
                target[edge.axis] += edge.normal_sign
                if edge.axis == 0:
                    target[0] %= mesh.shape[0]
                    expected = mesh.flat_index(target)
                elif 0 <= target[edge.axis] < mesh.shape[edge.axis]:
                    expected = mesh.flat_index(target)
                else:
                    expected = None
                assert neighbor(mesh, cell, edge) == expected

    def test_neighbor_is_an_involution(self):
        """Test the mirror of the mirror edge is the edge itself"""
        mesh = make_mesh((0.0, 1.0), [(-1.0, 1.0), (-1.0, 1.0)], 3, [3, 2])
        for edge in mesh.interior_edges():
            back = edge.mirror()
            assert back.owner_cell == edge.neighbor_cell
            assert neighbor(mesh, back.owner_cell, back) == edge.owner_cell
            assert back.mirror() == edge

    def test_neighbor_rejects_foreign_edge(self):
        """Test asking for the neighbor of someone else's edge"""
        mesh = make_mesh((0.0, 1.0), [(-1.0, 1.0)], 2, [2])
        edge = mesh.edges(0)[0]
        with pytest.raises(MeshError):
            neighbor(mesh, 1, edge)


class TestMeshRefinementAndErrors:
    def test_refine_doubles_every_axis(self):
        """Test uniform refinement halves the widths and keeps the domain"""
        mesh = make_mesh((0.0, 1.0), [(-1.0, 1.0)], 4, [6])
        fine = mesh.refine()
        assert fine.shape == (8, 12)
        assert fine.measure == pytest.approx(mesh.measure)
        assert fine.h == pytest.approx(mesh.h / 2)

    @pytest.mark.parametrize("x_domain,v_domain,n_x,n_v", [
        ((0.0, 1.0), [(-1.0, 1.0)], 0, [2]),
        ((1.0, 1.0), [(-1.0, 1.0)], 2, [2]),
        ((0.0, 1.0), [(1.0, -1.0)], 2, [2]),
        ((0.0, 1.0), [(-1.0, 1.0)] * 3, 2, [2, 2, 2]),
        ((0.0, 1.0), [(-1.0, 1.0)], 2, [2, 2]),
    ])
    def test_invalid_meshes(self, x_domain, v_domain, n_x, n_v):
        """Test degenerate domains, zero cells and unsupported d_v"""
        with pytest.raises(MeshError):
            make_mesh(x_domain, v_domain, n_x, n_v)
