"""Discrete phase space: mesh + bases + node coordinates shared by all operators.

Built once per (mesh, k) and never mutated afterwards apart from memoized
tables, so it can be shared freely between fields, stages and threads.
"""
from functools import lru_cache
from typing import Dict, List

import numpy as np

from .basis_quadrature import ReferenceBasis, jacobian, make_basis
from .mesh import PhaseMesh


class PhaseSpace:
    def __init__(self, mesh: PhaseMesh, k: int):
        self.mesh = mesh
        self.k = k
        self.basis: ReferenceBasis = make_basis(k, mesh.dim)
        self.x_basis: ReferenceBasis = make_basis(k, mesh.d_x)
        self.jacobian = jacobian(mesh)
        self.x_jacobian = jacobian(mesh.spatial)
        self._cache: Dict = {}

        quad = self.basis.quadrature
        self.volume_coords = mesh.node_coordinates(quad.nodes)
        # spatial modes at the x-coordinate of every volume node
        self.x_modes_volume = self.x_basis.evaluate(quad.nodes[:, :1])

        self.x_face_v_coords = self._x_face_velocity_coords()
        self.v_face_coords: List[List[np.ndarray]] = []
        self.x_modes_v_face: List[np.ndarray] = []
        for j in range(mesh.d_v):
            axis = 1 + j
            pts = self.basis.face_points(axis, -1.0)
            self.v_face_coords.append(self._v_face_velocity_coords(axis, pts))
            self.x_modes_v_face.append(self.x_basis.evaluate(pts[:, :1]))

    def __repr__(self):
        return f"PhaseSpace({self.mesh!r}, k={self.k})"

    @property
    def d_v(self) -> int:
        return self.mesh.d_v

    @property
    def shape(self):
        return self.mesh.shape

    @property
    def n_modes(self) -> int:
        return self.basis.n_modes

    @property
    def n_x_modes(self) -> int:
        return self.x_basis.n_modes

    def memo(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def _x_face_velocity_coords(self) -> List[np.ndarray]:
        """Velocity coordinates at x-face nodes, broadcastable to (1, *n_v, n_face_nodes)."""
        pts = self.basis.face_points(0, 1.0)
        coords = []
        dim = self.mesh.dim
        for j, axis in enumerate(self.mesh.v_axes):
            bshape = [1] * dim + [1]
            bshape[1 + j] = axis.n_cells
            offsets = (0.5 * axis.width * pts[:, 1 + j]).reshape([1] * dim + [-1])
            coords.append(axis.centers().reshape(bshape) + offsets)
        return coords

    def _v_face_velocity_coords(self, face_axis: int, pts: np.ndarray) -> List[np.ndarray]:
        """Velocity coordinates on every face normal to ``face_axis``, boundaries included.

        Along ``face_axis`` the face index runs over n + 1 face positions.
        """
        coords = []
        dim = self.mesh.dim
        for j, axis in enumerate(self.mesh.v_axes):
            a = 1 + j
            bshape = [1] * dim + [1]
            if a == face_axis:
                bshape[a] = axis.n_cells + 1
                coords.append(np.broadcast_to(axis.faces().reshape(bshape),
                                              bshape[:-1] + [pts.shape[0]]))
            else:
                bshape[a] = axis.n_cells
                offsets = (0.5 * axis.width * pts[:, a]).reshape([1] * dim + [-1])
                coords.append(axis.centers().reshape(bshape) + offsets)
        return coords

    def spatial_values(self, coefficients: np.ndarray, x_modes: np.ndarray) -> np.ndarray:
        """Spatial DG field (n_x, n_x_modes) evaluated at nodes given by ``x_modes``."""
        return (coefficients @ x_modes.T) / np.sqrt(self.x_jacobian)


@lru_cache(maxsize=64)
def phase_space(mesh: PhaseMesh, k: int) -> PhaseSpace:
    return PhaseSpace(mesh, k)
