"""Uniform Cartesian phase-space meshes.

Spatial axes are periodic, velocity axes are cut off (the exterior state of a
boundary face is zero). Cells are addressed either by a flat index in C order or
by a multi-index ``(ix, iv1[, iv2])``.
"""
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from .errors import MeshError


class BoundaryKind(str, Enum):
    PERIODIC = "periodic"
    CUTOFF = "cutoff"


class Side(str, Enum):
    LOW = "low"
    HIGH = "high"


class AxisPartition(BaseModel):
    model_config = ConfigDict(frozen=True)

    lo: float
    hi: float
    n_cells: int
    boundary_kind: BoundaryKind

    @property
    def width(self) -> float:
        return (self.hi - self.lo) / self.n_cells

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def centers(self) -> np.ndarray:
        return self.lo + (np.arange(self.n_cells) + 0.5) * self.width

    def faces(self) -> np.ndarray:
        return self.lo + np.arange(self.n_cells + 1) * self.width

    def refined(self) -> "AxisPartition":
        return self.model_copy(update={"n_cells": 2 * self.n_cells})


class EdgeRef(BaseModel):
    model_config = ConfigDict(frozen=True)

    axis: int
    side: Side
    owner_cell: int
    neighbor_cell: Optional[int] = None
    normal_sign: int

    @property
    def is_boundary(self) -> bool:
        return self.neighbor_cell is None

    def mirror(self) -> "EdgeRef":
        if self.neighbor_cell is None:
            raise MeshError("A cutoff boundary edge has no mirror")
        other = Side.LOW if self.side == Side.HIGH else Side.HIGH
        return EdgeRef(axis=self.axis, side=other, owner_cell=self.neighbor_cell,
                       neighbor_cell=self.owner_cell, normal_sign=-self.normal_sign)


class CartesianMesh:
    """Tensor mesh over any number of axes; the spatial submesh is one of these."""

    def __init__(self, axes: Sequence[AxisPartition]):
        self.axes: Tuple[AxisPartition, ...] = tuple(axes)
        self.shape: Tuple[int, ...] = tuple(a.n_cells for a in self.axes)
        self.widths = np.array([a.width for a in self.axes])

    def __repr__(self):
        dims = " x ".join(f"[{a.lo:g},{a.hi:g}]/{a.n_cells}" for a in self.axes)
        return f"{type(self).__name__}({dims})"

    def __eq__(self, other):
        return isinstance(other, CartesianMesh) and self.axes == other.axes

    def __hash__(self):
        return hash(self.axes)

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cell_measure(self) -> float:
        return float(np.prod(self.widths))

    @property
    def measure(self) -> float:
        return float(np.prod([a.length for a in self.axes]))

    @property
    def h(self) -> float:
        return float(self.widths.max())

    def multi_index(self, cell: int) -> Tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(cell, self.shape))

    def flat_index(self, multi: Sequence[int]) -> int:
        return int(np.ravel_multi_index(tuple(multi), self.shape))

    def cell_lower_corner(self, cell: int) -> np.ndarray:
        idx = self.multi_index(cell)
        return np.array([a.lo + i * a.width for a, i in zip(self.axes, idx)])

    def to_reference(self, cell: int, point: Sequence[float]) -> np.ndarray:
        """Affine map of a physical point into the reference cell [-1, 1]^d."""
        lower = self.cell_lower_corner(cell)
        return 2.0 * (np.asarray(point, dtype=float) - lower) / self.widths - 1.0

    def node_coordinates(self, ref_nodes: np.ndarray) -> List[np.ndarray]:
        """Physical coordinates of reference nodes in every cell.

        Returns one array per axis, broadcastable to ``(*shape, n_nodes)``.
        """
        ref_nodes = np.atleast_2d(ref_nodes)
        coords = []
        for a, axis in enumerate(self.axes):
            bshape = [1] * self.dim + [1]
            bshape[a] = axis.n_cells
            centers = axis.centers().reshape(bshape)
            offsets = (0.5 * axis.width * ref_nodes[:, a]).reshape([1] * self.dim + [-1])
            coords.append(centers + offsets)
        return coords

    def edges(self, cell: int) -> List[EdgeRef]:
        out = []
        for axis in range(self.dim):
            for side in (Side.LOW, Side.HIGH):
                sign = -1 if side == Side.LOW else 1
                out.append(EdgeRef(axis=axis, side=side, owner_cell=cell,
                                   neighbor_cell=self._neighbor_index(cell, axis, sign),
                                   normal_sign=sign))
        return out

    def _neighbor_index(self, cell: int, axis: int, sign: int) -> Optional[int]:
        idx = list(self.multi_index(cell))
        n = self.shape[axis]
        target = idx[axis] + sign
        if self.axes[axis].boundary_kind == BoundaryKind.PERIODIC:
            target %= n
        elif target < 0 or target >= n:
            return None
        idx[axis] = target
        return self.flat_index(idx)

    def interior_edges(self) -> List[EdgeRef]:
        """Each face shared by two cells once, owned by its lower-coordinate cell."""
        out = []
        for cell in range(self.n_cells):
            for edge in self.edges(cell):
                if edge.side == Side.HIGH and edge.neighbor_cell is not None:
                    out.append(edge)
        return out

    def boundary_edges(self) -> List[EdgeRef]:
        return [e for cell in range(self.n_cells) for e in self.edges(cell) if e.is_boundary]


class PhaseMesh(CartesianMesh):
    def __init__(self, x_axes: Sequence[AxisPartition], v_axes: Sequence[AxisPartition]):
        self.x_axes = tuple(x_axes)
        self.v_axes = tuple(v_axes)
        super().__init__(self.x_axes + self.v_axes)
        self.spatial = CartesianMesh(self.x_axes)
        self.velocity = CartesianMesh(self.v_axes)

    @property
    def d_x(self) -> int:
        return len(self.x_axes)

    @property
    def d_v(self) -> int:
        return len(self.v_axes)

    @property
    def h_x(self) -> float:
        return self.spatial.h

    @property
    def h_v(self) -> float:
        return self.velocity.h

    def refine(self) -> "PhaseMesh":
        return PhaseMesh([a.refined() for a in self.x_axes], [a.refined() for a in self.v_axes])

    def x_cell_of(self, cell: int) -> int:
        return self.multi_index(cell)[0]


def neighbor(mesh: CartesianMesh, cell: int, edge: EdgeRef) -> Optional[int]:
    if edge.owner_cell != cell:
        raise MeshError(f"Edge {edge} does not belong to cell {cell}")
    return mesh._neighbor_index(cell, edge.axis, edge.normal_sign)


def _check_axis(lo: float, hi: float, n_cells: int):
    if int(n_cells) < 1:
        raise MeshError(f"n_cells must be >= 1, got {n_cells}")
    if not hi > lo:
        raise MeshError(f"Axis needs hi > lo, got [{lo}, {hi}]")


def make_mesh(x_domain: Tuple[float, float], v_domain: Sequence[Tuple[float, float]],
              n_x: int, n_v: Sequence[int]) -> PhaseMesh:
    v_domain = list(v_domain)
    n_v = list(n_v)
    if len(v_domain) not in (1, 2):
        raise MeshError(f"d_v must be 1 or 2, got {len(v_domain)}")
    if len(n_v) != len(v_domain):
        raise MeshError(f"Got {len(n_v)} velocity resolutions for {len(v_domain)} velocity axes")
    for (lo, hi), n in [(tuple(x_domain), n_x)] + list(zip(v_domain, n_v)):
        _check_axis(lo, hi, n)
    x_axis = AxisPartition(lo=x_domain[0], hi=x_domain[1], n_cells=n_x,
                           boundary_kind=BoundaryKind.PERIODIC)
    v_axes = [AxisPartition(lo=lo, hi=hi, n_cells=n, boundary_kind=BoundaryKind.CUTOFF)
              for (lo, hi), n in zip(v_domain, n_v)]
    return PhaseMesh([x_axis], v_axes)


def build_mesh(config) -> PhaseMesh:
    """Build the phase mesh of a resolved run configuration.

    ``config`` needs ``x_domain`` (a single interval, d_x = 1), ``v_domain``,
    ``n_x`` and ``n_v``.
    """
    x_domain = config.x_domain
    if x_domain is None or np.ndim(x_domain) != 1 or len(x_domain) != 2:
        raise MeshError("Only d_x = 1 is supported; x_domain must be one interval")
    return make_mesh(tuple(x_domain), [tuple(v) for v in config.v_domain],
                     config.n_x, list(config.n_v))
