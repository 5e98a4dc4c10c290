"""Orthonormal total-degree Legendre bases, Gauss quadrature and L2 projection.

Reference cell is [-1, 1]^d. A reference mode is

    psi_a(xi) = prod_i sqrt((2 a_i + 1) / 2) P_{a_i}(xi_i),   |a| <= k

so the reference Gram matrix is the identity. On a physical cell K with
Jacobian J = |K| / 2^d the orthonormal mode is psi_a / sqrt(J); coefficients
therefore carry a factor sqrt(J) relative to reference quantities.
"""
from functools import lru_cache
from itertools import product
from typing import Callable, List, Sequence, Tuple

import numpy as np
from numpy.polynomial import legendre

from .errors import BasisError
from .mesh import CartesianMesh

# coefficients per cell per mode, shape (*mesh.shape, n_modes)
ProjectionResult = np.ndarray


class QuadratureRule:
    def __init__(self, nodes: np.ndarray, weights: np.ndarray):
        self.nodes = np.atleast_2d(nodes)
        self.weights = np.asarray(weights, dtype=float)

    def __repr__(self):
        return f"QuadratureRule(n_nodes={len(self.weights)}, dim={self.dim})"

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]

    @property
    def n_nodes(self) -> int:
        return len(self.weights)


@lru_cache(maxsize=None)
def gauss_legendre(n_points: int, dim: int) -> QuadratureRule:
    """Tensor Gauss-Legendre rule, exact to degree 2 n_points - 1 per axis.

    Nodes are ordered C-style: the last axis varies fastest.
    """
    if dim == 0:
        return QuadratureRule(np.zeros((1, 0)), np.ones(1))
    xs, ws = legendre.leggauss(n_points)
    grids = np.meshgrid(*([xs] * dim), indexing="ij")
    wgrids = np.meshgrid(*([ws] * dim), indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.prod(np.stack([w.ravel() for w in wgrids], axis=1), axis=1)
    return QuadratureRule(nodes, weights)


def _legendre_table(xi: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """Normalized Legendre values and derivatives, each of shape (len(xi), k+1)."""
    xi = np.asarray(xi, dtype=float)
    scale = np.sqrt((2.0 * np.arange(k + 1) + 1.0) / 2.0)
    values = legendre.legvander(xi, k) * scale
    derivs = np.empty_like(values)
    for n in range(k + 1):
        unit = np.zeros(n + 1)
        unit[n] = 1.0
        derivs[:, n] = legendre.legval(xi, legendre.legder(unit)) * scale[n] if n else 0.0
    return values, derivs


def total_degree_indices(k: int, d: int) -> List[Tuple[int, ...]]:
    """Multi-indices with |a| <= k, ordered by total degree then lexicographically."""
    indices = [a for a in product(range(k + 1), repeat=d) if sum(a) <= k]
    return sorted(indices, key=lambda a: (sum(a), tuple(-i for i in a)))


class ReferenceBasis:
    """Orthonormal P^k basis on [-1, 1]^d with tables at the assembly quadrature.

    The assembly rule uses k + 2 Gauss points per axis (exact to degree 2k + 3).
    Face tables hold traces on the faces xi_axis = -1 / +1 at the face rule, which
    is the same 1D rule on the remaining axes.
    """

    def __init__(self, k: int, d: int):
        self.degree = k
        self.dim = d
        self.multi_indices = total_degree_indices(k, d)
        self.n_modes = len(self.multi_indices)
        self._alpha = np.array(self.multi_indices, dtype=int).reshape(self.n_modes, d)

        self.quadrature = gauss_legendre(k + 2, d)
        self.values = self.evaluate(self.quadrature.nodes)
        self.derivatives = [self.gradient(self.quadrature.nodes, a) for a in range(d)]

        self.face_quadrature = gauss_legendre(k + 2, d - 1)
        self.face_traces = {}
        for axis in range(d):
            for side, xi in (("low", -1.0), ("high", 1.0)):
                self.face_traces[axis, side] = self.evaluate(self.face_points(axis, xi))

    def __repr__(self):
        return f"ReferenceBasis(k={self.degree}, d={self.dim}, n_modes={self.n_modes})"

    def face_points(self, axis: int, xi: float) -> np.ndarray:
        """Face-rule nodes lifted into d dimensions with coordinate ``axis`` fixed."""
        fnodes = self.face_quadrature.nodes
        pts = np.empty((fnodes.shape[0], self.dim))
        pts[:, [a for a in range(self.dim) if a != axis]] = fnodes
        pts[:, axis] = xi
        return pts

    def _axis_tables(self, points: np.ndarray):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return [_legendre_table(points[:, a], self.degree) for a in range(self.dim)]

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Mode values at reference points, shape (n_points, n_modes)."""
        tables = self._axis_tables(points)
        out = np.ones((tables[0][0].shape[0] if tables else 1, self.n_modes))
        for a, (vals, _) in enumerate(tables):
            out *= vals[:, self._alpha[:, a]]
        return out

    def gradient(self, points: np.ndarray, axis: int) -> np.ndarray:
        """Reference derivative d/dxi_axis of every mode, shape (n_points, n_modes)."""
        tables = self._axis_tables(points)
        out = np.ones((tables[0][0].shape[0], self.n_modes))
        for a, (vals, ders) in enumerate(tables):
            src = ders if a == axis else vals
            out *= src[:, self._alpha[:, a]]
        return out

    def gram(self, rule: QuadratureRule = None) -> np.ndarray:
        rule = rule or self.quadrature
        vals = self.evaluate(rule.nodes)
        return vals.T @ (rule.weights[:, None] * vals)

    def derivative_matrix(self, axis: int) -> np.ndarray:
        """Reference matrix D with (D c) the coefficients of d/dxi_axis of sum c_m psi_m."""
        return self.values.T @ (self.quadrature.weights[:, None] * self.derivatives[axis])


@lru_cache(maxsize=None)
def make_basis(k: int, d: int) -> ReferenceBasis:
    if k < 0:
        raise BasisError(f"Polynomial degree must be >= 0, got {k}")
    if d not in (1, 2, 3):
        raise BasisError(f"Basis dimension must be 1, 2 or 3, got {d}")
    return ReferenceBasis(k, d)


def jacobian(mesh: CartesianMesh) -> float:
    return mesh.cell_measure / 2.0 ** mesh.dim


def l2_project(mesh: CartesianMesh, basis: ReferenceBasis, g: Callable,
               rule: QuadratureRule = None) -> ProjectionResult:
    """L2 projection of ``g(*coords)`` onto the broken P^k space of ``mesh``.

    ``g`` receives one coordinate array per axis (broadcastable to
    ``(*mesh.shape, n_nodes)``) and may return a scalar.
    """
    if basis.dim != mesh.dim:
        raise BasisError(f"Basis dimension {basis.dim} does not match mesh dimension {mesh.dim}")
    rule = rule or basis.quadrature
    coords = mesh.node_coordinates(rule.nodes)
    values = np.broadcast_to(np.asarray(g(*coords), dtype=float), mesh.shape + (rule.n_nodes,))
    table = basis.evaluate(rule.nodes) if rule is not basis.quadrature else basis.values
    return np.sqrt(jacobian(mesh)) * (values @ (rule.weights[:, None] * table))


def eval_field_at(mesh: CartesianMesh, basis: ReferenceBasis, coefficients: np.ndarray,
                  cell, point: Sequence[float]) -> float:
    """Value of the DG field at a physical point of ``cell`` (flat or multi-index)."""
    if not isinstance(cell, (int, np.integer)):
        cell = mesh.flat_index(cell)
    xi = mesh.to_reference(int(cell), np.atleast_1d(point))
    modes = basis.evaluate(xi[None, :])[0]
    local = np.reshape(coefficients, (mesh.n_cells, basis.n_modes))[int(cell)]
    return float(local @ modes / np.sqrt(jacobian(mesh)))


def evaluate_at_nodes(mesh: CartesianMesh, basis: ReferenceBasis, coefficients: np.ndarray,
                      ref_nodes: np.ndarray) -> np.ndarray:
    """Field values at reference nodes in every cell, shape (*mesh.shape, n_nodes)."""
    table = basis.evaluate(ref_nodes)
    return (coefficients @ table.T) / np.sqrt(jacobian(mesh))
