import math
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from ..solver.errors import MaxwellConfigError, MeshMismatchError

EM_COMPONENTS: Tuple[str, ...] = ("E1", "E2", "E3", "B1", "B2", "B3")
E_COMPONENTS = EM_COMPONENTS[:3]
B_COMPONENTS = EM_COMPONENTS[3:]


def canonical_mask(components: Iterable[str]) -> Tuple[str, ...]:
    components = set(components)
    unknown = components - set(EM_COMPONENTS)
    if unknown:
        raise MaxwellConfigError(f"Unknown field components: {sorted(unknown)}")
    return tuple(c for c in EM_COMPONENTS if c in components)


class DistributionField:
    """DG coefficients of f_h, shape (n_x, n_v1[, n_v2], n_modes)."""

    def __init__(self, space, coefficients: np.ndarray = None):
        self.space = space
        shape = space.shape + (space.n_modes,)
        if coefficients is None:
            coefficients = np.zeros(shape)
        coefficients = np.asarray(coefficients, dtype=float)
        if coefficients.shape != shape:
            raise MeshMismatchError(f"Distribution coefficients have shape {coefficients.shape}, "
                                    f"expected {shape}")
        self.coefficients = coefficients

    def __repr__(self):
        return f"DistributionField(mesh={self.mesh!r}, k={self.k}, l2={self.l2_norm():.6g})"

    @property
    def mesh(self):
        return self.space.mesh

    @property
    def basis(self):
        return self.space.basis

    @property
    def k(self) -> int:
        return self.space.k

    def with_coefficients(self, coefficients: np.ndarray) -> "DistributionField":
        return DistributionField(self.space, coefficients)

    def copy(self) -> "DistributionField":
        return DistributionField(self.space, self.coefficients.copy())

    def l2_norm(self) -> float:
        return math.sqrt(math.fsum(np.ravel(self.coefficients) ** 2))

    def mass(self) -> float:
        """Integral of f_h over the phase domain; only the constant modes contribute."""
        return math.sqrt(self.mesh.cell_measure) * math.fsum(np.ravel(self.coefficients[..., 0]))


class SpatialField:
    """Scalar DG field on the spatial mesh, coefficients of shape (n_x, n_x_modes)."""

    def __init__(self, space, coefficients: np.ndarray):
        self.space = space
        self.coefficients = np.asarray(coefficients, dtype=float)

    def __repr__(self):
        return f"SpatialField(n_x={self.coefficients.shape[0]}, k={self.k})"

    @property
    def mesh(self):
        return self.space.mesh.spatial

    @property
    def basis(self):
        return self.space.x_basis

    @property
    def k(self) -> int:
        return self.space.k

    def integral(self) -> float:
        return math.sqrt(self.mesh.cell_measure) * math.fsum(self.coefficients[:, 0])


class EMField:
    """DG coefficients of the active E/B components, shape (n_active, n_x, n_x_modes).

    Inactive components carry no degrees of freedom and read as zero.
    """

    def __init__(self, space, active: Sequence[str], coefficients: np.ndarray = None):
        self.space = space
        self.active = canonical_mask(active)
        shape = (len(self.active), space.shape[0], space.n_x_modes)
        if coefficients is None:
            coefficients = np.zeros(shape)
        coefficients = np.asarray(coefficients, dtype=float)
        if coefficients.shape != shape:
            raise MeshMismatchError(f"EM coefficients have shape {coefficients.shape}, expected {shape}")
        self.coefficients = coefficients

    def __repr__(self):
        return f"EMField(active={list(self.active)}, n_x={self.space.shape[0]}, k={self.space.k})"

    @property
    def mesh(self):
        return self.space.mesh.spatial

    def is_active(self, name: str) -> bool:
        return name in self.active

    def component(self, name: str) -> np.ndarray:
        if name in self.active:
            return self.coefficients[self.active.index(name)]
        if name not in EM_COMPONENTS:
            raise MaxwellConfigError(f"Unknown field component {name!r}")
        return np.zeros((self.space.shape[0], self.space.n_x_modes))

    def component_field(self, name: str) -> SpatialField:
        return SpatialField(self.space, self.component(name))

    def with_coefficients(self, coefficients: np.ndarray) -> "EMField":
        return EMField(self.space, self.active, coefficients)

    def copy(self) -> "EMField":
        return EMField(self.space, self.active, self.coefficients.copy())

    def _norm(self, names) -> float:
        parts = [self.component(n) for n in names if n in self.active]
        if not parts:
            return 0.0
        return math.sqrt(math.fsum(np.ravel(np.array(parts)) ** 2))

    def l2_E(self) -> float:
        return self._norm(E_COMPONENTS)

    def l2_B(self) -> float:
        return self._norm(B_COMPONENTS)


class MomentPair:
    """Charge density rho_h and current density components j_h[i] (i = 1..d_v)."""

    def __init__(self, rho: SpatialField, j: Dict[int, SpatialField]):
        self.rho = rho
        self.j = dict(j)

    def __repr__(self):
        return f"MomentPair(rho_integral={self.rho.integral():.6g}, j={sorted(self.j)})"

    def current(self, axis: int) -> Optional[np.ndarray]:
        field = self.j.get(axis)
        return None if field is None else field.coefficients


class CoupledState:
    def __init__(self, f: DistributionField, em: EMField, time: float = 0.0):
        if f.space.mesh.spatial != em.space.mesh.spatial or f.space.k != em.space.k:
            raise MeshMismatchError("EM field must live on the spatial projection of the phase mesh")
        self.f = f
        self.em = em
        self.time = float(time)

    def __repr__(self):
        return f"CoupledState(time={self.time:.6g}, f={self.f!r}, em={self.em!r})"

    @property
    def space(self):
        return self.f.space

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.f.coefficients).all() and np.isfinite(self.em.coefficients).all())

    def replace(self, f_coefficients=None, em_coefficients=None, time=None) -> "CoupledState":
        f = self.f if f_coefficients is None else self.f.with_coefficients(f_coefficients)
        em = self.em if em_coefficients is None else self.em.with_coefficients(em_coefficients)
        return CoupledState(f, em, self.time if time is None else time)
