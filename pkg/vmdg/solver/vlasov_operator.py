"""Upwind DG residual of the Vlasov equation, a_h = a_h1 (x-transport) + a_h2 (force).

Everything is vectorized over cells. Per-cell quantities are kept in the
"hat" scaling ``Fhat = C @ V.T`` (the field times sqrt(J)); the residual of
mode m on an axis of width w then picks up a plain factor 2 / w from the
affine map and the face Jacobian, so no per-cell measures are needed.
"""
from enum import Enum
from typing import List, Sequence, Tuple

import numpy as np

from ..Models.field_model import DistributionField, EMField
from .errors import MaxwellConfigError, MeshMismatchError


class MappingKind(str, Enum):
    CLASSICAL = "classical"
    RELATIVISTIC = "relativistic"


class VelocityMapping:
    """Transport velocity u(v): v (classical) or v / sqrt(1 + |v|^2) (relativistic)."""

    def __init__(self, kind=MappingKind.CLASSICAL):
        self.kind = MappingKind(kind)

    def __repr__(self):
        return f"VelocityMapping({self.kind.value})"

    def __eq__(self, other):
        return isinstance(other, VelocityMapping) and self.kind == other.kind

    def __hash__(self):
        return hash(self.kind)

    @property
    def relativistic(self) -> bool:
        return self.kind == MappingKind.RELATIVISTIC

    def lorentz_factor(self, velocity: Sequence[np.ndarray]) -> np.ndarray:
        return np.sqrt(1.0 + sum(np.asarray(v) ** 2 for v in velocity))

    def transport(self, velocity: Sequence[np.ndarray]) -> List[np.ndarray]:
        if not self.relativistic:
            return [np.asarray(v, dtype=float) for v in velocity]
        gamma = self.lorentz_factor(velocity)
        return [np.asarray(v) / gamma for v in velocity]

    def speed_bound(self, v_axes, axis: int = 0) -> float:
        """max |u_axis| over the velocity box."""
        vmax = max(abs(v_axes[axis].lo), abs(v_axes[axis].hi))
        if not self.relativistic:
            return vmax
        return vmax / np.sqrt(1.0 + vmax ** 2)


CLASSICAL = VelocityMapping(MappingKind.CLASSICAL)
RELATIVISTIC = VelocityMapping(MappingKind.RELATIVISTIC)


def as_mapping(mapping) -> VelocityMapping:
    if isinstance(mapping, VelocityMapping):
        return mapping
    return VelocityMapping(mapping or MappingKind.CLASSICAL)


def upwind_flux(a_dot_n, f_minus, f_plus):
    """{a f}.n + |a.n|/2 [f].n with f_minus the owner trace and f_plus the neighbor trace."""
    return 0.5 * a_dot_n * (f_minus + f_plus) + 0.5 * np.abs(a_dot_n) * (f_minus - f_plus)


def upwind_flux_x(v_dot_n, f_minus, f_plus):
    return upwind_flux(v_dot_n, f_minus, f_plus)


def upwind_flux_v(a_dot_n, f_minus, f_plus=0.0):
    """Velocity-face flux; on a cutoff boundary the exterior trace is zero."""
    return upwind_flux(a_dot_n, f_minus, f_plus)


def check_reduced_system(active: Sequence[str], d_v: int):
    if d_v == 2:
        stray = [c for c in ("E3", "B1", "B2") if c in active]
        if stray:
            raise MaxwellConfigError(
                f"The 1D2V reduced system carries E1, E2, B3 only; got active {stray}")


def acceleration(em_values, velocity: Sequence[np.ndarray], mapping: VelocityMapping,
                 d_v: int) -> List[np.ndarray]:
    """Components of E + u x B in the velocity plane.

    ``em_values`` maps a component name to its values (or None when inactive).
    For d_v = 1 only E1 drives the motion; for d_v = 2 the in-plane force is
    (E1 + u2 B3, E2 - u1 B3).
    """
    def value(name):
        v = em_values.get(name)
        return 0.0 if v is None else v

    if d_v == 1:
        return [np.asarray(value("E1"), dtype=float)]
    u1, u2 = mapping.transport(velocity)
    b3 = value("B3")
    return [value("E1") + u2 * b3, value("E2") - u1 * b3]


def field_at_face(em: EMField, x_cell: int, v_point: Sequence[float], n_v: Sequence[float],
                  x_point: float = None, mapping=CLASSICAL) -> float:
    """(E_h + u x B_h) . n_v at one point of a velocity face inside spatial cell ``x_cell``.

    ``x_point`` defaults to the midpoint of the spatial cell.
    """
    space = em.space
    d_v = space.d_v
    check_reduced_system(em.active, d_v)
    n_v = np.asarray(n_v, dtype=float)
    v_point = np.asarray(v_point, dtype=float)
    if n_v.shape != (d_v,) or v_point.shape != (d_v,):
        raise MaxwellConfigError(f"Velocity point and normal must have {d_v} components")
    x_mesh = space.mesh.spatial
    if x_point is None:
        x_point = x_mesh.axes[0].centers()[x_cell]
    xi = x_mesh.to_reference(x_cell, [x_point])
    modes = space.x_basis.evaluate(xi[None, :])[0] / np.sqrt(space.x_jacobian)
    values = {name: float(em.component(name)[x_cell] @ modes) for name in em.active}
    accel = acceleration(values, list(v_point), as_mapping(mapping), d_v)
    return float(sum(a * n for a, n in zip(accel, n_v)))


def _em_at(space, em: EMField, x_modes: np.ndarray, pad: int):
    """Active components at spatial nodes, reshaped to broadcast against phase arrays."""
    out = {}
    for name in em.active:
        vals = space.spatial_values(em.component(name), x_modes)
        out[name] = vals.reshape((vals.shape[0],) + (1,) * pad + (vals.shape[1],))
    return out


def transport_tables(space, mapping: VelocityMapping):
    """Memoized transport velocities at volume nodes and x-face nodes."""
    def build():
        d_v = space.d_v
        vol_v = space.volume_coords[1:1 + d_v]
        u_vol = mapping.transport(vol_v)
        u_face = mapping.transport(space.x_face_v_coords)
        return u_vol, u_face
    return space.memo(("transport", mapping.kind), build)


def velocity_face_accelerations(space, em: EMField, mapping: VelocityMapping) -> List[np.ndarray]:
    """Normal acceleration on every face normal to each velocity axis (boundaries included)."""
    d_v = space.d_v
    out = []
    for j in range(d_v):
        em_vals = _em_at(space, em, space.x_modes_v_face[j], d_v)
        accel = acceleration(em_vals, space.v_face_coords[j], mapping, d_v)[j]
        shape = list(space.shape)
        shape[1 + j] += 1
        out.append(np.broadcast_to(accel, tuple(shape) + (space.basis.face_quadrature.n_nodes,)))
    return out


def max_face_acceleration(space, em: EMField, mapping: VelocityMapping) -> float:
    """Largest |E_h + u x B_h| over the quadrature nodes of all velocity faces."""
    d_v = space.d_v
    peak = 0.0
    for j in range(d_v):
        em_vals = _em_at(space, em, space.x_modes_v_face[j], d_v)
        force = acceleration(em_vals, space.v_face_coords[j], mapping, d_v)
        norm = np.sqrt(sum(np.square(a) for a in force))
        peak = max(peak, float(np.max(norm)))
    return peak


def volume_accelerations(space, em: EMField, mapping: VelocityMapping) -> List[np.ndarray]:
    d_v = space.d_v
    em_vals = _em_at(space, em, space.x_modes_volume, d_v)
    return acceleration(em_vals, space.volume_coords[1:1 + d_v], mapping, d_v)


def _check_compatible(f: DistributionField, em: EMField):
    if f.space.mesh.spatial != em.space.mesh.spatial or f.space.k != em.space.k:
        raise MeshMismatchError("EM field does not live on the spatial projection of f's mesh")


def _axis_slice(ndim: int, axis: int, sl) -> Tuple:
    index = [slice(None)] * ndim
    index[axis] = sl
    return tuple(index)


def apply_ah(f: DistributionField, em: EMField, mapping=CLASSICAL) -> np.ndarray:
    """Residual coefficients R with <R, g> = a_h(f, E_h, B_h; g) for every basis function g.

    The mass matrix is the identity, so R is directly the time derivative of
    the coefficients of f.
    """
    _check_compatible(f, em)
    mapping = as_mapping(mapping)
    space = f.space
    check_reduced_system(em.active, space.d_v)
    basis = space.basis
    mesh = space.mesh
    d_v = space.d_v
    C = f.coefficients
    W = basis.quadrature.weights
    Wf = basis.face_quadrature.weights
    u_vol, u_face = transport_tables(space, mapping)

    Fhat = C @ basis.values.T
    scale_x = 2.0 / mesh.widths[0]
    R = scale_x * ((W * Fhat * u_vol[0]) @ basis.derivatives[0])

    accel_vol = volume_accelerations(space, em, mapping)
    for j in range(d_v):
        axis = 1 + j
        R += (2.0 / mesh.widths[axis]) * ((W * Fhat * accel_vol[j]) @ basis.derivatives[axis])

    # x-faces: every cell owns its high face, the periodic neighbor sees the low side
    t_low, t_high = basis.face_traces[0, "low"], basis.face_traces[0, "high"]
    f_owner = C @ t_high.T
    f_neighbor = np.roll(C, -1, axis=0) @ t_low.T
    flux = scale_x * (Wf * upwind_flux_x(u_face[0], f_owner, f_neighbor))
    R -= flux @ t_high
    R += np.roll(flux @ t_low, 1, axis=0)

    accel_face = velocity_face_accelerations(space, em, mapping)
    for j in range(d_v):
        axis = 1 + j
        n = mesh.shape[axis]
        scale = 2.0 / mesh.widths[axis]
        t_low, t_high = basis.face_traces[axis, "low"], basis.face_traces[axis, "high"]
        accel = accel_face[j]
        ndim = C.ndim
        lower = _axis_slice(ndim, axis, slice(0, n - 1))
        upper = _axis_slice(ndim, axis, slice(1, n))
        if n > 1:
            f_owner = C[lower] @ t_high.T
            f_neighbor = C[upper] @ t_low.T
            flux = scale * (Wf * upwind_flux_v(accel[_axis_slice(ndim, axis, slice(1, n))],
                                               f_owner, f_neighbor))
            R[lower] -= flux @ t_high
            R[upper] += flux @ t_low
        first = _axis_slice(ndim, axis, slice(0, 1))
        last = _axis_slice(ndim, axis, slice(n - 1, n))
        flux_lo = scale * (Wf * upwind_flux_v(-accel[first], C[first] @ t_low.T))
        flux_hi = scale * (Wf * upwind_flux_v(accel[_axis_slice(ndim, axis, slice(n, n + 1))],
                                              C[last] @ t_high.T))
        R[first] -= flux_lo @ t_low
        R[last] -= flux_hi @ t_high
    return R


def reverse_velocity(f: DistributionField) -> DistributionField:
    """f(x, v) -> f(x, -v) on a velocity box symmetric about the origin.

    Velocity cells are mirrored and modes odd in a velocity variable change sign.
    """
    space = f.space
    for axis in space.mesh.v_axes:
        if not np.isclose(axis.lo, -axis.hi):
            raise MeshMismatchError("Velocity reversal needs a velocity domain symmetric about 0")
    C = f.coefficients
    v_dims = tuple(range(1, 1 + space.d_v))
    mirrored = np.flip(C, axis=v_dims)
    alpha = np.array(space.basis.multi_indices)
    parity = (-1.0) ** alpha[:, 1:].sum(axis=1)
    return f.with_coefficients(mirrored * parity)
