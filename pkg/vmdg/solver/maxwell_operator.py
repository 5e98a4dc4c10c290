"""DG residual of the 1D Maxwell system with current coupling, plus velocity moments.

With d_x = 1 (fields depend on x only) the curl equations reduce to

    E2_t = -d_x B3 - J2      B3_t = -d_x E2
    E3_t =  d_x B2 - J3      B2_t =  d_x E3
    E1_t = -J1               B1_t = 0

so the tangential pairs (E2, B3) and (E3, B2) are coupled through the x-faces
and the normal components only see the current.
"""
import math
from enum import Enum
from typing import Dict, Sequence, Tuple

import numpy as np

from ..Models.field_model import EMField, MomentPair, SpatialField
from .errors import MaxwellConfigError, MeshMismatchError
from .vlasov_operator import CLASSICAL, as_mapping, transport_tables

TANGENTIAL_PAIRS: Tuple[Tuple[str, str], ...] = (("E2", "B3"), ("E3", "B2"))
TANGENTIAL = ("E2", "E3", "B2", "B3")


class MaxwellFluxKind(str, Enum):
    UPWIND = "upwind"
    CENTRAL = "central"
    ALTERNATING_EMBP = "alternating_EmBp"
    ALTERNATING_EPBM = "alternating_EpBm"

    @property
    def dissipative(self) -> bool:
        return self == MaxwellFluxKind.UPWIND


def validate_mask(active: Sequence[str], flux=MaxwellFluxKind.UPWIND):
    """Reject component layouts the tangential flux cannot close."""
    flux = MaxwellFluxKind(flux)
    active = set(active)
    for e, b in TANGENTIAL_PAIRS:
        if (e in active) != (b in active):
            missing = b if e in active else e
            raise MaxwellConfigError(f"{e} and {b} must be active together; {missing} is missing")
    if not flux.dissipative and active and not active & set(TANGENTIAL):
        raise MaxwellConfigError(f"Flux kind {flux.value!r} needs at least one tangential pair")


def compute_moments(f, mapping=CLASSICAL) -> MomentPair:
    """rho_h = int f dv and J_h = int u f dv projected onto the spatial DG space.

    Only the current components with a velocity direction (J1 for 1D1V, J1 and
    J2 for 1D2V) are produced; the others vanish.
    """
    mapping = as_mapping(mapping)
    space = f.space
    basis = space.basis
    d_v = space.d_v
    v_dims = tuple(range(1, 1 + d_v))
    scale = math.sqrt(space.jacobian / space.x_jacobian)
    weighted = basis.quadrature.weights * (f.coefficients @ basis.values.T)
    u_vol, _ = transport_tables(space, mapping)

    def project(values):
        return scale * (np.sum(values, axis=v_dims) @ space.x_modes_volume)

    rho = SpatialField(space, project(weighted))
    j = {i + 1: SpatialField(space, project(weighted * u_vol[i])) for i in range(d_v)}
    return MomentPair(rho, j)


def zero_moments(space) -> MomentPair:
    shape = (space.shape[0], space.n_x_modes)
    return MomentPair(SpatialField(space, np.zeros(shape)),
                      {i + 1: SpatialField(space, np.zeros(shape)) for i in range(space.d_v)})


def background_density(moments: MomentPair, x_domain: Tuple[float, float]) -> float:
    """Constant ion background making int (rho_h - rho_i) dx = 0."""
    length = float(x_domain[1]) - float(x_domain[0])
    return moments.rho.integral() / length


def _traces(coefficients: np.ndarray, x_basis):
    """Left (lower cell) and right (upper cell) traces at every x-face.

    Face i is the high face of cell i, periodic, so cell i + 1 gives the right trace.
    """
    low = x_basis.face_traces[0, "low"][0]
    high = x_basis.face_traces[0, "high"][0]
    left = coefficients @ high
    right = np.roll(coefficients, -1, axis=0) @ low
    return left, right


def tangential_face_values(em: EMField, flux) -> Dict[str, np.ndarray]:
    """Numerical traces E^, B^ of the tangential components at every x-face (unscaled)."""
    flux = MaxwellFluxKind(flux)
    x_basis = em.space.x_basis
    sj = math.sqrt(em.space.x_jacobian)
    left, right = {}, {}
    for name in TANGENTIAL:
        left[name], right[name] = _traces(em.component(name), x_basis)
        left[name] = left[name] / sj
        right[name] = right[name] / sj

    if flux == MaxwellFluxKind.ALTERNATING_EMBP:
        return {name: left[name] if name[0] == "E" else right[name] for name in TANGENTIAL}
    if flux == MaxwellFluxKind.ALTERNATING_EPBM:
        return {name: right[name] if name[0] == "E" else left[name] for name in TANGENTIAL}

    avg = {name: 0.5 * (left[name] + right[name]) for name in TANGENTIAL}
    if flux == MaxwellFluxKind.CENTRAL:
        return avg
    jump = {name: left[name] - right[name] for name in TANGENTIAL}
    return {
        "E2": avg["E2"] + 0.5 * jump["B3"],
        "E3": avg["E3"] - 0.5 * jump["B2"],
        "B2": avg["B2"] - 0.5 * jump["E3"],
        "B3": avg["B3"] + 0.5 * jump["E2"],
    }


def tangential_jumps(em: EMField) -> Dict[str, np.ndarray]:
    """Point values of [E]_tan, [B]_tan components at every x-face."""
    sj = math.sqrt(em.space.x_jacobian)
    out = {}
    for name in TANGENTIAL:
        left, right = _traces(em.component(name), em.space.x_basis)
        out[name] = (left - right) / sj
    return out


def normal_jumps(em: EMField) -> Dict[str, np.ndarray]:
    sj = math.sqrt(em.space.x_jacobian)
    out = {}
    for name in ("E1", "B1"):
        left, right = _traces(em.component(name), em.space.x_basis)
        out[name] = (left - right) / sj
    return out


# (residual component, source component, volume sign); the face sign is the opposite
# of the volume sign for an outward normal +1
_CURL_COUPLING = (("E2", "B3", 1.0), ("E3", "B2", -1.0), ("B2", "E3", -1.0), ("B3", "E2", 1.0))


def apply_bh(em: EMField, moments: MomentPair, flux=MaxwellFluxKind.UPWIND) -> np.ndarray:
    """Residual coefficients with <R_E, U> + <R_B, V> = b_h(E_h, B_h, f_h; U, V)."""
    flux = MaxwellFluxKind(flux)
    validate_mask(em.active, flux)
    space = em.space
    if moments.rho.coefficients.shape != (space.shape[0], space.n_x_modes):
        raise MeshMismatchError("Moments do not live on the spatial mesh of the EM field")
    x_basis = space.x_basis
    scale = 2.0 / space.mesh.widths[0]
    sj = math.sqrt(space.x_jacobian)
    D = x_basis.derivative_matrix(0)
    low = x_basis.face_traces[0, "low"][0]
    high = x_basis.face_traces[0, "high"][0]

    R = np.zeros_like(em.coefficients)
    hat = tangential_face_values(em, flux) if set(em.active) & set(TANGENTIAL) else {}
    for target, source, sign in _CURL_COUPLING:
        if target not in em.active:
            continue
        out = R[em.active.index(target)]
        # int source * d_x phi_m
        out += sign * scale * (em.component(source) @ D)
        # - n sign * hat(source) * phi_m at both faces of each cell
        face = hat[source] / sj
        out -= sign * np.outer(face, high)
        out += sign * np.outer(np.roll(face, 1), low)

    for i, name in enumerate(("E1", "E2", "E3"), start=1):
        current = moments.current(i)
        if name in em.active and current is not None:
            R[em.active.index(name)] -= current
    return R
