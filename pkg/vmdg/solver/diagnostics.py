"""Norms, conserved quantities, divergence residuals and empirical convergence orders.

Global reductions go through math.fsum so a diagnostic evaluated twice on the
same state is bit-identical regardless of array layout.
"""
import math
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

from ..Models.diagnostic_model import (CONVERGENCE_VARIABLES, ConvergenceRow, ConvergenceTable,
                                       DiagnosticRecord)
from ..Models.field_model import B_COMPONENTS, E_COMPONENTS, CoupledState, EMField, MomentPair
from .basis_quadrature import QuadratureRule, evaluate_at_nodes, gauss_legendre, jacobian
from .maxwell_operator import compute_moments, normal_jumps
from .vlasov_operator import CLASSICAL, as_mapping


def deterministic_sum(values) -> float:
    return math.fsum(np.ravel(values))


def error_rule(field) -> QuadratureRule:
    """Two points per axis richer than the assembly rule."""
    return gauss_legendre(field.k + 4, field.mesh.dim)


def l2_error(field, exact: Callable, rule: QuadratureRule = None) -> float:
    """sqrt(sum over cells and nodes of w * (field - exact)^2).

    ``field`` is anything with ``mesh``, ``basis``, ``coefficients`` and ``k``
    (a DistributionField or a SpatialField); ``exact`` takes one coordinate
    array per axis.
    """
    rule = rule or error_rule(field)
    mesh = field.mesh
    approx = evaluate_at_nodes(mesh, field.basis, field.coefficients, rule.nodes)
    coords = mesh.node_coordinates(rule.nodes)
    diff = approx - np.asarray(exact(*coords), dtype=float)
    return math.sqrt(jacobian(mesh) * deterministic_sum(rule.weights * diff ** 2))


def em_l2_errors(em: EMField, exact: Dict[str, Callable]) -> Dict[str, float]:
    """Errors of the E and B groups; active components without an exact solution compare to 0."""
    sq = {"E": [], "B": []}
    for name in em.active:
        func = exact.get(name) or (lambda x: np.zeros_like(x))
        sq[name[0]].append(l2_error(em.component_field(name), func) ** 2)
    return {group: math.sqrt(math.fsum(values)) for group, values in sq.items()}


def kinetic_weight(velocity: Sequence[np.ndarray], mapping) -> np.ndarray:
    speed_sq = sum(v ** 2 for v in velocity)
    if as_mapping(mapping).relativistic:
        return np.sqrt(1.0 + speed_sq) - 1.0
    return speed_sq


def electric_energy(em: EMField) -> float:
    return deterministic_sum(np.array([em.component(n) for n in E_COMPONENTS]) ** 2)


def magnetic_energy(em: EMField) -> float:
    return deterministic_sum(np.array([em.component(n) for n in B_COMPONENTS]) ** 2)


def total_energy(state: CoupledState, mapping=CLASSICAL):
    """(kinetic, electromagnetic) energy.

    kinetic = int f |v|^2 (classical) or int f (sqrt(1 + |v|^2) - 1) (relativistic);
    electromagnetic = int |E|^2 + |B|^2, the squared coefficient norm.
    """
    space = state.space
    basis = space.basis
    weight = kinetic_weight(space.volume_coords[1:1 + space.d_v], mapping)
    fhat = state.f.coefficients @ basis.values.T
    kinetic = math.sqrt(space.jacobian) * deterministic_sum(basis.quadrature.weights * fhat * weight)
    electromagnetic = electric_energy(state.em) + magnetic_energy(state.em)
    return kinetic, electromagnetic


def divergence_residuals(em: EMField, moments: MomentPair, rho_i: float):
    """(||d_x E1 - (rho_h - rho_i)||, ||d_x B1||) with elementwise strong derivatives.

    In the reduced systems without E1 there is no Gauss law to monitor and the
    first entry is 0.
    """
    space = em.space
    scale = 2.0 / space.mesh.widths[0]
    D = space.x_basis.derivative_matrix(0)
    div_e = 0.0
    if em.is_active("E1"):
        residual = scale * (em.component("E1") @ D.T) - moments.rho.coefficients
        residual[:, 0] += rho_i * math.sqrt(space.mesh.widths[0])
        div_e = math.sqrt(deterministic_sum(residual ** 2))
    div_b = 0.0
    if em.is_active("B1"):
        div_b = math.sqrt(deterministic_sum((scale * (em.component("B1") @ D.T)) ** 2))
    return div_e, div_b


def normal_jump_norms(em: EMField):
    """L2 norms (point sums over the x-faces) of the jumps of E1 and B1."""
    jumps = normal_jumps(em)
    return (math.sqrt(deterministic_sum(jumps["E1"] ** 2)),
            math.sqrt(deterministic_sum(jumps["B1"] ** 2)))


def diagnostic_record(state: CoupledState, mapping=CLASSICAL, rho_i: float = 0.0) -> DiagnosticRecord:
    moments = compute_moments(state.f, mapping)
    kinetic, electromagnetic = total_energy(state, mapping)
    div_e, div_b = divergence_residuals(state.em, moments, rho_i)
    jump_e, jump_b = normal_jump_norms(state.em)
    cell_means = state.f.coefficients[..., 0] / math.sqrt(state.space.mesh.cell_measure)
    return DiagnosticRecord(
        time=state.time, l2_f=state.f.l2_norm(), l2_E=state.em.l2_E(), l2_B=state.em.l2_B(),
        mass=state.f.mass(), energy_kinetic=kinetic, energy_em=electromagnetic,
        div_E_residual=div_e, div_B_residual=div_b,
        min_cell_values=float(np.min(cell_means)), jump_E=jump_e, jump_B=jump_b,
    )


class DiagnosticsObserver:
    """Run observer producing one DiagnosticRecord per call."""

    def __init__(self, mapping=CLASSICAL, rho_i: float = 0.0):
        self.mapping = as_mapping(mapping)
        self.rho_i = rho_i

    def __repr__(self):
        return f"DiagnosticsObserver(mapping={self.mapping.kind.value}, rho_i={self.rho_i:.6g})"

    def __call__(self, state: CoupledState, step: int) -> DiagnosticRecord:
        return diagnostic_record(state, self.mapping, self.rho_i)


def order(e_prev, e, r_prev, r) -> Optional[float]:
    """log(e_prev / e) / log(r_prev / r); None when any error is missing or nonpositive."""
    if e_prev is None or e is None or e_prev <= 0 or e <= 0 or r_prev == r:
        return None
    if not (math.isfinite(e_prev) and math.isfinite(e)):
        return None
    return math.log(e_prev / e) / math.log(r_prev / r)


def eoc(rows: Iterable, variables: List[str] = None, by: str = "h") -> ConvergenceTable:
    """Attach per-variable EOC columns to a ladder of ConvergenceRow (or dict) rows.

    ``by`` selects the refinement parameter: "h" for spatial and "tau" for
    temporal ladders.
    """
    variables = list(variables or CONVERGENCE_VARIABLES)
    out = []
    for row in rows:
        if isinstance(row, dict):
            row = ConvergenceRow(row["level"], row["h"], row.get("tau", 0.0), row["errors"])
        out.append(ConvergenceRow(row.level, row.h, row.tau, row.errors))
    for prev, cur in zip(out, out[1:]):
        r_prev, r = getattr(prev, by), getattr(cur, by)
        for v in variables:
            cur.eocs[v] = order(prev.errors.get(v), cur.errors.get(v), r_prev, r)
    if out:
        for v in variables:
            out[0].eocs.setdefault(v, None)
    return ConvergenceTable(out, variables)


def growth_rate(times: Sequence[float], energies: Sequence[float], window=None) -> Optional[float]:
    """Least-squares slope of 0.5 * log(energy) over ``window = (t_start, t_end)``."""
    t = np.asarray(times, dtype=float)
    e = np.asarray(energies, dtype=float)
    keep = e > 0
    if window is not None:
        keep &= (t >= window[0]) & (t <= window[1])
    if keep.sum() < 2:
        return None
    slope, _ = np.polyfit(t[keep], 0.5 * np.log(e[keep]), 1)
    return float(slope)
