"""Randomized check of the discrete dissipation and energy identities.

The jump integrals on the right-hand sides are assembled here edge by edge,
from physical face points and direct basis evaluation, independently of the
vectorized face tables the operators use.
"""
import math
from typing import Dict, List

import numpy as np

from vmdg.Models.field_model import DistributionField, EMField
from vmdg.solver.basis_quadrature import eval_field_at, gauss_legendre
from vmdg.solver.maxwell_operator import MaxwellFluxKind, apply_bh, compute_moments
from vmdg.solver.mesh import make_mesh
from vmdg.solver.phase_space import phase_space
from vmdg.solver.vlasov_operator import CLASSICAL, RELATIVISTIC, acceleration, apply_ah

from .logging_config import log_event

TOLERANCE = 1e-10


def random_space(k: int, d_v: int, rng: np.random.Generator, n_x: int = 3, n_v: int = 3):
    mesh = make_mesh((0.0, float(rng.uniform(1.0, 3.0))),
                     [(-float(rng.uniform(1.0, 2.0)), float(rng.uniform(1.0, 2.0)))] * d_v,
                     n_x, [n_v] * d_v)
    return phase_space(mesh, k)


def random_distribution(space, rng: np.random.Generator) -> DistributionField:
    return DistributionField(space, rng.standard_normal(space.shape + (space.n_modes,)))


def random_em(space, active, rng: np.random.Generator) -> EMField:
    em = EMField(space, active)
    em.coefficients[...] = rng.standard_normal(em.coefficients.shape)
    return em


def _face_points(mesh, edge, rule):
    """Physical coordinates of the face-rule nodes on ``edge`` (owner side)."""
    lower = mesh.cell_lower_corner(edge.owner_cell)
    others = [a for a in range(mesh.dim) if a != edge.axis]
    points = np.empty((rule.n_nodes, mesh.dim))
    for col, a in enumerate(others):
        points[:, a] = lower[a] + 0.5 * mesh.widths[a] * (rule.nodes[:, col] + 1.0)
    points[:, edge.axis] = lower[edge.axis] + (mesh.widths[edge.axis] if edge.normal_sign > 0 else 0.0)
    return points, rule.weights * np.prod([0.5 * mesh.widths[a] for a in others])


def _trace(space, coefficients, cell: int, point, axis: int, side: float) -> float:
    """Value of f_h in ``cell`` at a point of its face ``side`` (+1 high, -1 low) along ``axis``."""
    mesh = space.mesh
    xi = mesh.to_reference(cell, point)
    xi[axis] = side
    local = coefficients.reshape(mesh.n_cells, space.n_modes)[cell]
    return float(local @ space.basis.evaluate(xi[None, :])[0] / math.sqrt(space.jacobian))


def vlasov_jump_dissipation(f: DistributionField, em: EMField, mapping=CLASSICAL) -> float:
    """sum over faces of int |a.n| [f]^2, with a = u on x-faces and E + u x B on v-faces."""
    space = f.space
    mesh = space.mesh
    rule = gauss_legendre(space.k + 2, mesh.dim - 1)
    x_mesh = mesh.spatial
    terms = []
    for edge in mesh.interior_edges() + mesh.boundary_edges():
        points, weights = _face_points(mesh, edge, rule)
        for point, weight in zip(points, weights):
            owner = _trace(space, f.coefficients, edge.owner_cell, point, edge.axis,
                           float(edge.normal_sign))
            other = 0.0
            if edge.neighbor_cell is not None:
                other = _trace(space, f.coefficients, edge.neighbor_cell, point, edge.axis,
                               -float(edge.normal_sign))
            velocity = [np.asarray(c) for c in point[1:]]
            if edge.axis == 0:
                speed = float(mapping.transport(velocity)[0])
            else:
                x_cell = mesh.x_cell_of(edge.owner_cell)
                values = {name: eval_field_at(x_mesh, space.x_basis, em.component(name), x_cell,
                                              point[:1]) for name in em.active}
                speed = float(acceleration(values, velocity, mapping, space.d_v)[edge.axis - 1])
            terms.append(weight * abs(speed) * (owner - other) ** 2)
    return math.fsum(terms)


def maxwell_tangential_jumps(em: EMField) -> float:
    """sum over x-faces of |[E]_tan|^2 + |[B]_tan|^2 from point evaluation on both sides."""
    x_mesh = em.space.mesh.spatial
    axis = x_mesh.axes[0]
    terms = []
    for cell in range(x_mesh.n_cells):
        right = (cell + 1) % x_mesh.n_cells
        face = axis.lo + (cell + 1) * axis.width
        for name in ("E2", "E3", "B2", "B3"):
            left_value = eval_field_at(x_mesh, em.space.x_basis, em.component(name), cell, [face])
            right_value = eval_field_at(x_mesh, em.space.x_basis, em.component(name), right,
                                        [face - axis.length if right == 0 else face])
            terms.append((left_value - right_value) ** 2)
    return math.fsum(terms)


def current_work(em: EMField, moments) -> float:
    """int J_h . E_h dx."""
    terms = []
    for i, name in enumerate(("E1", "E2", "E3"), start=1):
        current = moments.current(i)
        if current is not None and em.is_active(name):
            terms.append(math.fsum(np.ravel(current * em.component(name))))
    return math.fsum(terms)


def vlasov_identity_defect(f: DistributionField, em: EMField, mapping=CLASSICAL):
    """(<a_h f, f>, defect) where defect = <a_h f, f> + jump dissipation / 2."""
    value = math.fsum(np.ravel(apply_ah(f, em, mapping) * f.coefficients))
    return value, value + 0.5 * vlasov_jump_dissipation(f, em, mapping)


def maxwell_identity_defect(em: EMField, f: DistributionField, flux, mapping=CLASSICAL):
    """(b_h(E, B; E, B), defect); upwind adds half the tangential jump integral."""
    flux = MaxwellFluxKind(flux)
    moments = compute_moments(f, mapping)
    value = math.fsum(np.ravel(apply_bh(em, moments, flux) * em.coefficients))
    defect = value + current_work(em, moments)
    if flux.dissipative:
        defect += 0.5 * maxwell_tangential_jumps(em)
    return value, defect


class IdentityReport:
    def __init__(self):
        self.total = 0
        self.passed = 0
        self.max_relative_defect = 0.0
        self.failures: List[Dict] = []
        self.counts: Dict[str, List[int]] = {}

    def __repr__(self):
        return f"IdentityReport(passed={self.passed}/{self.total}, max_defect={self.max_relative_defect:.3e})"

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def record(self, label: str, value: float, defect: float, tolerance: float = TOLERANCE):
        relative = abs(defect) / (1.0 + abs(value))
        good = relative <= tolerance
        self.total += 1
        self.passed += int(good)
        self.max_relative_defect = max(self.max_relative_defect, relative)
        count = self.counts.setdefault(label, [0, 0])
        count[0] += int(good)
        count[1] += 1
        if not good:
            self.failures.append({"case": label, "value": value, "defect": defect})

    def to_dict(self):
        return {"total": self.total, "passed": self.passed, "ok": self.ok,
                "max_relative_defect": self.max_relative_defect,
                "counts": {k: f"{v[0]}/{v[1]}" for k, v in self.counts.items()},
                "failures": self.failures}


VLASOV_CASES = [(k, d_v, CLASSICAL) for k in (0, 1, 2) for d_v in (1, 2)] + \
    [(k, 1, RELATIVISTIC) for k in (1, 2)]


def run_identity_suite(seed: int = 0, trials: int = 20, degrees=(0, 1, 2)) -> IdentityReport:
    """Random draws of (f_h, E_h, B_h) for every Vlasov configuration and Maxwell flux kind.

    The 1D2V force identity is exact for the classical mapping only, so the
    relativistic draws are restricted to 1D1V.
    """
    rng = np.random.default_rng(seed)
    report = IdentityReport()
    for k, d_v, mapping in VLASOV_CASES:
        if k not in degrees:
            continue
        label = f"vlasov k={k} 1D{d_v}V {mapping.kind.value}"
        active = ("E1",) if d_v == 1 else ("E1", "E2", "B3")
        for _ in range(trials):
            space = random_space(k, d_v, rng)
            f = random_distribution(space, rng)
            em = random_em(space, active, rng)
            report.record(label, *vlasov_identity_defect(f, em, mapping))

    for flux in MaxwellFluxKind:
        for k in degrees:
            label = f"maxwell {flux.value} k={k}"
            for _ in range(trials):
                space = random_space(k, 1, rng, n_x=4)
                f = random_distribution(space, rng)
                em = random_em(space, ("E1", "E2", "E3", "B1", "B2", "B3"), rng)
                report.record(label, *maxwell_identity_defect(em, f, flux))

    log_event("INFO" if report.ok else "ERROR", event="identity_suite_finished",
              seed=seed, trials=trials, **{k: v for k, v in report.to_dict().items()
                                           if k != "failures"})
    return report
