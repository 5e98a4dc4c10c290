"""Catalog of verification scenarios and the finite-difference check of their exact solutions."""
import math
from typing import Callable, Dict, List

import numpy as np
from numpy.polynomial import legendre

from ..Models.field_model import CoupledState, DistributionField, EMField
from ..Models.scenario_model import Scenario
from .basis_quadrature import l2_project
from .errors import UnknownScenarioError
from .vlasov_operator import acceleration, as_mapping

SQRT_PI = math.sqrt(math.pi)


def _zeros_like_args(*args):
    return np.zeros(np.broadcast(*[np.asarray(a) for a in args]).shape)


def free_streaming(mapping: str = "classical") -> Scenario:
    transport = as_mapping(mapping)

    def f0(x, v):
        return np.exp(-v ** 2 / 0.25) * (1.0 + 0.5 * np.sin(x))

    def exact_f(t, x, v):
        (u,) = transport.transport([v])
        return f0(x - u * t, v)

    suffix = "" if transport.kind.value == "classical" else "_relativistic"
    return Scenario(
        name="free_streaming" + suffix, d_v=1, active=(),
        x_domain=(0.0, 2.0 * math.pi), v_domain=[(-6.0, 6.0)],
        f0=f0, exact_f=exact_f, mapping=transport.kind.value, evolve_fields=False,
        n_x=8, n_v=[8], t_final=1.0,
        description="Field-free transport of a Gaussian beam with a sinusoidal density profile",
    )


def maxwell_vacuum_1d() -> Scenario:
    wave = {name: (lambda t, x: np.cos(2.0 * math.pi * (x - t))) for name in ("E2", "B3")}
    return Scenario(
        name="maxwell_vacuum_1d", d_v=1, active=("E2", "B3"),
        x_domain=(0.0, 1.0), v_domain=[(-1.0, 1.0)],
        f0=lambda x, v: _zeros_like_args(x, v),
        em0={name: (lambda x, func=func: func(0.0, x)) for name, func in wave.items()},
        exact_em=wave, evolve_kinetic=False,
        n_x=8, n_v=[2], t_final=1.0,
        description="Right-moving plane wave in vacuum",
    )


def manufactured_coupled(mapping: str = "classical") -> Scenario:
    """f = (1 + sin(x - t)/2) exp(-v^2), E1 = -(sqrt(pi)/2) cos(x - t), forced.

    J1 vanishes by symmetry and Gauss's law holds with rho_i = sqrt(pi).
    """
    transport = as_mapping(mapping)

    def maxwellian(v):
        return np.exp(-v ** 2)

    def exact_f(t, x, v):
        return (1.0 + 0.5 * np.sin(x - t)) * maxwellian(v)

    def exact_e1(t, x):
        return -0.5 * SQRT_PI * np.cos(x - t)

    def source_f(t, x, v):
        (u,) = transport.transport([v])
        m = maxwellian(v)
        return (0.5 * np.cos(x - t) * (u - 1.0) * m
                - 2.0 * v * exact_e1(t, x) * (1.0 + 0.5 * np.sin(x - t)) * m)

    def source_e1(t, x):
        return -0.5 * SQRT_PI * np.sin(x - t)

    suffix = "" if transport.kind.value == "classical" else "_relativistic"
    return Scenario(
        name="manufactured_coupled" + suffix, d_v=1, active=("E1",),
        x_domain=(0.0, 2.0 * math.pi), v_domain=[(-12.0, 12.0)],
        f0=lambda x, v: exact_f(0.0, x, v), em0={"E1": lambda x: exact_e1(0.0, x)},
        exact_f=exact_f, exact_em={"E1": exact_e1},
        source_f=source_f, source_em={"E1": source_e1},
        mapping=transport.kind.value, n_x=8, n_v=[16], t_final=1.0,
        description="Forced coupled problem with a closed-form solution",
    )


def weibel_1d2v(thermal_speed: float = 0.1, temperature_ratio: float = 4.0,
                wavenumber: float = 1.25, amplitude: float = 1e-3) -> Scenario:
    """Anisotropic Maxwellian (hot along v2) seeded with a small B3 perturbation."""
    vt1 = thermal_speed
    vt2 = thermal_speed * math.sqrt(temperature_ratio)

    def f0(x, v1, v2):
        return (np.exp(-v1 ** 2 / vt1 ** 2 - v2 ** 2 / vt2 ** 2) / (math.pi * vt1 * vt2)
                + 0.0 * x)

    return Scenario(
        name="weibel_1d2v", d_v=2, active=("E1", "E2", "B3"),
        x_domain=(0.0, 2.0 * math.pi / wavenumber), v_domain=[(-1.2, 1.2), (-1.2, 1.2)],
        f0=f0, em0={"B3": lambda x: amplitude * np.sin(wavenumber * x)},
        n_x=16, n_v=[16, 16], t_final=10.0,
        description="Weibel instability in the reduced 1D2V system (no exact solution)",
        params={"thermal_speed": thermal_speed, "temperature_ratio": temperature_ratio,
                "wavenumber": wavenumber, "amplitude": amplitude},
    )


CATALOG: Dict[str, Callable[..., Scenario]] = {
    "free_streaming": lambda **kw: free_streaming("classical", **kw),
    "free_streaming_relativistic": lambda **kw: free_streaming("relativistic", **kw),
    "maxwell_vacuum_1d": maxwell_vacuum_1d,
    "manufactured_coupled": lambda **kw: manufactured_coupled("classical", **kw),
    "manufactured_coupled_relativistic": lambda **kw: manufactured_coupled("relativistic", **kw),
    "weibel_1d2v": weibel_1d2v,
}


def scenario_names() -> List[str]:
    return list(CATALOG)


def lookup(name: str, **params) -> Scenario:
    try:
        factory = CATALOG[name]
    except KeyError:
        raise UnknownScenarioError(name) from None
    return factory(**params)


def initial_state(scenario: Scenario, space) -> CoupledState:
    f = DistributionField(space, l2_project(space.mesh, space.basis, scenario.f0))
    em = EMField(space, scenario.active)
    for i, name in enumerate(em.active):
        func = scenario.em0.get(name)
        if func is not None:
            em.coefficients[i] = l2_project(space.mesh.spatial, space.x_basis, func)
    return CoupledState(f, em, 0.0)


class ProjectedSources:
    """Manufactured sources L2-projected at the requested stage time."""

    def __init__(self, scenario: Scenario, space, active):
        self.scenario = scenario
        self.space = space
        self.active = tuple(active)

    def __repr__(self):
        return f"ProjectedSources({self.scenario.name!r})"

    def distribution(self, t: float):
        source = self.scenario.source_f
        if source is None:
            return None
        return l2_project(self.space.mesh, self.space.basis, lambda x, *v: source(t, x, *v))

    def fields(self, t: float):
        if not self.scenario.source_em:
            return None
        out = np.zeros((len(self.active), self.space.shape[0], self.space.n_x_modes))
        for i, name in enumerate(self.active):
            func = self.scenario.source_em.get(name)
            if func is not None:
                out[i] = l2_project(self.space.mesh.spatial, self.space.x_basis,
                                    lambda x, func=func: func(t, x))
        return out


def sources_for(scenario: Scenario, space, active):
    return ProjectedSources(scenario, space, active) if scenario.has_sources else None


class ScenarioReport:
    def __init__(self, name: str, checked: bool, max_residual: float, support_ok: bool,
                 max_edge_value: float, tolerance: float):
        self.name = name
        self.checked = checked
        self.max_residual = max_residual
        self.support_ok = support_ok
        self.max_edge_value = max_edge_value
        self.tolerance = tolerance

    def __repr__(self):
        return (f"ScenarioReport(name={self.name!r}, checked={self.checked}, "
                f"max_residual={self.max_residual:.3e}, support_ok={self.support_ok})")

    @property
    def passed(self) -> bool:
        return self.support_ok and (not self.checked or self.max_residual <= self.tolerance)

    def to_dict(self):
        return {"name": self.name, "checked": self.checked, "max_residual": self.max_residual,
                "support_ok": self.support_ok, "max_edge_value": self.max_edge_value,
                "tolerance": self.tolerance, "passed": self.passed}


def _central(func, point: List[float], index: int, step: float) -> float:
    hi = list(point)
    lo = list(point)
    hi[index] += step
    lo[index] -= step
    return (func(*hi) - func(*lo)) / (2.0 * step)


def _velocity_moment(scenario: Scenario, t: float, x: float, axis: int, n_points: int = 64) -> float:
    """int u_axis f_exact dv by tensor Gauss-Legendre quadrature over the velocity box."""
    nodes, weights = legendre.leggauss(n_points)
    grids, wgrids = [], []
    for lo, hi in scenario.v_domain:
        grids.append(0.5 * (hi - lo) * nodes + 0.5 * (hi + lo))
        wgrids.append(0.5 * (hi - lo) * weights)
    v = np.meshgrid(*grids, indexing="ij")
    w = np.prod(np.meshgrid(*wgrids, indexing="ij"), axis=0)
    u = as_mapping(scenario.mapping).transport(v)
    return float(np.sum(w * u[axis] * scenario.exact_f(t, x, *v)))


def _field_values(scenario: Scenario, t: float, x: float) -> Dict[str, float]:
    return {name: float(func(t, x)) for name, func in scenario.exact_em.items()}


def _vlasov_residual(scenario: Scenario, t: float, x: float, v: List[float], step: float):
    func = scenario.exact_f
    point = [t, x] + list(v)
    mapping = as_mapping(scenario.mapping)
    u = mapping.transport([np.asarray(c) for c in v])
    terms = [_central(func, point, 0, step), float(u[0]) * _central(func, point, 1, step)]
    if scenario.evolve_fields:
        accel = acceleration(_field_values(scenario, t, x), [np.asarray(c) for c in v],
                             mapping, scenario.d_v)
        terms += [float(a) * _central(func, point, 2 + j, step) for j, a in enumerate(accel)]
    if scenario.source_f is not None:
        terms.append(-float(scenario.source_f(t, x, *v)))
    return sum(terms), sum(abs(term) for term in terms)


# (component, curl partner, sign of d_x partner on the left side)
_MAXWELL_LHS = {"E1": (None, 0.0), "E2": ("B3", 1.0), "E3": ("B2", -1.0),
                "B1": (None, 0.0), "B2": ("E3", -1.0), "B3": ("E2", 1.0)}


def _maxwell_residual(scenario: Scenario, name: str, t: float, x: float, step: float):
    func = scenario.exact_em[name]
    terms = [_central(func, [t, x], 0, step)]
    partner, sign = _MAXWELL_LHS[name]
    if partner is not None and partner in scenario.exact_em:
        terms.append(sign * _central(scenario.exact_em[partner], [t, x], 1, step))
    axis = int(name[1]) - 1
    if name[0] == "E" and scenario.evolve_kinetic and scenario.exact_f is not None \
            and axis < scenario.d_v:
        terms.append(_velocity_moment(scenario, t, x, axis))
    source = scenario.source_em.get(name)
    if source is not None:
        terms.append(-float(source(t, x)))
    return sum(terms), sum(abs(term) for term in terms)


def support_margin(scenario: Scenario, margin_cells: int = 2, samples: int = 17) -> tuple:
    """Largest |f0| in the outer ``margin_cells`` velocity cells of the coarsest mesh,
    and the largest |f0| overall, both sampled on a tensor grid."""
    x = np.linspace(*scenario.x_domain, samples)
    edge_max = 0.0
    full_axes = [np.linspace(lo, hi, 4 * samples) for lo, hi in scenario.v_domain]
    grid = np.meshgrid(x, *full_axes, indexing="ij")
    overall = float(np.max(np.abs(scenario.f0(*grid))))
    for j, ((lo, hi), n) in enumerate(zip(scenario.v_domain, scenario.n_v)):
        band = margin_cells * (hi - lo) / n
        for a, b in ((lo, lo + band), (hi - band, hi)):
            axes = list(full_axes)
            axes[j] = np.linspace(a, b, samples)
            grid = np.meshgrid(x, *axes, indexing="ij")
            edge_max = max(edge_max, float(np.max(np.abs(scenario.f0(*grid)))))
    return edge_max, overall


def verify_scenario(scenario: Scenario, n_points: int = 100, seed: int = 0,
                    tolerance: float = 1e-6, step: float = 1e-5) -> ScenarioReport:
    """Finite-difference PDE residual of the exact solution at random space-time points.

    The residual is measured relative to the sum of the magnitudes of the terms.
    """
    edge_max, overall = support_margin(scenario)
    support_ok = edge_max <= 1e-6 * overall
    if not scenario.has_exact_solution:
        return ScenarioReport(scenario.name, False, 0.0, support_ok, edge_max, tolerance)

    rng = np.random.default_rng(seed)
    t_hi = scenario.t_final if scenario.t_final > 0 else 1.0
    worst = 0.0
    for _ in range(n_points):
        t = float(rng.uniform(0.0, t_hi))
        x = float(rng.uniform(*scenario.x_domain))
        v = [float(rng.uniform(lo, hi)) for lo, hi in scenario.v_domain]
        residuals = []
        if scenario.exact_f is not None and scenario.evolve_kinetic:
            residuals.append(_vlasov_residual(scenario, t, x, v, step))
        for name in scenario.exact_em:
            residuals.append(_maxwell_residual(scenario, name, t, x, step))
        for value, scale in residuals:
            worst = max(worst, abs(value) / max(scale, 1e-12))
    return ScenarioReport(scenario.name, True, worst, support_ok, edge_max, tolerance)
