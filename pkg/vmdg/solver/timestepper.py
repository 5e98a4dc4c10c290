"""Three-stage SSP Runge-Kutta stepping of the coupled Vlasov-Maxwell state."""
import math
from functools import lru_cache
from typing import Callable, Iterable, List

import numpy as np

from ..Models.field_model import CoupledState, EMField
from .errors import BlowUpError, NonFiniteStateError
from .maxwell_operator import MaxwellFluxKind, apply_bh, compute_moments, zero_moments
from .mesh import make_mesh
from .phase_space import phase_space
from .vlasov_operator import CLASSICAL, apply_ah, as_mapping, max_face_acceleration

# weight of the previous stage (the old state takes the rest) and step factor of each stage
STAGE_WEIGHTS = (0.0, 1.0 / 4.0, 2.0 / 3.0)
STAGE_FACTORS = (1.0, 1.0 / 4.0, 2.0 / 3.0)
STAGE_TIMES = (0.0, 1.0, 0.5)


def ssp_rk3(u, tau: float, rhs: Callable, t: float = 0.0):
    """One step of the three-stage scheme for any u supporting +, - and scalar *.

    ``rhs(u, t)`` evaluates the right-hand side at stage time t. Each stage is
    formed as an increment of u, so rounding in the weights never rescales u.
    """
    stage = u
    for b, factor, c in zip(STAGE_WEIGHTS, STAGE_FACTORS, STAGE_TIMES):
        stage = u + b * (stage - u) + (factor * tau) * rhs(stage, t + c * tau)
    return stage


class StageWorkspace:
    """Stage states and residuals recorded during one rk3_step, in stage order."""

    def __init__(self):
        self.states: List[CoupledState] = []
        self.residuals: List[tuple] = []

    def __repr__(self):
        return f"StageWorkspace(stages={len(self.states)})"

    def clear(self):
        self.states.clear()
        self.residuals.clear()


class CoupledRhs:
    """Semi-discrete right side L(u) = (a_h residual + S_f, b_h residual + S_EM)."""

    def __init__(self, space, active, flux=MaxwellFluxKind.UPWIND, mapping=CLASSICAL,
                 sources=None, evolve_kinetic: bool = True, evolve_fields: bool = True,
                 workspace: StageWorkspace = None):
        self.space = space
        self.active = tuple(active)
        self.flux = MaxwellFluxKind(flux)
        self.mapping = as_mapping(mapping)
        self.sources = sources
        self.evolve_kinetic = evolve_kinetic
        self.evolve_fields = evolve_fields
        self.workspace = workspace

    def residual(self, state: CoupledState, t: float):
        rf = np.zeros_like(state.f.coefficients)
        rem = np.zeros_like(state.em.coefficients)
        if self.evolve_kinetic:
            rf = apply_ah(state.f, state.em, self.mapping)
            if self.sources is not None:
                src = self.sources.distribution(t)
                if src is not None:
                    rf = rf + src
        if self.evolve_fields and state.em.active:
            moments = (compute_moments(state.f, self.mapping) if self.evolve_kinetic
                       else zero_moments(state.space))
            rem = apply_bh(state.em, moments, self.flux)
            if self.sources is not None:
                src = self.sources.fields(t)
                if src is not None:
                    rem = rem + src
        if self.workspace is not None:
            self.workspace.states.append(state)
            self.workspace.residuals.append((rf, rem))
        return rf, rem

    def pack(self, state: CoupledState) -> np.ndarray:
        return np.concatenate([state.f.coefficients.ravel(), state.em.coefficients.ravel()])

    def unpack(self, u: np.ndarray, template: CoupledState, time: float) -> CoupledState:
        n_f = template.f.coefficients.size
        return template.replace(u[:n_f].reshape(template.f.coefficients.shape),
                                u[n_f:].reshape(template.em.coefficients.shape), time)

    def __call__(self, u: np.ndarray, t: float, template: CoupledState) -> np.ndarray:
        rf, rem = self.residual(self.unpack(u, template, t), t)
        return np.concatenate([rf.ravel(), rem.ravel()])


def rk3_step(state: CoupledState, tau: float, flux=MaxwellFluxKind.UPWIND, mapping=CLASSICAL,
             sources=None, evolve_kinetic: bool = True, evolve_fields: bool = True,
             workspace: StageWorkspace = None) -> CoupledState:
    """Advance by tau; each Maxwell stage takes its current from the same stage's f."""
    if not tau > 0:
        raise ValueError(f"Time step must be positive, got {tau}")
    if not state.is_finite():
        raise NonFiniteStateError(f"Non-finite state at t={state.time:.6g}")
    rhs = CoupledRhs(state.space, state.em.active, flux, mapping, sources,
                     evolve_kinetic, evolve_fields, workspace)
    u = rhs.pack(state)
    u_next = ssp_rk3(u, tau, lambda v, t: rhs(v, t, state), state.time)
    return rhs.unpack(u_next, state, state.time + tau)


class CflPolicy:
    """tau = gamma * min(h_x / Lambda_x, h_v / Lambda_v), capped at gamma * h."""

    def __init__(self, cfl_number: float, velocity_bound: float = None,
                 acceleration_floor: float = 1e-12, mapping=CLASSICAL,
                 include_light_speed: bool = False):
        if not cfl_number > 0:
            raise ValueError(f"CFL number must be positive, got {cfl_number}")
        self.cfl_number = float(cfl_number)
        self.velocity_bound = velocity_bound
        self.acceleration_floor = float(acceleration_floor)
        self.mapping = as_mapping(mapping)
        self.include_light_speed = include_light_speed

    def __repr__(self):
        return (f"CflPolicy(cfl_number={self.cfl_number:g}, velocity_bound={self.velocity_bound}, "
                f"mapping={self.mapping.kind.value}, light_speed={self.include_light_speed})")

    def transport_bound(self, mesh) -> float:
        bound = self.velocity_bound
        if bound is None:
            bound = self.mapping.speed_bound(mesh.v_axes, 0)
        if self.include_light_speed:
            bound = max(bound, 1.0)
        return float(bound)


def compute_dt(state: CoupledState, policy: CflPolicy) -> float:
    mesh = state.space.mesh
    gamma = policy.cfl_number
    lam_x = max(policy.transport_bound(mesh), policy.acceleration_floor)
    candidates = [mesh.widths[0] / lam_x]
    lam_v = max_face_acceleration(state.space, state.em, policy.mapping) if state.em.active else 0.0
    candidates.append(float(mesh.widths[1:].min()) / max(lam_v, policy.acceleration_floor))
    return gamma * min(min(candidates), mesh.h)


def rk3_amplification(z):
    return 1.0 + z + z * z / 2.0 + z ** 3 / 6.0


@lru_cache(maxsize=32)
def rk3_courant_limit(k: int, flux=MaxwellFluxKind.UPWIND, n_cells: int = 64) -> float:
    """Largest tau / h_x for which the periodic vacuum field operator is RK3 stable.

    The operator matrix is assembled column by column on a unit-speed (E2, B3)
    mesh; its eigenvalues times h_x are independent of the mesh size.
    """
    mesh = make_mesh((0.0, 1.0), [(-1.0, 1.0)], n_cells, [1])
    space = phase_space(mesh, k)
    em = EMField(space, ("E2", "B3"))
    moments = zero_moments(space)
    n = em.coefficients.size
    matrix = np.empty((n, n))
    for i in range(n):
        unit = np.zeros(n)
        unit[i] = 1.0
        column = apply_bh(em.with_coefficients(unit.reshape(em.coefficients.shape)), moments, flux)
        matrix[:, i] = column.ravel()
    spectrum = np.linalg.eigvals(matrix) / n_cells

    def stable(nu):
        return float(np.max(np.abs(rk3_amplification(nu * spectrum)))) <= 1.0 + 1e-10

    lo, hi = 0.0, 4.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if stable(mid):
            lo = mid
        else:
            hi = mid
    return lo


class RunResult:
    def __init__(self, state: CoupledState, steps: int, series: list, dt: float):
        self.state = state
        self.steps = steps
        self.series = series
        self.dt = dt

    def __repr__(self):
        return f"RunResult(steps={self.steps}, t={self.state.time:.6g}, records={len(self.series)})"


def _norms_finite(state: CoupledState) -> bool:
    return math.isfinite(float(np.sum(state.f.coefficients ** 2))) and \
        math.isfinite(float(np.sum(state.em.coefficients ** 2)))


def run(initial: CoupledState, t_final: float, policy: CflPolicy, flux=MaxwellFluxKind.UPWIND,
        mapping=CLASSICAL, observers: Iterable[Callable] = (), stride: int = 1,
        sources=None, evolve_kinetic: bool = True, evolve_fields: bool = True,
        adaptive: bool = False, dt: float = None) -> RunResult:
    """Step from initial.time to t_final, shortening the last step to land on t_final.

    Observers are called as ``observer(state, step)`` at step 0, every ``stride``
    steps and at the final state; non-None return values form the series.
    A fixed ``dt`` overrides the CFL policy.
    """
    if t_final < initial.time:
        raise ValueError(f"t_final={t_final} is before the initial time {initial.time}")
    stride = max(int(stride), 1)
    observers = list(observers)
    series = []

    def observe(state, step):
        for observer in observers:
            record = observer(state, step)
            if record is not None:
                series.append(record)

    tau = float(dt) if dt is not None else compute_dt(initial, policy)
    state = initial
    step = 0
    observe(state, step)
    eps = 1e-12 * max(abs(t_final), 1.0)
    while t_final - state.time > eps:
        if adaptive and dt is None and step > 0:
            tau = compute_dt(state, policy)
        h = min(tau, t_final - state.time)
        if t_final - (state.time + h) <= eps:
            h = t_final - state.time
        state = rk3_step(state, h, flux, mapping, sources, evolve_kinetic, evolve_fields)
        step += 1
        if t_final - state.time <= eps:
            state = CoupledState(state.f, state.em, t_final)
        if not _norms_finite(state):
            raise BlowUpError(step, state.time)
        if step % stride == 0 or state.time >= t_final:
            observe(state, step)
    return RunResult(state, step, series, tau)
