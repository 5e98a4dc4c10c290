"""Single runs and refinement ladders built from validated configs."""
import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional

import numpy as np

from vmdg.Models.config_model import RunConfig, StudyConfig, StudyMode
from vmdg.Models.diagnostic_model import (CONVERGENCE_COLUMNS, DIAGNOSTIC_COLUMNS,
                                          ConvergenceRow, ConvergenceTable)
from vmdg.solver.basis_quadrature import l2_project
from vmdg.solver.diagnostics import DiagnosticsObserver, em_l2_errors, eoc, growth_rate, l2_error
from vmdg.solver.errors import BlowUpError, ScenarioCheckError
from vmdg.solver.maxwell_operator import MaxwellFluxKind, background_density, compute_moments
from vmdg.solver.mesh import build_mesh
from vmdg.solver.phase_space import phase_space
from vmdg.solver.scenarios import initial_state, lookup, sources_for, verify_scenario
from vmdg.solver.timestepper import CflPolicy, compute_dt, rk3_courant_limit, run
from vmdg.solver.vlasov_operator import as_mapping
from vmdg.storage_utils import write_csv, write_json

from .logging_config import log_event

POLLUTION_FRACTION = 0.01
LIMIT_FRACTION = 0.99


def temporal_base_cfl(k: int, flux=MaxwellFluxKind.UPWIND, fields_only: bool = False) -> float:
    """Starting CFL of temporal ladders.

    Field-only ladders start just inside the computed RK3 limit of the field
    operator, the largest temporal error the mesh allows. Kinetic ladders stay
    at 0.85 / (2k + 1).
    """
    if fields_only:
        return LIMIT_FRACTION * rk3_courant_limit(k, MaxwellFluxKind(flux))
    return 0.85 / (2 * k + 1)


def worker_count(n_jobs: int) -> int:
    cap = os.getenv("VM_RKDG_THREADS", "").strip()
    limit = int(cap) if cap.isdigit() and int(cap) > 0 else (os.cpu_count() or 1)
    return max(1, min(limit, n_jobs))


class Case:
    """Everything a run of one config needs: scenario, discrete space, initial state, policy."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.scenario = lookup(config.scenario)
        self.mapping = as_mapping(config.mapping or self.scenario.mapping)
        self.mesh = build_mesh(config)
        self.space = phase_space(self.mesh, config.k)
        self.initial = initial_state(self.scenario, self.space)
        self.rho_i = background_density(compute_moments(self.initial.f, self.mapping),
                                        config.x_domain)
        fields_move = self.scenario.evolve_fields and bool(self.scenario.active)
        self.policy = CflPolicy(config.cfl_number, mapping=self.mapping,
                                include_light_speed=fields_move)
        self.sources = sources_for(self.scenario, self.space, self.initial.em.active)

    def __repr__(self):
        return f"Case(scenario={self.scenario.name!r}, mesh={self.mesh!r}, k={self.config.k})"

    def dt(self) -> float:
        return compute_dt(self.initial, self.policy)

    def run(self, dt: float = None, observers=(), stride: int = None):
        return run(self.initial, self.config.t_final, self.policy, flux=self.config.flux,
                   mapping=self.mapping, observers=observers,
                   stride=stride or self.config.observer_stride, sources=self.sources,
                   evolve_kinetic=self.scenario.evolve_kinetic,
                   evolve_fields=self.scenario.evolve_fields,
                   adaptive=self.config.adaptive_dt, dt=dt)

    def errors(self, state) -> Dict[str, Optional[float]]:
        """L2 errors against the exact solution at state.time (None where undefined)."""
        scenario = self.scenario
        t = state.time
        err_f = None
        if scenario.exact_f is not None and scenario.evolve_kinetic:
            err_f = l2_error(state.f, scenario.exact_distribution(t))
        exact = {name: scenario.exact_component(name, t) for name in scenario.exact_em}
        groups = em_l2_errors(state.em, exact) if scenario.exact_em else {}
        has_e = any(n[0] == "E" for n in state.em.active) and scenario.exact_em
        has_b = any(n[0] == "B" for n in state.em.active) and scenario.exact_em
        return {"f": err_f,
                "E": groups.get("E") if has_e else None,
                "B": groups.get("B") if has_b else None}

    def projection_floor(self, t: float) -> Dict[str, Optional[float]]:
        """Best-approximation error of the exact solution on this mesh."""
        scenario = self.scenario
        projected = initial_state(scenario, self.space)
        if scenario.exact_f is not None:
            projected.f.coefficients[...] = l2_project(self.mesh, self.space.basis,
                                                       scenario.exact_distribution(t))
        for i, name in enumerate(projected.em.active):
            func = scenario.exact_component(name, t)
            if func is not None:
                projected.em.coefficients[i] = l2_project(self.mesh.spatial, self.space.x_basis, func)
        projected.time = t
        return self.errors(projected)


class RunOutcome:
    def __init__(self, config: RunConfig, result, records, errors, growth=None):
        self.config = config
        self.result = result
        self.records = records
        self.errors = errors
        self.growth_rate = growth

    def __repr__(self):
        return f"RunOutcome(scenario={self.config.scenario!r}, steps={self.result.steps})"

    @property
    def state(self):
        return self.result.state


def run_simulation(config: RunConfig, output: str = None) -> RunOutcome:
    """One run with diagnostics at every observer stride; writes the diagnostics CSV if asked."""
    case = Case(config)
    output = output or config.output
    dt = case.dt()
    log_event("INFO", event="run_started", scenario=config.scenario, k=config.k,
              n_x=config.n_x, n_v=list(config.n_v), t_final=config.t_final,
              flux=config.flux.value, mapping=case.mapping.kind.value)
    log_event("INFO", event="dt_selected", dt=dt, cfl=config.cfl_number,
              adaptive=config.adaptive_dt)
    observer = DiagnosticsObserver(case.mapping, case.rho_i)
    try:
        result = case.run(observers=[observer])
    except BlowUpError as exc:
        log_event("ERROR", event="run_blowup", message=str(exc), step=exc.step, time=exc.time,
                  scenario=config.scenario)
        raise
    errors = case.errors(result.state) if case.scenario.has_exact_solution else {}
    records = result.series
    if output:
        write_csv(output, DIAGNOSTIC_COLUMNS, [r.row() for r in records])
    if len(records) >= 2 and records[0].mass:
        drift = abs(records[-1].mass - records[0].mass) / abs(records[0].mass)
    else:
        drift = 0.0
    growth = None
    if not case.scenario.has_exact_solution and any(n[0] == "B" for n in case.scenario.active):
        growth = growth_rate([r.time for r in records], [r.l2_B ** 2 for r in records],
                             config.growth_window)
    final = records[-1]
    log_event("INFO", event="run_finished", scenario=config.scenario, steps=result.steps,
              time=result.state.time, mass_drift=drift, errors=errors, growth_rate=growth,
              jump_E=final.jump_E, jump_B=final.jump_B, output=output)
    return RunOutcome(config, result, records, errors, growth)


def _level_config(base: RunConfig, level: int, refine_velocity: bool) -> RunConfig:
    factor = 2 ** level
    n_v = [n * factor for n in base.n_v] if refine_velocity else list(base.n_v)
    return base.model_copy(update={"n_x": base.n_x * factor, "n_v": n_v})


def _spatial_level(base: RunConfig, level: int, scenario):
    config = _level_config(base, level, scenario.evolve_kinetic)
    case = Case(config)
    tau = case.dt()
    k = config.k
    if k >= 3:
        # tau ~ h^((k + 1/2) / 3) keeps the tau^3 term below the spatial error
        tau *= 2.0 ** (-level * ((k + 0.5) / 3.0 - 1.0))
    result = case.run(dt=tau)
    h = case.mesh.h if scenario.evolve_kinetic else case.mesh.h_x
    errors = case.errors(result.state)
    log_event("INFO", event="study_level_finished", ladder_level=level, h=h, tau=tau,
              steps=result.steps, errors=errors)
    return ConvergenceRow(level, h, tau, errors)


def _combined(errors: Dict[str, Optional[float]]) -> Optional[float]:
    present = [e for e in errors.values() if e is not None]
    if not present:
        return None
    return math.sqrt(math.fsum(e * e for e in present))


def _state_difference(a, b) -> Dict[str, Optional[float]]:
    """Coefficient-norm differences, which are L2 differences under the orthonormal basis."""
    df = a.f.coefficients - b.f.coefficients
    out = {"f": float(np.sqrt(np.sum(df ** 2)))}
    for group in ("E", "B"):
        idx = [i for i, n in enumerate(a.em.active) if n[0] == group]
        if idx:
            d = a.em.coefficients[idx] - b.em.coefficients[idx]
            out[group] = float(np.sqrt(np.sum(d ** 2)))
        else:
            out[group] = None
    return out


class StudyOutcome:
    def __init__(self, study: StudyConfig, table: ConvergenceTable, summary: Dict):
        self.study = study
        self.table = table
        self.summary = summary

    def __repr__(self):
        return f"StudyOutcome(mode={self.study.mode.value}, final={self.table.final_eocs()})"


def _check_scenario(scenario):
    report = verify_scenario(scenario)
    log_event("INFO" if report.passed else "ERROR", event="scenario_checked", **report.to_dict())
    if not report.passed:
        raise ScenarioCheckError(f"Scenario {scenario.name!r} failed its exact-solution check: "
                                 f"{report!r}")
    return report


def run_study(study: StudyConfig, output: str = None) -> StudyOutcome:
    base = study.base
    scenario = lookup(base.scenario)
    if not scenario.has_exact_solution:
        raise ScenarioCheckError(f"Scenario {scenario.name!r} has no exact solution to converge to")
    _check_scenario(scenario)
    output = output or base.output

    if study.mode == StudyMode.TEMPORAL:
        table, extra = _temporal_ladder(study)
    else:
        levels = list(range(study.levels))
        with ThreadPoolExecutor(max_workers=worker_count(len(levels))) as pool:
            rows = list(pool.map(lambda lvl: _spatial_level(base, lvl, scenario), levels))
        variables = ["f", "E", "B"]
        if study.mode == StudyMode.COUPLED:
            for row in rows:
                row.errors["combined"] = _combined(row.errors)
            variables.append("combined")
        table = eoc(rows, variables, by="h")
        extra = {}

    summary = {
        "scenario": scenario.name,
        "mode": study.mode.value,
        "k": base.k,
        "flux": base.flux.value,
        "levels": study.levels,
        "final_eoc": table.final_eocs(),
        "expected_min_eoc": expected_order(study),
        **extra,
    }
    passed, reasons = study_assertion(study, table, summary)
    summary["passed"] = passed
    summary["reasons"] = reasons
    if output:
        write_csv(output, CONVERGENCE_COLUMNS, [r.row() for r in table.rows])
        write_json(os.path.splitext(output)[0] + ".json", {**summary, "table": table.to_dict()})
    log_event("INFO", event="study_finished", **{k: v for k, v in summary.items() if k != "reasons"})
    return StudyOutcome(study, table, summary)


def _temporal_ladder(study: StudyConfig):
    base = study.base
    if base.cfl is None:
        fields_only = not lookup(base.scenario).evolve_kinetic
        base = base.model_copy(update={"cfl": temporal_base_cfl(base.k, base.flux, fields_only)})
    case = Case(base)
    tau0 = case.dt()
    taus = [tau0 / 2 ** level for level in range(study.levels)]
    tau_ref = taus[-1] / 4.0
    reference = case.run(dt=tau_ref).state

    def level_row(level):
        state = case.run(dt=taus[level]).state
        errors = {k: (v if _tracked(case, k) else None)
                  for k, v in _state_difference(state, reference).items()}
        log_event("INFO", event="study_level_finished", ladder_level=level, tau=taus[level], errors=errors)
        return ConvergenceRow(level, case.mesh.h_x, taus[level], errors)

    with ThreadPoolExecutor(max_workers=worker_count(study.levels)) as pool:
        rows = list(pool.map(level_row, range(study.levels)))
    table = eoc(rows, ["f", "E", "B"], by="tau")

    floor = case.projection_floor(base.t_final)
    coarsest = _combined({k: v for k, v in rows[0].errors.items() if _tracked(case, k)})
    spatial = _combined({k: v for k, v in floor.items() if _tracked(case, k)})
    ok = coarsest is not None and spatial is not None and spatial <= POLLUTION_FRACTION * coarsest
    pollution = {"spatial_floor": spatial, "coarsest_temporal_error": coarsest,
                 "fraction": POLLUTION_FRACTION, "passed": bool(ok)}
    log_event("INFO" if ok else "WARNING", event="temporal_pollution_check", **pollution)
    return table, {"pollution": pollution, "tau_reference": tau_ref}


def _tracked(case: Case, variable: str) -> bool:
    if variable == "f":
        return case.scenario.evolve_kinetic and case.scenario.exact_f is not None
    return any(n[0] == variable for n in case.scenario.active) and bool(case.scenario.exact_em)


def expected_order(study: StudyConfig) -> float:
    k = study.base.k
    if study.mode == StudyMode.TEMPORAL:
        return 3.0
    if MaxwellFluxKind(study.base.flux).dissipative:
        return k + 0.4
    return float(k)


def study_assertion(study: StudyConfig, table: ConvergenceTable, summary: Dict):
    """Check the final EOCs against the expected order; returns (passed, reasons)."""
    reasons: List[str] = []
    if not study.assertable:
        reasons.append(f"{study.levels} levels are too few to assert an order (need >= 3)")
        return False, reasons
    expected = expected_order(study)
    if study.mode == StudyMode.COUPLED:
        variables = ["combined"]
    else:
        variables = [v for v in ("f", "E", "B") if any(e is not None for e in table.errors(v))]
    for v in variables:
        value = table.final_eoc(v)
        if value is None:
            reasons.append(f"EOC of {v} is undefined")
        elif study.mode == StudyMode.TEMPORAL and abs(value - expected) > 0.25:
            reasons.append(f"temporal EOC of {v} is {value:.3f}, outside 3 +/- 0.25")
        elif study.mode != StudyMode.TEMPORAL and value < expected:
            reasons.append(f"EOC of {v} is {value:.3f} < {expected:.2f}")
    if study.mode == StudyMode.TEMPORAL and not summary.get("pollution", {}).get("passed"):
        reasons.append("spatial error floor exceeds 1% of the coarsest temporal error")
    return not reasons, reasons

