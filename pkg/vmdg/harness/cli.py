"""Command-line entry point: ``python -m vmdg.harness.cli <command> [--key value ...]``.

Exit codes: 0 success, 1 failed assertion (with --assert), 2 configuration
error, 3 blow-up.
"""
import argparse
import sys

from vmdg.solver.errors import (BasisError, BlowUpError, ConfigError, MaxwellConfigError,
                                MeshError, ScenarioCheckError)
from vmdg.solver.scenarios import lookup, scenario_names, verify_scenario
from vmdg.storage_utils import write_json

from .config_loader import load_run_config, load_study_config, merge_settings
from .driver import run_simulation, run_study
from .identities import run_identity_suite
from .logging_config import log_event

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_CONFIG = 2
EXIT_BLOWUP = 3

_OPTIONS = ("scenario", "k", "n_x", "n_v", "cfl", "t_final", "flux", "mapping", "observer_stride",
            "output", "seed", "adaptive_dt", "levels", "mode", "trials", "growth_window")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vmdg", description="RKDG Vlasov-Maxwell solver harness")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "run one simulation and write the diagnostics CSV"),
        ("converge", "run a refinement ladder and write the convergence CSV"),
        ("verify-identities", "randomized dissipation / energy identity suite"),
        ("scenario-check", "finite-difference check of the scenario exact solutions"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", default=None, help="flat key = value config file")
        cmd.add_argument("--assert", dest="assert_", action="store_true",
                         help="exit 1 when an identity, EOC or scenario check fails")
        for key in _OPTIONS:
            flags = [f"--{key}"]
            if "_" in key:
                flags.append(f"--{key.replace('_', '-')}")
            cmd.add_argument(*flags, dest=key, default=None)
    return parser


def _overrides(args) -> dict:
    return {key: getattr(args, key) for key in _OPTIONS}


def _cmd_run(args) -> int:
    config = load_run_config(args.config, _overrides(args))
    outcome = run_simulation(config)
    print(f"run finished: scenario={config.scenario} steps={outcome.result.steps} "
          f"t={outcome.state.time:.6g} errors={outcome.errors}")
    if outcome.growth_rate is not None:
        print(f"magnetic energy growth rate: {outcome.growth_rate:.6g}")
    return EXIT_OK


def _cmd_converge(args) -> int:
    study = load_study_config(args.config, _overrides(args))
    outcome = run_study(study)
    for row in outcome.table.rows:
        print(f"level={row.level} h={row.h:.4e} tau={row.tau:.4e} errors={row.errors} eoc={row.eocs}")
    print(f"final eoc: {outcome.table.final_eocs()} passed={outcome.summary['passed']}")
    for reason in outcome.summary["reasons"]:
        print(f"  {reason}")
    if args.assert_ and not outcome.summary["passed"]:
        return EXIT_ASSERTION
    return EXIT_OK


def _cmd_verify_identities(args) -> int:
    settings = merge_settings(args.config, _overrides(args))
    report = run_identity_suite(seed=settings.get("seed", 0), trials=settings.get("trials", 20))
    for label, (good, total) in report.counts.items():
        print(f"{label}: {good}/{total}")
    print(f"identities: {report.passed}/{report.total} passed, "
          f"max relative defect {report.max_relative_defect:.3e}")
    if settings.get("output"):
        write_json(settings["output"], report.to_dict())
    if args.assert_ and not report.ok:
        return EXIT_ASSERTION
    return EXIT_OK


def _cmd_scenario_check(args) -> int:
    settings = merge_settings(args.config, _overrides(args))
    names = [settings["scenario"]] if "scenario" in settings else scenario_names()
    reports = []
    for name in names:
        report = verify_scenario(lookup(name), seed=settings.get("seed", 0))
        log_event("INFO" if report.passed else "ERROR", event="scenario_checked", **report.to_dict())
        print(f"{name}: checked={report.checked} max_residual={report.max_residual:.3e} "
              f"support_ok={report.support_ok} passed={report.passed}")
        reports.append(report)
    if settings.get("output"):
        write_json(settings["output"], [r.to_dict() for r in reports])
    if args.assert_ and not all(r.passed for r in reports):
        return EXIT_ASSERTION
    return EXIT_OK


COMMANDS = {
    "run": _cmd_run,
    "converge": _cmd_converge,
    "verify-identities": _cmd_verify_identities,
    "scenario-check": _cmd_scenario_check,
}


def cli_run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, MeshError, BasisError, MaxwellConfigError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BlowUpError as exc:
        print(f"blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except ScenarioCheckError as exc:
        print(f"scenario check failed: {exc}", file=sys.stderr)
        return EXIT_ASSERTION


def main():
    sys.exit(cli_run())


if __name__ == "__main__":
    main()
