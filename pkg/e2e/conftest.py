import os
import subprocess
import sys

import pytest


@pytest.fixture(scope="session")
def cli_env():
    """Environment for running the harness as a separate process."""
    # Ensure repo root is on PYTHONPATH so `vmdg.harness.cli` imports reliably.
    repo_root = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
    env = os.environ.copy()
    env["PYTHONPATH"] = repo_root + (os.pathsep + env["PYTHONPATH"] if env.get("PYTHONPATH") else "")
    env.setdefault("VM_RKDG_DISABLE_ELASTIC_LOGS", "1")
    env.setdefault("VM_RKDG_THREADS", "2")
    return repo_root, env


@pytest.fixture
def run_cli(cli_env):
    """Runs ``python -m vmdg.harness.cli`` and returns the completed process."""
    repo_root, env = cli_env

    def run(*args, timeout_s: float = 600.0):
        cmd = [sys.executable, "-m", "vmdg.harness.cli", *args]
        proc = subprocess.run(cmd, cwd=repo_root, env=env, capture_output=True, text=True,
                              timeout=timeout_s)
        # If the harness failed unexpectedly, expose its output to help debug.
        if proc.returncode not in (0, 1, 2, 3):
            print("\n--- harness output (e2e) ---\n" + proc.stdout + proc.stderr)
        return proc

    return run
