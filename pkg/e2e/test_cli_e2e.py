import json

DIAGNOSTIC_COLUMNS = ["time", "l2_f", "l2_E", "l2_B", "mass", "energy_kin", "energy_em",
                      "div_e", "div_b"]
CONVERGENCE_COLUMNS = ["level", "h", "tau", "err_f", "err_E", "err_B", "eoc_f", "eoc_E", "eoc_B"]


def _read_csv(path):
    lines = path.read_text().splitlines()
    return [line.split(",") for line in lines]


def test_help(run_cli):
    proc = run_cli("--help")
    assert proc.returncode == 0
    assert "scenario-check" in proc.stdout


def test_scenario_check_passes(run_cli, tmp_path):
    output = tmp_path / "scenarios.json"
    proc = run_cli("scenario-check", "--assert", "--output", str(output))
    assert proc.returncode == 0, proc.stderr
    names = {r["name"] for r in json.loads(output.read_text())}
    assert {"free_streaming", "maxwell_vacuum_1d", "weibel_1d2v"} <= names


def test_free_streaming_run(run_cli, tmp_path):
    output = tmp_path / "free_streaming.csv"
    proc = run_cli("run", "--scenario", "free_streaming", "--k", "1", "--n-x", "8", "--n-v", "8",
                   "--t-final", "0.25", "--observer-stride", "5", "--output", str(output))
    assert proc.returncode == 0, proc.stderr

    rows = _read_csv(output)
    assert rows[0] == DIAGNOSTIC_COLUMNS
    times = [float(r[0]) for r in rows[1:]]
    assert times[0] == 0.0 and times[-1] == 0.25
    masses = [float(r[4]) for r in rows[1:]]
    assert max(abs(m - masses[0]) for m in masses) <= 1e-12 * abs(masses[0])


def test_vacuum_wave_convergence(run_cli, tmp_path):
    output = tmp_path / "vacuum.csv"
    proc = run_cli("converge", "--scenario", "maxwell_vacuum_1d", "--k", "1", "--n-x", "8",
                   "--t-final", "0.5", "--levels", "3", "--assert", "--output", str(output))
    assert proc.returncode == 0, proc.stdout + proc.stderr

    rows = _read_csv(output)
    assert rows[0] == CONVERGENCE_COLUMNS
    assert len(rows) == 4
    summary = json.loads((tmp_path / "vacuum.json").read_text())
    assert summary["passed"] is True
    assert summary["final_eoc"]["E"] >= 1.4


def test_identity_suite(run_cli, tmp_path):
    output = tmp_path / "identities.json"
    proc = run_cli("verify-identities", "--trials", "2", "--assert", "--output", str(output))
    assert proc.returncode == 0, proc.stdout
    assert json.loads(output.read_text())["ok"] is True


def test_bad_config_exit_code(run_cli):
    proc = run_cli("run", "--scenario", "free_streaming", "--flux", "lax")
    assert proc.returncode == 2
    assert "configuration error" in proc.stderr
