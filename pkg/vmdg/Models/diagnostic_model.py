from typing import Dict, List, Optional

DIAGNOSTIC_COLUMNS = ["time", "l2_f", "l2_E", "l2_B", "mass", "energy_kin", "energy_em",
                      "div_e", "div_b"]
CONVERGENCE_VARIABLES = ["f", "E", "B"]
CONVERGENCE_COLUMNS = ["level", "h", "tau", "err_f", "err_E", "err_B", "eoc_f", "eoc_E", "eoc_B"]


class DiagnosticRecord:
    def __init__(self, time, l2_f, l2_E, l2_B, mass, energy_kinetic, energy_em,
                 div_E_residual, div_B_residual, min_cell_values=None, jump_E=None, jump_B=None):
        self.time = time
        self.l2_f = l2_f
        self.l2_E = l2_E
        self.l2_B = l2_B
        self.mass = mass
        self.energy_kinetic = energy_kinetic
        self.energy_em = energy_em
        self.div_E_residual = div_E_residual
        self.div_B_residual = div_B_residual
        self.min_cell_values = min_cell_values
        # normal-component jumps across x-faces, reported next to the CSV columns
        self.jump_E = jump_E
        self.jump_B = jump_B

    def __repr__(self):
        return (f"DiagnosticRecord(time={self.time}, l2_f={self.l2_f}, l2_E={self.l2_E}, "
                f"l2_B={self.l2_B}, mass={self.mass}, energy_kinetic={self.energy_kinetic}, "
                f"energy_em={self.energy_em})")

    def row(self) -> List[float]:
        return [self.time, self.l2_f, self.l2_E, self.l2_B, self.mass, self.energy_kinetic,
                self.energy_em, self.div_E_residual, self.div_B_residual]

    def to_dict(self):
        return dict(zip(DIAGNOSTIC_COLUMNS, self.row()))


class ConvergenceRow:
    def __init__(self, level: int, h: float, tau: float, errors: Dict[str, float],
                 eocs: Dict[str, Optional[float]] = None):
        self.level = level
        self.h = h
        self.tau = tau
        self.errors = dict(errors)
        self.eocs = dict(eocs or {})

    def __repr__(self):
        return f"ConvergenceRow(level={self.level}, h={self.h:.4g}, tau={self.tau:.4g}, errors={self.errors})"

    def row(self) -> list:
        return ([self.level, self.h, self.tau]
                + [self.errors.get(v) for v in CONVERGENCE_VARIABLES]
                + [self.eocs.get(v) for v in CONVERGENCE_VARIABLES])


class ConvergenceTable:
    """Rows of a refinement ladder with an EOC per variable (None where undefined)."""

    def __init__(self, rows: List[ConvergenceRow], variables: List[str] = None):
        self.rows = rows
        self.variables = list(variables or CONVERGENCE_VARIABLES)

    def __repr__(self):
        return f"ConvergenceTable(levels={len(self.rows)}, final={self.final_eocs()})"

    def __len__(self):
        return len(self.rows)

    def final_eoc(self, variable: str) -> Optional[float]:
        if not self.rows:
            return None
        return self.rows[-1].eocs.get(variable)

    def final_eocs(self) -> Dict[str, Optional[float]]:
        return {v: self.final_eoc(v) for v in self.variables}

    def errors(self, variable: str) -> List[Optional[float]]:
        return [r.errors.get(variable) for r in self.rows]

    def to_dict(self):
        return {
            "columns": CONVERGENCE_COLUMNS,
            "rows": [dict(zip(CONVERGENCE_COLUMNS, r.row())) for r in self.rows],
            "final_eoc": self.final_eocs(),
        }
