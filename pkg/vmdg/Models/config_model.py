from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, field_validator

from ..solver.maxwell_operator import MaxwellFluxKind
from ..solver.vlasov_operator import MappingKind


class StudyMode(str, Enum):
    SPATIAL = "spatial"
    TEMPORAL = "temporal"
    COUPLED = "coupled"


class RunConfig(BaseModel):
    """One simulation. Unset resolution/time/domain fields are filled from the scenario."""

    model_config = ConfigDict(frozen=True)

    scenario: str = "free_streaming"
    k: int = 2
    n_x: Optional[int] = None
    n_v: Optional[List[int]] = None
    cfl: Optional[float] = None
    t_final: Optional[float] = None
    flux: MaxwellFluxKind = MaxwellFluxKind.UPWIND
    mapping: Optional[MappingKind] = None
    observer_stride: int = 1
    output: Optional[str] = None
    seed: int = 0
    adaptive_dt: bool = False
    trials: int = 20
    growth_window: Optional[Tuple[float, float]] = None
    x_domain: Optional[Tuple[float, float]] = None
    v_domain: Optional[List[Tuple[float, float]]] = None

    @field_validator("k")
    @classmethod
    def _degree(cls, v):
        if v < 0:
            raise ValueError("k must be >= 0")
        return v

    @field_validator("n_x")
    @classmethod
    def _n_x(cls, v):
        if v is not None and v < 1:
            raise ValueError("n_x must be >= 1")
        return v

    @field_validator("n_v")
    @classmethod
    def _n_v(cls, v):
        if v is not None and (not v or any(n < 1 for n in v)):
            raise ValueError("every n_v entry must be >= 1")
        return v

    @field_validator("cfl")
    @classmethod
    def _cfl(cls, v):
        if v is not None and not v > 0:
            raise ValueError("cfl must be > 0")
        return v

    @field_validator("t_final")
    @classmethod
    def _t_final(cls, v):
        if v is not None and v < 0:
            raise ValueError("t_final must be >= 0")
        return v

    @field_validator("growth_window")
    @classmethod
    def _window(cls, v):
        if v is not None and not v[0] < v[1]:
            raise ValueError("growth_window must be (t_start, t_end) with t_start < t_end")
        return v

    @field_validator("observer_stride", "trials")
    @classmethod
    def _positive(cls, v):
        if v < 1:
            raise ValueError("must be >= 1")
        return v

    @property
    def cfl_number(self) -> float:
        return self.cfl if self.cfl is not None else default_cfl(self.k)

    @property
    def in_convergence_regime(self) -> bool:
        # k >= ceil((d_x + 1) / 2) with d_x = 1
        return self.k >= 1


class StudyConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    base: RunConfig
    levels: int = 4
    mode: StudyMode = StudyMode.SPATIAL

    @field_validator("levels")
    @classmethod
    def _levels(cls, v):
        if v < 2:
            raise ValueError("a study needs at least 2 levels")
        return v

    @property
    def assertable(self) -> bool:
        return self.levels >= 3


def default_cfl(k: int) -> float:
    return 0.2 / (2 * k + 1)
