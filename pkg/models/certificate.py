# models/certificate.py
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

from config.config import Config
from models.allocation import Allocation
from models.instance import AgentOrdering, Instance

logger = logging.getLogger(__name__)


class StepKind(str, Enum):
    PI_EDGE_SET = "pi_edge_set"
    CHARITY_FIX = "charity_fix"
    CANDIDATE_REALLOCATION = "candidate_reallocation"
    EXHAUSTIVE_FALLBACK = "exhaustive_fallback"


@dataclass(frozen=True)
class Step:
    """Un paso de progreso con sus banderas de verificación"""

    kind: StepKind
    before: Allocation
    after: Allocation
    efx_after: bool
    dominates: bool
    pareto_dominates: bool
    construction: Optional[str] = None
    detail: Optional[dict] = None

    def to_dict(self) -> dict:
        data = {
            "kind": self.kind.value,
            "before": self.before.to_dict(),
            "after": self.after.to_dict(),
            "efx_after": self.efx_after,
            "dominates": self.dominates,
            "pareto_dominates": self.pareto_dominates,
        }
        if self.construction:
            data["construction"] = self.construction
        if self.detail:
            data["detail"] = self.detail
        return data


@dataclass
class Certificate:
    """Cadena de pasos desde la asignación inicial hasta la final"""

    instance: Instance
    ordering: AgentOrdering
    solver: str
    initial: Allocation
    steps: List[Step] = field(default_factory=list)

    @property
    def final(self) -> Allocation:
        return self.steps[-1].after if self.steps else self.initial

    def append(self, step: Step):
        self.steps.append(step)

    def to_dict(self) -> dict:
        return {
            "schema": Config.CERTIFICATE_SCHEMA_VERSION,
            "solver": self.solver,
            "ordering": list(self.ordering),
            "initial": self.initial.to_dict(),
            "steps": [step.to_dict() for step in self.steps],
            "final": self.final.to_dict(),
        }


@dataclass
class SolverReport:
    solver: str
    allocation: Allocation
    certificate: Certificate
    charity_envied: bool
    fallback_used: bool = False
    fallback_steps: int = 0
    envy_free_fallbacks: int = 0
    fallback_budget_exhausted: int = 0
    observation_violations: int = 0
    structure_deviations: int = 0
    charity_steps: int = 0
    pi_steps: int = 0
    candidate_steps: int = 0
    generic_steps: int = 0
    elapsed_seconds: float = 0.0

    @property
    def unallocated_count(self) -> int:
        return self.allocation.unallocated_count()

    @property
    def step_count(self) -> int:
        return len(self.certificate.steps)

    def to_dict(self) -> dict:
        return {
            "solver": self.solver,
            "allocation": self.allocation.to_dict(),
            "unallocated_count": self.unallocated_count,
            "charity_envied": self.charity_envied,
            "fallback_used": self.fallback_used,
            "fallback_steps": self.fallback_steps,
            "envy_free_fallbacks": self.envy_free_fallbacks,
            "fallback_budget_exhausted": self.fallback_budget_exhausted,
            "observation_violations": self.observation_violations,
            "structure_deviations": self.structure_deviations,
            "steps_by_kind": {
                "charity": self.charity_steps,
                "pi": self.pi_steps,
                "candidate": self.candidate_steps,
                "fallback": self.fallback_steps,
            },
            "generic_steps": self.generic_steps,
            "step_count": self.step_count,
            "elapsed_seconds": round(self.elapsed_seconds, 4),
        }
