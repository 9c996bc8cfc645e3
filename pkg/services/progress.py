# services/progress.py
"""
Motor de progreso: a partir de una asignación EFX encuentra otra EFX que la
domina. Orden fijo: caridad, conjunto PI, candidatos del solucionador y,
como último recurso, búsqueda exhaustiva.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from config.config import get_config
from models.allocation import Allocation
from models.certificate import Step, StepKind
from models.instance import AgentOrdering
from services.allocation_core import charity_fix, dominates, is_efx, pareto_dominates
from services.candidates import CandidateProvider, exhaustive_fallback, first_valid_candidate
from services.champion_graph import ChampionEdge, ChampionGraph, build_basic_graph, candidate_edges, check_observations
from services.pi_search import apply_pi, find_pi_edge_set
from utils.errors import BudgetExceededError, InvariantViolationError

logger = logging.getLogger(__name__)

ExtraEdges = Callable[[ChampionGraph], Iterable[ChampionEdge]]


@dataclass
class ProgressStats:
    observation_violations: int = 0
    fallback_steps: int = 0
    pi_steps: int = 0
    candidate_steps: int = 0
    charity_steps: int = 0
    fallback_budget_exhausted: int = 0
    generic_steps: int = 0
    structure_deviations: int = 0


def make_step(kind: StepKind, before: Allocation, after: Allocation, ordering: AgentOrdering,
              construction: Optional[str] = None, detail: Optional[dict] = None) -> Step:
    return Step(
        kind=kind,
        before=before,
        after=after,
        efx_after=is_efx(after),
        dominates=dominates(after, before, ordering),
        pareto_dominates=pareto_dominates(after, before),
        construction=construction,
        detail=detail,
    )


def _paso_verificado(step: Step) -> bool:
    return step.efx_after and step.dominates


def pi_step(alloc: Allocation, graph: ChampionGraph, ordering: AgentOrdering,
            extra_edges: Optional[ExtraEdges] = None, basic_only: bool = False) -> Optional[Step]:
    """Paso (2): búsqueda PI sobre el universo de aristas candidatas"""
    extra = extra_edges(graph) if extra_edges else ()
    aristas = graph.edges if basic_only else candidate_edges(graph, extra)
    pi = find_pi_edge_set(alloc, aristas, basic_only=basic_only)
    if pi is None:
        return None
    after = apply_pi(alloc, pi)
    return make_step(StepKind.PI_EDGE_SET, alloc, after, ordering,
                     construction=pi.describe(alloc.instance), detail=pi.to_dict())


def progress_step(alloc: Allocation, ordering: AgentOrdering, *,
                  candidates: Optional[CandidateProvider] = None,
                  extra_edges: Optional[ExtraEdges] = None,
                  allow_fallback: bool = True,
                  stats: Optional[ProgressStats] = None,
                  strict: Optional[bool] = None,
                  fallback_max_states: Optional[int] = None) -> Optional[Step]:
    """
    Un paso de progreso verificado o None si no existe asignación EFX que
    domine a ``alloc``. Si la búsqueda exhaustiva agota su presupuesto el
    paso también devuelve None y se cuenta en ``fallback_budget_exhausted``.
    """
    cfg = get_config()
    stats = stats if stats is not None else ProgressStats()
    strict = cfg.STRICT_CHECKS if strict is None else strict
    if not is_efx(alloc):
        raise InvariantViolationError("progress_step requiere una asignación EFX")

    # (1) caridad
    caridad = charity_fix(alloc)
    if caridad is not None:
        step = make_step(StepKind.CHARITY_FIX, alloc, caridad, ordering, construction="charity")
        if _paso_verificado(step):
            stats.charity_steps += 1
            return step
        logger.error("[ERROR] La caridad no produjo una asignación EFX dominante")

    # (2) conjunto PI
    graph = build_basic_graph(alloc)
    stats.observation_violations += len(check_observations(graph, strict=strict))
    step = pi_step(alloc, graph, ordering, extra_edges)
    if step is not None:
        stats.pi_steps += 1
        return step

    # (3) candidatos del solucionador
    if candidates is not None:
        elegido = first_valid_candidate(alloc, ordering, candidates(alloc, graph, ordering))
        if elegido is not None:
            nombre, after = elegido
            stats.candidate_steps += 1
            return make_step(StepKind.CANDIDATE_REALLOCATION, alloc, after, ordering, construction=nombre)

    # (4) respaldo exhaustivo
    if not allow_fallback:
        return None
    presupuesto = fallback_max_states or cfg.FALLBACK_MAX_STATES
    try:
        after = exhaustive_fallback(alloc, ordering, presupuesto)
    except BudgetExceededError as exc:
        stats.fallback_budget_exhausted += 1
        logger.error("[ERROR] Respaldo exhaustivo sin presupuesto (|U|=%s): %s", alloc.unallocated_count(), exc)
        return None
    if after is None:
        return None
    stats.fallback_steps += 1
    logger.warning("[WARN] Se usó la búsqueda exhaustiva (|U|=%s)", after.unallocated_count())
    return make_step(StepKind.EXHAUSTIVE_FALLBACK, alloc, after, ordering, construction="exhaustive")
