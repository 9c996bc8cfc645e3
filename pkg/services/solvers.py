# services/solvers.py
"""
Solucionadores con certificado.

Todos parten de la asignación vacía y encadenan pasos de progreso que
aumentan estrictamente el potencial lexicográfico.
"""
import logging
import time
from typing import Callable, Dict, List, Optional, Sequence

from config.config import get_config
from models.allocation import Allocation
from models.certificate import Certificate, SolverReport, Step, StepKind
from models.instance import AgentOrdering, Instance, validate_ordering
from services.allocation_core import charity_envied, is_ef, is_efx, potential
from services.candidates import detect_envy_structure, provider_for
from services.champion_graph import (
    ChampionGraph, build_basic_graph, check_observations, check_parallel_rings, discover_bottom_edges,
    is_good_cycle, rotate_cycle,
)
from services.pi_search import PIEdgeSet, apply_pi, find_pi_edge_set, is_pi_edge_set
from services.progress import ProgressStats, make_step, progress_step
from utils.errors import CertifiedBugError, InvariantViolationError, PreconditionError
from utils.itemsets import is_subset, items_of, lowest_item, size

logger = logging.getLogger(__name__)

StepFunction = Callable[[Allocation, ProgressStats], Optional[Step]]


def resolve_ordering(instance: Instance, ordering: Optional[Sequence[int]] = None) -> AgentOrdering:
    if ordering is None:
        return instance.default_ordering()
    return validate_ordering(ordering, instance.n)


def _ejecutar(instance: Instance, ordering: AgentOrdering, nombre: str,
              continuar: Callable[[Allocation], bool], paso: StepFunction,
              stats: Optional[ProgressStats] = None, envy_free_fallbacks: Optional[List[int]] = None) -> SolverReport:
    inicio = time.perf_counter()
    stats = stats or ProgressStats()
    alloc = Allocation.empty(instance)
    certificado = Certificate(instance, ordering, nombre, alloc)
    actual = potential(alloc, ordering)

    while continuar(alloc):
        step = paso(alloc, stats)
        if step is None:
            break
        if not (step.efx_after and step.dominates):
            raise InvariantViolationError(f"Paso {step.kind.value} sin verificar: {step.construction}")
        nuevo = potential(step.after, ordering)
        if not nuevo > actual:
            raise CertifiedBugError("monotone_potential", "el potencial no aumentó estrictamente")
        certificado.append(step)
        alloc, actual = step.after, nuevo
        logger.info("[OK] %s paso %s: %s (|U|=%s)", nombre, len(certificado.steps), step.kind.value,
                    alloc.unallocated_count())

    report = SolverReport(
        solver=nombre,
        allocation=alloc,
        certificate=certificado,
        charity_envied=charity_envied(alloc),
        fallback_used=stats.fallback_steps > 0,
        fallback_steps=stats.fallback_steps,
        envy_free_fallbacks=len(envy_free_fallbacks or []),
        fallback_budget_exhausted=stats.fallback_budget_exhausted,
        observation_violations=stats.observation_violations,
        structure_deviations=stats.structure_deviations,
        charity_steps=stats.charity_steps,
        pi_steps=stats.pi_steps,
        candidate_steps=stats.candidate_steps,
        generic_steps=stats.generic_steps,
        elapsed_seconds=time.perf_counter() - inicio,
    )
    if report.charity_envied:
        logger.error("[ERROR] %s terminó con U envidiado", nombre)
    logger.info("[OK] %s terminó: %s pasos, %s sin asignar, respaldo=%s",
                nombre, report.step_count, report.unallocated_count, report.fallback_used)
    return report


# ============================================================================
# n - 2 ÍTEMS DE CARIDAD
# ============================================================================

def _camino(ring: Sequence[int], desde: int, hasta: int) -> List[int]:
    """Agentes del anillo desde ``desde`` hasta ``hasta`` siguiendo al sucesor"""
    pos = ring.index(desde)
    largo = (ring.index(hasta) - pos) % len(ring)
    return [ring[(pos + k) % len(ring)] for k in range(largo + 1)]


def parallel_rings_cycle(graph: ChampionGraph, ring: Sequence[int]) -> PIEdgeSet:
    """
    Ciclo PI explícito sobre anillos paralelos: la arista buena (B_j | ∘)
    hacia t y luego el anillo de t hasta la fuente. El salto que entra en j
    usa la g-arista que libera B_j y cada salto restante un ítem distinto
    de U.
    """
    alloc = graph.alloc
    ring = tuple(ring)
    libres = list(items_of(alloc.unallocated))
    g, j = libres[0], ring[0]
    z = discover_bottom_edges(graph, ring, j, g)
    if z.external:
        raise CertifiedBugError("parallel_rings", f"la arista (B_{j} | ∘) sale del anillo {ring}")
    camino = _camino(ring, z.edge.target, z.edge.source)
    otros = iter(libres[1:])
    aristas = [z.edge]
    for origen, destino in zip(camino, camino[1:]):
        if destino == j:
            pivote = g
            opciones = [e for e in graph.g_edges(g) if is_subset(z.edge.added, e.released)]
        else:
            pivote = next(otros, None)
            opciones = graph.g_edges(pivote) if pivote is not None else []
        opciones = [e for e in opciones if e.source == origen and e.target == destino]
        if not opciones:
            raise CertifiedBugError("parallel_rings", f"falta la arista {origen}->{destino} (pivote={pivote})")
        aristas.append(min(opciones, key=lambda e: e.sort_key))
    pi = PIEdgeSet((tuple(aristas),))
    if not is_pi_edge_set(alloc, pi):
        raise CertifiedBugError("parallel_rings", f"el ciclo sobre el anillo {ring} no es un conjunto PI")
    logger.info("Anillos paralelos %s: ciclo de %s aristas desde %s", ring, len(aristas), z.edge.source)
    return pi


def charity_n_minus_2_step(alloc: Allocation, ordering: AgentOrdering,
                           stats: Optional[ProgressStats] = None) -> Optional[Step]:
    """
    Con |U| >= n-1, U sin envidia y sin ciclo PI básico se construye el ciclo
    de los anillos paralelos. En cualquier otro estado decide el motor de
    progreso.
    """
    stats = stats if stats is not None else ProgressStats()
    if size(alloc.unallocated) >= alloc.n - 1 and alloc.unallocated \
            and not charity_envied(alloc) and is_efx(alloc):
        graph = build_basic_graph(alloc)
        if find_pi_edge_set(alloc, graph.edges, basic_only=True) is None:
            anillo = check_parallel_rings(graph)
            stats.observation_violations += len(check_observations(graph, strict=get_config().STRICT_CHECKS))
            pi = parallel_rings_cycle(graph, anillo)
            stats.pi_steps += 1
            return make_step(StepKind.PI_EDGE_SET, alloc, apply_pi(alloc, pi), ordering,
                             construction=pi.describe(alloc.instance), detail=pi.to_dict())
    return progress_step(alloc, ordering, stats=stats)


def solve_charity_n_minus_2(instance: Instance, ordering: Optional[Sequence[int]] = None) -> SolverReport:
    """Itera mientras |U| >= n-1 o alguien envidie U"""
    ordering = resolve_ordering(instance, ordering)
    n = instance.n

    def continuar(alloc):
        return size(alloc.unallocated) >= n - 1 or charity_envied(alloc)

    def paso(alloc, stats):
        return charity_n_minus_2_step(alloc, ordering, stats)

    return _ejecutar(instance, ordering, "n2", continuar, paso)


# ============================================================================
# TRES AGENTES
# ============================================================================

def solve_three_agents(instance: Instance, ordering: Optional[Sequence[int]] = None) -> SolverReport:
    if instance.n != 3:
        raise PreconditionError(f"solve_three_agents requiere 3 agentes, hay {instance.n}")
    ordering = resolve_ordering(instance, ordering)
    candidatos = provider_for(Allocation.empty(instance))

    def continuar(alloc):
        return bool(alloc.unallocated)

    def paso(alloc, stats):
        return progress_step(alloc, ordering, candidates=candidatos, stats=stats)

    return _ejecutar(instance, ordering, "three", continuar, paso)


# ============================================================================
# CUATRO AGENTES
# ============================================================================

def envy_structure_deviation(alloc: Allocation, graph: ChampionGraph) -> bool:
    """
    Estado de cuatro agentes con |U| >= 2, U sin envidia y alguna envidia
    entre agentes que no tiene ciclo PI básico ni estructura con envidia.
    """
    if alloc.n != 4 or size(alloc.unallocated) < 2 or charity_envied(alloc) or is_ef(alloc):
        return False
    if detect_envy_structure(graph) is not None:
        return False
    return find_pi_edge_set(alloc, graph.edges, basic_only=True) is None


def solve_four_agents(instance: Instance, ordering: Optional[Sequence[int]] = None) -> SolverReport:
    """
    Itera hasta |U| <= 1 con U sin envidia. Un respaldo exhaustivo en un
    estado sin envidia y un estado con envidia fuera de la estructura se
    cuentan; con STRICT_PROOF_COVERAGE se elevan.
    """
    if instance.n != 4:
        raise PreconditionError(f"solve_four_agents requiere 4 agentes, hay {instance.n}")
    cfg = get_config()
    ordering = resolve_ordering(instance, ordering)
    candidatos = provider_for(Allocation.empty(instance))
    sin_envidia: List[int] = []

    def continuar(alloc):
        return size(alloc.unallocated) >= 2 or charity_envied(alloc)

    def paso(alloc, stats):
        if envy_structure_deviation(alloc, build_basic_graph(alloc)):
            stats.structure_deviations += 1
            logger.warning("[WARN] Envidia sin estructura ni ciclo PI básico (|U|=%s)", alloc.unallocated_count())
            if cfg.STRICT_PROOF_COVERAGE:
                raise CertifiedBugError("envy_structure", "estado con envidia fuera de la estructura")
        step = progress_step(alloc, ordering, candidates=candidatos, stats=stats)
        if step is not None and step.kind is StepKind.EXHAUSTIVE_FALLBACK and is_ef(alloc):
            sin_envidia.append(alloc.unallocated_count())
            logger.warning("[WARN] Respaldo exhaustivo en un estado sin envidia (|U|=%s)", alloc.unallocated_count())
            if cfg.STRICT_PROOF_COVERAGE:
                raise CertifiedBugError("envy_free_coverage", "el caso sin envidia requirió el respaldo exhaustivo")
        return step

    return _ejecutar(instance, ordering, "four", continuar, paso, envy_free_fallbacks=sin_envidia)


# ============================================================================
# DOS TIPOS DE VALORACIÓN
# ============================================================================

def _clases(instance: Instance) -> List[List[int]]:
    descriptores = instance.distinct_descriptors()
    if len(descriptores) > 2:
        raise PreconditionError(f"solve_two_types admite dos valoraciones distintas, hay {len(descriptores)}")
    return [[a for a in range(instance.n) if instance.agents[a] == d] for d in descriptores]


def _menor_de_clase(alloc: Allocation, clase: Sequence[int]) -> List[int]:
    valuation = alloc.instance.valuations[clase[0]]
    return sorted(clase, key=lambda a: (valuation.rank(alloc.bundles[a]), a))


def check_backward_propagation(graph: ChampionGraph, clases: Sequence[Sequence[int]]):
    """Si un agente de una clase campeona un conjunto, el menor de su clase también"""
    alloc = graph.alloc
    for clase in clases:
        orden = _menor_de_clase(alloc, clase)
        primero = orden[0]
        for g in range(alloc.instance.num_items):
            if not alloc.unallocated >> g & 1:
                continue
            for j in range(alloc.n):
                if not graph.champions_complete(j, g):
                    continue
                campeones = graph.champions(j, g)
                if any(a in campeones for a in orden) and primero not in campeones:
                    raise CertifiedBugError(
                        "backward_propagation",
                        f"un agente de la clase de {primero} campeona a {j} (g={g}) y {primero} no",
                    )


def _aristas_dos_tipos(graph: ChampionGraph, a0: int, b0: Optional[int], g: int):
    agentes = {a0} if b0 is None else {a0, b0}
    aristas = [e for e in graph.edges
               if e.source in agentes and e.target in agentes and e.pivot in (None, g)]
    if b0 is not None and not graph.has_envy(a0, b0) and not graph.has_envy(b0, a0):
        ciclo = rotate_cycle((a0, b0))
        if is_good_cycle(graph, ciclo, g):
            aristas.append(discover_bottom_edges(graph, ciclo, a0, g).edge)
    logger.debug("Dos tipos: %s aristas entre %s", len(aristas), sorted(agentes))
    return aristas


def solve_two_types(instance: Instance, ordering: Optional[Sequence[int]] = None) -> SolverReport:
    """
    En cada paso: caridad; si no, ciclo de dos entre los menores a_0 y b_0 de
    cada clase (envidia, g-aristas o la arista (B_{a_0} | ∘)). Si el ciclo
    dirigido no cierra se recurre al motor de progreso genérico.
    """
    clases = _clases(instance)
    ordering = resolve_ordering(instance, ordering)

    def continuar(alloc):
        return bool(alloc.unallocated)

    def paso(alloc, stats):
        if charity_envied(alloc):
            return progress_step(alloc, ordering, stats=stats)
        graph = build_basic_graph(alloc)
        check_backward_propagation(graph, clases)
        g = lowest_item(alloc.unallocated)
        a0 = _menor_de_clase(alloc, clases[0])[0]
        b0 = _menor_de_clase(alloc, clases[1])[0] if len(clases) > 1 else None
        pi = find_pi_edge_set(alloc, _aristas_dos_tipos(graph, a0, b0, g))
        if pi is not None:
            stats.pi_steps += 1
            return make_step(StepKind.PI_EDGE_SET, alloc, apply_pi(alloc, pi), ordering,
                             construction=pi.describe(instance), detail=pi.to_dict())
        logger.warning("[WARN] Dos tipos: el ciclo entre %s y %s no cerró; se usa el motor genérico", a0, b0)
        step = progress_step(alloc, ordering, stats=stats)
        if step is not None:
            stats.generic_steps += 1
        return step

    return _ejecutar(instance, ordering, "twotype", continuar, paso)


# ============================================================================
# DESPACHO
# ============================================================================

SOLVERS: Dict[str, Callable[..., SolverReport]] = {
    "n2": solve_charity_n_minus_2,
    "three": solve_three_agents,
    "four": solve_four_agents,
    "twotype": solve_two_types,
}


def choose_solver(instance: Instance) -> str:
    if len(instance.distinct_descriptors()) == 2:
        return "twotype"
    if instance.n == 3:
        return "three"
    if instance.n == 4:
        return "four"
    return "n2"


def solve(instance: Instance, solver: str = "auto", ordering: Optional[Sequence[int]] = None) -> SolverReport:
    nombre = choose_solver(instance) if solver == "auto" else solver
    try:
        funcion = SOLVERS[nombre]
    except KeyError:
        raise PreconditionError(f"Solucionador desconocido: {solver}")
    logger.info("Resolviendo con %s (n=%s, m=%s)", nombre, instance.n, instance.num_items)
    return funcion(instance, ordering)
