# services/candidates.py
"""
Reasignaciones candidatas para los estados con envidia.

Ningún candidato se acepta a ciegas: el motor de progreso verifica EFX y
dominancia antes de registrar el paso. Aquí solo se construyen.
"""
import logging
from dataclasses import dataclass
from itertools import combinations, permutations, product
from typing import Callable, Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

from models.allocation import Allocation
from models.instance import AgentOrdering
from models.valuations import removal_sequence, trim_until
from services.allocation_core import dominates, is_efx
from services.champion_graph import (
    ChampionGraph, Decomposition, EdgeKind, build_basic_graph, candidate_edges,
)
from services.pi_search import apply_pi, find_pi_edge_set
from utils.errors import BudgetExceededError, EFXError, MalformedInstanceError
from utils.itemsets import is_subset, items_of, size, submasks

logger = logging.getLogger(__name__)

NamedCandidate = Tuple[str, Allocation]
CandidateProvider = Callable[[Allocation, ChampionGraph, AgentOrdering], Iterable[NamedCandidate]]


def _asignacion(alloc: Allocation, cambios: Mapping[int, int]) -> Optional[Allocation]:
    try:
        return alloc.replace(cambios)
    except MalformedInstanceError:
        return None


def _piso(alloc: Allocation, agent: int, bundles: Sequence[int]) -> int:
    """Rank de max_agent{bundles}"""
    valuation = alloc.instance.valuations[agent]
    return max(valuation.rank(b) for b in bundles)


# ============================================================================
# BÚSQUEDA DE ASIGNACIONES DOMINANTES
# ============================================================================

def search_dominating_assignment(alloc: Allocation, ordering: AgentOrdering,
                                 options: Callable[[int, int], Iterable[int]],
                                 max_states: int, raise_on_budget: bool = True) -> Optional[Allocation]:
    """
    DFS sobre los agentes en el orden fijo. ``options(agent, libres)`` da
    los bundles posibles en orden. Se poda por envidia fuerte entre pares ya
    asignados y por el prefijo de dominancia: mientras ningún agente haya
    mejorado, el siguiente no puede empeorar.
    """
    valuations = alloc.instance.valuations
    orden = list(ordering)
    antes = [valuations[a].rank(alloc.bundles[a]) for a in orden]
    asignados: Dict[int, int] = {}
    propios: Dict[int, int] = {}
    estados = 0

    def fuerte(agente: int, propio: int, bundle: int) -> bool:
        valuation = valuations[agente]
        return any(valuation.rank(bundle & ~(1 << h)) > propio for h in items_of(bundle))

    def dfs(pos: int, libres: int, mejorado: bool) -> Optional[bool]:
        nonlocal estados
        if pos == len(orden):
            return mejorado
        agente = orden[pos]
        valuation = valuations[agente]
        for bundle in options(agente, libres):
            estados += 1
            if estados > max_states:
                if raise_on_budget:
                    raise BudgetExceededError(f"La búsqueda exhaustiva superó {max_states} estados")
                return None
            r = valuation.rank(bundle)
            if not mejorado and r < antes[pos]:
                continue
            if any(fuerte(otro, propios[otro], bundle) or fuerte(agente, r, b) for otro, b in asignados.items()):
                continue
            asignados[agente] = bundle
            propios[agente] = r
            resultado = dfs(pos + 1, libres & ~bundle, mejorado or r > antes[pos])
            if resultado is None:
                return None
            if resultado:
                return True
            del asignados[agente]
            del propios[agente]
        return False

    if not dfs(0, alloc.instance.all_items, False):
        return None
    return Allocation.from_bundles(alloc.instance, [asignados[a] for a in range(alloc.n)])


def exhaustive_fallback(alloc: Allocation, ordering: AgentOrdering, max_states: int) -> Optional[Allocation]:
    """Primera asignación EFX que domina, en orden canónico (máscaras ascendentes)"""
    return search_dominating_assignment(alloc, ordering, lambda _agente, libres: submasks(libres), max_states)


# ============================================================================
# DOS ETAPAS Y POOL DE CAMPEONES
# ============================================================================

def two_stage(original: Allocation, intermediate: Allocation, ordering: AgentOrdering) -> Optional[Allocation]:
    """Desde una asignación EFX intermedia aplica un conjunto PI de su propio grafo"""
    if intermediate == original or not is_efx(intermediate):
        return None
    graph = build_basic_graph(intermediate)
    pi = find_pi_edge_set(intermediate, candidate_edges(graph))
    if pi is None:
        return None
    try:
        resultado = apply_pi(intermediate, pi)
    except EFXError as exc:
        logger.debug("Dos etapas descartado: %s", exc)
        return None
    return resultado if dominates(resultado, original, ordering) else None


def with_two_stage(alloc: Allocation, ordering: AgentOrdering,
                   candidates: Iterable[NamedCandidate]) -> Iterator[NamedCandidate]:
    """Cada candidato seguido de su versión en dos etapas cuando no domina"""
    for nombre, candidato in candidates:
        yield nombre, candidato
        if is_efx(candidato) and not dominates(candidato, alloc, ordering):
            segunda = two_stage(alloc, candidato, ordering)
            if segunda is not None:
                yield f"{nombre}+pi", segunda


def champion_pool_candidates(alloc: Allocation, graph: ChampionGraph, ordering: AgentOrdering,
                             max_states: int = 200000) -> Iterator[NamedCandidate]:
    """
    Reasigna bundles de un pool formado por los bundles actuales y los
    conjuntos recibidos de cada arista candidata.
    """
    pool = set(alloc.bundles)
    for edge in candidate_edges(graph):
        pool.add(edge.received)
    pool.discard(0)
    pool = sorted(pool)
    valuations = alloc.instance.valuations
    por_agente = {
        a: sorted(pool, key=lambda b, v=valuations[a]: -v.rank(b)) + [0]
        for a in range(alloc.n)
    }
    resultado = search_dominating_assignment(
        alloc, ordering,
        lambda agente, libres: (b for b in por_agente[agente] if is_subset(b, libres)),
        max_states, raise_on_budget=False,
    )
    if resultado is not None:
        yield "champion_pool", resultado


# ============================================================================
# TRES AGENTES
# ============================================================================

def three_agent_candidates(alloc: Allocation, graph: ChampionGraph,
                           ordering: AgentOrdering) -> Iterator[NamedCandidate]:
    """
    Plantilla para estados con envidia: q campeona a p con A = T_p ∪ g; Z_i es
    el recorte de X_r por menor aporte marginal mientras supere max_i(A, X_q).
    """
    valuations = alloc.instance.valuations
    vistos = set()
    for edge in graph.edges:
        if edge.kind is not EdgeKind.BASIC or edge.source == edge.target:
            continue
        q, p, a_set = edge.source, edge.target, edge.received
        if (q, p, a_set) in vistos:
            continue
        vistos.add((q, p, a_set))
        r = next(k for k in range(alloc.n) if k not in (p, q))
        x_q, x_r = alloc.bundles[q], alloc.bundles[r]

        intercambio = _asignacion(alloc, {q: a_set, p: x_q})
        if intercambio is not None:
            yield f"three:swap[{q}<-{p}]", intercambio

        recortes = {}
        for i in (p, r):
            piso = _piso(alloc, i, (a_set, x_q))
            if valuations[i].rank(x_r) > piso:
                recortes[i] = trim_until(valuations[i], x_r, piso)
        for w in sorted(recortes, key=lambda i: (size(recortes[i]), i)):
            l = p if w == r else r
            candidato = _asignacion(alloc, {q: a_set, w: recortes[w], l: x_q})
            if candidato is not None:
                yield f"three:Z[w={w}]", candidato


# ============================================================================
# CUATRO AGENTES
# ============================================================================

@dataclass(frozen=True)
class EnvyStructure:
    """
    Estructura única con envidia (tras renombrar p1..p4): p2, p3 y p4 son los
    únicos campeones de g y h de p1, p2 y p3; p1 envidia a p4; los campeones
    de p4 están entre p1 y p2; y g <_{p4} h.
    """

    agents: Tuple[int, int, int, int]
    g: int
    h: int
    dec_g: Dict[int, Decomposition]
    dec_h: Dict[int, Decomposition]


def _nested_choice(graph: ChampionGraph, decomposer: int, target: int, g: int, h: int):
    """Par de descomposiciones de target con B^g ⊆ B^h si existe alguno"""
    variantes_g = [d for d in graph.decompositions.get((decomposer, target, g), []) if d.proper]
    variantes_h = [d for d in graph.decompositions.get((decomposer, target, h), []) if d.proper]
    if not variantes_g or not variantes_h:
        return None
    for dg in variantes_g:
        for dh in variantes_h:
            if is_subset(dg.bottom, dh.bottom):
                return dg, dh
    return variantes_g[0], variantes_h[0]


def detect_envy_structures(graph: ChampionGraph) -> Iterator[EnvyStructure]:
    """Todas las estructuras con envidia, probando cada par de ítems libres (g, h)"""
    alloc = graph.alloc
    if alloc.n != 4 or size(alloc.unallocated) < 2:
        return
    valuations = alloc.instance.valuations
    for g0, h0 in combinations(items_of(alloc.unallocated), 2):
        for perm, (g, h) in product(permutations(range(4)), ((g0, h0), (h0, g0))):
            p1, p2, p3, p4 = perm
            if valuations[p4].rank(1 << g) > valuations[p4].rank(1 << h):
                continue
            if not all(
                graph.champions(target, pivot) == (campeon,)
                for target, campeon in ((p1, p2), (p2, p3), (p3, p4))
                for pivot in (g, h)
            ):
                continue
            if not graph.has_envy(p1, p4):
                continue
            if not set(graph.champions(p4, g)) | set(graph.champions(p4, h)) <= {p1, p2}:
                continue
            dec_g, dec_h = {}, {}
            completo = True
            for target, campeon in ((p1, p2), (p2, p3), (p3, p4)):
                par = _nested_choice(graph, campeon, target, g, h)
                if par is None:
                    completo = False
                    break
                dec_g[target], dec_h[target] = par
            if completo:
                yield EnvyStructure(perm, g, h, dec_g, dec_h)


def detect_envy_structure(graph: ChampionGraph) -> Optional[EnvyStructure]:
    return next(detect_envy_structures(graph), None)


def four_agent_candidates(alloc: Allocation, graph: ChampionGraph,
                          ordering: AgentOrdering) -> Iterator[NamedCandidate]:
    """Construcciones X′, Y, X″ (casos A/B/C) y las de a_vip = 2 para cada estructura detectada"""
    for estructura in detect_envy_structures(graph):
        logger.debug("Estructura de envidia de 4 agentes: %s (g=%s, h=%s)", estructura.agents, estructura.g, estructura.h)
        yield from _candidatos_de_estructura(alloc, estructura)


def _candidatos_de_estructura(alloc: Allocation, estructura: EnvyStructure) -> Iterator[NamedCandidate]:
    valuations = alloc.instance.valuations
    p1, p2, p3, p4 = estructura.agents
    g_bit, h_bit = 1 << estructura.g, 1 << estructura.h
    X = alloc.bundles
    t1g, b2g = estructura.dec_g[p1].top, estructura.dec_g[p2].bottom
    t2g, t3h = estructura.dec_g[p2].top, estructura.dec_h[p3].top
    t2h = estructura.dec_h[p2].top
    t1g_g, t2g_g, t3h_h, t2h_h = t1g | g_bit, t2g | g_bit, t3h | h_bit, t2h | h_bit

    # ---------- a_vip != 2 ----------
    x_prima = _asignacion(alloc, {p1: X[p4], p2: t1g | b2g, p3: t2g_g, p4: t3h_h})
    if x_prima is not None:
        yield "four:X'", x_prima
    opciones_2 = (X[p4], t2g_g, t3h_h, X[p3])
    piso_2 = _piso(alloc, p2, opciones_2)
    if valuations[p2].rank(t1g | b2g) > piso_2:
        z = trim_until(valuations[p2], t1g | b2g, piso_2)
        y = _asignacion(alloc, {p1: X[p4], p2: z, p3: t2g_g, p4: t3h_h})
        if y is not None:
            yield "four:Y", y
        mejor_2 = valuations[p2].best(opciones_2)
        x3 = X[p3] if mejor_2 == t2g_g else t2g_g
        x4 = t3h_h if mejor_2 == X[p4] else X[p4]
        caso = {t2g_g: "A", t3h_h: "B", X[p3]: "C"}.get(mejor_2, "X4")
        x_doble = _asignacion(alloc, {p1: z, p2: mejor_2, p3: x3, p4: x4})
        if x_doble is not None:
            yield f"four:X''-{caso}", x_doble

    # ---------- a_vip = 2 ----------
    opciones = (X[p2], t2h_h, t1g_g, X[p3])
    recortes = {}
    for i in (p1, p4):
        piso = _piso(alloc, i, opciones)
        if valuations[i].rank(X[p4]) > piso:
            recortes[i] = trim_until(valuations[i], X[p4], piso)
    if len(recortes) < 2:
        return
    w, l = (p1, p4) if size(recortes[p1]) < size(recortes[p4]) else (p4, p1)
    mejor_l = valuations[l].best(opciones)
    x2 = X[p2] if mejor_l == t1g_g else t1g_g
    x3 = t2h_h if mejor_l == X[p3] else X[p3]
    base = {w: X[p4], l: mejor_l, p2: x2, p3: x3}
    candidato = _asignacion(alloc, base)
    if candidato is not None:
        yield f"four:vip2[w={w}]", candidato
    candidato = _asignacion(alloc, {**base, w: recortes[w]})
    if candidato is not None:
        yield f"four:vip2-Z[w={w}]", candidato
    rango_l = valuations[l].rank(mejor_l)
    for z_prima in removal_sequence(valuations[w], X[p4]):
        if not any(valuations[l].rank(z_prima & ~(1 << it)) > rango_l for it in items_of(z_prima)):
            candidato = _asignacion(alloc, {**base, w: z_prima})
            if candidato is not None:
                yield f"four:vip2-Z'[w={w}]", candidato
            break


def provider_for(alloc: Allocation) -> Optional[CandidateProvider]:
    """Constructor de candidatos según el número de agentes"""

    def _tres(a, graph, ordering):
        yield from with_two_stage(a, ordering, three_agent_candidates(a, graph, ordering))
        yield from champion_pool_candidates(a, graph, ordering)

    def _cuatro(a, graph, ordering):
        yield from with_two_stage(a, ordering, four_agent_candidates(a, graph, ordering))
        yield from champion_pool_candidates(a, graph, ordering)

    if alloc.n == 3:
        return _tres
    if alloc.n == 4:
        return _cuatro
    return None


def _es_candidato_valido(alloc: Allocation, candidato: Allocation, ordering: AgentOrdering) -> bool:
    return candidato != alloc and is_efx(candidato) and dominates(candidato, alloc, ordering)


def first_valid_candidate(alloc: Allocation, ordering: AgentOrdering,
                          candidates: Iterable[NamedCandidate]) -> Optional[NamedCandidate]:
    for nombre, candidato in candidates:
        if _es_candidato_valido(alloc, candidato, ordering):
            return nombre, candidato
        logger.debug("Candidato %s descartado por la verificación", nombre)
    return None


__all__ = [
    'NamedCandidate', 'CandidateProvider', 'search_dominating_assignment', 'exhaustive_fallback',
    'two_stage', 'with_two_stage', 'champion_pool_candidates', 'three_agent_candidates',
    'EnvyStructure', 'detect_envy_structures', 'detect_envy_structure', 'four_agent_candidates', 'provider_for',
    'first_valid_candidate',
]
