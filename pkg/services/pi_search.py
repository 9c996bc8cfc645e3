# services/pi_search.py
"""
Búsqueda y aplicación de conjuntos de aristas Pareto-mejorables (PI).

Un conjunto PI es una unión de ciclos disjuntos en vértices del grafo de
campeones cuyos H son disjuntos dos a dos y donde cada H sale de U o es
liberado (S ∪ D) por otra arista del conjunto.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from config.config import get_config
from models.allocation import Allocation
from services.allocation_core import is_efx, pareto_dominates
from services.champion_graph import ChampionEdge, EdgeKind, edge_is_valid, rotate_cycle
from utils.errors import InvariantViolationError, MalformedInstanceError
from utils.itemsets import format_items, is_subset

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PIEdgeSet:
    cycles: Tuple[Tuple[ChampionEdge, ...], ...]

    @property
    def edges(self) -> Tuple[ChampionEdge, ...]:
        return tuple(edge for ciclo in self.cycles for edge in ciclo)

    @property
    def agents(self) -> Tuple[int, ...]:
        return tuple(sorted(edge.source for edge in self.edges))

    def __len__(self):
        return len(self.edges)

    def describe(self, instance) -> str:
        nombres = instance.item_names
        partes = []
        for ciclo in self.cycles:
            tramos = []
            for edge in ciclo:
                etiqueta = edge.kind.value
                if edge.kind is not EdgeKind.ENVY:
                    etiqueta = f"{format_items(edge.added, nombres)}|{format_items(edge.removed, nombres)}"
                tramos.append(f"{instance.agent_label(edge.source)}-[{etiqueta}]->{instance.agent_label(edge.target)}")
            partes.append(" ".join(tramos))
        return " ; ".join(partes)

    def to_dict(self) -> dict:
        return {"cycles": [[edge.to_dict() for edge in ciclo] for ciclo in self.cycles]}


def _necesidades(edges: Sequence[ChampionEdge], unallocated: int) -> List[int]:
    """H que no salen de U ni son liberados por otra arista del conjunto"""
    pendientes = []
    for pos, edge in enumerate(edges):
        if is_subset(edge.added, unallocated):
            continue
        if any(is_subset(edge.added, otra.released) for k, otra in enumerate(edges) if k != pos):
            continue
        pendientes.append(edge.added)
    return pendientes


def _ciclo_cerrado(ciclo: Sequence[ChampionEdge]) -> bool:
    largo = len(ciclo)
    return largo > 0 and all(ciclo[k].target == ciclo[(k + 1) % largo].source for k in range(largo))


def is_pi_edge_set(alloc: Allocation, pi: PIEdgeSet) -> bool:
    """Verificación independiente de la estructura y de cada arista"""
    agentes = []
    h_union = 0
    for ciclo in pi.cycles:
        if not _ciclo_cerrado(ciclo):
            return False
        for edge in ciclo:
            if edge.added & h_union:
                return False
            h_union |= edge.added
            agentes.append(edge.source)
            if not edge_is_valid(alloc, edge):
                return False
    if not agentes or len(set(agentes)) != len(agentes):
        return False
    return not _necesidades(pi.edges, alloc.unallocated)


@dataclass
class _CicloNecesitado:
    edges: Tuple[ChampionEdge, ...]
    agents: int
    added: int


class PISearch:
    """
    Enumeración determinista: por largo total L = 1..cota se prueban primero
    ciclos simples y luego combinaciones de ciclos que por sí solos no
    cierran sus H. Dentro de cada largo gana el primer ciclo de agentes en
    orden canónico y, en él, la primera expansión por clave de arista.
    """

    def __init__(self, alloc: Allocation, edges: Iterable[ChampionEdge], *, basic_only: bool = False,
                 max_cycles: Optional[int] = None, max_edges: Optional[int] = None,
                 node_budget: Optional[int] = None):
        cfg = get_config()
        self.alloc = alloc
        self.max_cycles = max_cycles or cfg.PI_MAX_CYCLES
        self.max_edges = max_edges or cfg.PI_MAX_EDGES_FACTOR * alloc.n
        self.node_budget = node_budget or cfg.PI_NODE_BUDGET
        self.nodes = 0
        self.exhausted = False
        if basic_only:
            edges = [e for e in edges if e.kind in (EdgeKind.ENVY, EdgeKind.BASIC)]
        self.by_pair: Dict[Tuple[int, int], List[ChampionEdge]] = {}
        for edge in sorted(edges, key=lambda e: e.sort_key):
            self.by_pair.setdefault((edge.source, edge.target), []).append(edge)
        self.needy: Dict[int, List[_CicloNecesitado]] = {}

    def _gastar(self) -> bool:
        self.nodes += 1
        if self.nodes > self.node_budget:
            self.exhausted = True
        return self.exhausted

    def _agent_cycles(self) -> List[Tuple[int, ...]]:
        dirigido = nx.DiGraph()
        dirigido.add_nodes_from(range(self.alloc.n))
        dirigido.add_edges_from(self.by_pair)
        ciclos = {rotate_cycle(c) for c in nx.simple_cycles(dirigido, length_bound=min(self.alloc.n, self.max_edges))}
        return sorted(ciclos, key=lambda c: (len(c), c))

    def _expandir(self, ciclo: Tuple[int, ...]) -> Optional[Tuple[ChampionEdge, ...]]:
        """Primera expansión del ciclo de agentes que es PI por sí sola; guarda las necesitadas"""
        alloc = self.alloc
        largo = len(ciclo)
        agentes_mask = 0
        alcanzable = alloc.unallocated
        for a in ciclo:
            agentes_mask |= 1 << a
            alcanzable |= alloc.bundles[a]
        hops = [self.by_pair[(ciclo[k], ciclo[(k + 1) % largo])] for k in range(largo)]
        elegidas: List[ChampionEdge] = []
        encontrado: List[Tuple[ChampionEdge, ...]] = []
        guardar_necesitados = largo < self.max_edges

        def dfs(k: int, usados: int) -> bool:
            if self._gastar():
                return True
            if k == largo:
                pendientes = _necesidades(elegidas, alloc.unallocated)
                if not pendientes:
                    encontrado.append(tuple(elegidas))
                    return True
                if guardar_necesitados:
                    self.needy.setdefault(largo, []).append(
                        _CicloNecesitado(tuple(elegidas), agentes_mask, usados))
                return False
            for edge in hops[k]:
                if edge.added & usados:
                    continue
                if not guardar_necesitados and not is_subset(edge.added, alcanzable):
                    continue
                elegidas.append(edge)
                if dfs(k + 1, usados | edge.added):
                    return True
                elegidas.pop()
            return False

        dfs(0, 0)
        return encontrado[0] if encontrado else None

    def _combinar(self, total: int) -> Optional[Tuple[Tuple[ChampionEdge, ...], ...]]:
        """Combinaciones de 2..max_cycles ciclos necesitados con largo total ``total``"""
        candidatos = []
        for largo in sorted(self.needy):
            candidatos.extend(self.needy[largo])
        elegidos: List[_CicloNecesitado] = []
        encontrado = []

        def dfs(inicio: int, restante: int, agentes: int, usados: int) -> bool:
            if self._gastar():
                return True
            if restante == 0:
                if len(elegidos) < 2:
                    return False
                aristas = [e for c in elegidos for e in c.edges]
                if not _necesidades(aristas, self.alloc.unallocated):
                    encontrado.append(tuple(c.edges for c in elegidos))
                    return True
                return False
            if len(elegidos) >= self.max_cycles:
                return False
            for pos in range(inicio, len(candidatos)):
                ciclo = candidatos[pos]
                if len(ciclo.edges) > restante or ciclo.agents & agentes or ciclo.added & usados:
                    continue
                elegidos.append(ciclo)
                if dfs(pos + 1, restante - len(ciclo.edges), agentes | ciclo.agents, usados | ciclo.added):
                    return True
                elegidos.pop()
            return False

        dfs(0, total, 0, 0)
        return encontrado[0] if encontrado else None

    def run(self) -> Optional[PIEdgeSet]:
        if not self.by_pair:
            return None
        ciclos = self._agent_cycles()
        for total in range(1, self.max_edges + 1):
            for ciclo in ciclos:
                if len(ciclo) != total:
                    continue
                resultado = self._expandir(ciclo)
                if resultado is not None and not self.exhausted:
                    return PIEdgeSet((resultado,))
                if self.exhausted:
                    break
            if not self.exhausted and total >= 2 and self.max_cycles >= 2:
                combinado = self._combinar(total)
                if combinado is not None and not self.exhausted:
                    return PIEdgeSet(combinado)
            if self.exhausted:
                logger.warning("[WARN] Búsqueda PI agotó el presupuesto de %s nodos", self.node_budget)
                return None
        return None


def find_pi_edge_set(alloc: Allocation, candidate_edges: Iterable[ChampionEdge], *, basic_only: bool = False,
                     max_cycles: Optional[int] = None, max_edges: Optional[int] = None,
                     node_budget: Optional[int] = None) -> Optional[PIEdgeSet]:
    search = PISearch(alloc, candidate_edges, basic_only=basic_only, max_cycles=max_cycles,
                      max_edges=max_edges, node_budget=node_budget)
    resultado = search.run()
    logger.debug("Búsqueda PI: %s nodos, resultado=%s", search.nodes, resultado is not None)
    return resultado


def apply_pi(alloc: Allocation, pi: PIEdgeSet) -> Allocation:
    """
    Y_i = ((X_succ(i) \\ S_i) ∪ H_i) \\ D_i para los agentes del ciclo; el
    resto no cambia y lo sobrante vuelve a U. El resultado se verifica.
    """
    cambios = {}
    for edge in pi.edges:
        if edge.source in cambios:
            raise InvariantViolationError(f"El agente {edge.source} aparece dos veces en el conjunto PI")
        cambios[edge.source] = edge.received
    try:
        resultado = alloc.replace(cambios)
    except MalformedInstanceError as exc:
        raise InvariantViolationError(f"El conjunto PI produce bundles inválidos: {exc}") from exc

    if not is_efx(resultado):
        raise InvariantViolationError("apply_pi: el resultado no es EFX")
    if not pareto_dominates(resultado, alloc):
        raise InvariantViolationError("apply_pi: el resultado no domina en sentido de Pareto")
    valuations = alloc.instance.valuations
    for agente in cambios:
        if valuations[agente].rank(resultado.bundles[agente]) <= valuations[agente].rank(alloc.bundles[agente]):
            raise InvariantViolationError(f"apply_pi: el agente {agente} del ciclo no mejora")
    return resultado
