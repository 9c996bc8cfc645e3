# services/champion_graph.py
"""
Multigrafo de campeones de una asignación.

Los vértices son agentes; una arista i -> j indica que i es el agente más
envidioso de (X_j \\ S) ∪ H con descarte D. Las aristas de envidia tienen
H = S = ∅, las aristas básicas H = {g} con g ∈ U, y las generalizadas
cualquier otro par (H | S).
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from config.config import get_config
from models.allocation import Allocation
from services.allocation_core import (
    MostEnviousResult, envies, most_envious, strongly_envies, valid_envied_subsets,
)
from utils.errors import ArgumentError, CertifiedBugError
from utils.itemsets import format_items, is_subset, items_of, size

logger = logging.getLogger(__name__)


class EdgeKind(str, Enum):
    ENVY = "envy"
    BASIC = "basic"
    GENERALIZED = "generalized"


KIND_ORDER = {EdgeKind.ENVY: 0, EdgeKind.BASIC: 1, EdgeKind.GENERALIZED: 2}


@dataclass(frozen=True)
class ChampionEdge:
    """
    source champions target con respecto a (added | removed).

    envied = (X_target \\ removed) ∪ added; el agente origen recibiría
    envied \\ discard al aplicar la arista.
    """

    source: int
    target: int
    added: int
    removed: int
    discard: int
    envied: int
    kind: EdgeKind
    pivot: Optional[int] = None

    @property
    def received(self) -> int:
        return self.envied & ~self.discard

    @property
    def released(self) -> int:
        return self.removed | self.discard

    @property
    def sort_key(self) -> Tuple[int, ...]:
        return (self.source, self.target, KIND_ORDER[self.kind], self.added, self.removed, self.discard)

    def label(self, item_names=None) -> str:
        if self.kind is EdgeKind.ENVY:
            return ""
        if self.kind is EdgeKind.BASIC:
            return item_names[self.pivot] if item_names else str(self.pivot)
        return f"{format_items(self.added, item_names)}|{format_items(self.removed, item_names)}"

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "kind": self.kind.value,
            "pivot": self.pivot,
            "added": list(items_of(self.added)),
            "removed": list(items_of(self.removed)),
            "discard": list(items_of(self.discard)),
        }


@dataclass(frozen=True)
class Decomposition:
    """decomposer g-descompone target en top ⊎ bottom = X_target"""

    decomposer: int
    target: int
    pivot: int
    top: int
    bottom: int
    proper: bool


@dataclass(frozen=True)
class BottomEdge:
    """Arista (B_owner | ∘) descubierta a lo largo de un g-ciclo bueno"""

    edge: ChampionEdge
    owner: int
    cycle: Tuple[int, ...]
    external: bool


@dataclass(frozen=True)
class ObservationViolation:
    check: str
    detail: str


def edge_kind_for(alloc: Allocation, added: int, removed: int) -> EdgeKind:
    if not added and not removed:
        return EdgeKind.ENVY
    if not removed and size(added) == 1 and is_subset(added, alloc.unallocated):
        return EdgeKind.BASIC
    return EdgeKind.GENERALIZED


def edge_is_valid(alloc: Allocation, edge: ChampionEdge) -> bool:
    """Revalida la arista contra la asignación usando solo predicados de envidia"""
    destino = alloc.bundles[edge.target]
    if edge.added & destino or not is_subset(edge.removed, destino):
        return False
    if edge.envied != (destino & ~edge.removed) | edge.added:
        return False
    if not is_subset(edge.discard, edge.envied):
        return False
    recibido = edge.received
    if not envies(alloc, edge.source, recibido):
        return False
    return not any(strongly_envies(alloc, agente, recibido) for agente in range(alloc.n))


def rotate_cycle(cycle: Sequence[int]) -> Tuple[int, ...]:
    """Rotación canónica: empieza en el agente de menor índice"""
    inicio = cycle.index(min(cycle))
    return tuple(cycle[inicio:]) + tuple(cycle[:inicio])


# ============================================================================
# GRAFO
# ============================================================================

@dataclass
class ChampionGraph:
    alloc: Allocation
    max_discard_variants: int
    subset_limit: int
    edges: List[ChampionEdge] = field(default_factory=list)
    decompositions: Dict[Tuple[int, int, int], List[Decomposition]] = field(default_factory=dict)
    bottom_edges: List[BottomEdge] = field(default_factory=list)
    bottom_families: Dict[Tuple[int, Tuple[int, ...]], List[BottomEdge]] = field(default_factory=dict)
    _champion_cache: Dict[int, Tuple[Dict[int, List[MostEnviousResult]], bool]] = field(
        default_factory=dict, repr=False)
    _good_cycles: Dict[int, List[Tuple[int, ...]]] = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.alloc.n

    # ---------- Campeones ----------
    def champion_results(self, bundle: int) -> Tuple[Dict[int, List[MostEnviousResult]], bool]:
        """
        Campeones de ``bundle`` con hasta ``max_discard_variants`` descartes
        por agente. El segundo valor indica si la enumeración fue truncada.
        """
        cached = self._champion_cache.get(bundle)
        if cached is None:
            if size(bundle) > self.subset_limit:
                unico = most_envious(self.alloc, bundle)
                cached = ({} if unico is None else {unico.agent: [unico]}, True)
            else:
                por_agente: Dict[int, List[MostEnviousResult]] = {}
                for sub, quien in valid_envied_subsets(self.alloc, bundle):
                    for agente in items_of(quien):
                        lista = por_agente.setdefault(agente, [])
                        if len(lista) < self.max_discard_variants:
                            lista.append(MostEnviousResult(agente, sub, bundle & ~sub))
                cached = (dict(sorted(por_agente.items())), False)
            self._champion_cache[bundle] = cached
        return cached

    def champions(self, target: int, g: int) -> Tuple[int, ...]:
        resultados, _ = self.champion_results(self.alloc.bundles[target] | 1 << g)
        return tuple(resultados)

    def champions_complete(self, target: int, g: int) -> bool:
        _, truncado = self.champion_results(self.alloc.bundles[target] | 1 << g)
        return not truncado

    # ---------- Consultas de aristas ----------
    def has_envy(self, source: int, target: int) -> bool:
        return source != target and envies(self.alloc, source, self.alloc.bundles[target])

    def envy_edges(self) -> List[ChampionEdge]:
        return [e for e in self.edges if e.kind is EdgeKind.ENVY]

    def g_edges(self, g: int) -> List[ChampionEdge]:
        return [e for e in self.edges if e.kind is EdgeKind.BASIC and e.pivot == g]

    def champions_g(self, source: int, target: int, g: int) -> bool:
        return source in self.champions(target, g)

    def decomposition(self, decomposer: int, target: int, g: int) -> Optional[Decomposition]:
        variantes = self.decompositions.get((decomposer, target, g))
        return variantes[0] if variantes else None

    def proper_decompositions(self, g: int) -> List[Decomposition]:
        return [
            d for (_, _, pivot), variantes in sorted(self.decompositions.items())
            if pivot == g for d in variantes if d.proper
        ]

    # ---------- Construcción ----------
    def _add_envy_edges(self):
        alloc = self.alloc
        for j in range(self.n):
            destino = alloc.bundles[j]
            for i in range(self.n):
                if not self.has_envy(i, j):
                    continue
                if not any(strongly_envies(alloc, k, destino) for k in range(self.n)):
                    self.edges.append(ChampionEdge(i, j, 0, 0, 0, destino, EdgeKind.ENVY))
                    continue
                # asignación no EFX: se usa el primer descarte admisible
                resultados, _ = self.champion_results(destino)
                for res in resultados.get(i, [])[:1]:
                    self.edges.append(ChampionEdge(i, j, 0, 0, res.discard, destino, EdgeKind.ENVY))

    def _add_g_edges(self, j: int, g: int):
        alloc = self.alloc
        destino = alloc.bundles[j]
        conjunto = destino | 1 << g
        resultados, _ = self.champion_results(conjunto)
        for agente, variantes in resultados.items():
            descomposiciones = []
            for res in variantes:
                self.edges.append(ChampionEdge(agente, j, 1 << g, 0, res.discard, conjunto, EdgeKind.BASIC, g))
                top = res.envied_subset & ~(1 << g)
                descomposiciones.append(Decomposition(
                    decomposer=agente,
                    target=j,
                    pivot=g,
                    top=top,
                    bottom=destino & ~top,
                    proper=bool(res.envied_subset >> g & 1),
                ))
            self.decompositions[(agente, j, g)] = descomposiciones


def build_basic_graph(alloc: Allocation, max_discard_variants: Optional[int] = None,
                      subset_limit: Optional[int] = None) -> ChampionGraph:
    """Aristas de envidia y aristas de g-campeón para todo g ∈ U"""
    cfg = get_config()
    graph = ChampionGraph(
        alloc=alloc,
        max_discard_variants=max_discard_variants or cfg.MAX_DISCARD_VARIANTS,
        subset_limit=subset_limit or cfg.CHAMPION_SUBSET_LIMIT,
    )
    graph._add_envy_edges()
    for g in items_of(alloc.unallocated):
        for j in range(alloc.n):
            graph._add_g_edges(j, g)
    logger.debug("Grafo de campeones: %s aristas, |U|=%s", len(graph.edges), size(alloc.unallocated))
    return graph


# ============================================================================
# ARISTAS GENERALIZADAS
# ============================================================================

def _validar_h_s(alloc: Allocation, target: int, added: int, removed: int):
    if not 0 <= target < alloc.n:
        raise ArgumentError(f"Agente destino fuera de rango: {target}")
    destino = alloc.bundles[target]
    if added & destino:
        raise ArgumentError("H debe ser disjunto del bundle destino")
    if not is_subset(removed, destino):
        raise ArgumentError("S debe estar contenido en el bundle destino")
    if added & ~alloc.instance.all_items:
        raise ArgumentError("H contiene ítems fuera del universo")


def generalized_edge(alloc: Allocation, target: int, added: int, removed: int) -> Optional[ChampionEdge]:
    """Arista del agente más envidioso (determinista) de (X_target \\ S) ∪ H"""
    _validar_h_s(alloc, target, added, removed)
    conjunto = (alloc.bundles[target] & ~removed) | added
    resultado = most_envious(alloc, conjunto)
    if resultado is None:
        return None
    kind = edge_kind_for(alloc, added, removed)
    pivot = next(items_of(added)) if kind is EdgeKind.BASIC else None
    return ChampionEdge(resultado.agent, target, added, removed, resultado.discard, conjunto, kind, pivot)


def generalized_edges(graph: ChampionGraph, target: int, added: int, removed: int) -> List[ChampionEdge]:
    """Todas las aristas (H | S) hacia target, una por campeón y variante de descarte"""
    alloc = graph.alloc
    _validar_h_s(alloc, target, added, removed)
    conjunto = (alloc.bundles[target] & ~removed) | added
    kind = edge_kind_for(alloc, added, removed)
    pivot = next(items_of(added)) if kind is EdgeKind.BASIC else None
    resultados, _ = graph.champion_results(conjunto)
    return [
        ChampionEdge(agente, target, added, removed, res.discard, conjunto, kind, pivot)
        for agente, variantes in resultados.items()
        for res in variantes
    ]


# ============================================================================
# G-CICLOS BUENOS
# ============================================================================

def is_good_cycle(graph: ChampionGraph, cycle: Sequence[int], g: int) -> bool:
    largo = len(cycle)
    if largo < 2 or len(set(cycle)) != largo:
        return False
    sucesor = {cycle[k]: cycle[(k + 1) % largo] for k in range(largo)}
    for i in cycle:
        if not graph.champions_g(i, sucesor[i], g):
            return False
        if graph.has_envy(i, sucesor[i]):
            return False
        for j in cycle:
            if j != sucesor[i] and graph.champions_g(i, j, g):
                return False
    return True


def find_good_cycles(graph: ChampionGraph, g: int) -> List[Tuple[int, ...]]:
    """Ciclos simples de g-aristas sin envidia paralela ni cuerdas internas"""
    cached = graph._good_cycles.get(g)
    if cached is not None:
        return cached
    dirigido = nx.DiGraph()
    dirigido.add_nodes_from(range(graph.n))
    for edge in graph.g_edges(g):
        if edge.source != edge.target:
            dirigido.add_edge(edge.source, edge.target)
    buenos = set()
    for ciclo in nx.simple_cycles(dirigido, length_bound=graph.n):
        if is_good_cycle(graph, ciclo, g):
            buenos.add(rotate_cycle(ciclo))
    resultado = sorted(buenos, key=lambda c: (len(c), c))
    graph._good_cycles[g] = resultado
    return resultado


def cycle_decompositions(graph: ChampionGraph, cycle: Sequence[int], g: int) -> Dict[int, Decomposition]:
    """Para cada agente t del ciclo, la descomposición que pred(t) hace de t"""
    largo = len(cycle)
    resultado = {}
    for k, agente in enumerate(cycle):
        pred = cycle[k - 1]
        decomposicion = graph.decomposition(pred, agente, g)
        if decomposicion is None or not decomposicion.proper:
            raise CertifiedBugError(
                "good_cycle_decomposition",
                f"el agente {pred} no g-descompone a {agente} en un ciclo bueno (g={g}, largo={largo})",
            )
        resultado[agente] = decomposicion
    return resultado


def _en_camino(cycle: Sequence[int], desde: int, hasta: int, agente: int) -> bool:
    """¿Está ``agente`` en el camino del ciclo que va de ``desde`` a ``hasta``?"""
    largo = len(cycle)
    pos = {a: k for k, a in enumerate(cycle)}
    return (pos[agente] - pos[desde]) % largo <= (pos[hasta] - pos[desde]) % largo


def discover_bottom_edges(graph: ChampionGraph, cycle: Sequence[int], j: int, g: int) -> BottomEdge:
    """
    Cadena de aristas (B_j | ∘): empieza en succ(j) y, mientras la fuente
    quede dentro del ciclo sin formar una arista buena, sigue hacia el
    sucesor de la fuente. Termina en una arista buena o externa.
    """
    cycle = tuple(cycle)
    if j not in cycle:
        raise ArgumentError(f"El agente {j} no está en el ciclo {cycle}")
    decomp = cycle_decompositions(graph, cycle, g)
    bottom_j = decomp[j].bottom
    largo = len(cycle)
    sucesor = {cycle[k]: cycle[(k + 1) % largo] for k in range(largo)}
    en_ciclo = set(cycle)

    destino = sucesor[j]
    visitados = set()
    while True:
        if destino == j or destino in visitados:
            raise CertifiedBugError(
                "bottom_chain_terminates",
                f"la cadena de B_{j} volvió a {destino} sin arista buena ni externa (ciclo {cycle}, g={g})",
            )
        visitados.add(destino)
        conjunto = decomp[destino].top | bottom_j
        resultados, _ = graph.champion_results(conjunto)
        if not resultados:
            raise CertifiedBugError(
                "bottom_edge_exists",
                f"nadie envidia T_{destino} ∪ B_{j} (ciclo {cycle}, g={g})",
            )

        def _arista(fuente):
            res = resultados[fuente][0]
            return ChampionEdge(fuente, destino, bottom_j, decomp[destino].bottom, res.discard,
                                conjunto, EdgeKind.GENERALIZED, g)

        buenos = [a for a in resultados if a in en_ciclo and _en_camino(cycle, destino, a, j)]
        if buenos:
            return BottomEdge(_arista(buenos[0]), j, cycle, external=False)
        externos = [a for a in resultados if a not in en_ciclo]
        if externos:
            return BottomEdge(_arista(externos[0]), j, cycle, external=True)
        destino = sucesor[min(resultados)]


def discover_all_bottom_edges(graph: ChampionGraph) -> List[BottomEdge]:
    """Una arista (B_j | ∘) por agente j de cada g-ciclo bueno, para todo g ∈ U"""
    if graph.bottom_families:
        return graph.bottom_edges
    for g in items_of(graph.alloc.unallocated):
        for ciclo in find_good_cycles(graph, g):
            familia = [discover_bottom_edges(graph, ciclo, j, g) for j in ciclo]
            graph.bottom_families[(g, ciclo)] = familia
            graph.bottom_edges.extend(familia)
    return graph.bottom_edges


# ============================================================================
# UNIVERSO DE ARISTAS CANDIDATAS
# ============================================================================

def decomposition_pair_edges(graph: ChampionGraph) -> List[ChampionEdge]:
    """Campeones de T_k ∪ B_j para cada par de agentes descompuestos con el mismo pivote"""
    aristas = []
    vistos = set()
    for g in items_of(graph.alloc.unallocated):
        unicas = {}
        for d in graph.proper_decompositions(g):
            unicas.setdefault((d.target, d.top), d)
        decomps = list(unicas.values())
        for dj in decomps:
            for dk in decomps:
                if dj.target == dk.target or not dj.bottom:
                    continue
                clave = (dk.target, dj.bottom, dk.bottom)
                if clave in vistos:
                    continue
                vistos.add(clave)
                aristas.extend(generalized_edges(graph, dk.target, dj.bottom, dk.bottom))
    return aristas


def release_edges(graph: ChampionGraph) -> List[ChampionEdge]:
    """Aristas (b | ∅) para cada ítem asignado b que alguna arista básica descarta"""
    alloc = graph.alloc
    descartados = 0
    for edge in graph.edges:
        if edge.kind is EdgeKind.BASIC:
            descartados |= edge.discard
    descartados &= ~alloc.unallocated
    aristas = []
    for b in items_of(descartados):
        dueno = alloc.owner_of(b)
        for t in range(alloc.n):
            if t != dueno:
                aristas.extend(generalized_edges(graph, t, 1 << b, 0))
    return aristas


def dedupe_edges(edges: Iterable[ChampionEdge]) -> List[ChampionEdge]:
    """Una arista por (fuente, destino, H, bundle recibido, liberado), la de menor clave"""
    mejores: Dict[Tuple[int, ...], ChampionEdge] = {}
    for edge in sorted(edges, key=lambda e: e.sort_key):
        clave = (edge.source, edge.target, edge.added, edge.received, edge.released)
        mejores.setdefault(clave, edge)
    return sorted(mejores.values(), key=lambda e: e.sort_key)


def candidate_edges(graph: ChampionGraph, extra: Iterable[ChampionEdge] = ()) -> List[ChampionEdge]:
    """Envidia, básicas, aristas de mitad inferior, pares de descomposición, liberación y extras"""
    bottom = [b.edge for b in discover_all_bottom_edges(graph)]
    return dedupe_edges([
        *graph.edges,
        *bottom,
        *decomposition_pair_edges(graph),
        *release_edges(graph),
        *extra,
    ])


# ============================================================================
# OBSERVACIONES
# ============================================================================

def _violaciones_campeones(graph: ChampionGraph) -> List[ObservationViolation]:
    alloc = graph.alloc
    valuations = alloc.instance.valuations
    violaciones = []
    for g in items_of(alloc.unallocated):
        for j in range(graph.n):
            if not graph.champions(j, g):
                violaciones.append(ObservationViolation(
                    "exists_champion", f"el agente {j} no tiene campeón para g={g}"))
    for edge in graph.edges:
        if edge.kind is EdgeKind.BASIC and not graph.has_envy(edge.source, edge.target) \
                and edge.source != edge.target and edge.discard >> edge.pivot & 1:
            violaciones.append(ObservationViolation(
                "g_not_in_bottom", f"{edge.source}->{edge.target} descarta g={edge.pivot}"))
    for g in items_of(alloc.unallocated):
        decomps = graph.proper_decompositions(g)
        for d in decomps:
            if not graph.champions_complete(d.target, g):
                continue
            campeones = set(graph.champions(d.target, g))
            for i in range(graph.n):
                if i in campeones:
                    continue
                propio = valuations[i].rank(alloc.bundles[i])
                if propio <= valuations[i].rank(d.top | 1 << g):
                    violaciones.append(ObservationViolation(
                        "non_champion_top_half",
                        f"el agente {i} envidia la mitad superior de {d.target} (g={g})"))
        for dj in decomps:
            i = dj.decomposer
            for dk in decomps:
                if dk.target == dj.target or not graph.champions_complete(dk.target, g):
                    continue
                if i in graph.champions(dk.target, g):
                    continue
                if valuations[i].rank(dk.top) >= valuations[i].rank(dj.top):
                    violaciones.append(ObservationViolation(
                        "top_half_order",
                        f"T_{dk.target} no es menor que T_{dj.target} para el agente {i} (g={g})"))
    return violaciones


def _violaciones_mitad_inferior(graph: ChampionGraph) -> List[ObservationViolation]:
    alloc = graph.alloc
    valuations = alloc.instance.valuations
    violaciones = []
    for bottom in graph.bottom_edges:
        edge = bottom.edge
        i = edge.source
        if edge.source != edge.target and graph.has_envy(i, edge.target):
            continue
        if valuations[i].rank(edge.removed) >= valuations[i].rank(edge.added):
            violaciones.append(ObservationViolation(
                "bottom_bundle_order",
                f"{i} -> {edge.target}: B_{edge.target} no es menor que B_{bottom.owner}"))
    for (g, ciclo), familia in sorted(graph.bottom_families.items()):
        if not familia or not all(b.external for b in familia):
            continue
        fuentes = {b.edge.source for b in familia}
        if len(fuentes) != 1:
            continue
        fuente = fuentes.pop()
        if not any(graph.has_envy(fuente, a) for a in ciclo):
            violaciones.append(ObservationViolation(
                "no_single_external_source",
                f"todas las aristas externas del ciclo {ciclo} (g={g}) salen de {fuente}"))
    return violaciones


def check_observations(graph: ChampionGraph, strict: bool = False) -> List[ObservationViolation]:
    """
    Evalúa las propiedades estructurales del grafo. En modo estricto la
    primera violación se eleva como CertifiedBugError.
    """
    discover_all_bottom_edges(graph)
    violaciones = _violaciones_campeones(graph) + _violaciones_mitad_inferior(graph)
    for v in violaciones:
        logger.warning("[WARN] Observación violada %s: %s", v.check, v.detail)
    if strict and violaciones:
        primera = violaciones[0]
        raise CertifiedBugError(primera.check, primera.detail)
    return violaciones


def check_parallel_rings(graph: ChampionGraph) -> Tuple[int, ...]:
    """
    Sin ciclo PI básico y con |U| >= n-1 el grafo es la unión de n-1 anillos
    hamiltonianos paralelos. Devuelve el anillo (rotación canónica).
    """
    alloc = graph.alloc
    n = graph.n
    if graph.envy_edges():
        raise CertifiedBugError("parallel_rings", "hay aristas de envidia")
    if size(alloc.unallocated) != n - 1:
        raise CertifiedBugError("parallel_rings", f"|U|={size(alloc.unallocated)} y se esperaba {n - 1}")
    anillo = None
    for g in items_of(alloc.unallocated):
        sucesor = {}
        for edge in graph.g_edges(g):
            if sucesor.setdefault(edge.source, edge.target) != edge.target:
                raise CertifiedBugError("parallel_rings", f"el agente {edge.source} campeona a dos agentes (g={g})")
        if len(sucesor) != n or len(set(sucesor.values())) != n:
            raise CertifiedBugError("parallel_rings", f"las g-aristas de g={g} no son una permutación")
        recorrido = [0]
        while len(recorrido) < n:
            recorrido.append(sucesor[recorrido[-1]])
        if len(set(recorrido)) != n or sucesor[recorrido[-1]] != 0:
            raise CertifiedBugError("parallel_rings", f"el anillo de g={g} no es hamiltoniano")
        actual = rotate_cycle(recorrido)
        if anillo is None:
            anillo = actual
        elif actual != anillo:
            raise CertifiedBugError("parallel_rings", "los anillos no son paralelos")
    return anillo or (0,)


# ============================================================================
# EXPORTACIÓN DOT
# ============================================================================

def _dot_id(texto: str) -> str:
    return '"' + texto.replace('"', '\\"') + '"'


def export_dot(graph: ChampionGraph, edges: Optional[Iterable[ChampionEdge]] = None) -> str:
    """
    DOT determinista: envidia sólida, g-aristas etiquetadas con el ítem y
    aristas generalizadas con "H|S".
    """
    instance = graph.alloc.instance
    nombres = instance.item_names
    lineas = ["digraph champion_graph {"]
    for agente in range(graph.n):
        etiqueta = f"{instance.agent_label(agente)}: {format_items(graph.alloc.bundles[agente], nombres)}"
        lineas.append(f"  {_dot_id(instance.agent_label(agente))} [label={_dot_id(etiqueta)}];")
    emitidas = set()
    for edge in sorted(edges if edges is not None else graph.edges,
                       key=lambda e: (KIND_ORDER[e.kind], e.source, e.target, e.pivot or 0, e.added, e.removed)):
        origen = _dot_id(instance.agent_label(edge.source))
        destino = _dot_id(instance.agent_label(edge.target))
        if edge.kind is EdgeKind.ENVY:
            linea = f"  {origen} -> {destino} [style=solid];"
        elif edge.kind is EdgeKind.BASIC:
            linea = f"  {origen} -> {destino} [style=dashed, label={_dot_id(edge.label(nombres))}];"
        else:
            linea = f"  {origen} -> {destino} [style=dotted, label={_dot_id(edge.label(nombres))}];"
        if linea not in emitidas:
            emitidas.add(linea)
            lineas.append(linea)
    lineas.append("}")
    return "\n".join(lineas) + "\n"
