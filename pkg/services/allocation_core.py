# services/allocation_core.py
"""
Predicados de envidia, EFX/EF, agente más envidioso, caridad y dominancia.

Toda comparación se hace con la clave proxy de cada agente (nunca con el
valor base), de modo que el orden es estricto en todo el pipeline.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from models.allocation import Allocation
from models.instance import AgentOrdering
from utils.itemsets import items_of, size, submasks

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MostEnviousResult:
    """El agente envidia envied_subset y nadie lo envidia fuertemente"""

    agent: int
    envied_subset: int
    discard: int


# ============================================================================
# ENVIDIA
# ============================================================================

def envies(alloc: Allocation, agent: int, bundle: int) -> bool:
    valuation = alloc.instance.valuations[agent]
    return valuation.rank(bundle) > valuation.rank(alloc.bundles[agent])


def strongly_envies(alloc: Allocation, agent: int, bundle: int) -> bool:
    valuation = alloc.instance.valuations[agent]
    propio = valuation.rank(alloc.bundles[agent])
    return any(valuation.rank(bundle & ~(1 << h)) > propio for h in items_of(bundle))


def enviers(alloc: Allocation, bundle: int) -> int:
    """Máscara de agentes que envidian el bundle"""
    resultado = 0
    for agent, valuation in enumerate(alloc.instance.valuations):
        if valuation.rank(bundle) > valuation.rank(alloc.bundles[agent]):
            resultado |= 1 << agent
    return resultado


def is_efx(alloc: Allocation) -> bool:
    for i in range(alloc.n):
        for j in range(alloc.n):
            if i != j and strongly_envies(alloc, i, alloc.bundles[j]):
                return False
    return True


def is_ef(alloc: Allocation) -> bool:
    for i in range(alloc.n):
        for j in range(alloc.n):
            if i != j and envies(alloc, i, alloc.bundles[j]):
                return False
    return True


def first_efx_violation(alloc: Allocation) -> Optional[Tuple[int, int]]:
    """Primer par (i, j) con envidia fuerte de i hacia j, o None"""
    for i in range(alloc.n):
        for j in range(alloc.n):
            if i != j and strongly_envies(alloc, i, alloc.bundles[j]):
                return i, j
    return None


# ============================================================================
# AGENTE MÁS ENVIDIOSO
# ============================================================================

def most_envious(alloc: Allocation, bundle: int) -> Optional[MostEnviousResult]:
    """
    Construcción determinista: mientras algún agente envidie fuertemente Z se
    quita el ítem del testigo de menor índice (agente y luego ítem). Devuelve
    el agente de menor índice que envidia el Z final.
    """
    if not enviers(alloc, bundle):
        return None
    valuations = alloc.instance.valuations
    propios = [valuation.rank(alloc.bundles[a]) for a, valuation in enumerate(valuations)]
    actual = bundle
    while True:
        testigo = None
        for agent, valuation in enumerate(valuations):
            for h in items_of(actual):
                if valuation.rank(actual & ~(1 << h)) > propios[agent]:
                    testigo = h
                    break
            if testigo is not None:
                break
        if testigo is None:
            break
        actual &= ~(1 << testigo)
    for agent, valuation in enumerate(valuations):
        if valuation.rank(actual) > propios[agent]:
            return MostEnviousResult(agent, actual, bundle & ~actual)
    raise AssertionError("el conjunto final siempre conserva un envidioso")


def _tabla_envidiosos(alloc: Allocation, bundle: int) -> Dict[int, int]:
    valuations = alloc.instance.valuations
    propios = [valuation.rank(alloc.bundles[a]) for a, valuation in enumerate(valuations)]
    tabla = {}
    for sub in submasks(bundle):
        quien = 0
        for agent, valuation in enumerate(valuations):
            if valuation.rank(sub) > propios[agent]:
                quien |= 1 << agent
        tabla[sub] = quien
    return tabla


def valid_envied_subsets(alloc: Allocation, bundle: int) -> List[Tuple[int, int]]:
    """
    Todos los T ⊆ S envidiados por alguien y no envidiados fuertemente por
    nadie, con la máscara de sus envidiosos. Orden: |T| descendente, luego T.
    """
    tabla = _tabla_envidiosos(alloc, bundle)
    validos = []
    for sub, quien in tabla.items():
        if not quien:
            continue
        if all(tabla[sub & ~(1 << h)] == 0 for h in items_of(sub)):
            validos.append((sub, quien))
    validos.sort(key=lambda par: (-size(par[0]), par[0]))
    return validos


def champion_set(alloc: Allocation, bundle: int, limit: int = 16) -> Dict[int, MostEnviousResult]:
    """
    Todos los agentes más envidiosos de ``bundle`` con su subconjunto
    determinista (mayor |T|, luego menor máscara). Si |S| supera ``limit``
    solo se devuelve el resultado de ``most_envious``.
    """
    if size(bundle) > limit:
        logger.debug("Conjunto de %s ítems: se omite la enumeración completa de campeones", size(bundle))
        unico = most_envious(alloc, bundle)
        return {} if unico is None else {unico.agent: unico}
    campeones: Dict[int, MostEnviousResult] = {}
    for sub, quien in valid_envied_subsets(alloc, bundle):
        for agent in items_of(quien):
            if agent not in campeones:
                campeones[agent] = MostEnviousResult(agent, sub, bundle & ~sub)
    return dict(sorted(campeones.items()))


def valid_discards(alloc: Allocation, agent: int, bundle: int, limit: Optional[int] = None) -> List[MostEnviousResult]:
    """Todas las elecciones admisibles de descarte para ``agent`` sobre ``bundle``"""
    resultados = []
    for sub, quien in valid_envied_subsets(alloc, bundle):
        if quien >> agent & 1:
            resultados.append(MostEnviousResult(agent, sub, bundle & ~sub))
            if limit is not None and len(resultados) >= limit:
                break
    return resultados


# ============================================================================
# CARIDAD
# ============================================================================

def charity_fix(alloc: Allocation) -> Optional[Allocation]:
    """
    Si alguien envidia U, el agente más envidioso recibe su subconjunto
    envidiado T ⊆ U y su bundle anterior vuelve a U.
    """
    if not alloc.unallocated:
        return None
    resultado = most_envious(alloc, alloc.unallocated)
    if resultado is None:
        return None
    logger.debug("Caridad: el agente %s toma %s ítems de U", resultado.agent, size(resultado.envied_subset))
    return alloc.replace({resultado.agent: resultado.envied_subset})


def charity_envied(alloc: Allocation) -> bool:
    return bool(alloc.unallocated) and bool(enviers(alloc, alloc.unallocated))


# ============================================================================
# DOMINANCIA Y POTENCIAL
# ============================================================================

def potential(alloc: Allocation, ordering: AgentOrdering) -> Tuple[int, ...]:
    valuations = alloc.instance.valuations
    return tuple(valuations[a].rank(alloc.bundles[a]) for a in ordering)


def dominates(after: Allocation, before: Allocation, ordering: AgentOrdering) -> bool:
    """
    Dominancia lexicográfica: el primer agente (en el orden fijo) cuya clave
    cambia debe mejorar. La igualdad es igualdad de clave, que con claves no
    degeneradas equivale a tener el mismo bundle.
    """
    valuations = after.instance.valuations
    for agent in ordering:
        nuevo = valuations[agent].rank(after.bundles[agent])
        viejo = valuations[agent].rank(before.bundles[agent])
        if nuevo != viejo:
            return nuevo > viejo
    return False


def pareto_dominates(after: Allocation, before: Allocation) -> bool:
    valuations = after.instance.valuations
    mejora = False
    for agent, valuation in enumerate(valuations):
        nuevo = valuation.rank(after.bundles[agent])
        viejo = valuation.rank(before.bundles[agent])
        if nuevo < viejo:
            return False
        if nuevo > viejo:
            mejora = True
    return mejora
