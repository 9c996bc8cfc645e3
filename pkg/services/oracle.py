# services/oracle.py
"""
Oráculo de fuerza bruta a escala de escritorio.

Comparte las claves proxy con el camino principal para no divergir en la
semántica de empates.
"""
import logging
from dataclasses import dataclass
from itertools import combinations, product
from typing import List, Optional, Tuple

from config.config import get_config
from models.allocation import Allocation
from models.instance import Instance
from models.valuations import ValuationLike, _as_valuation
from services.allocation_core import is_efx
from utils.errors import ArgumentError, BudgetExceededError, CapacityError
from utils.itemsets import items_of, mask_of, size, submasks

logger = logging.getLogger(__name__)

MOST_ENVIOUS_MAX_ITEMS = 16
MAX_SUBSET_MAX_ITEMS = 12


@dataclass(frozen=True)
class OracleBudget:
    max_agents: int
    max_items: int
    max_states: int

    @classmethod
    def from_config(cls, cfg=None) -> "OracleBudget":
        cfg = cfg or get_config()
        return cls(cfg.ORACLE_MAX_AGENTS, cfg.ORACLE_MAX_ITEMS, cfg.ORACLE_MAX_STATES)

    def check(self, instance: Instance):
        if instance.n > self.max_agents:
            raise BudgetExceededError(f"n={instance.n} excede el máximo de {self.max_agents} agentes del oráculo")
        if instance.num_items > self.max_items:
            raise BudgetExceededError(f"m={instance.num_items} excede el máximo de {self.max_items} ítems del oráculo")
        estados = (instance.n + 1) ** instance.num_items
        if estados > self.max_states:
            raise BudgetExceededError(f"(n+1)^m = {estados} estados excede el presupuesto de {self.max_states}")


def enumerate_efx(instance: Instance, max_unallocated: int,
                  budget: Optional[OracleBudget] = None) -> List[Allocation]:
    """
    Todas las asignaciones EFX con |U| <= max_unallocated. Orden canónico:
    el ítem 0 es el más significativo y los destinos van de 0..n-1 y luego U.
    """
    budget = budget or OracleBudget.from_config()
    budget.check(instance)
    n, m = instance.n, instance.num_items
    resultado = []
    for destinos in product(range(n + 1), repeat=m):
        if destinos.count(n) > max_unallocated:
            continue
        bundles = [0] * n
        for item, destino in enumerate(destinos):
            if destino < n:
                bundles[destino] |= 1 << item
        alloc = Allocation.from_bundles(instance, bundles)
        if is_efx(alloc):
            resultado.append(alloc)
    logger.debug("Oráculo EFX: %s asignaciones con |U| <= %s", len(resultado), max_unallocated)
    return resultado


def enumerate_most_envious(alloc: Allocation, bundle: int) -> List[Tuple[int, int]]:
    """Todos los pares (agente, T) con T ⊆ S envidiado por el agente y no fuertemente envidiado"""
    if size(bundle) > MOST_ENVIOUS_MAX_ITEMS:
        raise CapacityError(f"enumerate_most_envious admite |S| <= {MOST_ENVIOUS_MAX_ITEMS}")
    valuations = alloc.instance.valuations
    propios = [v.rank(alloc.bundles[a]) for a, v in enumerate(valuations)]
    pares = []
    for sub in submasks(bundle):
        fuerte = any(
            v.rank(sub & ~(1 << h)) > propios[a]
            for a, v in enumerate(valuations)
            for h in items_of(sub)
        )
        if fuerte:
            continue
        for a, v in enumerate(valuations):
            if v.rank(sub) > propios[a]:
                pares.append((a, sub))
    return sorted(pares)


def max_subset_of_size(valuation: ValuationLike, bundle: int, k: int) -> int:
    """Subconjunto de tamaño k de mayor clave, por enumeración"""
    if size(bundle) > MAX_SUBSET_MAX_ITEMS:
        raise CapacityError(f"max_subset_of_size admite |T| <= {MAX_SUBSET_MAX_ITEMS}")
    if k < 0 or k > size(bundle):
        raise ArgumentError(f"k={k} fuera de rango")
    proxy = _as_valuation(valuation)
    return max((mask_of(c) for c in combinations(items_of(bundle), k)), key=proxy.rank)


def oracle_agrees(alloc: Allocation, max_unallocated: Optional[int] = None) -> bool:
    """La asignación figura en la enumeración del oráculo (con el mismo |U|)"""
    limite = alloc.unallocated_count() if max_unallocated is None else max_unallocated
    return alloc in enumerate_efx(alloc.instance, limite)
