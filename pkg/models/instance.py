# models/instance.py
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Tuple

from models.valuations import Valuation, ValuationDescriptor, proxy_for
from utils.errors import MalformedInstanceError
from utils.itemsets import MAX_ITEMS, full_set

logger = logging.getLogger(__name__)

AgentOrdering = Tuple[int, ...]


def validate_ordering(ordering, n) -> AgentOrdering:
    """Una permutación a_1..a_n de los agentes"""
    ordering = tuple(ordering)
    if sorted(ordering) != list(range(n)):
        raise MalformedInstanceError(f"El orden de agentes {list(ordering)} no es una permutación de 0..{n - 1}",
                                     field="ordering")
    return ordering


@dataclass(frozen=True)
class Instance:
    """n agentes, m ítems y un descriptor de valoración por agente"""

    num_items: int
    agents: Tuple[ValuationDescriptor, ...]
    item_names: Optional[Tuple[str, ...]] = field(default=None, compare=False)
    agent_names: Optional[Tuple[str, ...]] = field(default=None, compare=False)
    ordering: Optional[AgentOrdering] = None

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        if self.item_names is not None:
            object.__setattr__(self, "item_names", tuple(self.item_names))
        if self.agent_names is not None:
            object.__setattr__(self, "agent_names", tuple(self.agent_names))

        if not isinstance(self.num_items, int) or self.num_items < 0 or self.num_items > MAX_ITEMS:
            raise MalformedInstanceError(f"m debe estar entre 0 y {MAX_ITEMS}", field="num_items")
        if not self.agents:
            raise MalformedInstanceError("La instancia necesita al menos un agente", field="agents")
        for pos, descriptor in enumerate(self.agents):
            if descriptor.num_items != self.num_items:
                raise MalformedInstanceError(
                    f"El descriptor tiene {descriptor.num_items} ítems y la instancia {self.num_items}",
                    field=f"agents[{pos}]",
                )
        if self.item_names is not None and len(self.item_names) != self.num_items:
            raise MalformedInstanceError("item_names debe tener un nombre por ítem", field="item_names")
        if self.agent_names is not None and len(self.agent_names) != len(self.agents):
            raise MalformedInstanceError("agent_names debe tener un nombre por agente", field="agent_names")
        if self.ordering is not None:
            object.__setattr__(self, "ordering", validate_ordering(self.ordering, len(self.agents)))

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def all_items(self) -> int:
        return full_set(self.num_items)

    @cached_property
    def valuations(self) -> Tuple[Valuation, ...]:
        return tuple(proxy_for(descriptor) for descriptor in self.agents)

    def default_ordering(self) -> AgentOrdering:
        return self.ordering if self.ordering is not None else tuple(range(self.n))

    def distinct_descriptors(self) -> Tuple[ValuationDescriptor, ...]:
        vistos = []
        for descriptor in self.agents:
            if descriptor not in vistos:
                vistos.append(descriptor)
        return tuple(vistos)

    def agent_label(self, agent: int) -> str:
        if self.agent_names:
            return self.agent_names[agent]
        return str(agent + 1)

    def item_label(self, item: int) -> str:
        if self.item_names:
            return self.item_names[item]
        return str(item)
