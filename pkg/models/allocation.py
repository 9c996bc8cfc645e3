# models/allocation.py
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from models.instance import Instance
from utils.errors import MalformedInstanceError
from utils.itemsets import format_items, item_list, mask_of

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Allocation:
    """
    Bundles disjuntos por agente más el conjunto U de ítems sin asignar.
    La igualdad compara bundles y U, nunca la instancia.
    """

    instance: Instance = field(compare=False, repr=False)
    bundles: Tuple[int, ...]
    unallocated: int

    def __post_init__(self):
        object.__setattr__(self, "bundles", tuple(self.bundles))
        if len(self.bundles) != self.instance.n:
            raise MalformedInstanceError(f"Se esperaban {self.instance.n} bundles, hay {len(self.bundles)}",
                                         field="bundles")
        union = 0
        for agente, bundle in enumerate(self.bundles):
            if bundle < 0 or bundle & ~self.instance.all_items:
                raise MalformedInstanceError("Bundle con ítems fuera del universo", field=f"bundles[{agente}]")
            if union & bundle:
                raise MalformedInstanceError("Los bundles deben ser disjuntos", field=f"bundles[{agente}]")
            union |= bundle
        if union | self.unallocated != self.instance.all_items or union & self.unallocated:
            raise MalformedInstanceError("Bundles y U deben particionar los ítems", field="unallocated")

    # ---------- Constructores ----------
    @classmethod
    def empty(cls, instance: Instance) -> "Allocation":
        return cls(instance, (0,) * instance.n, instance.all_items)

    @classmethod
    def from_bundles(cls, instance: Instance, bundles: Sequence[int]) -> "Allocation":
        union = 0
        for bundle in bundles:
            union |= bundle
        return cls(instance, tuple(bundles), instance.all_items & ~union)

    @classmethod
    def from_item_lists(cls, instance: Instance, bundles: Iterable[Iterable[int]]) -> "Allocation":
        return cls.from_bundles(instance, [mask_of(items) for items in bundles])

    # ---------- Consultas ----------
    @property
    def n(self) -> int:
        return len(self.bundles)

    def bundle(self, agent: int) -> int:
        return self.bundles[agent]

    def owner_of(self, item: int):
        for agente, bundle in enumerate(self.bundles):
            if bundle >> item & 1:
                return agente
        return None

    def replace(self, changes: Mapping[int, int]) -> "Allocation":
        """Nueva asignación con los bundles indicados; U se recalcula"""
        bundles = list(self.bundles)
        for agente, bundle in changes.items():
            bundles[agente] = bundle
        return Allocation.from_bundles(self.instance, bundles)

    def unallocated_count(self) -> int:
        return self.unallocated.bit_count()

    # ---------- Serialización ----------
    def to_dict(self) -> Dict[str, list]:
        return {
            "bundles": [item_list(bundle) for bundle in self.bundles],
            "unallocated": item_list(self.unallocated),
        }

    @classmethod
    def from_dict(cls, instance: Instance, data: Mapping) -> "Allocation":
        try:
            bundles = data["bundles"]
        except (KeyError, TypeError):
            raise MalformedInstanceError("La asignación necesita la lista 'bundles'", field="bundles")
        if not isinstance(bundles, list):
            raise MalformedInstanceError("'bundles' debe ser una lista", field="bundles")
        masks = []
        for pos, items in enumerate(bundles):
            if not isinstance(items, list) or not all(isinstance(i, int) and 0 <= i < instance.num_items for i in items):
                raise MalformedInstanceError("Cada bundle es una lista de índices de ítems", field=f"bundles[{pos}]")
            if len(set(items)) != len(items):
                raise MalformedInstanceError("Ítem repetido en un bundle", field=f"bundles[{pos}]")
            masks.append(mask_of(items))
        allocation = cls.from_bundles(instance, masks)
        if "unallocated" in data and mask_of(data["unallocated"]) != allocation.unallocated:
            raise MalformedInstanceError("'unallocated' no coincide con los bundles", field="unallocated")
        return allocation

    def describe(self) -> str:
        nombres = self.instance.item_names
        partes = [
            f"{self.instance.agent_label(agente)}:{format_items(bundle, nombres)}"
            for agente, bundle in enumerate(self.bundles)
        ]
        partes.append(f"U:{format_items(self.unallocated, nombres)}")
        return " ".join(partes)
