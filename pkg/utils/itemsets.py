# utils/itemsets.py
"""
Conjuntos de ítems representados como máscaras de bits (int).

El bit i indica la pertenencia del ítem i. La iteración siempre es en orden
ascendente de índice. Se asume m <= 62.
"""
from typing import Iterable, Iterator, List, Optional, Sequence

MAX_ITEMS = 62


def full_set(m: int) -> int:
    return (1 << m) - 1


def mask_of(items: Iterable[int]) -> int:
    mask = 0
    for i in items:
        mask |= 1 << i
    return mask


def items_of(mask: int) -> Iterator[int]:
    """Itera los ítems de la máscara en orden ascendente"""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def item_list(mask: int) -> List[int]:
    return list(items_of(mask))


def size(mask: int) -> int:
    return mask.bit_count()


def is_subset(sub: int, sup: int) -> bool:
    return sub & ~sup == 0


def submasks(mask: int) -> Iterator[int]:
    """Todos los subconjuntos de mask, en orden ascendente de máscara"""
    sub = 0
    while True:
        yield sub
        if sub == mask:
            return
        sub = (sub - mask) & mask


def lowest_item(mask: int) -> Optional[int]:
    if not mask:
        return None
    return (mask & -mask).bit_length() - 1


def format_items(mask: int, names: Optional[Sequence[str]] = None) -> str:
    """Representación legible: {a,b,c} con nombres o {0,1,2} con índices"""
    if names:
        etiquetas = [names[i] if i < len(names) else str(i) for i in items_of(mask)]
    else:
        etiquetas = [str(i) for i in items_of(mask)]
    return "{" + ",".join(etiquetas) + "}"


__all__ = [
    'MAX_ITEMS', 'full_set', 'mask_of', 'items_of', 'item_list',
    'size', 'is_subset', 'submasks', 'lowest_item', 'format_items',
]
