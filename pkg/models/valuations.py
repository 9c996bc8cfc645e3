# models/valuations.py
"""
Clases de valoración, comparación exacta de bundles y proxies no degenerados.

Cada descriptor (aditivo, demanda unitaria, aditivo con presupuesto,
multiplicativo o tabla explícita) se convierte en una ``Valuation`` que
ordena todos los bundles con una clave ``BundleKey`` (primaria, desempate)
comparada lexicográficamente. El orden resultante es estricto, respeta el
valor base y es cancelable.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from utils.errors import (
    ArgumentError, CapacityError, MalformedInstanceError, PreconditionError,
    UnsupportedValuationError,
)
from utils.itemsets import MAX_ITEMS, items_of, size

logger = logging.getLogger(__name__)

CANCELABLE_CHECK_MAX_ITEMS = 12


class ValuationKind(str, Enum):
    ADDITIVE = "additive"
    UNIT_DEMAND = "unit_demand"
    BUDGET_ADDITIVE = "budget_additive"
    MULTIPLICATIVE = "multiplicative"
    TABLE = "table"


class Comparison(str, Enum):
    LESS = "less"
    GREATER = "greater"


class BundleKey(NamedTuple):
    """Clave total de un bundle: (valor primario, desempate)"""
    primary: int
    tiebreak: int


def _es_entero(valor) -> bool:
    return isinstance(valor, int) and not isinstance(valor, bool)


@dataclass(frozen=True)
class ValuationDescriptor:
    """
    Descriptor serializable de una valoración.

    item_values son los valores por ítem; para el tipo ``table`` es la tabla
    completa de 2^m valores indexada por máscara de bits.
    """
    kind: ValuationKind
    item_values: Tuple[int, ...]
    budget: Optional[int] = None

    def __post_init__(self):
        try:
            kind = ValuationKind(self.kind)
        except ValueError:
            raise MalformedInstanceError(f"Tipo de valoración desconocido: {self.kind!r}", field="kind")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "item_values", tuple(self.item_values))
        self._validar()

    # ---------- Validación ----------
    def _validar(self):
        valores = self.item_values
        for pos, valor in enumerate(valores):
            if valor is None:
                raise MalformedInstanceError("Entrada faltante en la tabla de valores", field=f"item_values[{pos}]")
            if not _es_entero(valor) or valor < 0:
                raise MalformedInstanceError(
                    f"Los valores deben ser enteros no negativos, se recibió {valor!r}",
                    field=f"item_values[{pos}]",
                )

        if self.kind is ValuationKind.BUDGET_ADDITIVE:
            if not _es_entero(self.budget) or self.budget <= 0:
                raise MalformedInstanceError("budget_additive requiere un presupuesto entero positivo", field="budget")
        elif self.budget is not None:
            raise MalformedInstanceError("Solo budget_additive admite presupuesto", field="budget")

        if self.kind is ValuationKind.MULTIPLICATIVE and any(v < 1 for v in valores):
            raise MalformedInstanceError("multiplicative requiere valores estrictamente positivos", field="item_values")

        if self.kind is ValuationKind.TABLE:
            largo = len(valores)
            if largo == 0 or largo & (largo - 1):
                raise MalformedInstanceError("La tabla debe tener 2^m entradas", field="item_values")
            if valores[0] != 0:
                raise MalformedInstanceError("La tabla debe cumplir value(∅) = 0", field="item_values[0]")
            m = largo.bit_length() - 1
            for mask in range(largo):
                for i in range(m):
                    if not mask >> i & 1 and valores[mask] > valores[mask | (1 << i)]:
                        raise MalformedInstanceError(
                            "La tabla no es monótona",
                            field=f"item_values[{mask | (1 << i)}]",
                        )

        if self.num_items > MAX_ITEMS:
            raise CapacityError(f"m={self.num_items} excede el máximo de {MAX_ITEMS} ítems")

    # ---------- Propiedades ----------
    @property
    def num_items(self) -> int:
        if self.kind is ValuationKind.TABLE:
            return len(self.item_values).bit_length() - 1
        return len(self.item_values)

    def singleton_value(self, item: int) -> int:
        return self.value(1 << item)

    def value(self, bundle: int) -> int:
        """Valor base del bundle (entero exacto)"""
        if bundle >> self.num_items:
            raise MalformedInstanceError(f"El bundle {bundle:#x} usa ítems fuera de 0..{self.num_items - 1}")
        kind = self.kind
        if kind is ValuationKind.TABLE:
            return self.item_values[bundle]
        if not bundle:
            return 0
        valores = self.item_values
        if kind is ValuationKind.ADDITIVE:
            return sum(valores[i] for i in items_of(bundle))
        if kind is ValuationKind.UNIT_DEMAND:
            return max(valores[i] for i in items_of(bundle))
        if kind is ValuationKind.BUDGET_ADDITIVE:
            return min(sum(valores[i] for i in items_of(bundle)), self.budget)
        producto = 1
        for i in items_of(bundle):
            producto *= valores[i]
        return producto

    def to_dict(self) -> dict:
        data = {"kind": self.kind.value, "item_values": list(self.item_values)}
        if self.budget is not None:
            data["budget"] = self.budget
        return data


def canonical_permutation(descriptor: ValuationDescriptor) -> Tuple[int, ...]:
    """
    π(i): posición del ítem i al ordenar por valor unitario no decreciente,
    empates por índice ascendente.
    """
    m = descriptor.num_items
    orden = sorted(range(m), key=lambda i: (descriptor.singleton_value(i), i))
    posiciones = [0] * m
    for rango, item in enumerate(orden):
        posiciones[item] = rango
    return tuple(posiciones)


class Valuation:
    """
    Proxy no degenerado y cancelable de un descriptor.

    ``rank(S)`` empaqueta la clave como ``primary << m | tiebreak``; como el
    desempate es menor que 2^m, el orden de los enteros coincide con el
    orden lexicográfico de ``key(S)``.
    """

    def __init__(self, descriptor: ValuationDescriptor):
        self.descriptor = descriptor
        self.num_items = descriptor.num_items
        self.permutation = canonical_permutation(descriptor)
        self._weights = tuple(1 << p for p in self.permutation)
        self._ranks: Dict[int, int] = {}
        if descriptor.kind is ValuationKind.TABLE:
            _validar_tabla_soportada(descriptor)

    def __repr__(self):
        return f"Valuation({self.descriptor.kind.value}, m={self.num_items})"

    def tiebreak(self, bundle: int) -> int:
        weights = self._weights
        return sum(weights[i] for i in items_of(bundle))

    def primary(self, bundle: int) -> int:
        descriptor = self.descriptor
        if descriptor.kind in (ValuationKind.ADDITIVE, ValuationKind.BUDGET_ADDITIVE):
            # valoración aditiva subyacente
            valores = descriptor.item_values
            return sum(valores[i] for i in items_of(bundle))
        return descriptor.value(bundle)

    def key(self, bundle: int) -> BundleKey:
        return BundleKey(self.primary(bundle), self.tiebreak(bundle))

    def rank(self, bundle: int) -> int:
        cached = self._ranks.get(bundle)
        if cached is None:
            cached = self.primary(bundle) << self.num_items | self.tiebreak(bundle)
            self._ranks[bundle] = cached
        return cached

    def rank_of_key(self, key: BundleKey) -> int:
        return key.primary << self.num_items | key.tiebreak

    def value(self, bundle: int) -> int:
        return self.descriptor.value(bundle)

    def best(self, bundles: Sequence[int]) -> int:
        """El bundle de mayor clave (max_i de la notación habitual)"""
        return max(bundles, key=self.rank)


@lru_cache(maxsize=None)
def proxy_for(descriptor: ValuationDescriptor) -> Valuation:
    return Valuation(descriptor)


ValuationLike = Union[ValuationDescriptor, Valuation]


def _as_valuation(valuation: ValuationLike) -> Valuation:
    if isinstance(valuation, Valuation):
        return valuation
    return proxy_for(valuation)


# ============================================================================
# OPERACIONES PÚBLICAS
# ============================================================================

def value(descriptor: ValuationDescriptor, bundle: int) -> int:
    return descriptor.value(bundle)


def compare(valuation: ValuationLike, first: int, second: int) -> Comparison:
    """Compara dos bundles distintos bajo la clave proxy"""
    if first == second:
        raise ArgumentError("compare requiere dos bundles distintos")
    proxy = _as_valuation(valuation)
    return Comparison.GREATER if proxy.rank(first) > proxy.rank(second) else Comparison.LESS


def _tabla_base(descriptor: ValuationDescriptor, m: int) -> List[int]:
    if descriptor.kind is ValuationKind.TABLE:
        return list(descriptor.item_values)
    return [descriptor.value(mask) for mask in range(1 << m)]


def _a_rangos(valores: Sequence[int]) -> np.ndarray:
    # los rangos preservan el orden y caben en int64 aunque los valores no
    distintos = {v: pos for pos, v in enumerate(sorted(set(valores)))}
    return np.fromiter((distintos[v] for v in valores), dtype=np.int64, count=len(valores))


def _tabla_es_cancelable(valores: Sequence[int], m: int) -> bool:
    rangos = _a_rangos(valores)
    masks = np.arange(1 << m, dtype=np.int64)
    for g in range(m):
        bit_g = 1 << g
        sin_g = masks[(masks & bit_g) == 0]
        antes = rangos[sin_g]
        despues = rangos[sin_g | bit_g]
        orden = np.lexsort((despues, antes))
        antes = antes[orden]
        despues = despues[orden]
        delta_despues = np.diff(despues)
        if np.any(delta_despues < 0):
            return False
        if np.any((np.diff(antes) == 0) & (delta_despues != 0)):
            return False
    return True


def check_cancelable(descriptor: ValuationDescriptor, m: Optional[int] = None) -> bool:
    """
    Verifica exhaustivamente v(S∪{g}) > v(T∪{g}) ⇒ v(S) > v(T) para toda
    terna S, T, g con g ∉ S∪T.

    Equivale a: si v(S) <= v(T) entonces v(S∪{g}) <= v(T∪{g}); por cada g se
    ordenan los conjuntos sin g por (v(S), v(S∪{g})) y se revisa que la
    segunda columna no decrezca y sea constante donde la primera empata.
    """
    m = descriptor.num_items if m is None else m
    if m > CANCELABLE_CHECK_MAX_ITEMS:
        raise CapacityError(f"check_cancelable admite m <= {CANCELABLE_CHECK_MAX_ITEMS}, se pidió m={m}")
    return _tabla_es_cancelable(_tabla_base(descriptor, m), m)


def check_non_degenerate(descriptor: ValuationDescriptor) -> bool:
    valores = _tabla_base(descriptor, descriptor.num_items)
    return len(set(valores)) == len(valores)


def check_respects(valuation: ValuationLike) -> bool:
    """El proxy respeta la base: v(S) > v(T) implica key(S) > key(T)"""
    proxy = _as_valuation(valuation)
    m = proxy.num_items
    if m > CANCELABLE_CHECK_MAX_ITEMS:
        raise CapacityError(f"check_respects admite m <= {CANCELABLE_CHECK_MAX_ITEMS}")
    orden = sorted(range(1 << m), key=proxy.rank)
    base = [proxy.value(mask) for mask in orden]
    return all(a <= b for a, b in zip(base, base[1:]))


def rank_table(valuation: ValuationLike, m: Optional[int] = None) -> ValuationDescriptor:
    """Eleva el proxy a un descriptor ``table`` con la posición de cada bundle"""
    proxy = _as_valuation(valuation)
    m = proxy.num_items if m is None else m
    if m > CANCELABLE_CHECK_MAX_ITEMS:
        raise CapacityError(f"rank_table admite m <= {CANCELABLE_CHECK_MAX_ITEMS}")
    orden = sorted(range(1 << m), key=proxy.rank)
    tabla = [0] * (1 << m)
    for posicion, mask in enumerate(orden):
        tabla[mask] = posicion
    return ValuationDescriptor(ValuationKind.TABLE, tuple(tabla))


def _validar_tabla_soportada(descriptor: ValuationDescriptor):
    m = descriptor.num_items
    if m > CANCELABLE_CHECK_MAX_ITEMS:
        raise CapacityError(f"Las tablas explícitas admiten m <= {CANCELABLE_CHECK_MAX_ITEMS}")
    if not check_non_degenerate(descriptor):
        raise UnsupportedValuationError(
            "Tabla degenerada: no existe un proxy cancelable genérico para valoraciones tabulares"
        )
    if not check_cancelable(descriptor, m):
        raise UnsupportedValuationError("La tabla no es cancelable")


# ============================================================================
# RECORTE POR MENOR CONTRIBUCIÓN MARGINAL
# ============================================================================

def removal_sequence(valuation: ValuationLike, bundle: int) -> Iterator[int]:
    """
    Secuencia T = Z_0 ⊃ Z_1 ⊃ ... ⊃ ∅ donde cada paso elimina el ítem cuyo
    retiro deja el resto de mayor clave.
    """
    proxy = _as_valuation(valuation)
    actual = bundle
    yield actual
    while actual:
        actual = max((actual & ~(1 << i) for i in items_of(actual)), key=proxy.rank)
        yield actual


def trim_to_size(valuation: ValuationLike, bundle: int, k: int) -> int:
    """Subconjunto de tamaño k obtenido quitando ítems de menor aporte"""
    if k < 0 or k > size(bundle):
        raise ArgumentError(f"k={k} fuera de rango para un bundle de tamaño {size(bundle)}")
    for actual in removal_sequence(valuation, bundle):
        if size(actual) == k:
            return actual
    raise AssertionError("la secuencia de recorte siempre alcanza cada tamaño")


def trim_until(valuation: ValuationLike, bundle: int, floor: Union[BundleKey, int]) -> int:
    """
    Último conjunto de la secuencia de recorte que aún supera ``floor``.
    ``floor`` puede ser una BundleKey o un rank ya empaquetado.
    """
    proxy = _as_valuation(valuation)
    piso = proxy.rank_of_key(floor) if isinstance(floor, BundleKey) else floor
    if proxy.rank(bundle) <= piso:
        raise PreconditionError("trim_until requiere key(T) > floor")
    ultimo = bundle
    for actual in removal_sequence(proxy, bundle):
        if proxy.rank(actual) <= piso:
            break
        ultimo = actual
    return ultimo


__all__ = [
    'ValuationKind', 'Comparison', 'BundleKey', 'ValuationDescriptor', 'Valuation',
    'canonical_permutation', 'proxy_for', 'value', 'compare', 'check_cancelable',
    'check_non_degenerate', 'check_respects', 'rank_table', 'removal_sequence',
    'trim_to_size', 'trim_until', 'CANCELABLE_CHECK_MAX_ITEMS',
]
