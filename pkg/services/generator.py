# services/generator.py
"""
Generador determinista de instancias para pruebas y lotes.

La misma semilla produce siempre la misma instancia (numpy default_rng).
"""
import logging
from typing import Optional, Sequence

import numpy as np

from models.instance import Instance
from models.valuations import ValuationDescriptor, ValuationKind
from utils.errors import ArgumentError

logger = logging.getLogger(__name__)

# Clases con proxy cancelable conocido; las tablas se cargan desde archivo
NICE_KINDS = (
    ValuationKind.ADDITIVE,
    ValuationKind.UNIT_DEMAND,
    ValuationKind.BUDGET_ADDITIVE,
    ValuationKind.MULTIPLICATIVE,
)


def _normalizar_mezcla(class_mix: Optional[Sequence]) -> tuple:
    if not class_mix:
        return NICE_KINDS
    mezcla = []
    for kind in class_mix:
        try:
            kind = ValuationKind(kind)
        except ValueError:
            raise ArgumentError(f"Clase de valoración desconocida: {kind!r}")
        if kind is ValuationKind.TABLE:
            raise ArgumentError("El generador no produce valoraciones tabulares")
        mezcla.append(kind)
    return tuple(mezcla)


def random_descriptor(rng: np.random.Generator, kind: ValuationKind, m: int, value_bound: int) -> ValuationDescriptor:
    piso = 1 if kind is ValuationKind.MULTIPLICATIVE else 0
    valores = tuple(int(v) for v in rng.integers(piso, value_bound + 1, size=m))
    if kind is ValuationKind.BUDGET_ADDITIVE:
        total = max(sum(valores), 1)
        budget = int(rng.integers(1, total + 1))
        return ValuationDescriptor(kind, valores, budget=budget)
    return ValuationDescriptor(kind, valores)


def _distinto(rng, kind, m, value_bound, otro: ValuationDescriptor) -> ValuationDescriptor:
    for _ in range(16):
        candidato = random_descriptor(rng, kind, m, value_bound)
        if candidato != otro:
            return candidato
    # valores forzados: el primer ítem se desplaza en uno
    valores = list(otro.item_values)
    valores[0] += 1
    return ValuationDescriptor(otro.kind, tuple(valores), budget=otro.budget)


def generate(seed: int, n: int, m: int, class_mix: Optional[Sequence] = None,
             value_bound: int = 20, two_types: bool = False) -> Instance:
    """
    Instancia aleatoria con n agentes y m ítems. Cada agente recibe una clase
    de ``class_mix``; en modo ``two_types`` solo hay dos descriptores
    distintos y ambos aparecen.
    """
    if n < 1 or m < 0 or value_bound < 1:
        raise ArgumentError("generate requiere n >= 1, m >= 0 y value_bound >= 1")
    if two_types and (n < 2 or m < 1):
        raise ArgumentError("El modo de dos tipos requiere n >= 2 y m >= 1")
    mezcla = _normalizar_mezcla(class_mix)
    rng = np.random.default_rng(seed)

    if two_types:
        kind_a = mezcla[int(rng.integers(len(mezcla)))]
        kind_b = mezcla[int(rng.integers(len(mezcla)))]
        tipo_a = random_descriptor(rng, kind_a, m, value_bound)
        tipo_b = _distinto(rng, kind_b, m, value_bound, tipo_a)
        tipos = [0, 1] + [int(t) for t in rng.integers(0, 2, size=n - 2)]
        agentes = tuple(tipo_a if t == 0 else tipo_b for t in tipos)
    else:
        agentes = tuple(
            random_descriptor(rng, mezcla[int(rng.integers(len(mezcla)))], m, value_bound)
            for _ in range(n)
        )

    logger.debug("Instancia generada: semilla=%s n=%s m=%s dos_tipos=%s", seed, n, m, two_types)
    return Instance(num_items=m, agents=agentes)
