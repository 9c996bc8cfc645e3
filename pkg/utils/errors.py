# utils/errors.py
"""
Jerarquía de excepciones del solucionador EFX.

Todas derivan de EFXError para que la CLI pueda convertirlas en un código de
salida distinto de cero con un mensaje de una línea.
"""


class EFXError(Exception):
    """Error base del proyecto"""


class MalformedInstanceError(EFXError, ValueError):
    """Instancia o descriptor de valoración mal formado"""

    def __init__(self, message, field=None, line=None):
        self.message = message
        self.field = field
        self.line = line
        detalle = message
        if field:
            detalle = f"{detalle} (campo: {field})"
        if line is not None:
            detalle = f"{detalle} (línea {line})"
        super().__init__(detalle)


class UnsupportedValuationError(EFXError, ValueError):
    """Valoración sin proxy no degenerado y cancelable conocido"""


class CapacityError(EFXError, ValueError):
    """El tamaño pedido excede lo que se puede verificar exhaustivamente"""


class ArgumentError(EFXError, ValueError):
    """Argumentos que violan la precondición de una operación"""


class PreconditionError(EFXError, ValueError):
    """Precondición de un solucionador u operación no satisfecha"""


class BudgetExceededError(EFXError):
    """Se agotó el presupuesto de enumeración"""


class InvariantViolationError(EFXError):
    """Una verificación posterior falló: el resultado no es confiable"""


class CertifiedBugError(InvariantViolationError):
    """
    Falló una aserción estructural que siempre debe cumplirse. Indica un error en
    la implementación (o en la instancia), nunca una situación esperada.
    """

    def __init__(self, check, message):
        self.check = check
        super().__init__(f"{check}: {message}")


__all__ = [
    'EFXError', 'MalformedInstanceError', 'UnsupportedValuationError',
    'CapacityError', 'ArgumentError', 'PreconditionError',
    'BudgetExceededError', 'InvariantViolationError', 'CertifiedBugError',
]
