# services/instance_io.py
"""
Lectura y escritura de instancias, asignaciones y certificados en JSON.

La verificación de certificados usa solo los predicados de
allocation_core; no depende de cómo el solucionador llegó al resultado.
"""
import json
import logging
import os
from dataclasses import dataclass
from typing import Any, List, Mapping, Optional, Tuple, Union

from config.config import Config
from models.allocation import Allocation
from models.certificate import Certificate
from models.instance import AgentOrdering, Instance, validate_ordering
from models.valuations import ValuationDescriptor
from services.allocation_core import charity_envied, dominates, first_efx_violation, is_efx
from utils.errors import EFXError, InvariantViolationError, MalformedInstanceError
from utils.helpers import sanitizar_log_text

logger = logging.getLogger(__name__)

_CLAVES_AGENTE = {"kind", "item_values", "budget"}


# ============================================================================
# JSON
# ============================================================================

def load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedInstanceError(f"JSON inválido: {e.msg}", line=e.lineno)


def _dump(data: Mapping) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def _lista_de_nombres(data: Mapping, clave: str) -> Optional[List[str]]:
    nombres = data.get(clave)
    if nombres is None:
        return None
    if not isinstance(nombres, list) or not all(isinstance(x, str) for x in nombres):
        raise MalformedInstanceError("Se esperaba una lista de textos", field=clave)
    return nombres


def descriptor_from_dict(data: Any, pos: int) -> ValuationDescriptor:
    campo = f"agents[{pos}]"
    if not isinstance(data, dict):
        raise MalformedInstanceError("Cada agente es un objeto con 'kind' e 'item_values'", field=campo)
    sobrantes = set(data) - _CLAVES_AGENTE
    if sobrantes:
        raise MalformedInstanceError(f"Claves desconocidas: {sorted(sobrantes)}", field=campo)
    if "kind" not in data or "item_values" not in data:
        raise MalformedInstanceError("Faltan 'kind' o 'item_values'", field=campo)
    if not isinstance(data["item_values"], list):
        raise MalformedInstanceError("'item_values' debe ser una lista", field=f"{campo}.item_values")
    try:
        return ValuationDescriptor(data["kind"], tuple(data["item_values"]), budget=data.get("budget"))
    except MalformedInstanceError as e:
        raise MalformedInstanceError(e.message, field=f"{campo}.{e.field or 'kind'}")


# ============================================================================
# INSTANCIAS
# ============================================================================

def instance_from_dict(data: Any) -> Instance:
    if not isinstance(data, dict):
        raise MalformedInstanceError("El documento de instancia debe ser un objeto")
    schema = data.get("schema")
    if schema != Config.INSTANCE_SCHEMA_VERSION:
        raise MalformedInstanceError(
            f"Versión de esquema {schema!r} no soportada (se espera {Config.INSTANCE_SCHEMA_VERSION})",
            field="schema",
        )
    num_items = data.get("num_items")
    if not isinstance(num_items, int) or isinstance(num_items, bool):
        raise MalformedInstanceError("'num_items' debe ser un entero", field="num_items")
    agentes = data.get("agents")
    if not isinstance(agentes, list) or not agentes:
        raise MalformedInstanceError("'agents' debe ser una lista no vacía", field="agents")

    descriptores = tuple(descriptor_from_dict(agente, pos) for pos, agente in enumerate(agentes))
    return Instance(
        num_items=num_items,
        agents=descriptores,
        item_names=_lista_de_nombres(data, "item_names"),
        agent_names=_lista_de_nombres(data, "agent_names"),
        ordering=data.get("ordering"),
    )


def instance_to_dict(instance: Instance) -> dict:
    data = {
        "schema": Config.INSTANCE_SCHEMA_VERSION,
        "num_items": instance.num_items,
        "agents": [descriptor.to_dict() for descriptor in instance.agents],
    }
    if instance.item_names is not None:
        data["item_names"] = list(instance.item_names)
    if instance.agent_names is not None:
        data["agent_names"] = list(instance.agent_names)
    if instance.ordering is not None:
        data["ordering"] = list(instance.ordering)
    return data


def parse_instance(text: str) -> Instance:
    return instance_from_dict(load_json(text))


def serialize_instance(instance: Instance) -> str:
    return _dump(instance_to_dict(instance))


def load_instance(path: str) -> Instance:
    with open(path, encoding="utf-8") as f:
        instance = parse_instance(f.read())
    logger.debug("Instancia cargada de %s: n=%s m=%s", sanitizar_log_text(os.path.basename(path)),
                 instance.n, instance.num_items)
    return instance


# ============================================================================
# ASIGNACIONES
# ============================================================================

def parse_allocation(instance: Instance, text: str) -> Allocation:
    """
    Acepta un objeto con 'bundles', un documento de instancia con la clave
    'allocation' o un certificado (se toma 'final').
    """
    data = load_json(text)
    if not isinstance(data, dict):
        raise MalformedInstanceError("La asignación debe ser un objeto")
    if "bundles" in data:
        return Allocation.from_dict(instance, data)
    if "allocation" in data:
        return Allocation.from_dict(instance, data["allocation"])
    if "final" in data:
        return Allocation.from_dict(instance, data["final"])
    raise MalformedInstanceError("No se encontró una asignación en el documento", field="bundles")


def load_fixture(path: str) -> Tuple[Instance, Optional[Allocation]]:
    """Instancia y, si el documento la trae, su asignación de ejemplo"""
    with open(path, encoding="utf-8") as f:
        data = load_json(f.read())
    instance = instance_from_dict({k: v for k, v in data.items() if k != "allocation"})
    allocation = Allocation.from_dict(instance, data["allocation"]) if "allocation" in data else None
    return instance, allocation


# ============================================================================
# CERTIFICADOS
# ============================================================================

@dataclass(frozen=True)
class CertificateStep:
    kind: str
    before: Allocation
    after: Allocation
    construction: Optional[str] = None


@dataclass(frozen=True)
class CertificateDocument:
    solver: str
    ordering: AgentOrdering
    initial: Allocation
    steps: Tuple[CertificateStep, ...]
    final: Allocation


def serialize_certificate(certificate: Certificate) -> str:
    return _dump(certificate.to_dict())


def certificate_from_dict(instance: Instance, data: Any) -> CertificateDocument:
    if not isinstance(data, dict):
        raise MalformedInstanceError("El certificado debe ser un objeto")
    if data.get("schema") != Config.CERTIFICATE_SCHEMA_VERSION:
        raise MalformedInstanceError("Versión de esquema de certificado no soportada", field="schema")
    for clave in ("solver", "ordering", "initial", "steps", "final"):
        if clave not in data:
            raise MalformedInstanceError("Falta un campo obligatorio del certificado", field=clave)
    if not isinstance(data["steps"], list):
        raise MalformedInstanceError("'steps' debe ser una lista", field="steps")

    pasos = []
    for pos, paso in enumerate(data["steps"]):
        if not isinstance(paso, dict) or "before" not in paso or "after" not in paso:
            raise MalformedInstanceError("Paso sin 'before'/'after'", field=f"steps[{pos}]")
        pasos.append(CertificateStep(
            kind=str(paso.get("kind", "")),
            before=Allocation.from_dict(instance, paso["before"]),
            after=Allocation.from_dict(instance, paso["after"]),
            construction=paso.get("construction"),
        ))
    return CertificateDocument(
        solver=str(data["solver"]),
        ordering=validate_ordering(data["ordering"], instance.n),
        initial=Allocation.from_dict(instance, data["initial"]),
        steps=tuple(pasos),
        final=Allocation.from_dict(instance, data["final"]),
    )


def parse_certificate(instance: Instance, text: str) -> CertificateDocument:
    return certificate_from_dict(instance, load_json(text))


def _documento(instance: Instance, certificate: Union[Certificate, CertificateDocument, Mapping]) -> CertificateDocument:
    if isinstance(certificate, CertificateDocument):
        return certificate
    if isinstance(certificate, Certificate):
        return certificate_from_dict(instance, certificate.to_dict())
    return certificate_from_dict(instance, certificate)


def replay_certificate(instance: Instance, certificate) -> Allocation:
    """Recorre la cadena de pasos y devuelve la asignación final derivada"""
    doc = _documento(instance, certificate)
    actual = doc.initial
    for pos, paso in enumerate(doc.steps, start=1):
        if paso.before != actual:
            raise InvariantViolationError(f"El paso {pos} no parte de la asignación del paso anterior")
        actual = paso.after
    if actual != doc.final:
        raise InvariantViolationError("La asignación final no coincide con el último paso")
    return actual


# ============================================================================
# VERIFICACIÓN
# ============================================================================

@dataclass(frozen=True)
class VerificationResult:
    ok: bool
    check: Optional[str] = None
    message: Optional[str] = None

    def __str__(self):
        if self.ok:
            return "OK"
        return f"{self.check}: {self.message}"


def _fallo(check: str, message: str) -> VerificationResult:
    logger.warning("[WARN] Verificación fallida: %s: %s", check, message)
    return VerificationResult(False, check, message)


def _verificar_efx(alloc: Allocation, donde: str) -> Optional[VerificationResult]:
    violacion = first_efx_violation(alloc)
    if violacion is None:
        return None
    i, j = violacion
    instance = alloc.instance
    return _fallo("efx", f"{donde}: el agente {instance.agent_label(i)} envidia fuertemente "
                         f"el bundle del agente {instance.agent_label(j)}")


def postcondition_failure(alloc: Allocation, solver: Optional[str]) -> Optional[VerificationResult]:
    """Cota de ítems sin asignar y caridad sin envidia según el solucionador"""
    if solver is None:
        return None
    n = alloc.n
    sin_asignar = alloc.unallocated_count()
    if solver in ("three", "twotype"):
        if sin_asignar:
            return _fallo("complete", f"quedan {sin_asignar} ítems sin asignar; el resultado debe ser completo")
        return None
    cota = 1 if solver == "four" else max(n - 2, 0)
    if charity_envied(alloc):
        return _fallo("charity envied", f"viola la postcondición de caridad del solucionador {solver}")
    if sin_asignar > cota:
        return _fallo("unallocated bound", f"{sin_asignar} ítems sin asignar exceden la cota {cota}")
    return None


def verify_allocation(instance: Instance, alloc: Allocation, solver: Optional[str] = None) -> VerificationResult:
    return (_verificar_efx(alloc, "asignación")
            or postcondition_failure(alloc, solver)
            or VerificationResult(True))


def verify_certificate(instance: Instance, certificate) -> VerificationResult:
    """
    Revisa la cadena completa y devuelve la primera verificación fallida:
    inicio vacío, encadenamiento, EFX y dominancia en cada paso, final
    coincidente y postcondición del solucionador.
    """
    try:
        doc = _documento(instance, certificate)
    except EFXError as e:
        return _fallo("schema", str(e))

    if doc.initial != Allocation.empty(instance):
        return _fallo("initial", "el certificado no parte de la asignación vacía")
    actual = doc.initial
    for pos, paso in enumerate(doc.steps, start=1):
        if paso.before != actual:
            return _fallo("chain", f"el paso {pos} no parte de la asignación del paso anterior")
        fallo = _verificar_efx(paso.after, f"paso {pos}")
        if fallo:
            return fallo
        if not dominates(paso.after, paso.before, doc.ordering):
            return _fallo("domination", f"el paso {pos} no domina a su predecesor en el orden {list(doc.ordering)}")
        actual = paso.after
    if actual != doc.final:
        return _fallo("final", "la asignación final no coincide con el último paso")
    if not is_efx(doc.final):
        return _verificar_efx(doc.final, "final")
    return postcondition_failure(doc.final, doc.solver) or VerificationResult(True)


