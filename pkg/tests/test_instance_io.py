# tests/test_instance_io.py
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from models.allocation import Allocation
from services.generator import generate
from services.instance_io import (
    load_instance, load_json, parse_allocation, parse_certificate, parse_instance, replay_certificate,
    serialize_certificate, serialize_instance, verify_allocation, verify_certificate,
)
from services.solvers import solve
from utils.errors import ArgumentError, InvariantViolationError, MalformedInstanceError
from utils.itemsets import mask_of

from tests.conftest import A, B, C, D, E, F, G, additive_instance, fixture_path


def _instancia(**cambios):
    data = {
        "schema": "efx-instance/1",
        "num_items": 2,
        "agents": [{"kind": "additive", "item_values": [1, 2]}],
    }
    data.update(cambios)
    return json.dumps(data)


# ---------- Instancias ----------

def test_load_example():
    instance = load_instance(fixture_path("ejemplo_tres_agentes.json"))
    assert instance.n == 3
    assert instance.num_items == 7
    assert instance.agents[0].item_values == (1, 2, 3, 7, 0, 0, 0)
    assert instance.item_label(G) == "g"
    assert instance.agent_label(0) == "1"


def test_empty_agents_rejected():
    with pytest.raises(MalformedInstanceError) as exc:
        parse_instance(_instancia(agents=[]))
    assert exc.value.field == "agents"


def test_unknown_schema_rejected():
    with pytest.raises(MalformedInstanceError) as exc:
        parse_instance(_instancia(schema="efx-instance/0"))
    assert exc.value.field == "schema"


def test_descriptor_errors_name_the_agent_field():
    agentes = [{"kind": "additive", "item_values": [1, 2]}, {"kind": "additive", "item_values": [1, -2]}]
    with pytest.raises(MalformedInstanceError) as exc:
        parse_instance(_instancia(agents=agentes))
    assert exc.value.field == "agents[1].item_values[1]"


def test_descriptor_unknown_key():
    with pytest.raises(MalformedInstanceError) as exc:
        parse_instance(_instancia(agents=[{"kind": "additive", "item_values": [1, 2], "weight": 3}]))
    assert exc.value.field == "agents[0]"


def test_item_count_mismatch():
    with pytest.raises(MalformedInstanceError) as exc:
        parse_instance(_instancia(num_items=3))
    assert exc.value.field == "agents[0]"


def test_bad_json_reports_line():
    with pytest.raises(MalformedInstanceError) as exc:
        load_json('{\n  "num_items": 2,\n}')
    assert exc.value.line == 3


def test_single_agent_instance():
    instance = parse_instance(_instancia())
    assert instance.n == 1
    report = solve(instance, "n2")
    assert report.unallocated_count == 0
    assert report.allocation.bundles == (mask_of([0, 1]),)


@pytest.mark.property_based
@given(st.integers(0, 100_000), st.integers(1, 6), st.integers(0, 8), st.booleans())
@settings(max_examples=40, deadline=None)
def test_generated_instances_survive_serialization(seed, n, m, two_types):
    if two_types and (n < 2 or m < 1):
        with pytest.raises(ArgumentError):
            generate(seed, n, m, two_types=two_types)
        return
    instance = generate(seed, n, m, two_types=two_types)
    assert parse_instance(serialize_instance(instance)) == instance


# ---------- Generador ----------

def test_generator_is_deterministic():
    assert generate(42, 4, 6) == generate(42, 4, 6)
    assert generate(42, 4, 6) != generate(43, 4, 6)


def test_generator_two_types_has_exactly_two_descriptors():
    for seed in range(20):
        instance = generate(seed, 5, 4, two_types=True)
        assert len(instance.distinct_descriptors()) == 2


def test_generator_rejects_tables_and_unknown_classes():
    with pytest.raises(ArgumentError):
        generate(0, 2, 2, class_mix=["table"])
    with pytest.raises(ArgumentError):
        generate(0, 2, 2, class_mix=["concave"])


def test_generator_class_mix():
    instance = generate(7, 6, 3, class_mix=["unit_demand"])
    assert all(d.kind.value == "unit_demand" for d in instance.agents)


# ---------- Asignaciones ----------

def test_parse_allocation_forms(ejemplo):
    instance, alloc = ejemplo
    suelta = json.dumps({"bundles": [[A, B, C], [D], [E, F]]})
    assert parse_allocation(instance, suelta) == alloc
    envuelta = json.dumps({"allocation": {"bundles": [[A, B, C], [D], [E, F]], "unallocated": [G]}})
    assert parse_allocation(instance, envuelta) == alloc


def test_parse_allocation_rejects_overlap(ejemplo):
    instance, _ = ejemplo
    with pytest.raises(MalformedInstanceError):
        parse_allocation(instance, json.dumps({"bundles": [[A], [A], []]}))


def test_parse_allocation_rejects_wrong_unallocated(ejemplo):
    instance, _ = ejemplo
    with pytest.raises(MalformedInstanceError) as exc:
        parse_allocation(instance, json.dumps({"bundles": [[A, B, C], [D], [E, F]], "unallocated": []}))
    assert exc.value.field == "unallocated"


def test_verify_allocation_postconditions(ejemplo):
    instance, alloc = ejemplo
    assert verify_allocation(instance, alloc).ok
    assert verify_allocation(instance, alloc, "n2").ok
    resultado = verify_allocation(instance, alloc, "three")
    assert not resultado.ok
    assert resultado.check == "complete"


def test_verify_allocation_reports_strong_envy():
    instance = additive_instance([1, 1, 1], [1, 1, 1])
    alloc = Allocation.from_item_lists(instance, [[], [0, 1, 2]])
    resultado = verify_allocation(instance, alloc)
    assert not resultado.ok
    assert resultado.check == "efx"


def test_verify_allocation_reports_envied_charity():
    instance = additive_instance([5, 1, 1], [1, 1, 1], [1, 1, 1], [1, 1, 1])
    alloc = Allocation.from_item_lists(instance, [[1], [2], [], []])
    resultado = verify_allocation(instance, alloc, "four")
    assert resultado.check == "charity envied"
    assert "four" in str(resultado)


# ---------- Certificados ----------

@pytest.fixture
def certificado(ejemplo):
    instance, _ = ejemplo
    report = solve(instance, "three")
    return instance, json.loads(serialize_certificate(report.certificate)), report


def test_certificate_round_trip(certificado):
    instance, data, report = certificado
    doc = parse_certificate(instance, json.dumps(data))
    assert doc.solver == "three"
    assert len(doc.steps) == report.step_count
    assert replay_certificate(instance, doc) == report.allocation
    assert verify_certificate(instance, doc).ok


def test_tampered_final_is_rejected(certificado):
    instance, data, _ = certificado
    data["final"] = data["initial"]
    resultado = verify_certificate(instance, data)
    assert not resultado.ok
    assert resultado.check == "final"
    with pytest.raises(InvariantViolationError):
        replay_certificate(instance, data)


def test_non_dominating_step_is_rejected(certificado):
    instance, data, _ = certificado
    data["steps"][0]["after"] = data["steps"][0]["before"]
    resultado = verify_certificate(instance, data)
    assert resultado.check == "domination"


def test_broken_chain_is_rejected(certificado):
    instance, data, _ = certificado
    if len(data["steps"]) < 2:
        pytest.skip("la cadena tiene un solo paso")
    data["steps"][1]["before"] = data["initial"]
    assert verify_certificate(instance, data).check == "chain"


def test_certificate_schema_errors(certificado):
    instance, data, _ = certificado
    del data["ordering"]
    assert verify_certificate(instance, data).check == "schema"
    data["schema"] = "otro"
    assert verify_certificate(instance, data).check == "schema"
