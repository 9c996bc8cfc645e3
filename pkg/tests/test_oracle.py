# tests/test_oracle.py
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from models.allocation import Allocation
from models.valuations import ValuationDescriptor
from services.generator import generate
from services.oracle import (
    OracleBudget, enumerate_efx, enumerate_most_envious, max_subset_of_size, oracle_agrees,
)
from utils.errors import ArgumentError, BudgetExceededError, CapacityError
from utils.itemsets import mask_of

from tests.conftest import A, B, C, G, additive_instance


def test_two_identical_agents_complete_efx_allocations():
    instance = additive_instance([1, 1, 2], [1, 1, 2])
    asignaciones = enumerate_efx(instance, 0)
    assert [a.bundles for a in asignaciones] == [(3, 4), (4, 3)]
    assert all(a.unallocated == 0 for a in asignaciones)


def test_zero_items_single_allocation():
    instance = additive_instance([], [])
    asignaciones = enumerate_efx(instance, 0)
    assert len(asignaciones) == 1
    assert asignaciones[0] == Allocation.empty(instance)


def test_unallocated_bound_widens_enumeration():
    instance = additive_instance([1, 1, 2], [1, 1, 2])
    completas = enumerate_efx(instance, 0)
    con_caridad = enumerate_efx(instance, 1)
    assert len(con_caridad) > len(completas)
    assert all(a.unallocated_count() <= 1 for a in con_caridad)


def test_budget_exceeded():
    instance = additive_instance([1] * 8, [1] * 8, [1] * 8)
    with pytest.raises(BudgetExceededError):
        enumerate_efx(instance, 0, OracleBudget(max_agents=6, max_items=10, max_states=1000))
    with pytest.raises(BudgetExceededError):
        enumerate_efx(instance, 0, OracleBudget(max_agents=2, max_items=10, max_states=10 ** 9))


def test_example_most_envious_pairs(ejemplo):
    _, alloc = ejemplo
    pares = enumerate_most_envious(alloc, alloc.bundles[0] | 1 << G)
    assert (1, mask_of([B, G])) in pares
    assert (2, mask_of([C, G])) in pares
    assert pares == sorted(pares)


def test_most_envious_capacity(ejemplo):
    _, alloc = ejemplo
    with pytest.raises(CapacityError):
        enumerate_most_envious(alloc, (1 << 17) - 1)


def test_max_subset_of_size():
    d = ValuationDescriptor("additive", (5, 1, 3))
    assert max_subset_of_size(d, mask_of([A, B, C]), 2) == mask_of([A, C])
    with pytest.raises(ArgumentError):
        max_subset_of_size(d, mask_of([A]), 2)
    with pytest.raises(CapacityError):
        max_subset_of_size(ValuationDescriptor("additive", (1,) * 13), (1 << 13) - 1, 1)


def test_oracle_agrees_with_example_allocation(ejemplo):
    _, alloc = ejemplo
    assert oracle_agrees(alloc)


@pytest.mark.property_based
@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_four_agents_five_items_admit_efx_with_one_unallocated(seed):
    instance = generate(seed, 4, 5)
    asignaciones = enumerate_efx(instance, 1)
    assert asignaciones
    assert all(a.unallocated_count() <= 1 for a in asignaciones)
