# tests/test_solvers.py
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from models.allocation import Allocation
from models.certificate import StepKind
from services.allocation_core import charity_envied, is_ef, is_efx, potential
from services.champion_graph import build_basic_graph, check_observations, check_parallel_rings, find_good_cycles
from services.generator import generate
from services.instance_io import replay_certificate, verify_certificate
from services.oracle import oracle_agrees
from services.pi_search import apply_pi, find_pi_edge_set, is_pi_edge_set
from services.progress import ProgressStats, progress_step
from services.solvers import (
    charity_n_minus_2_step, choose_solver, parallel_rings_cycle, solve, solve_charity_n_minus_2, solve_four_agents,
    solve_three_agents, solve_two_types,
)
from utils.errors import CertifiedBugError, InvariantViolationError, PreconditionError
from utils.itemsets import mask_of

from tests.conftest import additive_instance


def _cadena_monotona(report):
    ordering = report.certificate.ordering
    valores = [potential(report.certificate.initial, ordering)]
    valores += [potential(step.after, ordering) for step in report.certificate.steps]
    return all(a < b for a, b in zip(valores, valores[1:]))


def test_example_auto_uses_three_agent_solver(ejemplo):
    instance, _ = ejemplo
    report = solve(instance)
    assert report.solver == "three"
    assert report.unallocated_count == 0
    assert is_efx(report.allocation)
    assert verify_certificate(instance, report.certificate).ok
    assert replay_certificate(instance, report.certificate) == report.allocation
    assert _cadena_monotona(report)


def test_every_step_is_verified(ejemplo):
    instance, _ = ejemplo
    report = solve(instance, "three")
    for step in report.certificate.steps:
        assert step.efx_after
        assert step.dominates
        assert isinstance(step.kind, StepKind)


def test_explicit_ordering_is_recorded(ejemplo):
    instance, _ = ejemplo
    report = solve(instance, "three", ordering=(2, 0, 1))
    assert report.certificate.ordering == (2, 0, 1)
    assert verify_certificate(instance, report.certificate).ok


def test_zero_items_gives_empty_certificate():
    instance = additive_instance([], [], [])
    report = solve_three_agents(instance)
    assert report.step_count == 0
    assert report.unallocated_count == 0


# ---------- Precondiciones ----------

def test_three_agent_solver_rejects_other_sizes():
    with pytest.raises(PreconditionError):
        solve_three_agents(additive_instance([1, 2], [2, 1]))


def test_four_agent_solver_rejects_other_sizes(ejemplo):
    instance, _ = ejemplo
    with pytest.raises(PreconditionError):
        solve_four_agents(instance)


def test_two_types_rejects_three_descriptors(ejemplo):
    instance, _ = ejemplo
    with pytest.raises(PreconditionError):
        solve_two_types(instance)


def test_unknown_solver(ejemplo):
    instance, _ = ejemplo
    with pytest.raises(PreconditionError):
        solve(instance, "five")


def test_choose_solver_dispatch():
    assert choose_solver(generate(1, 3, 4)) == "three"
    assert choose_solver(generate(1, 4, 4, class_mix=["additive"])) == "four"
    assert choose_solver(generate(1, 5, 3)) == "n2"
    assert choose_solver(generate(1, 5, 3, two_types=True)) == "twotype"


# ---------- Propiedades sobre instancias generadas ----------

@pytest.mark.property_based
@pytest.mark.slow
@given(st.integers(0, 10_000), st.integers(3, 7))
@settings(max_examples=40, deadline=None)
def test_three_agents_complete_efx(seed, m):
    instance = generate(seed, 3, m)
    report = solve_three_agents(instance)
    assert report.unallocated_count == 0
    assert report.observation_violations == 0
    assert oracle_agrees(report.allocation)
    assert verify_certificate(instance, report.certificate).ok


@pytest.mark.property_based
@pytest.mark.slow
@given(st.integers(0, 10_000), st.integers(5, 8))
@settings(max_examples=40, deadline=None)
def test_four_agents_leave_at_most_one_unenvied_item(seed, m):
    instance = generate(seed, 4, m)
    report = solve_four_agents(instance)
    assert report.unallocated_count <= 1
    assert not charity_envied(report.allocation)
    assert report.envy_free_fallbacks == 0
    assert report.observation_violations == 0
    assert report.fallback_budget_exhausted == 0
    assert verify_certificate(instance, report.certificate).ok


@pytest.mark.property_based
@pytest.mark.slow
@given(st.integers(0, 10_000), st.sampled_from([5, 6]), st.integers(0, 8))
@settings(max_examples=40, deadline=None)
def test_charity_n_minus_2_bound(seed, n, m):
    instance = generate(seed, n, m)
    report = solve_charity_n_minus_2(instance)
    assert report.unallocated_count <= instance.n - 2
    assert not charity_envied(report.allocation)
    assert report.observation_violations == 0
    assert _cadena_monotona(report)


@pytest.mark.property_based
@pytest.mark.slow
@given(st.integers(0, 10_000), st.integers(2, 4), st.integers(1, 6))
@settings(max_examples=40, deadline=None)
def test_two_types_complete_efx(seed, n, m):
    instance = generate(seed, n, m, two_types=True)
    report = solve_two_types(instance)
    assert report.unallocated_count == 0
    assert report.observation_violations == 0
    assert is_efx(report.allocation)
    assert verify_certificate(instance, report.certificate).ok


def test_report_counts_steps_by_kind(ejemplo):
    instance, _ = ejemplo
    report = solve(instance, "three")
    pasos = report.to_dict()["steps_by_kind"]
    assert sum(pasos.values()) == report.step_count
    assert report.charity_steps + report.pi_steps + report.candidate_steps + report.fallback_steps \
        == report.step_count
    assert report.generic_steps == 0


# ---------- Anillos paralelos ----------
# Ítems a0, b0, a1, b1, a2, b2, g, h = 0..7. X_j = {a_j, b_j}, U = {g, h};
# j-1 es el único campeón de j para g y para h.

@pytest.fixture
def anillos_tres():
    instance = additive_instance(
        [10, 10, 12, 1, 1, 1, 9, 9],
        [1, 1, 10, 10, 12, 1, 9, 9],
        [12, 1, 1, 1, 10, 10, 9, 9],
    )
    alloc = Allocation.from_item_lists(instance, [[0, 1], [2, 3], [4, 5]])
    return alloc, build_basic_graph(alloc)


def test_parallel_rings_state(anillos_tres):
    alloc, graph = anillos_tres
    assert is_ef(alloc)
    assert find_pi_edge_set(alloc, graph.edges, basic_only=True) is None
    assert check_parallel_rings(graph) == (0, 1, 2)
    assert find_good_cycles(graph, 6) == [(0, 1, 2)]
    assert check_observations(graph) == []


def test_parallel_rings_cycle_uses_bottom_edge_and_distinct_goods(anillos_tres):
    alloc, graph = anillos_tres
    pi = parallel_rings_cycle(graph, (0, 1, 2))
    (ciclo,) = pi.cycles
    assert [(e.source, e.target) for e in ciclo] == [(0, 1), (1, 2), (2, 0)]
    z, hacia_dos, hacia_cero = ciclo
    assert z.added == mask_of([1])
    assert z.removed == mask_of([3])
    assert hacia_dos.pivot == 7
    assert hacia_cero.pivot == 6
    assert hacia_cero.released == mask_of([1])
    assert is_pi_edge_set(alloc, pi)
    nueva = apply_pi(alloc, pi)
    assert nueva.bundles == (mask_of([1, 2]), mask_of([4, 7]), mask_of([0, 6]))
    assert nueva.unallocated == mask_of([3, 5])
    assert is_ef(nueva)


def test_charity_n_minus_2_step_builds_ring_cycle(anillos_tres):
    alloc, _ = anillos_tres
    stats = ProgressStats()
    step = charity_n_minus_2_step(alloc, (0, 1, 2), stats)
    assert step.kind is StepKind.PI_EDGE_SET
    assert step.pareto_dominates
    assert step.after.unallocated == mask_of([3, 5])
    assert stats.pi_steps == 1
    assert stats.observation_violations == 0


def test_charity_n_minus_2_step_on_two_agent_ring():
    instance = additive_instance([4, 4, 1, 6, 3], [6, 1, 4, 4, 3])
    alloc = Allocation.from_item_lists(instance, [[0, 1], [2, 3]])
    step = charity_n_minus_2_step(alloc, (0, 1))
    assert step.kind is StepKind.PI_EDGE_SET
    assert step.after.bundles == (mask_of([1, 3]), mask_of([0, 4]))
    assert step.after.unallocated == mask_of([2])


def test_parallel_rings_cycle_rejects_state_without_rings(ejemplo):
    _, alloc = ejemplo
    with pytest.raises(CertifiedBugError):
        parallel_rings_cycle(build_basic_graph(alloc), (0, 1, 2))


# ---------- Motor de progreso y casos pequeños ----------

def test_progress_step_resolves_envy_cycle():
    instance = additive_instance([1, 2], [2, 1])
    alloc = Allocation.from_item_lists(instance, [[0], [1]])
    step = progress_step(alloc, (0, 1))
    assert step.kind is StepKind.PI_EDGE_SET
    assert step.after.bundles == (mask_of([1]), mask_of([0]))
    assert step.pareto_dominates


def test_progress_step_fixed_point():
    instance = additive_instance([2, 1], [1, 2])
    alloc = Allocation.from_item_lists(instance, [[0], [1]])
    assert progress_step(alloc, (0, 1)) is None


def test_progress_step_requires_efx():
    instance = additive_instance([1, 1, 1], [1, 1, 1])
    alloc = Allocation.from_item_lists(instance, [[], [0, 1, 2]])
    with pytest.raises(InvariantViolationError):
        progress_step(alloc, (0, 1))


@pytest.mark.property_based
@given(st.integers(0, 10_000), st.integers(0, 6))
@settings(max_examples=20, deadline=None)
def test_two_agents_charity_solver_allocates_everything(seed, m):
    instance = generate(seed, 2, m)
    report = solve_charity_n_minus_2(instance)
    assert report.unallocated_count == 0
    assert oracle_agrees(report.allocation)


def test_three_identical_agents():
    instance = additive_instance([3, 1, 4, 1, 5], [3, 1, 4, 1, 5], [3, 1, 4, 1, 5])
    report = solve_three_agents(instance)
    assert report.unallocated_count == 0
    assert oracle_agrees(report.allocation)


def test_three_agents_single_item():
    report = solve_three_agents(additive_instance([1], [2], [3]))
    assert report.unallocated_count == 0
    assert sum(1 for b in report.allocation.bundles if b) == 1


def test_four_identical_agents():
    instance = additive_instance(*([[2, 3, 1, 4, 2, 1]] * 4))
    report = solve(instance)
    assert report.solver == "four"
    assert report.unallocated_count <= 1
    assert verify_certificate(instance, report.certificate).ok


def test_progress_step_fallback_budget_is_counted():
    instance = additive_instance([2, 1], [1, 2])
    alloc = Allocation.from_item_lists(instance, [[0], [1]])
    stats = ProgressStats()
    assert progress_step(alloc, (0, 1), stats=stats, fallback_max_states=1) is None
    assert stats.fallback_budget_exhausted == 1
    assert stats.fallback_steps == 0


@pytest.mark.parametrize("seed", [3, 17, 42, 99])
def test_two_types_generic_steps_are_counted(seed, monkeypatch):
    monkeypatch.setattr("services.solvers.find_pi_edge_set", lambda *args, **kwargs: None)
    instance = generate(seed, 3, 5, two_types=True)
    report = solve_two_types(instance)
    assert report.unallocated_count == 0
    assert is_efx(report.allocation)
    assert report.charity_steps + report.generic_steps == report.step_count
