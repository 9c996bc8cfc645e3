# tests/test_champion_graph.py
import pytest

from models.allocation import Allocation
from services.allocation_core import is_ef, is_efx, pareto_dominates
from services.champion_graph import (
    EdgeKind, build_basic_graph, candidate_edges, check_observations, check_parallel_rings, discover_bottom_edges,
    edge_is_valid, export_dot, find_good_cycles, generalized_edge, generalized_edges, is_good_cycle, rotate_cycle,
)
from services.pi_search import apply_pi, find_pi_edge_set
from utils.errors import ArgumentError, CertifiedBugError
from utils.itemsets import mask_of

from tests.conftest import A, B, C, D, E, F, G, additive_instance

EJEMPLO_DOT = """digraph champion_graph {
  "1" [label="1: {a,b,c}"];
  "2" [label="2: {d}"];
  "3" [label="3: {e,f}"];
  "1" -> "2" [style=solid];
  "1" -> "2" [style=dashed, label="g"];
  "2" -> "1" [style=dashed, label="g"];
  "2" -> "3" [style=dashed, label="g"];
  "3" -> "1" [style=dashed, label="g"];
  "2" -> "3" [style=dotted, label="{a,b}|{e}"];
}
"""


def _pares(edges):
    return {(e.source, e.target) for e in edges}


def test_example_envy_edge(ejemplo):
    _, alloc = ejemplo
    graph = build_basic_graph(alloc)
    assert _pares(graph.envy_edges()) == {(0, 1)}


def test_example_g_champion_edges(ejemplo):
    _, alloc = ejemplo
    graph = build_basic_graph(alloc)
    assert _pares(graph.g_edges(G)) == {(0, 1), (1, 0), (2, 0), (1, 2)}
    assert graph.champions(0, G) == (1, 2)
    assert graph.champions(1, G) == (0,)
    assert graph.champions(2, G) == (1,)


def test_example_g_edge_discards(ejemplo):
    _, alloc = ejemplo
    graph = build_basic_graph(alloc)
    por_par = {(e.source, e.target): e for e in graph.g_edges(G)}
    assert por_par[(0, 1)].discard == mask_of([G])
    assert por_par[(1, 0)].received == mask_of([B, G])
    assert por_par[(2, 0)].received == mask_of([C, G])
    assert por_par[(1, 2)].received == mask_of([F, G])
    assert por_par[(1, 2)].discard == mask_of([E])


def test_example_decompositions(ejemplo):
    _, alloc = ejemplo
    graph = build_basic_graph(alloc)
    d = graph.decomposition(1, 0, G)
    assert d.proper
    assert d.top == mask_of([B])
    assert d.bottom == mask_of([A, C])
    assert not graph.decomposition(0, 1, G).proper


def test_example_generalized_edge(ejemplo):
    _, alloc = ejemplo
    edge = generalized_edge(alloc, 2, mask_of([A, B]), mask_of([E]))
    assert edge.source == 1
    assert edge.kind is EdgeKind.GENERALIZED
    assert edge.received == mask_of([A, B, F])
    assert edge.released == mask_of([E])
    assert edge_is_valid(alloc, edge)


def test_generalized_edge_preconditions(ejemplo):
    _, alloc = ejemplo
    with pytest.raises(ArgumentError):
        generalized_edge(alloc, 2, mask_of([E]), 0)
    with pytest.raises(ArgumentError):
        generalized_edge(alloc, 2, mask_of([A]), mask_of([D]))
    with pytest.raises(ArgumentError):
        generalized_edge(alloc, 5, mask_of([A]), 0)


def test_example_has_no_good_cycles(ejemplo):
    _, alloc = ejemplo
    graph = build_basic_graph(alloc)
    assert find_good_cycles(graph, G) == []


def test_example_observations_hold(ejemplo):
    _, alloc = ejemplo
    graph = build_basic_graph(alloc)
    assert check_observations(graph, strict=True) == []


def test_example_dot_export(ejemplo):
    _, alloc = ejemplo
    graph = build_basic_graph(alloc)
    extra = generalized_edges(graph, 2, mask_of([A, B]), mask_of([E]))
    assert export_dot(graph, list(graph.edges) + extra) == EJEMPLO_DOT


def test_rotate_cycle():
    assert rotate_cycle((2, 0, 1)) == (0, 1, 2)
    assert rotate_cycle([3, 1]) == (1, 3)


def test_parallel_rings_rejects_envy(ejemplo):
    _, alloc = ejemplo
    with pytest.raises(CertifiedBugError) as exc:
        check_parallel_rings(build_basic_graph(alloc))
    assert exc.value.check == "parallel_rings"


# ---------- Ciclo bueno de dos agentes ----------
# Ítems a, d, b, c, g = 0..4. X_1 = {a,d}, X_2 = {b,c}, U = {g}; sin envidia.

@pytest.fixture
def ciclo_bueno():
    instance = additive_instance([4, 4, 1, 6, 3], [6, 1, 4, 4, 3])
    alloc = Allocation.from_item_lists(instance, [[0, 1], [2, 3]])
    return alloc, build_basic_graph(alloc)


def test_two_cycle_of_g_edges_is_good(ciclo_bueno):
    alloc, graph = ciclo_bueno
    g = 4
    assert is_ef(alloc)
    assert graph.champions(0, g) == (1,)
    assert graph.champions(1, g) == (0,)
    assert find_good_cycles(graph, g) == [(0, 1)]
    assert is_good_cycle(graph, (1, 0), g)


def test_discover_bottom_edge_on_good_cycle(ciclo_bueno):
    alloc, graph = ciclo_bueno
    resultado = discover_bottom_edges(graph, (0, 1), 0, 4)
    assert not resultado.external
    edge = resultado.edge
    assert (edge.source, edge.target) == (0, 1)
    assert edge.added == mask_of([1])
    assert edge.removed == mask_of([2])
    assert edge.received == mask_of([1, 3])
    assert edge_is_valid(alloc, edge)


def test_discover_bottom_edge_requires_agent_on_cycle(ciclo_bueno):
    _, graph = ciclo_bueno
    with pytest.raises(ArgumentError):
        discover_bottom_edges(graph, (0, 1), 2, 4)


def test_good_cycle_yields_pareto_improvement(ciclo_bueno):
    alloc, graph = ciclo_bueno
    assert find_pi_edge_set(alloc, graph.edges, basic_only=True) is None
    pi = find_pi_edge_set(alloc, candidate_edges(graph))
    assert pi is not None
    nueva = apply_pi(alloc, pi)
    assert is_efx(nueva)
    assert pareto_dominates(nueva, alloc)


def test_two_agent_good_cycle_is_a_parallel_ring(ciclo_bueno):
    _, graph = ciclo_bueno
    assert check_parallel_rings(graph) == (0, 1)
    assert check_observations(graph) == []
