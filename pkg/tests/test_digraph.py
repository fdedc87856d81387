from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from byztrim.digraph import (
    Digraph,
    GraphError,
    condensation,
    count_reduced_graphs,
    parse_graph,
    reduced_graphs,
    source_components,
)
from conftest import complete, random_digraph
from oracles import nx_condense


class TestParseGraph:
    def test_directed_cycle(self):
        g = parse_graph('{"n":3,"edges":[[0,1],[1,2],[2,0]]}')
        assert g.n == 3
        assert g.edges == frozenset({(0, 1), (1, 2), (2, 0)})
        assert g.in_nbrs[0] == {2}
        assert g.out_nbrs[0] == {1}

    def test_self_loop_rejected(self):
        with pytest.raises(GraphError, match="self-loop"):
            parse_graph('{"n":2,"edges":[[0,0]]}')

    def test_duplicate_edge_rejected(self):
        with pytest.raises(GraphError, match="duplicate"):
            parse_graph('{"n":2,"edges":[[0,1],[0,1]]}')

    def test_out_of_range_node(self):
        with pytest.raises(GraphError, match="out of range"):
            parse_graph('{"n":2,"edges":[[0,2]]}')

    def test_n_must_be_positive(self):
        with pytest.raises(GraphError):
            parse_graph('{"n":0,"edges":[]}')

    def test_invalid_json(self):
        with pytest.raises(GraphError, match="invalid JSON"):
            parse_graph("{nope")

    def test_malformed_edge(self):
        with pytest.raises(GraphError, match="malformed edge"):
            parse_graph('{"n":2,"edges":[[0]]}')

    def test_fault_bound_metadata(self):
        g = parse_graph('{"n":2,"edges":[[0,1]],"f":1}')
        assert g.f_hint == 1
        assert g.to_dict()["f"] == 1

    def test_roundtrip(self):
        g = complete(4)
        assert parse_graph(json.dumps(g.to_dict())) == g

    def test_neighbour_consistency(self):
        g = random_digraph(6, 0.5, random.Random(3))
        for (i, j) in g.edges:
            assert j in g.out_nbrs[i]
            assert i in g.in_nbrs[j]


class TestCondensation:
    def test_cycle_is_one_component(self, cycle3):
        c = condensation(cycle3)
        assert c.components == (frozenset({0, 1, 2}),)
        assert c.dag_edges == frozenset()

    def test_chain_has_singletons(self, chain3):
        c = condensation(chain3)
        assert c.components == (frozenset({0}), frozenset({1}), frozenset({2}))
        assert c.dag_edges == frozenset({(0, 1), (1, 2)})

    def test_two_two_cycles_joined(self):
        g = Digraph(4, [(0, 1), (1, 0), (2, 3), (3, 2), (1, 2)])
        c = condensation(g)
        assert c.components == (frozenset({0, 1}), frozenset({2, 3}))
        assert c.dag_edges == frozenset({(0, 1)})

    def test_matches_networkx_on_random_graphs(self):
        rng = random.Random(11)
        for _ in range(60):
            g = random_digraph(rng.randrange(1, 9), rng.choice([0.2, 0.4, 0.7]), rng)
            c = condensation(g)
            comps, dag = nx_condense(g)
            assert list(c.components) == comps
            assert set(c.dag_edges) == dag
            assert source_components(c)  # a finite DAG always has a source

    def test_idempotent_on_acyclic_singletons(self):
        # Condensing a condensation DAG (as a plain graph) changes nothing.
        rng = random.Random(5)
        for _ in range(20):
            g = random_digraph(rng.randrange(2, 8), 0.5, rng)
            c = condensation(g)
            dag = Digraph(len(c.components), sorted(c.dag_edges))
            again = condensation(dag)
            assert again.components == tuple(frozenset({i}) for i in range(dag.n))
            assert again.dag_edges == frozenset(dag.edges)


class TestSourceComponents:
    def test_single_component(self, cycle3):
        assert source_components(condensation(cycle3)) == {0}

    def test_chain_source_is_head(self, chain3):
        c = condensation(chain3)
        (src,) = source_components(c)
        assert c.components[src] == frozenset({0})

    def test_disjoint_cycles_are_both_sources(self):
        g = Digraph(4, [(0, 1), (1, 0), (2, 3), (3, 2)])
        assert source_components(condensation(g)) == {0, 1}


class TestReducedGraphs:
    def test_k3_with_one_removed(self):
        g = complete(3)
        rgs = list(reduced_graphs(g, {2}, 1))
        assert len(rgs) == 4
        kept = {rg.kept_edges for rg in rgs}
        assert kept == {
            frozenset({(0, 1), (1, 0)}),
            frozenset({(0, 1)}),
            frozenset({(1, 0)}),
            frozenset(),
        }
        for rg in rgs:
            rg.check_invariants(1)

    def test_first_item_removes_nothing(self):
        g = complete(4)
        first = next(reduced_graphs(g, {3}, 1))
        assert first.kept_edges == frozenset(
            (i, j) for (i, j) in g.edges if i != 3 and j != 3
        )

    def test_f_zero_yields_only_the_graph(self):
        g = random_digraph(5, 0.6, random.Random(2))
        rgs = list(reduced_graphs(g, set(), 0))
        assert len(rgs) == 1
        assert rgs[0].kept_edges == g.edges

    def test_fault_set_larger_than_f(self):
        with pytest.raises(GraphError, match="exceeds"):
            next(reduced_graphs(complete(4), {0, 1}, 1))

    def test_fault_set_cannot_cover_graph(self):
        with pytest.raises(GraphError, match="at least one node"):
            next(reduced_graphs(Digraph(1, []), {0}, 1))

    def test_enumeration_is_deterministic(self):
        g = random_digraph(4, 0.7, random.Random(9))
        a = [rg.kept_edges for rg in reduced_graphs(g, {1}, 1)]
        b = [rg.kept_edges for rg in reduced_graphs(g, {1}, 1)]
        assert a == b

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2 ** 12 - 1), st.integers(0, 2), st.integers(0, 4))
    def test_count_formula(self, bits, f, fnode):
        # Count of distinct reductions = product over surviving nodes of
        # sum_{k<=min(f,d)} C(d,k), checked against actual enumeration.
        pairs = [(i, j) for i in range(4) for j in range(4) if i != j]
        g = Digraph(4, [e for k, e in enumerate(pairs) if bits >> k & 1])
        fault = {fnode} if f >= 1 and fnode < 4 else set()
        rgs = list(reduced_graphs(g, fault, f))
        assert len(rgs) == count_reduced_graphs(g, fault, f)
        assert len(set(rg.kept_edges for rg in rgs)) == len(rgs)
        for rg in rgs:
            rg.check_invariants(f)
