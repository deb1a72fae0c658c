"""Edit accounting under a mapping, path extraction/replay, and the oracle."""

import itertools

import numpy as np
import pytest

from gedalign import (
    BudgetExceededError,
    CostModel,
    DUMMY_LABEL,
    ObjectiveParams,
    Permutation,
    adjacency,
    builtin_cost_model,
    build_cost_matrix,
    exact_ged,
    extract_edit_path,
    ged_under_mapping,
    objective,
    pad_pair,
    scale_pair,
)
from gedalign.editpath import EdgeDelete, EdgeInsert, NodeDelete, NodeInsert, NodeSubstitute
from conftest import graph, random_graph

TRIANGLE = graph("xxx", [(0, 1), (1, 2), (0, 2)])
PATH3 = graph("xxx", [(0, 1), (1, 2)])


def replay_edit_path(pair, path, perm):
    """Apply the extracted operations to the first graph, in the second
    graph's index space, and return (labels, edges)."""
    n = pair.order
    labels = {perm.mapping[v]: pair.g1.labels[v] for v in range(n)}
    edges = set()
    for i, j in pair.g1.edges:
        a, b = perm.mapping[i], perm.mapping[j]
        edges.add((min(a, b), max(a, b)))
    for op in path.ops:
        if isinstance(op, NodeInsert):
            labels[op.target] = op.label
        elif isinstance(op, NodeDelete):
            labels[perm.mapping[op.node]] = DUMMY_LABEL
        elif isinstance(op, NodeSubstitute):
            labels[op.target] = op.to_label
        elif isinstance(op, EdgeDelete):
            a = perm.mapping[op.node_a]
            b = perm.mapping[op.node_b]
            edges.remove((min(a, b), max(a, b)))
        elif isinstance(op, EdgeInsert):
            edges.add((op.target_a, op.target_b))
    return labels, edges


class TestGedUnderMapping:
    def test_identity_on_identical_graphs(self):
        pair = pad_pair(TRIANGLE, TRIANGLE)
        for setting in ("case1", "case3"):
            cm = builtin_cost_model(setting)
            assert ged_under_mapping(pair, Permutation.identity(3), cm) == 0.0

    def test_single_edge_deletion(self):
        pair = pad_pair(graph("aa", [(0, 1)]), graph("aa"))
        cm = builtin_cost_model("case3")
        assert ged_under_mapping(pair, Permutation.identity(2), cm) == 1.0

    def test_label_swap_costs_nothing_without_substitution_prices(self):
        g1 = graph("ab", [(0, 1)])
        g2 = graph("ba", [(0, 1)])
        pair = pad_pair(g1, g2)
        assert ged_under_mapping(pair, Permutation.identity(2), builtin_cost_model("case3")) == 0.0

    def test_label_swap_under_ranked_substitution(self):
        # labels "1" and "2" are each other's only candidates, so swapping
        # under the identity costs 1 + 1
        g1 = graph(["1", "2"], [(0, 1)])
        g2 = graph(["2", "1"], [(0, 1)])
        pair = pad_pair(g1, g2)
        cm = builtin_cost_model("case2")
        assert ged_under_mapping(pair, Permutation.identity(2), cm) == 2.0
        swap = Permutation((1, 0))
        assert ged_under_mapping(pair, swap, cm) == 0.0

    def test_order_mismatch_rejected(self):
        pair = pad_pair(TRIANGLE, TRIANGLE)
        with pytest.raises(ValueError, match="order"):
            ged_under_mapping(pair, Permutation.identity(2), builtin_cost_model("case3"))


class TestExtractEditPath:
    def test_empty_path_on_identical_graphs(self):
        pair = pad_pair(TRIANGLE, TRIANGLE)
        path = extract_edit_path(pair, Permutation.identity(3), builtin_cost_model("case3"))
        assert path.ops == ()
        assert path.total_cost == 0.0

    def test_triangle_to_path_is_one_edge_deletion(self):
        cm = builtin_cost_model("case3")
        result = exact_ged(TRIANGLE, PATH3, cm)
        pair = pad_pair(TRIANGLE, PATH3)
        path = extract_edit_path(pair, result.optimal_mapping, cm)
        assert [op.kind for op in path.ops] == ["edge_delete"]
        assert path.total_cost == 1.0

    def test_single_insertion_from_empty(self):
        cm = builtin_cost_model("case1")
        pair = pad_pair(graph(""), graph("a"))
        path = extract_edit_path(pair, Permutation.identity(1), cm)
        assert [op.kind for op in path.ops] == ["node_insert"]
        assert path.ops[0].label == "a"
        assert path.total_cost == 3.0

    def test_total_matches_accounting_bit_for_bit(self, rng):
        settings = [builtin_cost_model("case1"), builtin_cost_model("case3")]
        for _ in range(30):
            g1 = random_graph(rng, int(rng.integers(0, 8)), ("a", "b", "c"))
            g2 = random_graph(rng, int(rng.integers(0, 8)), ("a", "b", "c"))
            pair = pad_pair(g1, g2)
            perm = Permutation(tuple(int(x) for x in rng.permutation(pair.order)))
            for cm in settings:
                path = extract_edit_path(pair, perm, cm)
                assert path.total_cost == ged_under_mapping(pair, perm, cm)

    def test_replay_reproduces_target(self, rng):
        cm = builtin_cost_model("case1")
        for _ in range(25):
            g1 = random_graph(rng, int(rng.integers(0, 7)), ("a", "b"))
            g2 = random_graph(rng, int(rng.integers(0, 7)), ("a", "b"))
            pair = pad_pair(g1, g2)
            perm = Permutation(tuple(int(x) for x in rng.permutation(pair.order)))
            path = extract_edit_path(pair, perm, cm)
            labels, edges = replay_edit_path(pair, path, perm)
            assert labels == {w: pair.g2.labels[w] for w in range(pair.order)}
            assert edges == set(pair.g2.edges)

    def test_json_shape(self):
        cm = builtin_cost_model("case1")
        pair = pad_pair(graph("ab", [(0, 1)]), graph("b"))
        path = extract_edit_path(pair, Permutation.identity(2), cm)
        doc = path.to_json()
        assert set(doc) == {"ops", "total_cost"}
        assert all("kind" in op for op in doc["ops"])
        assert doc["total_cost"] == path.total_cost


class TestExactGed:
    def test_identical_graphs(self):
        res = exact_ged(TRIANGLE, TRIANGLE, builtin_cost_model("case3"))
        assert res.ged == 0.0
        assert res.optimal_mapping == Permutation.identity(3)

    def test_triangle_vs_path(self):
        res = exact_ged(TRIANGLE, PATH3, builtin_cost_model("case3"))
        assert res.ged == 1.0

    def test_edge_deletion_at_squared_cost(self):
        g1 = graph("ab", [(0, 1)])
        g2 = graph("ab")
        res = exact_ged(g1, g2, builtin_cost_model("case1"))
        assert res.ged == 2.0

    def test_empty_pair(self):
        res = exact_ged(graph(""), graph(""), builtin_cost_model("case3"))
        assert res.ged == 0.0
        assert res.optimal_mapping.mapping == ()

    def test_budget_refusal(self):
        big = graph("a" * 12)
        with pytest.raises(BudgetExceededError, match="budget"):
            exact_ged(big, big, builtin_cost_model("case3"))
        small = graph("a" * 7)
        with pytest.raises(BudgetExceededError, match="budget"):
            exact_ged(small, small, builtin_cost_model("case3"), node_budget=6)
        # a matching budget lets the same pair through
        assert exact_ged(small, small, builtin_cost_model("case3"), node_budget=7).ged == 0.0

    def test_minimum_over_all_mappings(self, rng):
        cm = builtin_cost_model("case1")
        for _ in range(10):
            g1 = random_graph(rng, int(rng.integers(1, 5)), ("a", "b"))
            g2 = random_graph(rng, int(rng.integers(1, 5)), ("a", "b"))
            pair = pad_pair(g1, g2)
            res = exact_ged(g1, g2, cm)
            values = [
                ged_under_mapping(pair, Permutation(p), cm)
                for p in itertools.permutations(range(pair.order))
            ]
            assert res.ged == min(values)

    def test_lexicographic_tie_break(self):
        # two isolated equal-label nodes: every mapping costs 0, identity wins
        g = graph("aa")
        res = exact_ged(g, g, builtin_cost_model("case3"))
        assert res.optimal_mapping == Permutation.identity(2)

    def test_deterministic(self, rng):
        g1 = random_graph(rng, 5, ("a", "b"))
        g2 = random_graph(rng, 5, ("a", "b"))
        cm = builtin_cost_model("case1")
        first = exact_ged(g1, g2, cm)
        assert all(exact_ged(g1, g2, cm) == first for _ in range(3))


class TestObjectiveEquivalence:
    def test_edge_count_identity_exhaustive_small_orders(self, rng):
        # free node edits, squared edge cost 2: the raw alignment objective
        # counts edge edits exactly, for every mapping of every small pair
        cm = CostModel(edge_cost_squared=2.0, insert_default=0.0, delete_default=0.0)
        for _ in range(6):
            g1 = random_graph(rng, int(rng.integers(1, 5)), ("a", "b"))
            g2 = random_graph(rng, int(rng.integers(1, 5)), ("a", "b"))
            pair = pad_pair(g1, g2)
            a = adjacency(pair.g1)
            b = adjacency(pair.g2)
            for mapping in itertools.permutations(range(pair.order)):
                perm = Permutation(mapping)
                p = perm.matrix()
                r = a @ p - p @ b
                assert float(np.sum(r * r)) == ged_under_mapping(pair, perm, cm)

    def test_objective_at_permutation_equals_accounting(self, rng):
        # the relaxed objective evaluated at any permutation matrix must agree
        # with the exact edit accounting (mu=1, no regularizer, no penalty)
        params = ObjectiveParams(mu=1.0, lam=0.0, sigma=0.0)
        settings = ["case1", "case2", "case3"]
        for trial in range(30):
            cm = builtin_cost_model(settings[trial % 3])
            g1 = random_graph(rng, int(rng.integers(1, 8)), ("0", "1", "2", "3"))
            g2 = random_graph(rng, int(rng.integers(1, 8)), ("0", "1", "2", "3"))
            pair = pad_pair(g1, g2)
            sp = scale_pair(adjacency(pair.g1), adjacency(pair.g2), cm.edge_cost_squared)
            d = build_cost_matrix(pair, cm)
            perm = Permutation(tuple(int(x) for x in rng.permutation(pair.order)))
            lhs = objective(sp, d, perm.matrix(), params)
            rhs = ged_under_mapping(pair, perm, cm)
            assert abs(lhs - rhs) <= 1e-9
