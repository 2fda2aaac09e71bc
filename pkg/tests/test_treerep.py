from itertools import permutations

import numpy as np
import pytest

from biasedperm.errors import ValidationError
from biasedperm import treerep
from biasedperm.kernels import transitions_mtree

from conftest import EXAMPLE_TREE, random_league_tree


class TestParse:
    def test_example_tree(self, example_tree):
        assert example_tree.n == 7
        assert set(example_tree.nodes_by_name) == {"A", "B", "C"}

    def test_unary_contraction(self):
        tree = treerep.parse_tree({
            "node": "R",
            "children": [{"node": "U", "children": [{"node": "S",
                          "children": [1, 2], "q": {"(1,2)": "0.7"}}]}, 3],
            "q": {"(1,2)": "0.8"},
        })
        assert set(tree.nodes_by_name) == {"R", "S"}
        assert treerep.induced_probabilities(tree).prob(1, 3) == 0.8

    def test_unary_with_q_rejected(self):
        with pytest.raises(ValidationError, match="unary"):
            treerep.parse_tree({"node": "R", "children": [
                {"node": "U", "children": [1], "q": {"(1,1)": "0.6"}}, 2],
                "q": {"(1,2)": "0.8"}})

    def test_unsorted_leaves_rejected(self):
        with pytest.raises(ValidationError, match="sorted"):
            treerep.parse_tree({"node": "R", "children": [2, 1],
                                "q": {"(1,2)": "0.7"}})

    def test_wrong_leaf_labels_rejected(self):
        with pytest.raises(ValidationError, match="1..n"):
            treerep.parse_tree({"node": "R", "children": [1, 3],
                                "q": {"(1,2)": "0.7"}})

    def test_missing_q_rejected(self):
        with pytest.raises(ValidationError, match="needs q"):
            treerep.parse_tree({"node": "R", "children": [1, 2, 3],
                                "q": {"(1,2)": "0.7"}})

    def test_q_out_of_range_rejected(self):
        with pytest.raises(ValidationError):
            treerep.parse_tree({"node": "R", "children": [1, 2],
                                "q": {"(1,2)": "0.5"}})


class TestInducedProbabilities:
    def test_example_values(self, example_tree):
        ps = treerep.induced_probabilities(example_tree)
        assert ps.prob(2, 6) == 0.7
        assert ps.prob(5, 6) == 0.9
        assert ps.prob(6, 2) == pytest.approx(0.3)
        assert ps.provenance == "league-tree"

    def test_star_tree_constant(self):
        tree = treerep.parse_tree({
            "node": "R", "children": [1, 2, 3],
            "q": {"(1,2)": "0.8", "(1,3)": "0.8", "(2,3)": "0.8"}})
        ps = treerep.induced_probabilities(tree)
        for i in range(1, 4):
            for j in range(i + 1, 4):
                assert ps.prob(i, j) == 0.8


class TestTreeStrings:
    def test_worked_example(self, example_tree):
        strings = treerep.permutation_to_tree_strings((6, 1, 4, 3, 2, 7, 5),
                                                      example_tree)
        assert strings["A"] == (3, 1, 2, 1, 1, 4, 3)
        assert strings["B"] == (1, 3, 2)
        assert strings["C"] == (2, 1)

    def test_identity_sorted(self, example_tree):
        strings = treerep.permutation_to_tree_strings(tuple(range(1, 8)),
                                                      example_tree)
        for s in strings.values():
            assert list(s) == sorted(s)

    def test_reverse_on_star(self):
        tree = treerep.parse_tree({
            "node": "R", "children": [1, 2, 3, 4],
            "q": {f"({a},{b})": "0.8" for a in range(1, 5)
                  for b in range(a + 1, 5)}})
        fwd = treerep.permutation_to_tree_strings((1, 2, 3, 4), tree)["R"]
        rev = treerep.permutation_to_tree_strings((4, 3, 2, 1), tree)["R"]
        assert rev == tuple(reversed(fwd))

    def test_worked_round_trip(self, example_tree):
        sigma = (6, 1, 4, 3, 2, 7, 5)
        strings = treerep.permutation_to_tree_strings(sigma, example_tree)
        assert treerep.tree_strings_to_permutation(strings, example_tree) == sigma

    def test_sorted_strings_give_identity(self, example_tree):
        strings = treerep.permutation_to_tree_strings(tuple(range(1, 8)),
                                                      example_tree)
        assert treerep.tree_strings_to_permutation(strings, example_tree) == \
            tuple(range(1, 8))

    def test_exhaustive_round_trip_random_tree(self):
        tree = random_league_tree(6, np.random.default_rng(17), max_degree=3)
        for sigma in permutations(range(1, 7)):
            strings = treerep.permutation_to_tree_strings(sigma, tree)
            assert treerep.tree_strings_to_permutation(strings, tree) == sigma

    def test_count_mismatch_rejected(self, example_tree):
        strings = treerep.permutation_to_tree_strings(tuple(range(1, 8)),
                                                      example_tree)
        bad = dict(strings, C=(1, 1))
        with pytest.raises(ValidationError):
            treerep.tree_strings_to_permutation(bad, example_tree)


class TestLocality:
    def test_moves_touch_only_the_ancestor_string(self):
        # every legal state-changing tree move edits exactly one node's
        # string, by an adjacent transposition of two distinct symbols
        rng = np.random.default_rng(29)
        for trial in range(3):
            n = 5
            tree = random_league_tree(n, rng, max_degree=3)
            for sigma in permutations(range(1, n + 1)):
                before = treerep.permutation_to_tree_strings(sigma, tree)
                for target in transitions_mtree(sigma, tree):
                    if target == sigma:
                        continue
                    moved = [x for x in range(1, n + 1)
                             if sigma.index(x) != target.index(x)]
                    node, _, _ = tree.lca(*sorted(moved))
                    after = treerep.permutation_to_tree_strings(target, tree)
                    for name in before:
                        if name == node.name:
                            assert before[name] != after[name]
                            _assert_adjacent_swap(before[name], after[name])
                        else:
                            assert before[name] == after[name]


def _assert_adjacent_swap(a, b):
    diffs = [k for k in range(len(a)) if a[k] != b[k]]
    assert len(diffs) == 2
    assert diffs[1] == diffs[0] + 1
    assert a[diffs[0]] == b[diffs[1]] and a[diffs[1]] == b[diffs[0]]
    assert a[diffs[0]] != a[diffs[1]]
