"""Ordered league trees and the permutation <-> tree-strings bijection.

A league tree is an ordered tree whose leaves are 1..n sorted left to
right.  The children of an internal node v are labeled 1..deg(v) by their
position, and v carries one probability q[(a, b)] in (1/2, 1) for every
child pair a < b.  The pairwise probability of two elements is the q value
at their lowest common ancestor, indexed by the two child branches the
elements descend through.

The tree-strings representation records, for each internal node, the order
in which the permutation visits the node's leaf descendants, written as
child labels.  Jointly over all internal nodes this is a bijection with
permutations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .model import ProbabilitySet, _parse_pair_key, parse_probability


@dataclass
class TreeNode:
    name: str
    children: list  # TreeNode or int (leaf label)
    q: dict  # (a, b) 1-based child labels, a < b -> float in (1/2, 1)


class LeagueTree:
    """Parsed, validated, contraction-normalized league tree."""

    def __init__(self, root: TreeNode):
        self.root = root
        self.internal_nodes: list[TreeNode] = []
        self._leafsets: dict[int, list[frozenset]] = {}  # id(node) -> per-child leaf sets
        self._collect(root)
        leaves = self._leafset(root)
        n = len(leaves)
        if leaves != frozenset(range(1, n + 1)):
            raise ValidationError(f"leaves must be exactly 1..n, got {sorted(leaves)}")
        self.n = n
        names = [v.name for v in self.internal_nodes]
        if len(set(names)) != len(names):
            raise ValidationError(f"duplicate internal node names in {names}")
        self.nodes_by_name = {v.name: v for v in self.internal_nodes}
        # sorted left-to-right <=> each node's child leaf ranges are increasing
        for v in self.internal_nodes:
            flat = []
            for child_set in self._leafsets[id(v)]:
                flat.extend(sorted(child_set))
            if flat != sorted(flat):
                raise ValidationError(
                    f"leaves under node {v.name!r} are not sorted left to right"
                )
        # leaf -> (ancestor node, child label) chain for LCA lookups
        self._branch: dict[int, dict[int, int]] = {x: {} for x in range(1, n + 1)}
        for v in self.internal_nodes:
            for label, child_set in enumerate(self._leafsets[id(v)], start=1):
                for x in child_set:
                    self._branch[x][id(v)] = label
        self._by_id = {id(v): v for v in self.internal_nodes}
        self._full_leafset = {id(v): self._leafset(v) for v in self.internal_nodes}
        self._lca_cache: dict[tuple[int, int], tuple] = {}

    def _collect(self, node: TreeNode):
        self.internal_nodes.append(node)
        sets = []
        for child in node.children:
            if isinstance(child, TreeNode):
                self._collect(child)
                sets.append(self._leafset(child))
            else:
                sets.append(frozenset([child]))
        self._leafsets[id(node)] = sets

    def _leafset(self, node: TreeNode) -> frozenset:
        out = set()
        for s in self._leafsets[id(node)]:
            out |= s
        return frozenset(out)

    def leaf_descendants(self, node: TreeNode) -> frozenset:
        return self._full_leafset[id(node)]

    def child_label_of(self, node: TreeNode, leaf: int) -> int:
        return self._branch[leaf][id(node)]

    def lca(self, i: int, j: int) -> tuple[TreeNode, int, int]:
        """Lowest common ancestor of leaves i != j and their child branches."""
        if i == j:
            raise ValidationError("lca needs two distinct leaves")
        cached = self._lca_cache.get((i, j))
        if cached is not None:
            return cached
        # the lca is the unique common ancestor at which the branches differ
        best = None
        for node_id in set(self._branch[i]) & set(self._branch[j]):
            if self._branch[i][node_id] != self._branch[j][node_id]:
                node = self._by_id[node_id]
                if best is None or len(self._full_leafset[node_id]) < len(
                        self._full_leafset[id(best)]):
                    best = node
        result = (best, self._branch[i][id(best)], self._branch[j][id(best)])
        self._lca_cache[(i, j)] = result
        return result


def parse_tree(obj) -> LeagueTree:
    """Parse the JSON tree form into a validated LeagueTree.

    Format: {"node": "A", "children": [{...}, 4, {...}, 7],
             "q": {"(1,2)": "0.6", ...}} with leaves as bare integers and
    probabilities as decimal strings.  Unary internal nodes are accepted
    and contracted away; they may not carry q values.
    """
    root = _parse_node(obj)
    if not isinstance(root, TreeNode):
        raise ValidationError("tree must have at least one internal node")
    return LeagueTree(root)


def _parse_node(obj):
    if isinstance(obj, int):
        return obj
    if not isinstance(obj, dict):
        raise ValidationError(f"tree node must be an object or a leaf integer, got {obj!r}")
    extra = set(obj) - {"node", "children", "q"}
    if extra:
        raise ValidationError(f"unknown tree node fields: {sorted(extra)}")
    name = obj.get("node")
    if not isinstance(name, str) or not name:
        raise ValidationError("internal tree nodes need a nonempty \"node\" name")
    children_raw = obj.get("children")
    if not isinstance(children_raw, list) or not children_raw:
        raise ValidationError(f"node {name!r} needs a nonempty children list")
    children = [_parse_node(c) for c in children_raw]
    q_raw = obj.get("q", {})
    if len(children) == 1:
        if q_raw:
            raise ValidationError(f"unary node {name!r} may not carry q values")
        return children[0]  # contraction
    deg = len(children)
    wanted = {(a, b) for a in range(1, deg + 1) for b in range(a + 1, deg + 1)}
    q = {}
    for key, val in q_raw.items():
        pair = _parse_pair_key(key)
        if pair not in wanted:
            raise ValidationError(f"node {name!r}: q key {key!r} is not a child pair")
        v = parse_probability(val) if isinstance(val, str) else float(val)
        if not 0.5 < v < 1.0:
            raise ValidationError(
                f"node {name!r}: q{pair}={v} must lie strictly in (1/2, 1)"
            )
        q[pair] = v
    if set(q) != wanted:
        raise ValidationError(
            f"node {name!r} of degree {deg} needs q for the pairs {sorted(wanted)}"
        )
    return TreeNode(name=name, children=children, q=q)


def induced_probabilities(tree: LeagueTree) -> ProbabilitySet:
    """Pairwise matrix with p[i][j] = q at the lowest common ancestor of i, j."""
    n = tree.n
    p = np.full((n, n), np.nan)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            node, a, b = tree.lca(i, j)
            v = node.q[(a, b)] if a < b else 1.0 - node.q[(b, a)]
            p[i - 1, j - 1] = v
            p[j - 1, i - 1] = 1.0 - v
    return ProbabilitySet(n=n, p=p, provenance="league-tree")


def permutation_to_tree_strings(sigma, tree: LeagueTree) -> dict[str, tuple[int, ...]]:
    """Per-node child-label strings read off in permutation order."""
    if sorted(sigma) != list(range(1, tree.n + 1)):
        raise ValidationError(f"{sigma} is not a permutation of 1..{tree.n}")
    strings: dict[str, tuple[int, ...]] = {}
    for v in tree.internal_nodes:
        descendants = tree.leaf_descendants(v)
        strings[v.name] = tuple(
            tree.child_label_of(v, x) for x in sigma if x in descendants
        )
    return strings


def tree_strings_to_permutation(strings: dict, tree: LeagueTree) -> tuple:
    """Reconstruct the permutation by bottom-up interleaving.

    Each node merges its children's permutation strings in the relative
    order its tree string dictates, preserving within-child order; the
    root's merged string is the permutation.
    """
    def merge(node) -> tuple:
        if isinstance(node, int):
            return (node,)
        child_strings = [list(merge(c)) for c in node.children]
        s = strings.get(node.name)
        if s is None:
            raise ValidationError(f"missing tree string for node {node.name!r}")
        counts = [len(cs) for cs in child_strings]
        seen = [0] * len(child_strings)
        out = []
        for label in s:
            if not 1 <= label <= len(child_strings):
                raise ValidationError(
                    f"node {node.name!r}: label {label} outside 1..{len(child_strings)}"
                )
            idx = label - 1
            if seen[idx] >= counts[idx]:
                raise ValidationError(
                    f"node {node.name!r}: label {label} appears more often than "
                    f"child {label} has leaves"
                )
            out.append(child_strings[idx][seen[idx]])
            seen[idx] += 1
        if seen != counts:
            raise ValidationError(
                f"node {node.name!r}: tree string length {len(s)} does not cover "
                f"all {sum(counts)} leaf descendants"
            )
        return tuple(out)

    return merge(tree.root)
