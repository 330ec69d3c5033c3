"""
Full k-ary trees recording the recursion of the adaptive trapezoidal method.

A node is labelled (p, q): the p-th possible node at depth q. Node (p, q) covers
the interval [a + (b-a)(p-1)/k^q, a + (b-a)p/k^q] and its r-th child is
(k(p-1)+r, q+1), r = 1..k.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple

from scipy.optimize import brentq
from scipy.special import gammaln

from ..exceptions import InvalidInputError

logger = logging.getLogger(__name__)

Node = Tuple[int, int]

ROOT: Node = (1, 0)

# Above this inner-node count callers working in probabilities should use log_catalan_k
EXACT_CATALAN_LIMIT = 64


def children_of(node: Node, k: int) -> List[Node]:
    """Labels of the k children of a node, left to right."""
    p, q = node
    return [(k * (p - 1) + r, q + 1) for r in range(1, k + 1)]


def parent_of(node: Node, k: int) -> Optional[Node]:
    p, q = node
    if q == 0:
        return None
    return ((p - 1) // k + 1, q - 1)


def node_interval(node: Node, a: float, b: float, k: int) -> Tuple[float, float]:
    """Endpoints of the sub-interval of [a, b] covered by a node."""
    p, q = node
    width = k**q
    return a + (b - a) * (p - 1) / width, a + (b - a) * p / width


@dataclass(frozen=True)
class FullKAryTree:
    """A finite full k-ary tree stored as its set of node labels."""

    k: int
    nodes: FrozenSet[Node] = field(default_factory=lambda: frozenset([ROOT]))

    def __post_init__(self):
        if self.k < 2:
            raise InvalidInputError(f"k must be >= 2, got {self.k}")
        if ROOT not in self.nodes:
            raise InvalidInputError("tree must contain the root (1, 0)")
        for node in self.nodes:
            if node == ROOT:
                continue
            if parent_of(node, self.k) not in self.nodes:
                raise InvalidInputError(f"node {node} has no parent in the tree")
            siblings = children_of(parent_of(node, self.k), self.k)
            if not all(s in self.nodes for s in siblings):
                raise InvalidInputError(f"node {node} breaks the full k-ary property")

    @classmethod
    def single(cls, k: int) -> "FullKAryTree":
        return cls(k=k)

    @classmethod
    def from_inner(cls, k: int, inner: set) -> "FullKAryTree":
        """
        Extend a k-ary tree given by its nodes into the full k-ary tree whose inner
        nodes they are.

        Args:
            k: Fan-out
            inner: Labels of the inner nodes; must be closed under taking parents

        Returns:
            The extension, with len(inner) * k + 1 nodes
        """
        inner = set(inner)
        if not inner:
            return cls.single(k)
        nodes = set(inner)
        for node in inner:
            nodes.update(children_of(node, k))
        return cls(k=k, nodes=frozenset(nodes))

    def children(self, node: Node) -> List[Node]:
        kids = children_of(node, self.k)
        return kids if kids[0] in self.nodes else []

    def is_leaf(self, node: Node) -> bool:
        return children_of(node, self.k)[0] not in self.nodes

    def inner_nodes(self) -> List[Node]:
        return sorted((n for n in self.nodes if not self.is_leaf(n)), key=lambda n: (n[1], n[0]))

    def leaves(self) -> List[Node]:
        return sorted((n for n in self.nodes if self.is_leaf(n)), key=lambda n: (n[1], n[0]))

    @property
    def height(self) -> int:
        return max(q for _, q in self.nodes)

    def depth_counts(self) -> Tuple[List[int], List[int]]:
        """
        Leaves and inner nodes per depth.

        Returns:
            (L, V) where L[i] and V[i] count leaves and inner nodes at depth i
        """
        height = self.height
        leaves = [0] * (height + 1)
        inner = [0] * (height + 1)
        for node in self.nodes:
            if self.is_leaf(node):
                leaves[node[1]] += 1
            else:
                inner[node[1]] += 1
        return leaves, inner

    def canonical(self) -> str:
        """Preorder string of flags, 'I' for inner nodes and 'L' for leaves."""
        return "".join("L" if self.is_leaf(n) else "I" for n in preorder(self))

    @classmethod
    def from_canonical(cls, k: int, flags: str) -> "FullKAryTree":
        inner = set()
        position = iter(flags)

        def visit(node: Node):
            flag = next(position, None)
            if flag is None:
                raise InvalidInputError(f"truncated tree serialization {flags!r}")
            if flag == "I":
                inner.add(node)
                for child in children_of(node, k):
                    visit(child)
            elif flag != "L":
                raise InvalidInputError(f"unknown flag {flag!r} in {flags!r}")

        visit(ROOT)
        if next(position, None) is not None:
            raise InvalidInputError(f"trailing flags in {flags!r}")
        return cls.from_inner(k, inner)

    def __len__(self) -> int:
        return len(self.nodes)


def preorder(tree: FullKAryTree) -> List[Node]:
    """Root first, then the subtrees of the children from left to right."""
    order = []
    stack = [ROOT]
    while stack:
        node = stack.pop()
        order.append(node)
        stack.extend(reversed(tree.children(node)))
    return order


def catalan_k(n: int, k: int) -> int:
    """
    Number of k-ary trees with n nodes, equivalently full k-ary trees with n inner nodes.

    Args:
        n: Node count
        k: Fan-out

    Returns:
        binom(nk, n) / ((k-1)n + 1) as an exact integer
    """
    if n < 0 or k < 2:
        raise InvalidInputError(f"catalan_k needs n >= 0 and k >= 2, got n={n}, k={k}")
    return math.comb(n * k, n) // ((k - 1) * n + 1)


def log_catalan_k(n: int, k: int) -> float:
    """Natural log of catalan_k through log-gamma, for n beyond EXACT_CATALAN_LIMIT."""
    if n < 0 or k < 2:
        raise InvalidInputError(f"log_catalan_k needs n >= 0 and k >= 2, got n={n}, k={k}")
    if n <= EXACT_CATALAN_LIMIT:
        return math.log(catalan_k(n, k))
    return float(gammaln(n * k + 1) - gammaln(n + 1) - gammaln((k - 1) * n + 1) - math.log((k - 1) * n + 1))


def tree_extension_size(n_nodes: int, k: int) -> int:
    """Node count of the full k-ary extension of a k-ary tree with n_nodes nodes."""
    if n_nodes < 0:
        raise InvalidInputError(f"n_nodes must be >= 0, got {n_nodes}")
    return n_nodes * k + 1


def _subtrees_by_depth(node: Node, k: int, depth_left: int) -> Iterator[FrozenSet[Node]]:
    yield frozenset([node])
    if depth_left == 0:
        return
    kids = children_of(node, k)
    yield from _combine([list(_subtrees_by_depth(c, k, depth_left - 1)) for c in kids], frozenset([node]))


def _combine(options: List[List[FrozenSet[Node]]], base: FrozenSet[Node]) -> Iterator[FrozenSet[Node]]:
    if not options:
        yield base
        return
    head, rest = options[0], options[1:]
    for choice in head:
        yield from _combine(rest, base | choice)


def enumerate_full_trees(k: int, max_depth: int) -> Iterator[FullKAryTree]:
    """Every full k-ary tree of height <= max_depth."""
    if max_depth < 0:
        raise InvalidInputError(f"max_depth must be >= 0, got {max_depth}")
    for nodes in _subtrees_by_depth(ROOT, k, max_depth):
        yield FullKAryTree(k=k, nodes=nodes)


def _subtrees_by_size(node: Node, k: int, n_inner: int) -> Iterator[FrozenSet[Node]]:
    if n_inner == 0:
        yield frozenset([node])
        return
    kids = children_of(node, k)
    for split in _compositions(n_inner - 1, k):
        options = [list(_subtrees_by_size(c, k, s)) for c, s in zip(kids, split)]
        yield from _combine(options, frozenset([node]))


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_trees_with_inner(k: int, n_inner: int) -> Iterator[FullKAryTree]:
    """Every full k-ary tree with exactly n_inner inner nodes."""
    if n_inner < 0:
        raise InvalidInputError(f"n_inner must be >= 0, got {n_inner}")
    for nodes in _subtrees_by_size(ROOT, k, n_inner):
        yield FullKAryTree(k=k, nodes=nodes)


def catalan_generating_function(x: float, k: int) -> float:
    """
    Principal branch of C(x) = 1 + x C(x)^k, i.e. the sum of catalan_k(n, k) x^n.

    Args:
        x: Argument in [0, (k-1)^(k-1) / k^k]
        k: Fan-out

    Returns:
        The smallest root C >= 1 of 1 + x C^k - C
    """
    if k < 2:
        raise InvalidInputError(f"k must be >= 2, got {k}")
    radius = (k - 1) ** (k - 1) / k**k
    if x < 0 or x > radius * (1 + 1e-12):
        raise InvalidInputError(f"x must lie in [0, {radius}], got {x}")
    if x == 0:
        return 1.0
    x = min(x, radius)
    if x < 1e-12:
        return 1.0 + x + k * x * x
    # g(C) = 1 + x C^k - C is convex with its minimum at c_star
    c_star = (1.0 / (k * x)) ** (1.0 / (k - 1))
    g = lambda c: 1.0 + x * c**k - c
    if g(c_star) >= 0:
        return c_star
    return brentq(g, 1.0, c_star, xtol=1e-15)


def tree_counts(trees: Dict[str, int]) -> Dict[str, int]:
    """Histogram keyed by canonical serialization, sorted for stable export."""
    return dict(sorted(trees.items(), key=lambda item: (len(item[0]), item[0])))
