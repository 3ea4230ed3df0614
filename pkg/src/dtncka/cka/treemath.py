"""Array indexing for left-balanced binary trees.

A tree over n leaves is stored as an array of 2n-1 nodes in in-order
position: leaves sit at even indices (leaf i at node 2i), parents at odd
indices. Appending leaves extends the array without renumbering existing
nodes, which is why membership growth never invalidates held references.
The level of a node is the number of trailing one bits in its index.
"""

from __future__ import annotations

from dataclasses import dataclass


class EmptyTree(Exception):
    pass


def level(x: int) -> int:
    k = 0
    while (x >> k) & 1:
        k += 1
    return k


def node_width(n_leaves: int) -> int:
    if n_leaves < 1:
        raise EmptyTree("tree needs at least one leaf")
    return 2 * n_leaves - 1


def root(n_leaves: int) -> int:
    w = node_width(n_leaves)
    return (1 << (w.bit_length() - 1)) - 1


def leaf_node(leaf: int) -> int:
    return 2 * leaf


def node_leaf(x: int) -> int:
    if x % 2 != 0:
        raise ValueError(f"node {x} is not a leaf")
    return x // 2


def left(x: int) -> int:
    k = level(x)
    if k == 0:
        raise ValueError(f"leaf {x} has no children")
    return x ^ (1 << (k - 1))


def right(x: int, n_leaves: int) -> int:
    k = level(x)
    if k == 0:
        raise ValueError(f"leaf {x} has no children")
    r = x ^ (3 << (k - 1))
    while r >= node_width(n_leaves):
        r = left(r)
    return r


def _parent_step(x: int) -> int:
    k = level(x)
    b = (x >> (k + 1)) & 1
    return (x | (1 << k)) ^ (b << (k + 1))


def parent(x: int, n_leaves: int) -> int:
    if x == root(n_leaves):
        raise ValueError(f"node {x} is the root")
    p = _parent_step(x)
    while p >= node_width(n_leaves):
        p = _parent_step(p)
    return p


def sibling(x: int, n_leaves: int) -> int:
    p = parent(x, n_leaves)
    if x < p:
        return right(p, n_leaves)
    return left(p)


def direct_path(x: int, n_leaves: int) -> list[int]:
    """Ancestors of x from its parent up to and including the root."""
    r = root(n_leaves)
    if x == r:
        return []
    path = []
    while x != r:
        x = parent(x, n_leaves)
        path.append(x)
    return path


def copath(x: int, n_leaves: int) -> list[int]:
    """Siblings along the direct path, bottom-up; empty for the root."""
    if x == root(n_leaves):
        return []
    nodes = [x] + direct_path(x, n_leaves)[:-1]
    return [sibling(y, n_leaves) for y in nodes]


def subtree_leaves(x: int, n_leaves: int) -> list[int]:
    """Leaf ordinals covered by node x, left to right."""
    if x % 2 == 0:
        return [node_leaf(x)]
    out: list[int] = []
    stack = [x]
    while stack:
        y = stack.pop()
        if y % 2 == 0:
            out.append(node_leaf(y))
        else:
            stack.append(right(y, n_leaves))
            stack.append(left(y))
    return sorted(out)


@dataclass(frozen=True)
class TreeMath:
    n_leaves: int
    node_count: int
    root_index: int
    parents: dict[int, int]
    siblings: dict[int, int]


def tree_math(n_leaves: int) -> TreeMath:
    """Full index tables for a tree of n leaves (root has no entries)."""
    w = node_width(n_leaves)
    r = root(n_leaves)
    parents = {x: parent(x, n_leaves) for x in range(w) if x != r}
    siblings = {x: sibling(x, n_leaves) for x in range(w) if x != r}
    return TreeMath(n_leaves, w, r, parents, siblings)
