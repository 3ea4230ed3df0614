"""Ratchet tree: KEM keys arranged over the left-balanced node array.

Blank nodes mark subtrees whose secret is not shared; the resolution of a
node is the minimal set of non-blank nodes covering its non-blank leaves.
A member holds private keys exactly for the non-blank nodes on its own
direct path (plus its leaf), which is what bounds commit fan-out to the
copath resolutions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import treemath as tm
from .messages import Identity, decode_identity, encode_identity


class BlankLeaf(Exception):
    pass


def encode_optional_node(node: Optional["TreeNode"], include_private: bool) -> bytes:
    from ..wire import Writer

    w = Writer()
    if node is None:
        return w.u8(0).getvalue()
    w.u8(1)
    w.lp_bytes(node.public_key)
    if include_private and node.private_key is not None:
        w.u8(1).lp_bytes(node.private_key)
    else:
        w.u8(0)
    if node.identity is not None:
        w.u8(1).raw(encode_identity(node.identity))
    else:
        w.u8(0)
    return w.getvalue()


def decode_optional_node(reader) -> Optional["TreeNode"]:
    if reader.u8() == 0:
        return None
    public_key = reader.lp_bytes()
    private_key = reader.lp_bytes() if reader.u8() else None
    identity = decode_identity(reader) if reader.u8() else None
    return TreeNode(public_key, private_key, identity)


@dataclass
class TreeNode:
    public_key: bytes
    private_key: Optional[bytes] = None
    identity: Optional[Identity] = None

    def clone(self) -> "TreeNode":
        return TreeNode(self.public_key, self.private_key, self.identity)

    def public_only(self) -> "TreeNode":
        return TreeNode(self.public_key, None, self.identity)


@dataclass
class RatchetTree:
    nodes: list[Optional[TreeNode]] = field(default_factory=list)

    @property
    def n_leaves(self) -> int:
        return (len(self.nodes) + 1) // 2

    def clone(self) -> "RatchetTree":
        return RatchetTree([n.clone() if n else None for n in self.nodes])

    def public_clone(self) -> "RatchetTree":
        return RatchetTree([n.public_only() if n else None for n in self.nodes])

    def node(self, index: int) -> Optional[TreeNode]:
        return self.nodes[index]

    def leaf(self, leaf: int) -> Optional[TreeNode]:
        return self.nodes[tm.leaf_node(leaf)]

    def leaf_count(self) -> int:
        return self.n_leaves

    def member_leaves(self) -> list[int]:
        return [i for i in range(self.n_leaves) if self.leaf(i) is not None]

    def roster(self) -> list[tuple[int, Identity]]:
        out = []
        for i in self.member_leaves():
            node = self.leaf(i)
            if node and node.identity:
                out.append((i, node.identity))
        return out

    def find_leaf_by_name(self, name: str) -> Optional[int]:
        for i, ident in self.roster():
            if ident.name == name:
                return i
        return None

    def find_leaf_by_public_key(self, public_key: bytes) -> Optional[int]:
        for i in self.member_leaves():
            node = self.leaf(i)
            if node and node.public_key == public_key:
                return i
        return None

    def set_leaf(self, leaf: int, node: Optional[TreeNode]) -> None:
        self.nodes[tm.leaf_node(leaf)] = node

    def blank_direct_path(self, leaf: int) -> None:
        for x in tm.direct_path(tm.leaf_node(leaf), self.n_leaves):
            self.nodes[x] = None

    def add_leaf(self, node: TreeNode) -> int:
        """Fill the leftmost blank leaf, else grow the array by one leaf."""
        for i in range(self.n_leaves):
            if self.leaf(i) is None:
                self.set_leaf(i, node)
                self.blank_direct_path(i)
                return i
        if self.nodes:
            self.nodes.append(None)  # new parent, blank
        self.nodes.append(node)
        leaf = self.n_leaves - 1
        self.blank_direct_path(leaf)
        return leaf

    def remove_leaf(self, leaf: int) -> None:
        self.set_leaf(leaf, None)
        self.blank_direct_path(leaf)

    def resolution(self, index: int) -> list[int]:
        node = self.nodes[index]
        if node is not None:
            return [index]
        if index % 2 == 0:
            return []  # blank leaf
        out = self.resolution(tm.left(index))
        out += self.resolution(tm.right(index, self.n_leaves))
        return out

    def tree_hash(self) -> bytes:
        from .suites import sha256

        return sha256(self.encode(include_private=False))

    def encode(self, include_private: bool) -> bytes:
        from ..wire import Writer

        w = Writer()
        w.u32(len(self.nodes))
        for node in self.nodes:
            w.raw(encode_optional_node(node, include_private=include_private))
        return w.getvalue()

    @classmethod
    def decode(cls, reader) -> "RatchetTree":
        count = reader.u32()
        nodes = [decode_optional_node(reader) for _ in range(count)]
        return cls(nodes)


def copath_resolution(tree: RatchetTree, leaf: int) -> list[list[int]]:
    """Resolution sets along the leaf's copath, bottom-up; empty sets omitted."""
    if leaf >= tree.n_leaves or tree.leaf(leaf) is None:
        raise BlankLeaf(f"leaf {leaf} is blank or out of range")
    out = []
    for cp in tm.copath(tm.leaf_node(leaf), tree.n_leaves):
        res = tree.resolution(cp)
        if res:
            out.append(res)
    return out


def copath_resolution_with_parents(
    tree: RatchetTree, leaf: int
) -> list[tuple[int, int, list[int]]]:
    """(direct-path node, copath node, resolution) triples, empties omitted."""
    if leaf >= tree.n_leaves or tree.leaf(leaf) is None:
        raise BlankLeaf(f"leaf {leaf} is blank or out of range")
    n = tree.n_leaves
    x = tm.leaf_node(leaf)
    out = []
    for parent_node, cp in zip(tm.direct_path(x, n), tm.copath(x, n)):
        res = tree.resolution(cp)
        if res:
            out.append((parent_node, cp, res))
    return out
