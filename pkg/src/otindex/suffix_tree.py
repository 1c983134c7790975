"""Suffix tree construction and navigation.

Ukkonen's online algorithm builds the tree in linear time over the
sentinel-terminated text.  Nodes live in an arena of parallel arrays indexed
by NodeId (root is 0); children are keyed by the first byte of the edge
label.  Because the sentinel is byte 0 it sorts before every content symbol,
so ascending-symbol child order puts sentinel edges first.

After construction a single traversal freezes derived data: string depths,
leaf suffix indices, left-to-right leaf ranks, subtree intervals, and
per-depth internal node rosters.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass, field

from .text import Text

NO_NODE = -1


class SuffixTreeError(ValueError):
    """Raised when navigation preconditions are violated."""


@dataclass
class WalkOutcome:
    """Result of matching a pattern downward from a node.

    matched     number of pattern symbols matched
    locus_below node at or immediately below the match end
    exact_node  True when the match ends precisely on a node boundary
    """

    matched: int
    locus_below: int
    exact_node: bool


@dataclass
class WalkCounters:
    """Operation tally for walk-based searches."""

    symbol_cmp: int = 0
    child_lookups: int = 0


@dataclass
class StStats:
    n_leaves: int
    n_internal: int
    internal_depth_hist: dict[int, int]
    # Published genome tables count leaves without the sentinel-only leaf and
    # internal nodes without the root; both conventions are kept.
    n_leaves_adjusted: int = field(init=False)
    n_internal_adjusted: int = field(init=False)

    def __post_init__(self) -> None:
        self.n_leaves_adjusted = self.n_leaves - 1
        self.n_internal_adjusted = self.n_internal - 1


class SuffixTree:
    """Arena-backed suffix tree over a sentinel-terminated text."""

    __slots__ = (
        "text",
        "data",
        "n",
        "parent",
        "estart",
        "eend",
        "slink",
        "children",
        "depth",
        "suffix_idx",
        "st_left",
        "st_right",
        "rank_to_leaf",
        "leaf_for_suffix",
        "internal_under",
        "internal_by_depth",
        "n_nodes",
        "n_leaves",
        "n_internal",
    )

    root = 0

    def __init__(self, text: Text):
        self.text = text
        self.data = text.data
        self.n = text.n
        self._ukkonen()
        self._freeze()

    # ------------------------------------------------------------------ build

    def _ukkonen(self) -> None:
        data = self.data
        size = len(data)
        OPEN = -2

        parent = [0]
        estart = [0]
        eend = [0]
        slink = [0]
        children: list[dict[int, int] | None] = [{}]

        def new_node(p: int, s: int, e: int, leaf: bool) -> int:
            parent.append(p)
            estart.append(s)
            eend.append(e)
            slink.append(0)
            children.append(None if leaf else {})
            return len(parent) - 1

        a_node = 0
        a_edge = 0
        a_len = 0
        remaining = 0

        for pos in range(size):
            c = data[pos]
            remaining += 1
            last_internal = NO_NODE
            while remaining > 0:
                if a_len == 0:
                    a_edge = pos
                kids = children[a_node]
                assert kids is not None
                nxt = kids.get(data[a_edge])
                if nxt is None:
                    leaf = new_node(a_node, pos, OPEN, leaf=True)
                    kids[data[a_edge]] = leaf
                    if last_internal != NO_NODE:
                        slink[last_internal] = a_node
                        last_internal = NO_NODE
                else:
                    e = eend[nxt]
                    elen = (pos + 1 if e == OPEN else e) - estart[nxt]
                    if a_len >= elen:
                        a_node = nxt
                        a_edge += elen
                        a_len -= elen
                        continue
                    if data[estart[nxt] + a_len] == c:
                        if last_internal != NO_NODE and a_node != 0:
                            slink[last_internal] = a_node
                            last_internal = NO_NODE
                        a_len += 1
                        break
                    split = new_node(a_node, estart[nxt], estart[nxt] + a_len, leaf=False)
                    kids[data[a_edge]] = split
                    estart[nxt] += a_len
                    parent[nxt] = split
                    sk = children[split]
                    assert sk is not None
                    sk[data[estart[nxt]]] = nxt
                    leaf = new_node(split, pos, OPEN, leaf=True)
                    sk[c] = leaf
                    if last_internal != NO_NODE:
                        slink[last_internal] = split
                    last_internal = split
                remaining -= 1
                if a_node == 0 and a_len > 0:
                    a_len -= 1
                    a_edge = pos - remaining + 1
                elif a_node != 0:
                    a_node = slink[a_node]

        if remaining != 0:
            raise AssertionError("construction did not consume every suffix")

        for v in range(len(eend)):
            if eend[v] == OPEN:
                eend[v] = size

        self.parent = array("q", parent)
        self.estart = array("q", estart)
        self.eend = array("q", eend)
        self.slink = array("q", slink)
        self.children = children
        self.n_nodes = len(parent)

    def _freeze(self) -> None:
        """One iterative DFS to derive depths, ranks, intervals, rosters."""
        size = len(self.data)
        n_nodes = self.n_nodes
        children = self.children
        estart = self.estart
        eend = self.eend
        slink = self.slink

        depth = array("q", bytes(8 * n_nodes))
        suffix_idx = array("q", [NO_NODE] * n_nodes)
        st_left = array("q", [0] * n_nodes)
        st_right = array("q", [0] * n_nodes)
        internal_under = array("q", [0] * n_nodes)
        rank_to_leaf = array("q")
        leaf_for_suffix = array("q", [NO_NODE] * size)
        internal_by_depth: dict[int, array] = {}

        n_leaves = 0
        n_internal = 0
        # stack entries: (node, entering) — entering pass assigns depth/rank,
        # exit pass closes the subtree interval.
        stack: list[tuple[int, bool]] = [(self.root, False), (self.root, True)]
        order_sorted_children: list[int] = []
        while stack:
            v, entering = stack.pop()
            kids = children[v]
            if entering:
                if v != self.root:
                    depth[v] = depth[self.parent[v]] + (eend[v] - estart[v])
                if kids is None:
                    n_leaves += 1
                    s = size - depth[v]
                    suffix_idx[v] = s
                    leaf_for_suffix[s] = v
                    r = len(rank_to_leaf)
                    rank_to_leaf.append(v)
                    st_left[v] = r
                    st_right[v] = r
                else:
                    n_internal += 1
                    d = depth[v]
                    bucket = internal_by_depth.get(d)
                    if bucket is None:
                        bucket = array("q")
                        internal_by_depth[d] = bucket
                    bucket.append(v)
                    st_left[v] = len(rank_to_leaf)  # next leaf rank to appear
                    if v != self.root and len(kids) < 2:
                        raise AssertionError("unary internal node")
                    for _, child in sorted(kids.items(), reverse=True):
                        stack.append((child, False))
                        stack.append((child, True))
            else:
                if kids is not None:
                    st_right[v] = len(rank_to_leaf) - 1
                    cnt = 1  # v itself
                    for child in kids.values():
                        if children[child] is not None:
                            cnt += internal_under[child]
                    internal_under[v] = cnt

        if n_leaves != size:
            raise AssertionError("leaf count must equal text length with sentinel")
        for v in range(1, n_nodes):
            if children[v] is not None and depth[slink[v]] != depth[v] - 1:
                raise AssertionError("suffix link depth property violated")

        self.depth = depth
        self.suffix_idx = suffix_idx
        self.st_left = st_left
        self.st_right = st_right
        self.rank_to_leaf = rank_to_leaf
        self.leaf_for_suffix = leaf_for_suffix
        self.internal_under = internal_under
        self.internal_by_depth = internal_by_depth
        self.n_leaves = n_leaves
        self.n_internal = n_internal

    # ----------------------------------------------------------------- access

    def is_internal(self, v: int) -> bool:
        return self.children[v] is not None

    def is_leaf(self, v: int) -> bool:
        return self.children[v] is None

    def leaf_of_suffix(self, s: int) -> int:
        """Leaf whose path label is the suffix starting at position ``s``."""
        if not 0 <= s < len(self.data):
            raise SuffixTreeError("suffix index out of range")
        return self.leaf_for_suffix[s]

    def label(self, v: int) -> bytes:
        """Path label of ``v`` (text slice via any leaf beneath it)."""
        leaf = self.rank_to_leaf[self.st_left[v]]
        s = self.suffix_idx[leaf]
        return self.data[s : s + self.depth[v]]

    def leftmost_leaf(self, v: int) -> int:
        return self.rank_to_leaf[self.st_left[v]]

    def in_subtree(self, anc: int, v: int) -> bool:
        """True when ``v`` lies in the subtree rooted at ``anc`` (inclusive)."""
        return (
            self.st_left[anc] <= self.st_left[v]
            and self.st_right[v] <= self.st_right[anc]
        )

    def subtree_leaves(self, v: int):
        """Leaves under ``v`` in left-to-right order."""
        rtl = self.rank_to_leaf
        for r in range(self.st_left[v], self.st_right[v] + 1):
            yield rtl[r]

    # ------------------------------------------------------------------- walk

    def walk_from(
        self, start: int, pattern: bytes, counters: WalkCounters | None = None
    ) -> WalkOutcome:
        """Match ``pattern`` downward from ``start`` symbol by symbol.

        Returns how many pattern symbols matched and the node at or
        immediately below where matching stopped.  ``start`` must be the root
        or an internal node.
        """
        if self.children[start] is None:
            raise SuffixTreeError("walks start at the root or an internal node")
        data = self.data
        children = self.children
        estart = self.estart
        eend = self.eend
        cur = start
        i = 0
        plen = len(pattern)
        sym = 0
        lookups = 0
        while i < plen:
            kids = children[cur]
            if kids is None:
                break  # nothing below a leaf
            lookups += 1
            child = kids.get(pattern[i])
            if child is None:
                break
            lo = estart[child]
            hi = eend[child]
            j = lo
            while j < hi and i < plen:
                sym += 1
                if data[j] != pattern[i]:
                    if counters is not None:
                        counters.symbol_cmp += sym
                        counters.child_lookups += lookups
                    return WalkOutcome(i, child, False)
                j += 1
                i += 1
            if j < hi:
                # pattern exhausted mid-edge
                if counters is not None:
                    counters.symbol_cmp += sym
                    counters.child_lookups += lookups
                return WalkOutcome(i, child, False)
            cur = child
        if counters is not None:
            counters.symbol_cmp += sym
            counters.child_lookups += lookups
        return WalkOutcome(i, cur, True)


def build(text: Text) -> SuffixTree:
    """Build the suffix tree of ``text``."""
    return SuffixTree(text)


def stats(st: SuffixTree) -> StStats:
    """Node counts and the per-string-depth histogram of internal nodes."""
    hist: dict[int, int] = {
        d: len(bucket) for d, bucket in sorted(st.internal_by_depth.items())
    }
    return StStats(
        n_leaves=st.n_leaves,
        n_internal=st.n_internal,
        internal_depth_hist=hist,
    )
