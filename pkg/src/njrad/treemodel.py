"""Unrooted phylogenetic trees: splits, quartets, tree metrics, Newick
serialization, and random tree generation.

Trees are undirected, connected, acyclic graphs whose degree-1 vertices
are the taxa. Internal vertices must have degree >= 3 (higher degrees
allowed). Internal edge lengths must be nonnegative; leaf edge lengths
may be negative, since estimated trees routinely produce them.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .dissim import TAXON_NAME_RE, DissimilarityMap
from .errors import NewickParseError, TreeError


class Taxon(NamedTuple):
    id: int
    name: str


@dataclass(frozen=True)
class Split:
    """Bipartition of the taxon set induced by deleting one edge.

    Canonical orientation: the side containing the lexicographically
    smallest taxon is stored as side_a, so equality and hashing are
    well defined across trees.
    """

    side_a: frozenset[str]
    side_b: frozenset[str]

    def __post_init__(self):
        a, b = frozenset(self.side_a), frozenset(self.side_b)
        if not a or not b:
            raise TreeError("both sides of a split must be non-empty")
        if a & b:
            raise TreeError("split sides must be disjoint")
        if min(b) < min(a):
            a, b = b, a
        object.__setattr__(self, "side_a", a)
        object.__setattr__(self, "side_b", b)

    @property
    def is_trivial(self) -> bool:
        """True for leaf-edge splits (one side is a single taxon)."""
        return len(self.side_a) == 1 or len(self.side_b) == 1

    def side_of(self, name: str) -> int:
        if name in self.side_a:
            return 0
        if name in self.side_b:
            return 1
        raise TreeError(f"taxon {name!r} not covered by this split")

    def separates(self, x: str, y: str) -> bool:
        return self.side_of(x) != self.side_of(y)

    def __repr__(self) -> str:
        fmt = lambda s: "{" + ",".join(sorted(s)) + "}"
        return f"{fmt(self.side_a)}|{fmt(self.side_b)}"


@dataclass(frozen=True)
class QuartetTopology:
    """Topology on four distinct taxa: two cherries, or an unresolved star.

    Resolved topologies are stored canonically (each pair sorted, the
    lexicographically smaller pair first). ``tie`` marks a resolution
    that was picked between two equally good candidates; it is advisory
    and excluded from equality.
    """

    taxa: tuple[str, str, str, str]
    pairs: tuple[tuple[str, str], tuple[str, str]] | None
    tie: bool = field(default=False, compare=False)

    @classmethod
    def resolved(cls, i: str, j: str, k: str, l: str, tie: bool = False) -> "QuartetTopology":
        """The topology with cherries {i,j} and {k,l}."""
        names = (i, j, k, l)
        if len(set(names)) != 4:
            raise TreeError(f"quartet taxa must be distinct: {names}")
        p1 = tuple(sorted((i, j)))
        p2 = tuple(sorted((k, l)))
        if p2 < p1:
            p1, p2 = p2, p1
        return cls(tuple(sorted(names)), (p1, p2), tie)

    @classmethod
    def star(cls, taxa: Iterable[str]) -> "QuartetTopology":
        names = tuple(sorted(taxa))
        if len(names) != 4 or len(set(names)) != 4:
            raise TreeError(f"a star quartet needs four distinct taxa: {names}")
        return cls(names, None)

    @property
    def is_resolved(self) -> bool:
        return self.pairs is not None

    def __repr__(self) -> str:
        if self.pairs is None:
            return "Star(" + ",".join(self.taxa) + ")"
        (i, j), (k, l) = self.pairs
        return f"({i},{j}:{k},{l})"


class PhyloTree:
    """Immutable unrooted tree over named nodes with real edge lengths."""

    __slots__ = (
        "_adj", "_lengths", "_leaves", "_internal", "_taxa", "_leaf_index",
        "_topo", "_metric", "_splits", "__weakref__",
    )

    def __init__(self, edges: Iterable[tuple[str, str, float]]):
        adj: dict[str, dict[str, float]] = {}
        lengths: dict[frozenset[str], float] = {}
        for u, v, length in edges:
            if u == v:
                raise TreeError(f"self-loop at node {u!r}")
            length = float(length)
            if not math.isfinite(length):
                raise TreeError(f"non-finite length on edge ({u!r}, {v!r})")
            key = frozenset((u, v))
            if key in lengths:
                raise TreeError(f"duplicate edge ({u!r}, {v!r})")
            lengths[key] = length
            adj.setdefault(u, {})[v] = length
            adj.setdefault(v, {})[u] = length
        if not lengths:
            raise TreeError("a tree needs at least one edge")
        if len(lengths) != len(adj) - 1:
            raise TreeError("edges contain a cycle")
        # connectivity
        start = next(iter(adj))
        seen = {start}
        queue = deque([start])
        while queue:
            for nbr in adj[queue.popleft()]:
                if nbr not in seen:
                    seen.add(nbr)
                    queue.append(nbr)
        if len(seen) != len(adj):
            raise TreeError("tree is not connected")

        leaves = []
        for node, nbrs in adj.items():
            deg = len(nbrs)
            if deg == 1:
                if not TAXON_NAME_RE.match(node):
                    raise TreeError(f"invalid taxon name: {node!r}")
                leaves.append(node)
            elif deg == 2:
                raise TreeError(f"node {node!r} has degree 2 (neither leaf nor internal)")
        if len(leaves) < 2:
            raise TreeError("a tree needs at least two leaves")
        internal = frozenset(adj) - frozenset(leaves)
        for key, length in lengths.items():
            if length < 0 and not (key & frozenset(leaves)):
                u, v = sorted(key)
                raise TreeError(f"internal edge ({u!r}, {v!r}) has negative length {length}")

        self._adj = adj
        self._lengths = lengths
        self._leaves = tuple(sorted(leaves))
        self._internal = internal
        self._taxa = tuple(Taxon(k, name) for k, name in enumerate(self._leaves))
        self._leaf_index = {name: k for k, name in enumerate(self._leaves)}
        self._topo = None
        self._metric = None
        self._splits = None

    # -- structure accessors ----------------------------------------------

    @property
    def taxa(self) -> tuple[Taxon, ...]:
        return self._taxa

    @property
    def leaf_names(self) -> tuple[str, ...]:
        return self._leaves

    @property
    def n_leaves(self) -> int:
        return len(self._leaves)

    @property
    def nodes(self) -> tuple[str, ...]:
        return tuple(sorted(self._adj))

    def is_leaf(self, node: str) -> bool:
        self._require_node(node)
        return node in self._leaf_index

    def neighbors(self, node: str) -> tuple[tuple[str, float], ...]:
        self._require_node(node)
        return tuple(sorted(self._adj[node].items()))

    def degree(self, node: str) -> int:
        self._require_node(node)
        return len(self._adj[node])

    def edges(self) -> tuple[tuple[str, str, float], ...]:
        out = []
        for key, length in self._lengths.items():
            u, v = sorted(key)
            out.append((u, v, length))
        return tuple(sorted(out))

    def internal_edges(self) -> tuple[tuple[str, str, float], ...]:
        return tuple(
            (u, v, length) for u, v, length in self.edges()
            if u in self._internal and v in self._internal
        )

    def edge_length(self, u: str, v: str) -> float:
        try:
            return self._lengths[frozenset((u, v))]
        except KeyError:
            raise TreeError(f"no edge ({u!r}, {v!r})") from None

    @property
    def total_length(self) -> float:
        return float(sum(self._lengths.values()))

    def with_edge_length(self, u: str, v: str, length: float) -> "PhyloTree":
        """Copy of the tree with one edge length replaced."""
        self.edge_length(u, v)
        key = frozenset((u, v))
        return PhyloTree(
            (a, b, length if frozenset((a, b)) == key else l)
            for a, b, l in self.edges()
        )

    def _require_node(self, node: str):
        if node not in self._adj:
            raise TreeError(f"unknown node: {node!r}")

    def _require_leaves(self, names: Sequence[str]):
        for name in names:
            if name not in self._leaf_index:
                raise TreeError(f"unknown taxon: {name!r}")

    # -- distances ----------------------------------------------------------

    def _ensure_matrices(self):
        if self._topo is not None:
            return
        order = self.nodes
        idx = {node: k for k, node in enumerate(order)}
        nbrs = [[(idx[m], l) for m, l in self._adj[node].items()] for node in order]
        n = len(self._leaves)
        topo = np.zeros((n, n), dtype=np.int64)
        metric = np.zeros((n, n))
        hops = np.empty(len(order), dtype=np.int64)
        dist = np.empty(len(order))
        for li, leaf in enumerate(self._leaves):
            hops.fill(-1)
            root = idx[leaf]
            hops[root] = 0
            dist[root] = 0.0
            queue = deque([root])
            while queue:
                cur = queue.popleft()
                for nxt, l in nbrs[cur]:
                    if hops[nxt] < 0:
                        hops[nxt] = hops[cur] + 1
                        dist[nxt] = dist[cur] + l
                        queue.append(nxt)
            for lj, other in enumerate(self._leaves):
                topo[li, lj] = hops[idx[other]]
                metric[li, lj] = dist[idx[other]]
        np.fill_diagonal(metric, 0.0)
        metric = 0.5 * (metric + metric.T)  # kill asymmetric float dust
        self._topo = topo
        self._metric = metric

    def topo_matrix(self) -> np.ndarray:
        """Integer leaf-to-leaf edge counts, rows/cols in leaf_names order."""
        self._ensure_matrices()
        return self._topo

    def metric_matrix(self) -> np.ndarray:
        self._ensure_matrices()
        return self._metric

    def tree_metric(self) -> DissimilarityMap:
        """Path-length sums between every leaf pair."""
        return DissimilarityMap(self._leaves, self.metric_matrix())

    # -- splits and quartets -------------------------------------------------

    def split_for_edge(self, u: str, v: str) -> Split:
        """The leaf bipartition obtained by deleting edge (u, v)."""
        self.edge_length(u, v)
        side = set()
        seen = {u, v}
        queue = deque([u])
        while queue:
            cur = queue.popleft()
            if cur in self._leaf_index:
                side.add(cur)
            for nbr in self._adj[cur]:
                if nbr not in seen:
                    seen.add(nbr)
                    queue.append(nbr)
        if u in self._leaf_index:
            side.add(u)
        return Split(frozenset(side), frozenset(self._leaves) - frozenset(side))

    def splits(self) -> frozenset[Split]:
        """One split per internal edge; trivial leaf-edge splits excluded."""
        if self._splits is None:
            self._splits = frozenset(
                self.split_for_edge(u, v) for u, v, _ in self.internal_edges()
            )
        return self._splits

    def induced_quartet(self, i: str, j: str, k: str, l: str) -> QuartetTopology:
        """Topology the tree induces on four leaves.

        Decided on integer path lengths (edge counts), so resolution is
        purely topological and immune to zero-length internal edges.
        """
        names = (i, j, k, l)
        if len(set(names)) != 4:
            raise TreeError(f"quartet taxa must be distinct: {names}")
        self._require_leaves(names)
        t = self.topo_matrix()
        a, b, c, d = (self._leaf_index[x] for x in names)
        s_ij = t[a, b] + t[c, d]
        s_ik = t[a, c] + t[b, d]
        s_il = t[a, d] + t[b, c]
        smallest = min(s_ij, s_ik, s_il)
        winners = [s == smallest for s in (s_ij, s_ik, s_il)]
        if sum(winners) != 1:
            return QuartetTopology.star(names)
        if winners[0]:
            return QuartetTopology.resolved(i, j, k, l)
        if winners[1]:
            return QuartetTopology.resolved(i, k, j, l)
        return QuartetTopology.resolved(i, l, j, k)

    def quartet_internal_length(self, i: str, j: str, k: str, l: str) -> float:
        """Metric length of the induced quartet's internal path (0 for stars)."""
        q = self.induced_quartet(i, j, k, l)
        if not q.is_resolved:
            return 0.0
        (a, b), (c, d) = q.pairs
        m = self.metric_matrix()
        g = lambda x, y: m[self._leaf_index[x], self._leaf_index[y]]
        return 0.5 * (g(a, c) + g(b, d) - g(a, b) - g(c, d))

    def is_cherry(self, i: str, j: str) -> bool:
        """True iff leaves i and j hang off the same internal vertex."""
        if i == j:
            raise TreeError("a cherry needs two distinct taxa")
        self._require_leaves((i, j))
        (pi,) = self._adj[i]
        (pj,) = self._adj[j]
        return pi == pj

    def interior_to_quartet(self, x: str, quartet: QuartetTopology) -> bool:
        """Literal four-probe interiority test.

        x is interior to (ij:kl) iff none of (ik:xl), (ik:xj), (ix:jl),
        (kx:jl) are quartets of the tree.
        """
        if not quartet.is_resolved:
            raise TreeError("interiority is defined for resolved quartets only")
        (i, j), (k, l) = quartet.pairs
        if x in quartet.taxa:
            raise TreeError(f"{x!r} must be distinct from the quartet's taxa")
        self._require_leaves((x,))
        if self.induced_quartet(i, j, k, l) != quartet:
            raise TreeError(f"{quartet!r} is not a quartet of this tree")
        probes = (
            QuartetTopology.resolved(i, k, x, l),
            QuartetTopology.resolved(i, k, x, j),
            QuartetTopology.resolved(i, x, j, l),
            QuartetTopology.resolved(k, x, j, l),
        )
        for probe in probes:
            a, b, c, d = probe.taxa
            if self.induced_quartet(a, b, c, d) == probe:
                return False
        return True

    # -- serialization ---------------------------------------------------------

    def to_newick(self) -> str:
        """Serialize with an arbitrary (deterministic) internal root.

        The root is the neighbor of the lexicographically smallest taxon;
        children are ordered by smallest descendant leaf. Lengths use
        repr-faithful %.10g formatting; negatives pass through verbatim.
        """
        smallest = self._leaves[0]
        if len(self._adj) == 2:
            other = next(iter(self._adj[smallest]))
            l = self._lengths[frozenset((smallest, other))]
            return f"({smallest}:{l:.10g},{other}:0);"
        root = next(iter(self._adj[smallest]))
        parent = {root: None}
        order = [root]
        queue = deque([root])
        while queue:
            cur = queue.popleft()
            for nbr in self._adj[cur]:
                if nbr not in parent:
                    parent[nbr] = cur
                    order.append(nbr)
                    queue.append(nbr)
        children: dict[str, list[str]] = {node: [] for node in order}
        for node in order[1:]:
            children[parent[node]].append(node)
        min_leaf: dict[str, str] = {}
        for node in reversed(order):
            kids = children[node]
            if not kids:
                min_leaf[node] = node
            else:
                min_leaf[node] = min(min_leaf[kid] for kid in kids)
            kids.sort(key=lambda kid: min_leaf[kid])
        rendered: dict[str, str] = {}
        for node in reversed(order):
            if not children[node]:
                rendered[node] = node
            else:
                rendered[node] = "(" + ",".join(
                    f"{rendered[kid]}:{self._lengths[frozenset((node, kid))]:.10g}"
                    for kid in children[node]
                ) + ")"
        return rendered[root] + ";"

    def __repr__(self) -> str:
        return f"PhyloTree(n_leaves={self.n_leaves})"


def rf_distance(t1: PhyloTree, t2: PhyloTree) -> int:
    """Robinson-Foulds distance: |splits(t1) symmetric-difference splits(t2)|."""
    if t1.leaf_names != t2.leaf_names:
        raise TreeError("trees are over different taxon sets")
    return len(t1.splits() ^ t2.splits())


# -- Newick parsing -----------------------------------------------------------


def parse_newick(text: str) -> PhyloTree:
    """Parse one Newick tree.

    Branch lengths are optional (default 0); internal labels are parsed
    and discarded. A degree-2 root (rooted input) is suppressed by fusing
    its two incident edges, so output trees are always unrooted.
    """
    edges: list[tuple[str, str, float]] = []
    fresh = iter(range(10**9))
    pos = 0
    n = len(text)

    def skip_ws():
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def fail(msg: str):
        raise NewickParseError(msg, pos)

    def read_name() -> str:
        nonlocal pos
        start = pos
        while pos < n and (text[pos].isalnum() or text[pos] in "_.-"):
            pos += 1
        if pos == start:
            fail("expected a taxon name")
        return text[start:pos]

    def read_length() -> float:
        nonlocal pos
        skip_ws()
        if pos >= n or text[pos] != ":":
            return 0.0
        pos += 1
        skip_ws()
        start = pos
        while pos < n and (text[pos].isdigit() or text[pos] in "+-.eE"):
            pos += 1
        try:
            return float(text[start:pos])
        except ValueError:
            fail(f"unparsable branch length {text[start:pos]!r}")

    # Each stack frame collects (child node, branch length) pairs of one
    # parenthesized group; closing a group materializes an internal node.
    stack: list[list[tuple[str, float]]] = []
    result: tuple[str, float] | None = None
    skip_ws()
    while True:
        skip_ws()
        if pos >= n:
            fail("unexpected end of input")
        ch = text[pos]
        if ch == "(":
            pos += 1
            stack.append([])
            continue
        if ch == ")":
            if not stack:
                fail("unbalanced ')'")
            pos += 1
            group = stack.pop()
            if len(group) < 2:
                fail("a group needs at least two children")
            node = f"#{next(fresh)}"
            for child, length in group:
                edges.append((node, child, length))
            skip_ws()
            if pos < n and (text[pos].isalnum() or text[pos] in "_.-"):
                read_name()  # internal label, discarded
            item = (node, read_length())
        else:
            name = read_name()
            item = (name, read_length())
        skip_ws()
        if stack:
            stack[-1].append(item)
            if pos < n and text[pos] == ",":
                pos += 1
                continue
            if pos < n and text[pos] == ")":
                continue
            fail("expected ',' or ')'")
        else:
            result = item
            break
    skip_ws()
    if pos >= n or text[pos] != ";":
        fail("expected ';'")
    pos += 1
    skip_ws()
    if pos != n:
        fail("trailing content after ';'")

    root = result[0]
    if not edges:
        fail("a tree needs at least two leaves")
    # suppress a degree-2 root left by rooted input
    incident = [(u, v, l) for (u, v, l) in edges if root in (u, v)]
    if len(incident) == 2:
        (u1, v1, l1), (u2, v2, l2) = incident
        a = v1 if u1 == root else u1
        b = v2 if u2 == root else u2
        edges = [e for e in edges if root not in (e[0], e[1])]
        edges.append((a, b, l1 + l2))
    try:
        return PhyloTree(edges)
    except TreeError as exc:
        raise NewickParseError(str(exc), pos) from exc


# -- random trees --------------------------------------------------------------


def random_tree(n: int, edge_length: float, rng: np.random.Generator) -> PhyloTree:
    """Random unrooted binary tree built by agglomerating uniform pairs.

    Maintains n active nodes, repeatedly joins a uniformly random pair
    under a new parent until 3 remain, then joins those at a final
    degree-3 vertex. Every edge gets edge_length. Taxa are t0..t{n-1}.
    """
    if n < 3:
        raise TreeError("random_tree needs n >= 3")
    active = [f"t{k}" for k in range(n)]
    edges = []
    fresh = 0
    while len(active) > 3:
        i, j = sorted(rng.choice(len(active), size=2, replace=False))
        parent = f"#{fresh}"
        fresh += 1
        edges.append((parent, active[i], edge_length))
        edges.append((parent, active[j], edge_length))
        # pop the larger index first so the smaller stays valid
        active.pop(j)
        active.pop(i)
        active.append(parent)
    hub = f"#{fresh}"
    for node in active:
        edges.append((hub, node, edge_length))
    return PhyloTree(edges)
