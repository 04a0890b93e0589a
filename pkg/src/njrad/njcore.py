"""Agglomerative tree building from dissimilarity maps.

Implements the Q selection criterion, the quartet neighborliness value w,
the Z criterion, canonical neighbor joining with two reduction variants,
a quadratic-time variant based on a visibility list, and the four-point
method for single quartets.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .dissim import DissimilarityMap
from .errors import MatrixError
from .treemodel import PhyloTree, QuartetTopology

TieRule = Callable[[list[tuple[str, str]]], tuple[str, str]]


class Reduction(enum.Enum):
    """How a joined pair is collapsed to a single taxon."""

    AVERAGE = "average"
    ROOTED = "rooted"


class JoinStep(NamedTuple):
    pair: tuple[str, str]
    q_value: float
    map_size: int


@dataclass(frozen=True)
class JoinTrace:
    """Ordered record of agglomeration steps.

    A run on n taxa records exactly n - 3 joins; the terminal 3-taxon
    star is not a join step.
    """

    steps: tuple[JoinStep, ...]

    @property
    def pairs(self) -> tuple[tuple[str, str], ...]:
        return tuple(step.pair for step in self.steps)

    def __len__(self) -> int:
        return len(self.steps)


def q_matrix(d: DissimilarityMap) -> np.ndarray:
    """Q(i,j) = delta(i,j) - (R_i + R_j)/(n - 2), diagonal set to +inf.

    R_i is the row sum of delta. The (n - 2) denominator is kept exactly
    as defined; every other criterion here is calibrated against it.
    """
    n = d.n
    if n < 3:
        raise MatrixError("q_matrix needs at least three taxa")
    v = d.values
    r = v.sum(axis=1)
    q = v - (r[:, None] + r[None, :]) / (n - 2)
    np.fill_diagonal(q, math.inf)
    return q


def w_value(d: DissimilarityMap, i: str, j: str, k: str, l: str) -> float:
    """Neighborliness of the resolution (ij:kl).

    w(ij:kl) = (delta(i,k)+delta(i,l)+delta(j,k)+delta(j,l))/2
               - delta(i,j) - delta(k,l).
    On a tree metric this is twice the internal path length when (ij:kl)
    is the true quartet, and minus the path length otherwise.
    """
    if len({i, j, k, l}) != 4:
        raise MatrixError(f"w_value needs four distinct taxa, got {(i, j, k, l)}")
    g = d.get
    return 0.5 * (g(i, k) + g(i, l) + g(j, k) + g(j, l)) - g(i, j) - g(k, l)


def z_matrix(d: DissimilarityMap) -> np.ndarray:
    """Z(i,j) = average of w(ij:kl) over all pairs {k,l} disjoint from {i,j}.

    Computed directly from the definition (an explicit sum of w values,
    normalized by 1/C(n-1,2)), NOT via the affine relation to Q, so the
    two criteria stay independently testable against each other. Diagonal
    is set to -inf (Z is maximized where Q is minimized).
    """
    n = d.n
    if n < 4:
        raise MatrixError("z_matrix needs at least four taxa")
    v = d.values
    norm = 1.0 / math.comb(n - 1, 2)
    kk, ll = np.triu_indices(n - 2, k=1)
    idx = np.arange(n)
    z = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            cand = np.delete(idx, (i, j))
            a, b = cand[kk], cand[ll]
            w = 0.5 * (v[i, a] + v[i, b] + v[j, a] + v[j, b]) - v[i, j] - v[a, b]
            z[i, j] = z[j, i] = norm * w.sum()
    np.fill_diagonal(z, -math.inf)
    return z


def four_point_topology(d: DissimilarityMap) -> QuartetTopology:
    """Resolve a 4-taxon map by the four-point method.

    Returns the resolution whose cherry-sum is strictly smallest; Star on
    a three-way tie; on a two-way tie the lexicographically smaller
    canonical resolution is returned with its tie flag set.
    """
    if d.n != 4:
        raise MatrixError(f"four_point_topology needs exactly 4 taxa, got {d.n}")
    t = d.taxa
    v = d.values
    pairings = (
        ((0, 1), (2, 3)),
        ((0, 2), (1, 3)),
        ((0, 3), (1, 2)),
    )
    sums = [v[p[0], p[1]] + v[q[0], q[1]] for p, q in pairings]
    smallest = min(sums)
    winners = [k for k, s in enumerate(sums) if s == smallest]
    if len(winners) == 3:
        return QuartetTopology.star(t)
    candidates = [
        QuartetTopology.resolved(t[p[0]], t[p[1]], t[q[0]], t[q[1]], tie=len(winners) > 1)
        for p, q in (pairings[k] for k in winners)
    ]
    return min(candidates, key=lambda q: q.pairs)


def _canonical(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


#: Relative tolerance for treating two Q values as tied. At 4 taxa the two
#: complementary pairings of the argmin pair have identical Q by algebra, so
#: rounding alone decides a strict argmin; detecting ties up to noise keeps
#: the join sequence stable under uniform shifts of Q.
Q_TIE_RTOL = 1e-9


def _select_join(d: DissimilarityMap, q: np.ndarray, tie_rule: TieRule | None):
    """Smallest-Q pair; near-exact ties go to tie_rule (default lexicographic)."""
    iu, ju = np.triu_indices(d.n, k=1)
    vals = q[iu, ju]
    best = vals.min()
    hits = np.flatnonzero(vals <= best + Q_TIE_RTOL * max(1.0, abs(best)))
    candidates = sorted(_canonical(d.taxa[iu[h]], d.taxa[ju[h]]) for h in hits)
    if tie_rule is not None and len(candidates) > 1:
        pick = tie_rule(list(candidates))
        if pick not in candidates:
            raise MatrixError(f"tie rule returned a non-candidate pair {pick!r}")
    else:
        pick = candidates[0]
    return pick, float(best)


class _TreeAssembler:
    """Accumulates edges as pairs are joined; terminal star closes the tree.

    Under the average reduction a merged taxon sits half its pair distance
    above the vertex it was joined at, and the raw limb formula over-reports
    by exactly that height; each taxon's height is tracked and subtracted so
    both reductions emit the same lengths and additive inputs are recovered
    exactly. Internal edges are clamped to length >= 0 (estimated lengths
    are best-effort; topology is the contract). Leaf edges keep their sign.
    """

    def __init__(self, taxa):
        self.node_of = {name: name for name in taxa}
        self.height = {name: 0.0 for name in taxa}
        self.edges: list[tuple[str, str, float]] = []
        self._fresh = 0

    def _new_node(self) -> str:
        node = f"#{self._fresh}"
        self._fresh += 1
        return node

    def _attach(self, node: str, parent: str, length: float):
        if node.startswith("#"):
            length = max(length, 0.0)
        self.edges.append((node, parent, length))

    def join(
        self,
        a: str,
        b: str,
        merged: str,
        dist_ab: float,
        ra: float,
        rb: float,
        m: int,
        merged_height: float,
    ):
        parent = self._new_node()
        la = 0.5 * dist_ab + (ra - rb) / (2 * (m - 2))
        lb = 0.5 * dist_ab + (rb - ra) / (2 * (m - 2))
        self._attach(self.node_of.pop(a), parent, la - self.height.pop(a))
        self._attach(self.node_of.pop(b), parent, lb - self.height.pop(b))
        self.node_of[merged] = parent
        self.height[merged] = merged_height

    def finish_star(self, names, dist) -> PhyloTree:
        p, q, r = names
        hub = self._new_node()
        for x, y, z in ((p, q, r), (q, p, r), (r, p, q)):
            raw = 0.5 * (dist(x, y) + dist(x, z) - dist(y, z))
            self._attach(self.node_of[x], hub, raw - self.height[x])
        return PhyloTree(self.edges)


def nj(
    d: DissimilarityMap,
    reduction: Reduction = Reduction.AVERAGE,
    tie_rule: TieRule | None = None,
) -> tuple[PhyloTree, JoinTrace]:
    """Canonical neighbor joining.

    Each round joins the argmin-Q pair (exact ties broken by tie_rule,
    default: lexicographically smallest canonical pair), collapses it with
    the chosen reduction, and repeats until three taxa remain; those close
    the tree at a degree-3 vertex.
    """
    if d.n < 3:
        raise MatrixError("nj needs at least three taxa")
    if not isinstance(reduction, Reduction):
        raise MatrixError(f"unknown reduction {reduction!r}")
    assembler = _TreeAssembler(d.taxa)
    steps = []
    cur = d
    while cur.n > 3:
        q = q_matrix(cur)
        (a, b), q_at = _select_join(cur, q, tie_rule)
        m = cur.n
        v = cur.values
        r = v.sum(axis=1)
        ia, ib = cur.index(a), cur.index(b)
        steps.append(JoinStep((a, b), q_at, m))
        if reduction is Reduction.AVERAGE:
            merged_height = 0.5 * float(v[ia, ib])
        else:
            merged_height = 0.0
        assembler.join(
            a, b, f"j_{a}_{b}", float(v[ia, ib]), float(r[ia]), float(r[ib]), m,
            merged_height,
        )
        if reduction is Reduction.AVERAGE:
            cur = cur.reduce_average(a, b)
        else:
            cur = cur.reduce_rooted(a, b)
    tree = assembler.finish_star(cur.taxa, cur.get)
    return tree, JoinTrace(tuple(steps))


def fnj(d: DissimilarityMap) -> tuple[PhyloTree, JoinTrace]:
    """Quadratic-time joining via a visibility list.

    Every active node keeps one visible partner: the argmin-Q partner
    computed when the node was created (equivalently argmax-Z). Each round
    re-scores the visible pairs against current row sums in O(1) per pair,
    joins the best one with the average reduction, substitutes the merged
    node for its parents in surviving entries, and computes a fresh partner
    only for the merged node. Total work is O(n^2).
    """
    n0 = d.n
    if n0 < 3:
        raise MatrixError("fnj needs at least three taxa")
    size = 2 * n0 - 3
    v = np.zeros((size, size))
    v[:n0, :n0] = d.values
    rows = np.zeros(size)
    rows[:n0] = d.values.sum(axis=1)
    names: list[str] = list(d.taxa) + [""] * (size - n0)
    alive = np.zeros(size, dtype=bool)
    alive[:n0] = True
    partner = np.full(size, -1, dtype=np.int64)

    act = np.flatnonzero(alive)
    q0 = v[:n0, :n0] - (rows[:n0, None] + rows[None, :n0]) / (n0 - 2)
    np.fill_diagonal(q0, math.inf)
    partner[:n0] = np.argmin(q0, axis=1)

    assembler = _TreeAssembler(d.taxa)
    steps = []
    nxt = n0
    m = n0
    while m > 3:
        act = np.flatnonzero(alive)
        p = partner[act]
        qs = v[act, p] - (rows[act] + rows[p]) / (m - 2)
        best = qs.min()
        hits = np.flatnonzero(qs <= best + Q_TIE_RTOL * max(1.0, abs(best)))
        pair_slots = min(
            ((act[h], p[h]) if names[act[h]] <= names[p[h]] else (p[h], act[h]) for h in hits),
            key=lambda s: (names[s[0]], names[s[1]]),
        )
        ia, ib = int(pair_slots[0]), int(pair_slots[1])
        a, b = names[ia], names[ib]
        merged = f"j_{a}_{b}"
        steps.append(JoinStep((a, b), float(best), m))
        assembler.join(
            a, b, merged, float(v[ia, ib]), float(rows[ia]), float(rows[ib]), m,
            0.5 * float(v[ia, ib]),
        )

        ic = nxt
        nxt += 1
        names[ic] = merged
        fresh_row = 0.5 * (v[ia, :] + v[ib, :])
        v[ic, :] = fresh_row
        v[:, ic] = fresh_row
        v[ic, ic] = 0.0
        rows[act] += fresh_row[act] - v[ia, act] - v[ib, act]
        alive[ia] = alive[ib] = False
        alive[ic] = True
        act = np.flatnonzero(alive)
        rows[ic] = v[ic, act].sum()
        m -= 1
        # surviving entries that pointed at a parent now see the child
        dead = (partner == ia) | (partner == ib)
        dead &= alive
        partner[dead] = ic
        qc = v[ic, act] - (rows[ic] + rows[act]) / (m - 2)
        qc[act == ic] = math.inf
        partner[ic] = act[int(np.argmin(qc))]

    survivors = [names[k] for k in np.flatnonzero(alive)]
    lookup = {name: k for k, name in zip(np.flatnonzero(alive), survivors)}
    tree = assembler.finish_star(
        sorted(survivors), lambda x, y: float(v[lookup[x], lookup[y]])
    )
    return tree, JoinTrace(tuple(steps))
