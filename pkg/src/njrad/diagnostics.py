"""Certification of joining-success conditions against a reference tree.

Each check returns a DiagnosticReport with a strict-inequality margin
(the smallest slack observed; <= 0 means violated), violation witnesses,
and the fraction of checked instances that pass. The module also houses
exact coefficient oracles for the scaled Z criterion and the S statistic,
and the four-point defect lower bound.

The scaled Z convention multiplies Z by C(n-1,2); all coefficient oracles
and the S statistic use it. The core module keeps the averaged form.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple
from weakref import WeakKeyDictionary

import numpy as np

from .dissim import DissimilarityMap, linf_distance
from .errors import MatrixError, TreeError
from .njcore import z_matrix
from .treemodel import PhyloTree, Split

#: Resolved quartets whose internal path is metrically shorter than this
#: are skipped by the additivity enumeration (they carry no signal and
#: only arise from zero-length internal edges).
ZERO_LENGTH_TOL = 1e-12

MAX_WITNESSES = 100


class Condition(enum.Enum):
    QUARTET_CONSISTENCY = "quartet_consistency"
    QUARTET_ADDITIVITY = "quartet_additivity"
    ATTESON_RADIUS = "atteson_radius"
    AB_CONSISTENCY = "ab_consistency"
    EDGE_GUARANTEE = "edge_guarantee"


class GuaranteeKind(enum.Enum):
    """How an edge's split was certified to survive reconstruction."""

    UNIFORM_LINF = "uniform_linf"      # 4 * linf(d, dT) < l(e)
    EDGE_DEVIATION = "edge_deviation"  # per-pair one-sided/two-sided check


@dataclass(frozen=True)
class Witness:
    taxa: tuple[str, ...]
    values: dict[str, float]


@dataclass(frozen=True)
class DiagnosticReport:
    condition: Condition
    holds: bool
    margin: float
    witnesses: tuple[Witness, ...]
    coverage: float
    checked: int
    sampled: bool = False

    def to_record(self) -> dict:
        return {
            "condition": self.condition.value,
            "holds": self.holds,
            "margin": self.margin,
            "coverage": self.coverage,
            "checked": self.checked,
            "sampled": self.sampled,
            "witness_count": len(self.witnesses),
            "witnesses": [
                {"taxa": list(w.taxa), "values": dict(w.values)} for w in self.witnesses
            ],
        }


class GuaranteedEdge(NamedTuple):
    split: Split
    kind: GuaranteeKind
    margin: float


@dataclass(frozen=True)
class SStatistic:
    value: float
    subset: tuple[str, ...]
    i: str
    j: str


def scaled_z_matrix(d: DissimilarityMap) -> np.ndarray:
    """Z multiplied by C(n-1,2): integer-coefficient form of the criterion."""
    return z_matrix(d) * math.comb(d.n - 1, 2)


def _report(condition, margins: np.ndarray, witness_of, sampled=False):
    """Assemble a report from per-instance margins.

    witness_of(position) -> Witness for the instance at that position.
    Vacuous checks (no instances) hold with margin +inf and coverage 1.
    """
    checked = int(margins.size)
    if checked == 0:
        return DiagnosticReport(condition, True, math.inf, (), 1.0, 0, sampled)
    margin = float(margins.min())
    coverage = float(np.mean(margins > 0.0))
    bad = np.flatnonzero(margins <= 0.0)
    bad = bad[np.argsort(margins[bad], kind="stable")][:MAX_WITNESSES]
    witnesses = tuple(witness_of(int(k)) for k in bad)
    return DiagnosticReport(
        condition, margin > 0.0, margin, witnesses, coverage, checked, sampled
    )


def _check_same_taxa(d: DissimilarityMap, t: PhyloTree):
    if set(d.taxa) != set(t.leaf_names):
        raise MatrixError("map and tree are over different taxon sets")


# -- per-tree quartet tables --------------------------------------------------
#
# Everything below is pure bookkeeping over the reference tree and is
# independent of the dissimilarity map, so it is computed once per tree
# and cached. Quartet resolution uses integer path lengths (edge counts),
# which makes every membership test exact.


@dataclass
class _QuartetTables:
    order: tuple[str, ...]
    # resolved quartets, columns (a1, a2, b1, b2): true pairing (a1a2 : b1b2)
    res: np.ndarray
    internal_len: np.ndarray
    # additivity instances, columns (i, j, k, l, x, y): check w(kl:xy) > w(ij:xy)
    add: np.ndarray


_TABLES: "WeakKeyDictionary[PhyloTree, _QuartetTables]" = WeakKeyDictionary()
_ADD_CAP_BUILT: "WeakKeyDictionary[PhyloTree, bool]" = WeakKeyDictionary()


def _resolved_quartets(t_mat: np.ndarray, quads: np.ndarray):
    """Classify 4-subsets by integer four-point sums.

    Returns (res, mask): res has columns (a1,a2,b1,b2) giving the true
    cherries of each resolved quartet; mask marks resolved rows in quads.
    """
    i, j, k, l = quads.T
    s1 = t_mat[i, j] + t_mat[k, l]
    s2 = t_mat[i, k] + t_mat[j, l]
    s3 = t_mat[i, l] + t_mat[j, k]
    smallest = np.minimum(np.minimum(s1, s2), s3)
    e1, e2, e3 = s1 == smallest, s2 == smallest, s3 == smallest
    resolved = (e1.astype(np.int64) + e2 + e3) == 1
    a2 = np.where(e1, j, np.where(e2, k, l))
    b1 = np.where(e1, k, np.where(e2, j, j))
    b2 = np.where(e1, l, np.where(e2, l, k))
    res = np.stack([i, a2, b1, b2], axis=1)[resolved]
    return res, resolved


def _is_quartet_grid(t_mat, c1, c2, o1, o2):
    """Elementwise: is (c1 c2 : o1 o2) a quartet of the tree (broadcasted)."""
    cherry = t_mat[c1, c2] + t_mat[o1, o2]
    alt1 = t_mat[c1, o1] + t_mat[c2, o2]
    alt2 = t_mat[c1, o2] + t_mat[c2, o1]
    return (cherry < alt1) & (cherry < alt2)


def _interior_grid(t_mat: np.ndarray, res: np.ndarray, n: int):
    """interior[r, x]: is leaf x interior to resolved quartet r.

    Literal four-probe definition; positions occupied by the quartet's own
    taxa are left False (they are not candidates).
    """
    i = res[:, 0:1]
    j = res[:, 1:2]
    k = res[:, 2:3]
    l = res[:, 3:4]
    x = np.arange(n)[None, :]
    p1 = _is_quartet_grid(t_mat, i, k, x, l)
    p2 = _is_quartet_grid(t_mat, i, k, x, j)
    p3 = _is_quartet_grid(t_mat, i, x, j, l)
    p4 = _is_quartet_grid(t_mat, k, x, j, l)
    interior = ~(p1 | p2 | p3 | p4)
    rows = np.arange(res.shape[0])
    for col in range(4):
        interior[rows, res[:, col]] = False
    return interior


def _in_tree_pair_grid(t_mat: np.ndarray, c1, c2, n: int):
    """in_t[r, x, y]: is (c1[r] c2[r] : x y) a quartet of the tree."""
    cherry = (t_mat[c1, c2])[:, None, None] + t_mat[None, :, :]
    alt1 = t_mat[c1, :][:, :, None] + t_mat[c2, :][:, None, :]
    alt2 = t_mat[c1, :][:, None, :] + t_mat[c2, :][:, :, None]
    return (cherry < alt1) & (cherry < alt2)


def _build_tables(t: PhyloTree, with_additivity: bool) -> _QuartetTables:
    cached = _TABLES.get(t)
    if cached is not None and (not with_additivity or _ADD_CAP_BUILT.get(t)):
        return cached
    order = t.leaf_names
    n = len(order)
    t_mat = t.topo_matrix()
    met = t.metric_matrix()
    if n < 4:
        tables = _QuartetTables(order, np.zeros((0, 4), np.int64),
                                np.zeros(0), np.zeros((0, 6), np.int64))
        _TABLES[t] = tables
        _ADD_CAP_BUILT[t] = True
        return tables
    quads = np.array(list(itertools.combinations(range(n), 4)), dtype=np.int64)
    res, _ = _resolved_quartets(t_mat, quads)
    a1, a2, b1, b2 = res.T
    cherry = met[a1, a2] + met[b1, b2]
    cross = 0.5 * (met[a1, b1] + met[a2, b2] + met[a1, b2] + met[a2, b1])
    internal_len = 0.5 * (cross - cherry)

    add = np.zeros((0, 6), np.int64)
    if with_additivity and res.shape[0] and n >= 6:
        live = res[internal_len > ZERO_LENGTH_TOL]
        interior = _interior_grid(t_mat, live, n)
        in_quartet = np.zeros((live.shape[0], n), dtype=bool)
        rows = np.arange(live.shape[0])
        for col in range(4):
            in_quartet[rows, live[:, col]] = True
        outside = ~in_quartet
        exterior = outside & ~interior
        neq = ~np.eye(n, dtype=bool)[None, :, :]
        chunks = []
        for i_col, j_col, k_col, l_col in ((0, 1, 2, 3), (2, 3, 0, 1)):
            in_t = _in_tree_pair_grid(t_mat, live[:, i_col], live[:, j_col], n)
            mask = interior[:, :, None] & exterior[:, None, :] & ~in_t & neq
            r, xs, ys = np.nonzero(mask)
            chunk = np.stack(
                [live[r, i_col], live[r, j_col], live[r, k_col], live[r, l_col], xs, ys],
                axis=1,
            )
            chunks.append(chunk)
        add = np.concatenate(chunks, axis=0)
    tables = _QuartetTables(order, res, internal_len, add)
    _TABLES[t] = tables
    _ADD_CAP_BUILT[t] = bool(with_additivity)
    return tables


def _consistency_margins(v: np.ndarray, res: np.ndarray):
    a1, a2, b1, b2 = res.T
    w_true = 0.5 * (v[a1, b1] + v[a1, b2] + v[a2, b1] + v[a2, b2]) - v[a1, a2] - v[b1, b2]
    w_alt1 = 0.5 * (v[a1, a2] + v[a1, b2] + v[b1, a2] + v[b1, b2]) - v[a1, b1] - v[a2, b2]
    w_alt2 = 0.5 * (v[a1, a2] + v[a1, b1] + v[b2, a2] + v[b2, b1]) - v[a1, b2] - v[a2, b1]
    return w_true, w_alt1, w_alt2


def quartet_consistent(d: DissimilarityMap, t: PhyloTree) -> DiagnosticReport:
    """Does every resolved quartet of the tree win its w comparison on d?

    For each resolved quartet (ij:kl) of the reference tree, requires
    strictly w(ij:kl) > max of the two alternative resolutions. The margin
    is the smallest such gap; coverage is the per-quartet pass fraction.
    """
    _check_same_taxa(d, t)
    tables = _build_tables(t, with_additivity=False)
    v = d.aligned_values(tables.order)
    w_true, w_alt1, w_alt2 = _consistency_margins(v, tables.res)
    margins = w_true - np.maximum(w_alt1, w_alt2)
    order = tables.order
    res = tables.res

    def witness_of(pos: int) -> Witness:
        q = res[pos]
        return Witness(
            tuple(order[c] for c in q),
            {
                "w_true": float(w_true[pos]),
                "w_alt1": float(w_alt1[pos]),
                "w_alt2": float(w_alt2[pos]),
            },
        )

    return _report(Condition.QUARTET_CONSISTENCY, margins, witness_of)


def _additivity_values(v: np.ndarray, add: np.ndarray):
    """Per-instance (w(kl:xy), w(ij:xy)); the margin is their difference."""
    i, j, k, l, x, y = add.T
    w_far = 0.5 * (v[k, x] + v[k, y] + v[l, x] + v[l, y]) - v[k, l] - v[x, y]
    w_near = 0.5 * (v[i, x] + v[i, y] + v[j, x] + v[j, y]) - v[i, j] - v[x, y]
    return w_far, w_near


def quartet_additive(
    d: DissimilarityMap,
    t: PhyloTree,
    *,
    enumeration_cap: int = 25,
    sample_count: int = 50_000,
    rng: np.random.Generator | None = None,
) -> DiagnosticReport:
    """The interior/exterior w comparison over the reference tree.

    Instances are tuples (quartet (ij:kl) of T, x interior to it, y not
    interior, with (ij:xy) not a quartet of T); each must satisfy
    w(kl:xy) > w(ij:xy) strictly on d. Quartets whose internal path has
    (metric) length <= ZERO_LENGTH_TOL are skipped.

    Enumeration is exhaustive up to enumeration_cap taxa; beyond that,
    sample_count uniformly drawn candidate tuples are screened instead
    and the report is flagged as sampled.
    """
    _check_same_taxa(d, t)
    n = t.n_leaves
    order = t.leaf_names
    if n <= enumeration_cap:
        tables = _build_tables(t, with_additivity=True)
        v = d.aligned_values(order)
        add = tables.add
        w_far, w_near = _additivity_values(v, add)
        margins = w_far - w_near

        def witness_of(pos: int) -> Witness:
            row = add[pos]
            return Witness(
                tuple(order[c] for c in row),
                {"w_far": float(w_far[pos]), "w_near": float(w_near[pos])},
            )

        return _report(Condition.QUARTET_ADDITIVITY, margins, witness_of)

    gen = rng if rng is not None else np.random.default_rng(0)
    t_mat = t.topo_matrix()
    met = t.metric_matrix()
    v = d.aligned_values(order)
    # uniform 6-distinct-taxa tuples: (quartet, x, y) candidates
    picks = np.argsort(gen.random((sample_count, n)), axis=1)[:, :6]
    quads = np.sort(picks[:, :4], axis=1)
    res, resolved = _resolved_quartets(t_mat, quads)
    xs = picks[resolved, 4]
    ys = picks[resolved, 5]
    a1, a2, b1, b2 = res.T
    cherry = met[a1, a2] + met[b1, b2]
    cross = 0.5 * (met[a1, b1] + met[a2, b2] + met[a1, b2] + met[a2, b1])
    live = 0.5 * (cross - cherry) > ZERO_LENGTH_TOL
    res, xs, ys = res[live], xs[live], ys[live]

    def interior_mask(col_sets, x):
        i, j, k, l = col_sets
        p1 = _is_quartet_grid(t_mat, i, k, x, l)
        p2 = _is_quartet_grid(t_mat, i, k, x, j)
        p3 = _is_quartet_grid(t_mat, i, x, j, l)
        p4 = _is_quartet_grid(t_mat, k, x, j, l)
        return ~(p1 | p2 | p3 | p4)

    cols = (res[:, 0], res[:, 1], res[:, 2], res[:, 3])
    x_int = interior_mask(cols, xs)
    y_int = interior_mask(cols, ys)
    rows = []
    for i_c, j_c, k_c, l_c in ((0, 1, 2, 3), (2, 3, 0, 1)):
        in_t = _is_quartet_grid(t_mat, res[:, i_c], res[:, j_c], xs, ys)
        keep = x_int & ~y_int & ~in_t
        rows.append(np.stack(
            [res[keep, i_c], res[keep, j_c], res[keep, k_c], res[keep, l_c],
             xs[keep], ys[keep]], axis=1))
    add = np.concatenate(rows, axis=0)
    w_far, w_near = _additivity_values(v, add)
    margins = w_far - w_near

    def witness_of(pos: int) -> Witness:
        row = add[pos]
        return Witness(
            tuple(order[c] for c in row),
            {"w_far": float(w_far[pos]), "w_near": float(w_near[pos])},
        )

    return _report(Condition.QUARTET_ADDITIVITY, margins, witness_of, sampled=True)


def atteson_radius_check(d: DissimilarityMap, t: PhyloTree) -> DiagnosticReport:
    """Is d strictly within half the minimum edge length of the tree metric?

    Single-instance check: margin = min_edge/2 - linf(d, dT). The minimum
    runs over ALL edges, leaf edges included.
    """
    _check_same_taxa(d, t)
    d_t = t.tree_metric()
    linf = linf_distance(d, d_t)
    min_edge = min(length for _, _, length in t.edges())
    margin = 0.5 * min_edge - linf
    witnesses = ()
    if margin <= 0:
        diff = np.abs(d.values - d_t.aligned_values(d.taxa))
        ia, ib = np.unravel_index(int(np.argmax(diff)), diff.shape)
        witnesses = (Witness(
            (d.taxa[ia], d.taxa[ib]),
            {"deviation": float(diff[ia, ib]), "bound": 0.5 * min_edge},
        ),)
    return DiagnosticReport(
        Condition.ATTESON_RADIUS, margin > 0, float(margin), witnesses,
        1.0 if margin > 0 else 0.0, 1,
    )


def ab_consistent(d: DissimilarityMap, t: PhyloTree, edge: tuple[str, str]) -> DiagnosticReport:
    """Per-edge deviation condition for split A|B of an internal edge.

    Same-side pairs are checked one-sided (delta - delta_T < l(e)/4, no
    lower bound: same-side entries may be arbitrarily too small); pairs
    crossing the split are checked two-sided (|delta - delta_T| < l(e)/4).
    """
    _check_same_taxa(d, t)
    u, v_node = edge
    length = t.edge_length(u, v_node)
    if t.is_leaf(u) or t.is_leaf(v_node):
        raise TreeError(f"edge ({u!r}, {v_node!r}) is not an internal edge")
    if length <= 0:
        raise TreeError("the deviation condition needs a positive edge length")
    split = t.split_for_edge(u, v_node)
    order = t.leaf_names
    dev = d.aligned_values(order) - t.metric_matrix()
    side = np.array([split.side_of(name) for name in order])
    iu, ju = np.triu_indices(len(order), k=1)
    same = side[iu] == side[ju]
    bound = 0.25 * length
    slack = np.where(same, bound - dev[iu, ju], bound - np.abs(dev[iu, ju]))

    def witness_of(pos: int) -> Witness:
        return Witness(
            (order[iu[pos]], order[ju[pos]]),
            {
                "deviation": float(dev[iu[pos], ju[pos]]),
                "bound": bound,
                "same_side": float(same[pos]),
            },
        )

    return _report(Condition.AB_CONSISTENCY, slack, witness_of)


def guaranteed_edges(d: DissimilarityMap, t: PhyloTree) -> list[GuaranteedEdge]:
    """Internal splits certified to appear in the output of nj(d).

    Per internal edge: if 4*linf(d, dT) < l(e) the cheap uniform bound
    suffices (UNIFORM_LINF); otherwise the per-pair deviation check is
    run and, if it holds, the edge is certified as EDGE_DEVIATION.
    """
    _check_same_taxa(d, t)
    linf = linf_distance(d, t.tree_metric())
    out = []
    for u, v_node, length in t.internal_edges():
        if length <= 0:
            continue
        uniform_margin = 0.25 * length - linf
        if uniform_margin > 0:
            out.append(GuaranteedEdge(
                t.split_for_edge(u, v_node), GuaranteeKind.UNIFORM_LINF, float(uniform_margin)))
            continue
        report = ab_consistent(d, t, (u, v_node))
        if report.holds:
            out.append(GuaranteedEdge(
                t.split_for_edge(u, v_node), GuaranteeKind.EDGE_DEVIATION, report.margin))
    return out


def four_point_defect_lb(d: DissimilarityMap) -> float:
    """Lower bound on the l-inf distance from a 4-taxon map to ANY tree metric.

    With s1 >= s2 >= s3 the three pairwise sums, returns (s1 - s2)/4: if a
    tree metric were closer than that, each sum would move by less than
    (s1 - s2), but tree metrics need the top two sums equal.
    """
    if d.n != 4:
        raise MatrixError(f"four_point_defect_lb needs exactly 4 taxa, got {d.n}")
    v = d.values
    sums = sorted(
        (v[0, 1] + v[2, 3], v[0, 2] + v[1, 3], v[0, 3] + v[1, 2]), reverse=True
    )
    return float(sums[0] - sums[1]) / 4.0


# -- coefficient oracles -------------------------------------------------------


def z_edge_coefficient(t: PhyloTree, a: str, b: str, edge: tuple[str, str]) -> int:
    """Coefficient of l(edge) in the scaled Z(a,b) of a tree metric.

    With N+ the number of leaves on a's side of the edge and N- the number
    on the far side: -(N+ - 1)(N- - 1) when the edge lies on the a-b path,
    N-(N- - 1) otherwise.
    """
    if a == b:
        raise TreeError("need two distinct taxa")
    split = t.split_for_edge(*edge)
    n_minus = len(split.side_b) if split.side_of(a) == 0 else len(split.side_a)
    n_plus = t.n_leaves - n_minus
    if split.separates(a, b):
        return -(n_plus - 1) * (n_minus - 1)
    return n_minus * (n_minus - 1)


def z_entry_coefficient(n: int, pair1: Iterable[str], pair2: Iterable[str]) -> Fraction:
    """Coefficient of delta(pair2) in the scaled Z(pair1), by overlap size."""
    if n < 4:
        raise MatrixError("the scaled Z needs at least four taxa")
    p1, p2 = frozenset(pair1), frozenset(pair2)
    if len(p1) != 2 or len(p2) != 2:
        raise MatrixError("pairs must each contain two distinct taxa")
    overlap = len(p1 & p2)
    if overlap == 2:
        return Fraction(-math.comb(n - 2, 2))
    if overlap == 1:
        return Fraction(n - 3, 2)
    return Fraction(-1)


def s_statistic(d: DissimilarityMap, subset: Iterable[str], i: str, j: str) -> SStatistic:
    """S(d: A, i, j) = sum over pairs {a1,a2} in A of [Zs(a1,a2) - Zs(i,j)].

    Zs is the scaled Z. Positive S certifies that some pair inside A beats
    the contested pair (i, j) under the Z criterion. The formula itself
    only needs j outside A; callers interested in the split guarantees
    supply i in A, j in B for an internal split A|B.
    """
    names = tuple(sorted(set(subset)))
    if len(names) < 2:
        raise MatrixError("the subset must contain at least two taxa")
    if i == j:
        raise MatrixError("the contested taxa must be distinct")
    if j in names:
        raise MatrixError(f"contested taxon {j!r} must lie outside the subset")
    zs = scaled_z_matrix(d)
    ii, jj = d.index(i), d.index(j)
    idx = [d.index(name) for name in names]
    total = 0.0
    base = zs[ii, jj]
    for p, q in itertools.combinations(idx, 2):
        total += zs[p, q] - base
    return SStatistic(float(total), names, i, j)


def s_entry_case(subset: Iterable[str], i: str, j: str, x: str, y: str) -> int:
    """Classify entry {x,y} into the eight coefficient classes of S(d:A,i,j).

    Requires i in A and j outside A. Classes: 1 the contested pair itself;
    2/3 entries joining i resp. j to A-{i}; 4/5 entries joining i resp. j
    to the complement; 6 one endpoint on each side; 7 both in A-{i};
    8 both outside.
    """
    a_set = frozenset(subset)
    if i not in a_set or j in a_set:
        raise MatrixError("need i inside the subset and j outside")
    if x == y:
        raise MatrixError("entry taxa must be distinct")
    pair = frozenset((x, y))
    if pair == frozenset((i, j)):
        return 1
    in_a = pair & (a_set - {i})
    rest = pair - a_set - {j}
    if i in pair:
        return 2 if in_a else 4
    if j in pair:
        return 3 if in_a else 5
    if len(in_a) == 2:
        return 7
    if len(rest) == 2:
        return 8
    return 6


def s_entry_coefficient(case: int, size_a: int, size_b: int) -> tuple[Fraction, int]:
    """Closed-form coefficient and multiplicity for one S entry class.

    size_a, size_b are the split side sizes (n = size_a + size_b). Returns
    (coefficient of a delta entry of that class in S, number of entries in
    the class).
    """
    if size_a < 2 or size_b < 1:
        raise MatrixError("need size_a >= 2 and size_b >= 1")
    a, b = size_a, size_b
    n = a + b
    c2 = lambda x: Fraction(x * (x - 1), 2)
    half = Fraction(1, 2)
    table = {
        1: (half * (a - 1) * (b - 1) + c2(a) * c2(n - 2), 1),
        2: (-c2(b) - half * (n - 3) * c2(a), a - 1),
        3: (half * (a - 1) * (b - 1) - half * (n - 3) * c2(a), a - 1),
        4: (half * (a - 1) * (b - 1) - half * (n - 3) * c2(a), b - 1),
        5: (-c2(a) - half * (n - 3) * c2(a), b - 1),
        6: (half * (a - 1) * (b - 1) + c2(a), (a - 1) * (b - 1)),
        7: (-c2(b) + c2(a), (a - 1) * (a - 2) // 2),
        8: (Fraction(0), (b - 1) * (b - 2) // 2),
    }
    if case not in table:
        raise MatrixError(f"case must be 1..8, got {case}")
    value, mult = table[case]
    return Fraction(value), int(mult)
