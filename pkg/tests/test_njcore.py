import itertools
import math

import numpy as np
import pytest

from njrad import (
    DissimilarityMap,
    MatrixError,
    Reduction,
    four_point_topology,
    fnj,
    nj,
    q_matrix,
    rf_distance,
    w_value,
    z_matrix,
)
from njrad.treemodel import QuartetTopology
from _helpers import atteson_perturbation, random_binary_tree, random_symmetric_map


def q_oracle(d):
    # literal per-entry evaluation, no vectorization shared with the library
    n = d.n
    r = [sum(d.get(a, b) for b in d.taxa) for a in d.taxa]
    out = np.full((n, n), math.inf)
    for i, a in enumerate(d.taxa):
        for j, b in enumerate(d.taxa):
            if i != j:
                out[i, j] = d.get(a, b) - (r[i] + r[j]) / (n - 2)
    return out

def z_oracle(d):
    n = d.n
    out = np.full((n, n), -math.inf)
    for i, j in itertools.combinations(range(n), 2):
        rest = [k for k in range(n) if k not in (i, j)]
        ws = [
            w_value(d, d.taxa[i], d.taxa[j], d.taxa[k], d.taxa[l])
            for k, l in itertools.combinations(rest, 2)
        ]
        out[i, j] = out[j, i] = sum(ws) / math.comb(n - 1, 2)
    return out

def argmin_pair(d, q):
    i, j = divmod(int(np.argmin(q)), d.n)
    return tuple(sorted((d.taxa[i], d.taxa[j])))


def test_q_matrix_matches_definition(five, eight, rng):
    for d in (five[2], eight[2], random_symmetric_map(rng, 9)):
        q = q_matrix(d)
        o = q_oracle(d)
        mask = np.isfinite(o)
        assert np.abs(q[mask] - o[mask]).max() < 1e-12


def test_q_matrix_eight_values(eight):
    _, _, d = eight
    q = q_matrix(d)
    ix, iy = d.index("x"), d.index("y")
    assert q[ix, iy] == pytest.approx(-5.2)
    ia, ib = d.index("a"), d.index("b")
    im, in_ = d.index("m"), d.index("n")
    assert q[ia, ib] == pytest.approx(q[im, in_], abs=1e-12)
    assert argmin_pair(d, q) == ("x", "y")


def test_q_matrix_constant_map():
    c = 2.5
    v = np.full((4, 4), c)
    np.fill_diagonal(v, 0.0)
    d = DissimilarityMap(("a", "b", "c", "d"), v)
    q = q_matrix(d)
    off = q[np.isfinite(q)]
    assert np.allclose(off, -2.0 * c)


def test_q_argmin_is_cherry_on_tree_metric(five, rng):
    t, exact, _ = five
    assert argmin_pair(exact, q_matrix(exact)) in {("a", "b"), ("d", "e")}
    for _ in range(20):
        tree = random_binary_tree(rng, int(rng.integers(5, 10)))
        d = tree.tree_metric()
        a, b = argmin_pair(d, q_matrix(d))
        assert tree.is_cherry(a, b)


def test_q_matrix_too_small():
    d = DissimilarityMap(("a", "b"), np.zeros((2, 2)))
    with pytest.raises(MatrixError):
        q_matrix(d)


def test_w_value_five_exact(five):
    _, exact, _ = five
    assert w_value(exact, "a", "b", "d", "e") == 6.0
    assert w_value(exact, "d", "e", "a", "b") == 6.0
    assert w_value(exact, "b", "a", "e", "d") == 6.0
    # a wrong resolution scores minus the internal path length
    assert w_value(exact, "a", "d", "b", "e") == -3.0


def test_w_value_constant_map():
    v = np.full((5, 5), 3.0)
    np.fill_diagonal(v, 0.0)
    d = DissimilarityMap(tuple("abcde"), v)
    assert w_value(d, "a", "b", "c", "d") == 0.0


def test_w_value_perturbed_five(five):
    _, _, delta = five
    wins = w_value(delta, "a", "e", "b", "c")
    assert wins > w_value(delta, "a", "b", "c", "e")
    assert wins > w_value(delta, "a", "c", "b", "e")


def test_w_value_repeated_taxon(five):
    with pytest.raises(MatrixError):
        w_value(five[1], "a", "a", "b", "c")


def test_z_matrix_matches_definition(five, eight, rng):
    for d in (five[2], eight[2], random_symmetric_map(rng, 8)):
        z = z_matrix(d)
        o = z_oracle(d)
        mask = np.isfinite(o)
        assert np.abs(z[mask] - o[mask]).max() < 1e-12


def test_z_plus_q_is_pairwise_constant(rng):
    # the two selection criteria rank pairs identically
    for _ in range(5):
        n = int(rng.integers(4, 11))
        d = random_symmetric_map(rng, n)
        q, z = q_matrix(d), z_matrix(d)
        iu, ju = np.triu_indices(n, k=1)
        s = z[iu, ju] + q[iu, ju]
        assert float(s.max() - s.min()) < 1e-9


def test_z_matrix_four_taxa_is_w_third(rng):
    d = random_symmetric_map(rng, 4)
    z = z_matrix(d)
    t = d.taxa
    assert z[0, 1] == pytest.approx(w_value(d, t[0], t[1], t[2], t[3]) / 3.0)


def test_z_argmax_eight(eight):
    _, _, d = eight
    z = z_matrix(d)
    i, j = divmod(int(np.argmax(z)), d.n)
    assert tuple(sorted((d.taxa[i], d.taxa[j]))) == ("x", "y")


def test_z_matrix_too_small():
    d = DissimilarityMap(("a", "b", "c"), np.zeros((3, 3)))
    with pytest.raises(MatrixError):
        z_matrix(d)


def test_four_point_on_exact_quartet(five):
    _, exact, _ = five
    topo = four_point_topology(exact.submap(("a", "b", "d", "e")))
    assert topo == QuartetTopology.resolved("a", "b", "d", "e")
    assert not topo.tie


def test_four_point_star_on_constant():
    v = np.full((4, 4), 1.0)
    np.fill_diagonal(v, 0.0)
    d = DissimilarityMap(("a", "b", "c", "d"), v)
    topo = four_point_topology(d)
    assert not topo.is_resolved


def test_four_point_perturbed_five(five):
    _, _, delta = five
    topo = four_point_topology(delta.submap(("a", "b", "c", "e")))
    assert topo == QuartetTopology.resolved("a", "e", "b", "c")
    assert not topo.tie


def test_four_point_two_way_tie():
    v = np.array(
        [[0.0, 1.0, 1.0, 2.0],
         [1.0, 0.0, 2.0, 1.0],
         [1.0, 2.0, 0.0, 1.0],
         [2.0, 1.0, 1.0, 0.0]]
    )
    d = DissimilarityMap(("a", "b", "c", "d"), v)
    topo = four_point_topology(d)
    assert topo.tie
    assert topo == QuartetTopology.resolved("a", "b", "c", "d")


def test_four_point_arity(five):
    with pytest.raises(MatrixError):
        four_point_topology(five[1])


def test_nj_five_perturbed_recovers_tree(five):
    t, exact, delta = five
    tree, trace = nj(delta)
    assert tree.splits() == t.splits()
    assert rf_distance(tree, t) == 0
    assert len(trace) == 2
    # on the exact metric the estimated lengths reproduce the tree itself
    on_exact, _ = nj(exact)
    internal = sorted(length for _, _, length in on_exact.internal_edges())
    assert internal == pytest.approx([1.0, 2.0])


def test_nj_eight_keeps_long_cherry(eight):
    t, _, d = eight
    tree, trace = nj(d)
    assert tree.is_cherry("x", "y")
    assert trace.pairs[0] == ("x", "y")
    assert rf_distance(tree, t) > 0


def test_nj_recovers_tree_metrics(rng):
    for n in range(4, 11):
        tree = random_binary_tree(rng, n)
        d = tree.tree_metric()
        for reduction in (Reduction.AVERAGE, Reduction.ROOTED):
            out, trace = nj(d, reduction=reduction)
            assert rf_distance(out, tree) == 0
            assert len(trace) == n - 3


def test_nj_three_taxa_star():
    from njrad import PhyloTree, linf_distance

    star = PhyloTree([("a", "h", 1.0), ("b", "h", 2.0), ("c", "h", 3.0)])
    out, trace = nj(star.tree_metric())
    assert len(trace) == 0
    assert out.splits() == set()
    assert linf_distance(out.tree_metric(), star.tree_metric()) < 1e-12


def test_nj_tie_rule_is_honored():
    v = np.full((5, 5), 1.0)
    np.fill_diagonal(v, 0.0)
    d = DissimilarityMap(tuple("abcde"), v)
    _, trace = nj(d, tie_rule=lambda cands: cands[-1])
    assert trace.pairs[0] == ("d", "e")
    with pytest.raises(MatrixError):
        nj(d, tie_rule=lambda cands: ("a", "zz"))


def test_nj_too_small():
    d = DissimilarityMap(("a", "b"), np.zeros((2, 2)))
    with pytest.raises(MatrixError):
        nj(d)
    with pytest.raises(MatrixError):
        fnj(d)


def test_nj_rejects_unknown_reduction(five):
    with pytest.raises(MatrixError):
        nj(five[2], reduction="average")


def test_nj_shift_invariance(rng):
    for _ in range(15):
        n = int(rng.integers(4, 10))
        d = random_symmetric_map(rng, n)
        taxon = d.taxa[int(rng.integers(n))]
        shifted = d.shift(taxon, float(rng.normal()) * 4.0)
        t0, tr0 = nj(d)
        t1, tr1 = nj(shifted)
        assert tr0.pairs == tr1.pairs
        assert t0.splits() == t1.splits()


def test_nj_reduction_variants_share_trace(rng):
    for _ in range(15):
        d = random_symmetric_map(rng, int(rng.integers(4, 10)))
        ta, tra = nj(d, reduction=Reduction.AVERAGE)
        tb, trb = nj(d, reduction=Reduction.ROOTED)
        assert tra.pairs == trb.pairs
        assert ta.splits() == tb.splits()


def test_fnj_recovers_tree_metrics(rng):
    for n in (5, 8, 12, 20):
        tree = random_binary_tree(rng, n)
        out, trace = fnj(tree.tree_metric())
        assert rf_distance(out, tree) == 0
        assert len(trace) == n - 3


def test_fnj_matches_nj_under_small_noise(rng):
    for _ in range(20):
        tree = random_binary_tree(rng, int(rng.integers(5, 11)))
        d = atteson_perturbation(tree, rng)
        slow, _ = nj(d)
        fast, _ = fnj(d)
        assert fast.splits() == slow.splits()
        assert rf_distance(slow, tree) == 0


def test_fnj_permutation_equivariance(eight, rng):
    _, _, d = eight
    order = list(d.taxa)
    rng.shuffle(order)
    a = fnj(d)[0].splits()
    b = fnj(d.submap(tuple(order)))[0].splits()
    assert a == b


def test_nj_branch_lengths_exact_on_tree_metric(rng):
    from njrad import linf_distance

    tree = random_binary_tree(rng, 9)
    d = tree.tree_metric()
    out, _ = nj(d)
    assert linf_distance(out.tree_metric(), d) < 1e-9
