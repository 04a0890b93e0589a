import math

import numpy as np
import pytest

from njrad import (
    MatrixError,
    linf_distance,
    nj,
    quartet_additive,
    quartet_consistent,
    reduction_defect_instance,
    rf_distance,
    verify_reduction_defect,
)
from njrad.counterexamples import example_eight_leaf, example_five_leaf


def test_five_leaf_matrices_are_exact(five):
    _, exact, delta = five
    assert exact.taxa == ("a", "b", "c", "d", "e")
    expected_exact = np.array([
        [0, 2, 3, 6, 6],
        [2, 0, 3, 6, 6],
        [3, 3, 0, 5, 5],
        [6, 6, 5, 0, 4],
        [6, 6, 5, 4, 0],
    ], dtype=float)
    assert np.array_equal(exact.values, expected_exact)
    assert exact.get("a", "d") == 6.0
    assert delta.get("a", "e") == 3.0
    # the perturbation touches exactly the (a, e) entry
    diff = delta.values - exact.values
    ia, ie = exact.index("a"), exact.index("e")
    assert diff[ia, ie] == -3.0
    assert np.count_nonzero(diff) == 2


def test_five_leaf_tree_realizes_matrix(five):
    t, exact, _ = five
    assert np.array_equal(t.tree_metric().aligned_values(exact.taxa), exact.values)
    assert sorted(length for _, _, length in t.internal_edges()) == [1.0, 2.0]
    by_small = {tuple(sorted(min(s.side_a, s.side_b, key=len))) for s in t.splits()}
    assert by_small == {("a", "b"), ("d", "e")}


def test_five_leaf_headline_behavior(five):
    t, _, delta = five
    assert not quartet_consistent(delta, t).holds
    out, _ = nj(delta)
    assert rf_distance(out, t) == 0


def test_five_leaf_regeneration_is_bit_stable():
    t1, e1, d1 = example_five_leaf()
    t2, e2, d2 = example_five_leaf()
    assert np.array_equal(e1.values, e2.values)
    assert np.array_equal(d1.values, d2.values)
    assert sorted(t1.edges()) == sorted(t2.edges())


def test_eight_leaf_matrices(eight):
    t, exact, delta = eight
    assert delta.get("x", "m") == 4.4
    assert exact.get("a", "b") == pytest.approx(0.1)
    assert linf_distance(t.tree_metric(), exact) < 1e-12
    assert linf_distance(delta, exact) == pytest.approx(1.4)


def test_eight_leaf_headline_behavior(eight):
    t, _, delta = eight
    assert quartet_consistent(delta, t).holds
    assert not quartet_additive(delta, t).holds
    out, trace = nj(delta)
    assert trace.pairs[0] == ("x", "y")
    assert out.is_cherry("x", "y")
    assert not t.is_cherry("x", "y")
    assert rf_distance(out, t) > 0


def test_eight_leaf_regeneration_is_bit_stable():
    _, e1, d1 = example_eight_leaf()
    _, e2, d2 = example_eight_leaf()
    assert np.array_equal(e1.values, e2.values)
    assert np.array_equal(d1.values, d2.values)


# -- the reduction defect family -------------------------------------------------


@pytest.fixture(scope="module")
def defect():
    return reduction_defect_instance()


def test_defect_instance_shape(defect):
    assert defect.n_inner == 40
    assert defect.tree.n_leaves == 44
    assert set(defect.inner_taxa) == {f"x{k}" for k in range(40)}
    inner_len = defect.epsilon / (2 * defect.n_inner - 2)
    inner_edges = [e for e in defect.tree.edges() if e[2] == inner_len]
    assert len(inner_edges) == 2 * defect.n_inner - 2
    assert sum(e[2] for e in inner_edges) == pytest.approx(defect.epsilon)


def test_defect_instance_exact_error_pattern(defect):
    err = defect.perturbed.values - defect.exact.values
    assert linf_distance(defect.perturbed, defect.exact) == 1.0
    taxa = defect.exact.taxa
    pos = {name: k for k, name in enumerate(taxa)}
    expected = np.zeros_like(err)

    def put(p, q, val):
        expected[pos[p], pos[q]] = expected[pos[q], pos[p]] = val

    put("i", "j", -1.0)
    put("a", "b", 1.0)
    put("a", "i", 1.0)
    put("b", "j", 1.0)
    for x in defect.inner_taxa:
        put("i", x, 1.0)
        put("j", x, 1.0)
        put("a", x, -1.0)
        put("b", x, -1.0)
    assert np.array_equal(err, expected)


def test_defect_instance_geometry(defect):
    d = defect.exact
    alpha = defect.alpha
    assert d.get("i", "j") == 2 * alpha + 3.5
    assert d.get("a", "b") == 2 * alpha + 3.5
    assert d.get("i", "a") == 2 * alpha
    # the inner taxa are metrically within the epsilon budget of each other
    worst = max(
        d.get(x, y)
        for k, x in enumerate(defect.inner_taxa)
        for y in defect.inner_taxa[k + 1:]
    )
    assert worst <= defect.epsilon + 1e-15


def test_defect_instance_validation():
    with pytest.raises(MatrixError):
        reduction_defect_instance(n=1)
    with pytest.raises(MatrixError):
        reduction_defect_instance(beta=4.0)
    with pytest.raises(MatrixError):
        reduction_defect_instance(epsilon=0.0)


def test_defect_instance_deterministic():
    a = reduction_defect_instance(n=6)
    b = reduction_defect_instance(n=6)
    assert np.array_equal(a.perturbed.values, b.perturbed.values)
    assert sorted(a.tree.edges()) == sorted(b.tree.edges())


def test_verify_reduction_defect(defect):
    got = verify_reduction_defect(defect)
    assert got.first_join == ("i", "j")
    assert got.reduced_defect_lb == pytest.approx(1.0625, abs=1e-12)
    assert got.reduced_defect_lb > 1.0
    assert got.reduced_defect_lb > defect.beta / 4.0


def test_defect_survives_parameter_changes():
    # the (i, j)-first-join claim is asymptotic in n; these stay inside
    # the verified range
    for kwargs in ({"n": 20}, {"alpha": 0.5}, {"alpha": 5.0}, {"beta": 4.01},
                   {"rng": np.random.default_rng(7)}):
        inst = reduction_defect_instance(**kwargs)
        got = verify_reduction_defect(inst)
        assert got.first_join == ("i", "j")
        assert got.reduced_defect_lb == pytest.approx(1.0625, abs=1e-9)


def test_defect_verification_total_for_small_n():
    # below the asymptotic range another pair may join first; the probe
    # quartet is patched up rather than erroring out
    for n in (2, 3, 4, 10):
        inst = reduction_defect_instance(n=n)
        got = verify_reduction_defect(inst)
        assert len(got.first_join) == 2
        assert math.isfinite(got.reduced_defect_lb)
        assert got.reduced_defect_lb >= 0.0


def test_defect_reduced_entries(defect):
    # one averaged round leaves the quartet {a, b, joined, inner} off by
    # more than any tree metric can absorb
    reduced = defect.perturbed.reduce_average("i", "j")
    alpha = defect.alpha
    assert reduced.get("a", "j_i_j") == 2 * alpha + 2.25
    assert reduced.get("a", "b") == 2 * alpha + 4.5
