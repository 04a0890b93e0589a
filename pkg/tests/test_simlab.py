import csv
import io
import math

import numpy as np
import pytest

from njrad import (
    MatrixError,
    PhyloTree,
    TreeError,
    nj,
    random_tree,
    rf_distance,
)
from njrad.simlab import (
    CSV_HEADER,
    Alignment,
    SweepConfig,
    SweepRecord,
    jc_distance,
    jc_evolve,
    log_spaced_lengths,
    records_to_csv,
    run_sweep,
    summaries_to_csv,
    summarize,
)


def two_taxon_tree(t):
    return PhyloTree([("a", "b", t)])


def test_log_spaced_lengths_default():
    grid = log_spaced_lengths()
    assert len(grid) == 28
    assert grid[0] == 100
    assert grid[-1] == 10_000
    assert all(b > a for a, b in zip(grid, grid[1:]))
    assert all(isinstance(x, int) for x in grid)


def test_log_spaced_lengths_validation():
    with pytest.raises(ValueError):
        log_spaced_lengths(0)
    with pytest.raises(ValueError):
        log_spaced_lengths(5, 100, 100)


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(taxa_count=3)
    with pytest.raises(ValueError):
        SweepConfig(edge_length=0.0)
    with pytest.raises(ValueError):
        SweepConfig(lengths=(200, 200))
    with pytest.raises(ValueError):
        SweepConfig(lengths=())
    with pytest.raises(ValueError):
        SweepConfig(tree_count=0)
    assert SweepConfig().lengths == log_spaced_lengths()


def test_jc_evolve_zero_edges_copies_root():
    t = PhyloTree([("a", "h", 0.0), ("b", "h", 0.0), ("c", "h", 0.0)])
    aln = jc_evolve(t, 500, np.random.default_rng(3))
    assert np.array_equal(aln.codes[0], aln.codes[1])
    assert np.array_equal(aln.codes[0], aln.codes[2])


def test_jc_evolve_deterministic():
    t = random_tree(6, 0.1, np.random.default_rng(1))
    a = jc_evolve(t, 300, np.random.default_rng(9))
    b = jc_evolve(t, 300, np.random.default_rng(9))
    assert a.taxa == b.taxa
    assert np.array_equal(a.codes, b.codes)


def test_jc_evolve_validation():
    t = two_taxon_tree(0.5)
    with pytest.raises(ValueError):
        jc_evolve(t, 0, np.random.default_rng(0))
    with pytest.raises(TreeError):
        jc_evolve(two_taxon_tree(-0.5), 10, np.random.default_rng(0))


def test_jc_evolve_matches_substitution_probability():
    # a single branch is a per-site Bernoulli with the model's p(t)
    t_branch = 0.3
    seq_len = 200_000
    aln = jc_evolve(two_taxon_tree(t_branch), seq_len, np.random.default_rng(11))
    p_hat = float((aln.codes[0] != aln.codes[1]).mean())
    p = 0.75 * (1.0 - math.exp(-4.0 * t_branch / 3.0))
    se = math.sqrt(p * (1 - p) / seq_len)
    assert abs(p_hat - p) < 4 * se


def test_alignment_sequence_text():
    aln = Alignment(("a", "b"), np.array([[0, 1, 2, 3], [3, 3, 3, 3]], dtype=np.uint8))
    assert aln.sequence("a") == "ACGT"
    assert aln.sequence("b") == "TTTT"


def test_jc_distance_inverts_evolution():
    t_branch = 0.3
    aln = jc_evolve(two_taxon_tree(t_branch), 200_000, np.random.default_rng(12))
    d, saturated = jc_distance(aln)
    assert saturated == ()
    assert abs(d.get("a", "b") - t_branch) < 0.01


def test_jc_distance_saturated_pairs():
    codes = np.array([
        [0, 0, 0, 0],
        [1, 1, 1, 1],
        [0, 0, 0, 1],
    ], dtype=np.uint8)
    d, saturated = jc_distance(Alignment(("a", "b", "c"), codes))
    assert set(saturated) == {("a", "b"), ("b", "c")}
    finite = d.get("a", "c")
    assert finite == pytest.approx(-0.75 * math.log(1 - (4 / 3) * 0.25))
    assert d.get("a", "b") == pytest.approx(finite + 1.0)
    assert d.get("b", "c") == pytest.approx(finite + 1.0)


def test_jc_distance_needs_two_rows():
    with pytest.raises(MatrixError):
        jc_distance(Alignment(("a",), np.zeros((1, 8), dtype=np.uint8)))


@pytest.fixture(scope="module")
def small_sweep():
    cfg = SweepConfig(
        tree_count=2, taxa_count=6, edge_length=0.3,
        replicates_per_length=2, lengths=(200, 400), seed=5,
    )
    return cfg, run_sweep(cfg)


def test_run_sweep_record_grid(small_sweep):
    cfg, records = small_sweep
    assert len(records) == cfg.tree_count * len(cfg.lengths) * cfg.replicates_per_length
    seen = {(r.tree_id, r.seq_len, r.replicate) for r in records}
    assert len(seen) == len(records)
    assert {r.seq_len for r in records} == {200, 400}


def test_run_sweep_deterministic(small_sweep):
    cfg, records = small_sweep
    assert run_sweep(cfg) == records


def test_sweep_records_internally_consistent(small_sweep):
    _, records = small_sweep
    for r in records:
        assert r.nj_correct == int(r.rf_distance == 0)
        if r.atteson:
            assert r.consistent and r.additive
        if r.consistent and r.additive:
            assert r.nj_correct
        assert 0.0 <= r.pct_consistent_quartets <= 100.0
        assert 0.0 <= r.pct_additive_tuples <= 100.0
        if r.consistent:
            assert r.pct_consistent_quartets == 100.0
        if r.additive:
            assert r.pct_additive_tuples == 100.0
        assert r.saturated in (0, 1)


def test_summarize_buckets(small_sweep):
    _, records = small_sweep
    summaries = summarize(records)
    assert [s.seq_len for s in summaries] == [200, 400]
    for s in summaries:
        assert s.records == 4
        for frac in (s.frac_nj_correct, s.frac_atteson, s.frac_consistent,
                     s.frac_additive, s.frac_consistent_and_additive):
            assert math.isnan(frac) or 0.0 <= frac <= 1.0


def test_summarize_excludes_saturated_from_condition_rates():
    base = dict(
        tree_id=0, replicate=0, seq_len=100, nj_correct=1, atteson=1,
        consistent=1, additive=1, pct_consistent_quartets=100.0,
        pct_additive_tuples=100.0, rf_distance=0, saturated=0,
    )
    clean = SweepRecord(**base)
    dirty = SweepRecord(**{
        **base, "replicate": 1, "nj_correct": 0, "atteson": 0, "consistent": 0,
        "additive": 0, "pct_consistent_quartets": 50.0,
        "pct_additive_tuples": 50.0, "rf_distance": 4, "saturated": 1,
    })
    s = summarize([clean, dirty])[0]
    assert s.records == 2
    assert s.saturated == 1
    assert s.frac_nj_correct == 0.5  # reconstruction counts every record
    assert s.frac_atteson == 1.0     # condition rates skip the saturated one
    assert s.frac_consistent == 1.0
    assert s.mean_pct_consistent_quartets == 100.0


def test_summarize_empty():
    with pytest.raises(ValueError):
        summarize([])


def test_records_to_csv_layout(small_sweep):
    _, records = small_sweep
    text = records_to_csv(records)
    lines = text.strip().split("\n")
    assert lines[0] == CSV_HEADER
    assert len(lines) == len(records) + 1
    rows = list(csv.DictReader(io.StringIO(text)))
    assert int(rows[0]["tree_id"]) == records[0].tree_id
    assert float(rows[0]["pct_consistent_quartets"]) == pytest.approx(
        records[0].pct_consistent_quartets
    )


def test_summaries_to_csv_layout(small_sweep):
    _, records = small_sweep
    text = summaries_to_csv(summarize(records))
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 2
    assert int(rows[0]["seq_len"]) == 200
    assert set(rows[0]) >= {"seq_len", "records", "frac_nj_correct", "frac_atteson"}


def test_long_sequences_recover_the_tree():
    tree = random_tree(6, 0.1, np.random.default_rng(21))
    aln = jc_evolve(tree, 300_000, np.random.default_rng(22))
    d, saturated = jc_distance(aln)
    assert saturated == ()
    built, _ = nj(d)
    assert rf_distance(built, tree) == 0
