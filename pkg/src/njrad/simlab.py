"""Sequence-simulation benchmark: random trees, Jukes-Cantor evolution and
distance estimation, per-replicate condition tallies, CSV output.

Randomness is fully deterministic given the sweep seed: the tree for slot
t uses stream (seed, t); the alignment for (tree, length, replicate) uses
stream (seed, tree, length, replicate). Replicates are therefore
independent and order-insensitive.
"""

from __future__ import annotations

import csv
import io
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .diagnostics import atteson_radius_check, quartet_additive, quartet_consistent
from .dissim import DissimilarityMap
from .errors import MatrixError, TreeError
from .njcore import nj
from .treemodel import PhyloTree, random_tree, rf_distance

ALPHABET = "ACGT"

CSV_HEADER = (
    "tree_id,replicate,seq_len,nj_correct,atteson,consistent,additive,"
    "pct_consistent_quartets,pct_additive_tuples,rf_distance,saturated"
)


def log_spaced_lengths(count: int = 28, lo: int = 100, hi: int = 10_000) -> tuple[int, ...]:
    """Strictly increasing integer grid, log-uniform from lo to hi."""
    if count < 1 or lo < 1 or hi <= lo:
        raise ValueError("need count >= 1 and 1 <= lo < hi")
    grid = np.unique(np.rint(np.geomspace(lo, hi, count)).astype(int))
    return tuple(int(x) for x in grid)


@dataclass(frozen=True)
class SweepConfig:
    tree_count: int = 35
    taxa_count: int = 20
    edge_length: float = 0.1
    replicates_per_length: int = 100
    lengths: tuple[int, ...] = log_spaced_lengths()
    seed: int = 0
    additivity_enumeration_cap: int = 25

    def __post_init__(self):
        if min(self.tree_count, self.taxa_count, self.replicates_per_length) < 1:
            raise ValueError("counts must be positive")
        if self.taxa_count < 4:
            raise ValueError("need at least four taxa")
        if self.edge_length <= 0:
            raise ValueError("edge length must be positive")
        lengths = tuple(int(x) for x in self.lengths)
        if not lengths:
            raise ValueError("need at least one sequence length")
        if any(b <= a for a, b in zip(lengths, lengths[1:])):
            raise ValueError("sequence lengths must be strictly increasing")
        object.__setattr__(self, "lengths", lengths)


@dataclass(frozen=True)
class SweepRecord:
    tree_id: int
    replicate: int
    seq_len: int
    nj_correct: int
    atteson: int
    consistent: int
    additive: int
    pct_consistent_quartets: float
    pct_additive_tuples: float
    rf_distance: int
    saturated: int


@dataclass(frozen=True)
class SweepSummary:
    seq_len: int
    records: int
    saturated: int
    frac_nj_correct: float
    frac_atteson: float
    frac_consistent: float
    frac_additive: float
    frac_consistent_and_additive: float
    mean_pct_consistent_quartets: float
    mean_pct_additive_tuples: float


@dataclass(frozen=True)
class Alignment:
    """Equal-length nucleotide sequences, one row per taxon, coded 0..3."""

    taxa: tuple[str, ...]
    codes: np.ndarray

    def sequence(self, name: str) -> str:
        row = self.codes[self.taxa.index(name)]
        return "".join(ALPHABET[c] for c in row)


def jc_evolve(tree: PhyloTree, seq_len: int, rng: np.random.Generator) -> Alignment:
    """Evolve one alignment down the tree under the Jukes-Cantor model.

    The root sequence is uniform i.i.d.; along a branch of length t each
    site changes with probability 3/4 (1 - exp(-4t/3)), landing uniformly
    on one of the three other symbols.
    """
    if seq_len < 1:
        raise ValueError("sequence length must be positive")
    for _, _, length in tree.edges():
        if length < 0:
            raise TreeError("evolution needs nonnegative edge lengths")
    root = tree.nodes[0]
    seqs = {root: rng.integers(0, 4, size=seq_len, dtype=np.uint8)}
    queue = deque([root])
    seen = {root}
    while queue:
        node = queue.popleft()
        for child, t in tree.neighbors(node):
            if child in seen:
                continue
            seen.add(child)
            p_change = 0.75 * (1.0 - math.exp(-4.0 * t / 3.0))
            seq = seqs[node].copy()
            hit = rng.random(seq_len) < p_change
            n_hit = int(hit.sum())
            if n_hit:
                seq[hit] = (seq[hit] + rng.integers(1, 4, size=n_hit, dtype=np.uint8)) % 4
            seqs[child] = seq
            queue.append(child)
    taxa = tree.leaf_names
    return Alignment(taxa, np.stack([seqs[name] for name in taxa]))


def jc_distance(alignment: Alignment) -> tuple[DissimilarityMap, tuple[tuple[str, str], ...]]:
    """Jukes-Cantor corrected distances, d = -3/4 ln(1 - 4 p_hat / 3).

    Pairs with mismatch fraction >= 3/4 have no finite estimate; they are
    reported as saturated and filled with (largest finite estimate + 1) so
    the map stays complete for tree building.
    """
    codes = alignment.codes
    n = len(alignment.taxa)
    if n < 2:
        raise MatrixError("an alignment needs at least two sequences")
    p_hat = np.zeros((n, n))
    for i in range(n):
        p_hat[i, i + 1:] = (codes[i + 1:] != codes[i]).mean(axis=1)
    p_hat = p_hat + p_hat.T
    saturated_mask = p_hat >= 0.75
    with np.errstate(invalid="ignore", divide="ignore"):
        dist = -0.75 * np.log1p(-(4.0 / 3.0) * np.where(saturated_mask, 0.0, p_hat))
    np.fill_diagonal(dist, 0.0)
    np.fill_diagonal(saturated_mask, False)
    saturated = []
    if saturated_mask.any():
        finite_max = float(dist[~saturated_mask].max()) if (~saturated_mask).any() else 0.0
        dist[saturated_mask] = finite_max + 1.0
        iu, ju = np.nonzero(np.triu(saturated_mask, k=1))
        saturated = [(alignment.taxa[a], alignment.taxa[b]) for a, b in zip(iu, ju)]
    return DissimilarityMap(alignment.taxa, dist), tuple(saturated)


def run_sweep(cfg: SweepConfig, progress=None) -> list[SweepRecord]:
    """One record per (tree, sequence length, replicate).

    Saturated replicates still get a tree and a full record, but carry
    saturated=1 so aggregation can exclude them from condition rates.
    """
    records = []
    for tree_id in range(cfg.tree_count):
        tree = random_tree(
            cfg.taxa_count, cfg.edge_length, np.random.default_rng([cfg.seed, tree_id])
        )
        for seq_len in cfg.lengths:
            for replicate in range(cfg.replicates_per_length):
                rng = np.random.default_rng([cfg.seed, tree_id, seq_len, replicate])
                alignment = jc_evolve(tree, seq_len, rng)
                d, saturated_pairs = jc_distance(alignment)
                built, _ = nj(d)
                rf = rf_distance(built, tree)
                consistency = quartet_consistent(d, tree)
                additivity = quartet_additive(
                    d, tree, enumeration_cap=cfg.additivity_enumeration_cap,
                    rng=np.random.default_rng([cfg.seed, tree_id, seq_len, replicate, 1]),
                )
                atteson = atteson_radius_check(d, tree)
                records.append(SweepRecord(
                    tree_id=tree_id,
                    replicate=replicate,
                    seq_len=seq_len,
                    nj_correct=int(rf == 0),
                    atteson=int(atteson.holds),
                    consistent=int(consistency.holds),
                    additive=int(additivity.holds),
                    pct_consistent_quartets=100.0 * consistency.coverage,
                    pct_additive_tuples=100.0 * additivity.coverage,
                    rf_distance=rf,
                    saturated=int(bool(saturated_pairs)),
                ))
            if progress is not None:
                progress(f"tree {tree_id + 1}/{cfg.tree_count} len {seq_len} done")
    return records


def summarize(records: list[SweepRecord]) -> list[SweepSummary]:
    """Per-length aggregates. Saturated replicates count toward the
    reconstruction rate but are excluded from the condition rates."""
    if not records:
        raise ValueError("no records to summarize")
    out = []
    for seq_len in sorted({r.seq_len for r in records}):
        bucket = [r for r in records if r.seq_len == seq_len]
        clean = [r for r in bucket if not r.saturated]
        mean = lambda vals: float(np.mean(vals)) if vals else math.nan
        out.append(SweepSummary(
            seq_len=seq_len,
            records=len(bucket),
            saturated=sum(r.saturated for r in bucket),
            frac_nj_correct=mean([r.nj_correct for r in bucket]),
            frac_atteson=mean([r.atteson for r in clean]),
            frac_consistent=mean([r.consistent for r in clean]),
            frac_additive=mean([r.additive for r in clean]),
            frac_consistent_and_additive=mean(
                [r.consistent * r.additive for r in clean]),
            mean_pct_consistent_quartets=mean(
                [r.pct_consistent_quartets for r in clean]),
            mean_pct_additive_tuples=mean(
                [r.pct_additive_tuples for r in clean]),
        ))
    return out


def records_to_csv(records: list[SweepRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for r in records:
        writer.writerow([
            r.tree_id, r.replicate, r.seq_len, r.nj_correct, r.atteson,
            r.consistent, r.additive,
            f"{r.pct_consistent_quartets:.6f}", f"{r.pct_additive_tuples:.6f}",
            r.rf_distance, r.saturated,
        ])
    return buf.getvalue()


def summaries_to_csv(summaries: list[SweepSummary]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([
        "seq_len", "records", "saturated", "frac_nj_correct", "frac_atteson",
        "frac_consistent", "frac_additive", "frac_consistent_and_additive",
        "mean_pct_consistent_quartets", "mean_pct_additive_tuples",
    ])
    for s in summaries:
        writer.writerow([
            s.seq_len, s.records, s.saturated,
            f"{s.frac_nj_correct:.6f}", f"{s.frac_atteson:.6f}",
            f"{s.frac_consistent:.6f}", f"{s.frac_additive:.6f}",
            f"{s.frac_consistent_and_additive:.6f}",
            f"{s.mean_pct_consistent_quartets:.6f}",
            f"{s.mean_pct_additive_tuples:.6f}",
        ])
    return buf.getvalue()
