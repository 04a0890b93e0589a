"""Hand-built instances that separate the success conditions.

Two fixed fixtures (a five-leaf and an eight-leaf tree, each with its
tree metric and a perturbed map) plus a parameterized family showing that
the half-minimum-edge radius condition is not preserved by the reduction
step: one join can leave a map strictly farther from every tree metric
than the input was from the true one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dissim import DissimilarityMap
from .errors import MatrixError
from .njcore import q_matrix, _select_join
from .diagnostics import four_point_defect_lb
from .treemodel import PhyloTree


def example_five_leaf() -> tuple[PhyloTree, DissimilarityMap, DissimilarityMap]:
    """Five taxa: the perturbed map is NOT quartet consistent with the tree,
    yet joining still recovers the topology (the guarantee is sufficient,
    not necessary). The perturbation lowers delta(a,e) from 6 to 3.
    """
    tree = PhyloTree([
        ("a", "u", 1.0), ("b", "u", 1.0),
        ("u", "v", 1.0), ("c", "v", 1.0),
        ("v", "w", 2.0),
        ("d", "w", 2.0), ("e", "w", 2.0),
    ])
    taxa = ("a", "b", "c", "d", "e")
    exact = DissimilarityMap(taxa, [
        [0, 2, 3, 6, 6],
        [2, 0, 3, 6, 6],
        [3, 3, 0, 5, 5],
        [6, 6, 5, 0, 4],
        [6, 6, 5, 4, 0],
    ])
    perturbed = DissimilarityMap(taxa, [
        [0, 2, 3, 6, 3],
        [2, 0, 3, 6, 6],
        [3, 3, 0, 5, 5],
        [6, 6, 5, 0, 4],
        [3, 6, 5, 4, 0],
    ])
    return tree, exact, perturbed


def example_eight_leaf() -> tuple[PhyloTree, DissimilarityMap, DissimilarityMap]:
    """Eight taxa: the perturbed map IS quartet consistent with the tree,
    yet the Q criterion is minimized at the non-cherry (x, y), so joining
    outputs a different topology. Consistency alone is not enough past
    seven taxa; the additivity condition is what fails here.
    """
    tree = PhyloTree([
        ("a", "u", 0.05), ("b", "u", 0.05),
        ("u", "v", 0.15), ("c", "v", 0.2),
        ("v", "s1", 0.8), ("x", "s1", 1.0),
        ("s1", "s2", 1.0), ("y", "s2", 1.0),
        ("s2", "v2", 0.8), ("p", "v2", 0.2),
        ("v2", "u2", 0.15),
        ("m", "u2", 0.05), ("n", "u2", 0.05),
    ])
    taxa = ("x", "y", "a", "b", "c", "m", "n", "p")
    exact = DissimilarityMap(taxa, [
        [0.0, 3.0, 2.0, 2.0, 2.0, 3.0, 3.0, 3.0],
        [3.0, 0.0, 3.0, 3.0, 3.0, 2.0, 2.0, 2.0],
        [2.0, 3.0, 0.0, 0.1, 0.4, 3.0, 3.0, 3.0],
        [2.0, 3.0, 0.1, 0.0, 0.4, 3.0, 3.0, 3.0],
        [2.0, 3.0, 0.4, 0.4, 0.0, 3.0, 3.0, 3.0],
        [3.0, 2.0, 3.0, 3.0, 3.0, 0.0, 0.1, 0.4],
        [3.0, 2.0, 3.0, 3.0, 3.0, 0.1, 0.0, 0.4],
        [3.0, 2.0, 3.0, 3.0, 3.0, 0.4, 0.4, 0.0],
    ])
    perturbed = DissimilarityMap(taxa, [
        [0.0, 2.7, 2.6, 2.6, 2.6, 4.4, 4.4, 4.4],
        [2.7, 0.0, 4.4, 4.4, 4.4, 2.6, 2.6, 2.6],
        [2.6, 4.4, 0.0, 0.1, 0.4, 2.7, 2.7, 2.7],
        [2.6, 4.4, 0.1, 0.0, 0.4, 2.7, 2.7, 2.7],
        [2.6, 4.4, 0.4, 0.4, 0.0, 2.7, 2.7, 2.7],
        [4.4, 2.6, 2.7, 2.7, 2.7, 0.0, 0.1, 0.4],
        [4.4, 2.6, 2.7, 2.7, 2.7, 0.1, 0.0, 0.4],
        [4.4, 2.6, 2.7, 2.7, 2.7, 0.4, 0.4, 0.0],
    ])
    return tree, exact, perturbed


@dataclass(frozen=True)
class ReductionDefectInstance:
    """A tree, its metric, and a unit-l-inf perturbation whose first join
    strictly increases the distance to the nearest tree metric.

    The tree has cherries (i, a) and (j, b) on leaf edges of length alpha,
    joined through a path of length 3.5, a bridge of length beta > 4 to
    the rest, and a random agglomerated subtree of total length <= epsilon
    carrying the inner taxa.
    """

    tree: PhyloTree
    exact: DissimilarityMap
    perturbed: DissimilarityMap
    inner_taxa: tuple[str, ...]
    n_inner: int
    alpha: float
    beta: float
    epsilon: float


class DefectVerification(NamedTuple):
    first_join: tuple[str, str]
    reduced_defect_lb: float


def reduction_defect_instance(
    n: int = 40,
    alpha: float = 1.0,
    beta: float = 4.2,
    epsilon: float = 1e-4,
    rng: np.random.Generator | None = None,
) -> ReductionDefectInstance:
    """Build the parameterized family member with n inner taxa.

    The perturbation moves every entry by -1, 0 or +1: it pushes the
    non-cherry (i, j) together (and i, j away from everything else) while
    pulling a and b toward the inner taxa. The l-inf error is exactly 1,
    yet for beta > 4 the half-minimum-edge condition transfers to no
    reduced map: after the (i, j) join the map on {a, b, joined, x} has
    four-point defect 4.25/4, independent of which inner x is used.
    """
    if n < 2:
        raise MatrixError("need at least two inner taxa")
    if not beta > 4:
        raise MatrixError("the bridge length must exceed 4")
    if not epsilon > 0:
        raise MatrixError("the inner subtree budget must be positive")
    gen = rng if rng is not None else np.random.default_rng(0)

    inner = [f"x{k}" for k in range(n)]
    inner_len = epsilon / (2 * n - 2)
    edges = [
        ("i", "u1", float(alpha)), ("a", "u1", float(alpha)),
        ("j", "u2", float(alpha)), ("b", "u2", float(alpha)),
        ("u1", "c", 1.75), ("u2", "c", 1.75),
        ("c", "v", float(beta)),
    ]
    active = list(inner)
    fresh = 0
    while len(active) > 2:
        pick1, pick2 = sorted(gen.choice(len(active), size=2, replace=False))
        parent = f"y{fresh}"
        fresh += 1
        edges.append((parent, active[pick1], inner_len))
        edges.append((parent, active[pick2], inner_len))
        active.pop(pick2)
        active.pop(pick1)
        active.append(parent)
    edges.append(("v", active[0], inner_len))
    edges.append(("v", active[1], inner_len))
    tree = PhyloTree(edges)

    exact = tree.tree_metric()
    taxa = exact.taxa
    pos = {name: k for k, name in enumerate(taxa)}
    err = np.zeros((len(taxa), len(taxa)))

    def bump(p: str, q: str, amount: float):
        err[pos[p], pos[q]] = amount
        err[pos[q], pos[p]] = amount

    bump("i", "j", -1.0)
    bump("a", "b", +1.0)
    bump("a", "i", +1.0)
    bump("b", "j", +1.0)
    for x in inner:
        bump("i", x, +1.0)
        bump("j", x, +1.0)
        bump("a", x, -1.0)
        bump("b", x, -1.0)
    perturbed = DissimilarityMap(taxa, exact.values + err)
    return ReductionDefectInstance(
        tree, exact, perturbed, tuple(sorted(inner)), n,
        float(alpha), float(beta), float(epsilon),
    )


def verify_reduction_defect(inst: ReductionDefectInstance) -> DefectVerification:
    """Run one joining round on the perturbed map and measure the damage.

    Reports the first pair the Q criterion selects and the four-point
    defect lower bound of the reduced map restricted to {a, b, joined
    pair, smallest inner taxon}: a lower bound on the l-inf distance from
    the reduced map to EVERY tree metric.
    """
    d = inst.perturbed
    pair, _ = _select_join(d, q_matrix(d), None)
    reduced = d.reduce_average(*pair)
    merged = f"j_{pair[0]}_{pair[1]}"
    # the proof's probe quartet is {a, b, merged, inner}; away from the
    # verified parameter range the first join may consume one of those, so
    # substitute the merged taxon / next surviving inner taxon as needed
    alive = set(reduced.taxa)
    names: list[str] = []
    for want in ("a", "b", merged):
        name = want if want in alive else merged
        if name not in names:
            names.append(name)
    for candidate in inst.inner_taxa + reduced.taxa:
        if len(names) == 4:
            break
        if candidate in alive and candidate not in names:
            names.append(candidate)
    quartet = reduced.submap(tuple(names))
    return DefectVerification(pair, four_point_defect_lb(quartet))
