"""Dissimilarity maps over named taxa, their algebra, and PHYLIP I/O.

A dissimilarity map is a finite symmetric matrix with zero diagonal.
Entries may be negative: several constructions here deliberately push
individual entries below zero and everything downstream must cope.
"""

from __future__ import annotations

import re
import warnings
from typing import Iterable, Sequence

import numpy as np

from .errors import MatrixError, PhylipParseError

TAXON_NAME_RE = re.compile(r"^[A-Za-z0-9_.\-]+$")

#: Tolerance used when accepting slightly asymmetric PHYLIP input.
PHYLIP_SYMMETRY_TOL = 1e-6


def _check_taxa(taxa: Sequence[str]) -> tuple[str, ...]:
    names = tuple(taxa)
    if len(names) < 2:
        raise MatrixError("a dissimilarity map needs at least two taxa")
    seen = set()
    for name in names:
        if not isinstance(name, str) or not TAXON_NAME_RE.match(name):
            raise MatrixError(f"invalid taxon name: {name!r}")
        if name in seen:
            raise MatrixError(f"duplicate taxon name: {name!r}")
        seen.add(name)
    return names


class DissimilarityMap:
    """Immutable symmetric map ``delta`` on a finite ordered taxon set."""

    __slots__ = ("_taxa", "_values", "_index")

    def __init__(self, taxa: Sequence[str], values):
        self._taxa = _check_taxa(taxa)
        v = np.array(values, dtype=float)
        n = len(self._taxa)
        if v.shape != (n, n):
            raise MatrixError(f"expected a {n}x{n} matrix, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise MatrixError("entries must be finite")
        if not np.array_equal(v, v.T):
            raise MatrixError("matrix is not symmetric")
        if np.any(np.diagonal(v) != 0.0):
            raise MatrixError("diagonal must be zero")
        v.flags.writeable = False
        self._values = v
        self._index = {name: k for k, name in enumerate(self._taxa)}

    # -- basic accessors -------------------------------------------------

    @property
    def taxa(self) -> tuple[str, ...]:
        return self._taxa

    @property
    def n(self) -> int:
        return len(self._taxa)

    @property
    def values(self) -> np.ndarray:
        """Read-only view of the underlying matrix, in ``taxa`` order."""
        return self._values

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise MatrixError(f"unknown taxon: {name!r}") from None

    def get(self, a: str, b: str) -> float:
        return float(self._values[self.index(a), self.index(b)])

    def __repr__(self) -> str:
        return f"DissimilarityMap(n={self.n}, taxa={self._taxa[:4]}...)"

    # -- derived maps ----------------------------------------------------

    def aligned_values(self, taxa: Sequence[str]) -> np.ndarray:
        """Matrix re-indexed to the given taxon order (same taxon set)."""
        if set(taxa) != set(self._taxa) or len(taxa) != self.n:
            raise MatrixError("taxon sets differ")
        idx = np.array([self._index[t] for t in taxa])
        return self._values[np.ix_(idx, idx)]

    def submap(self, taxa: Sequence[str]) -> "DissimilarityMap":
        """Restriction to a subset of taxa, in the order given."""
        names = tuple(taxa)
        idx = np.array([self.index(t) for t in names])
        if len(set(names)) != len(names):
            raise MatrixError("duplicate taxa in restriction")
        return DissimilarityMap(names, self._values[np.ix_(idx, idx)])

    def shift(self, a: str, eps: float) -> "DissimilarityMap":
        """Add ``eps`` to every entry involving taxon ``a``.

        Leaves the relative order of the agglomeration criterion over
        pairs unchanged, which is what makes shifted maps interchangeable
        inputs for the joining algorithms.
        """
        i = self.index(a)
        v = np.array(self._values)
        v[i, :] += eps
        v[:, i] += eps
        v[i, i] = 0.0
        return DissimilarityMap(self._taxa, v)

    def _reduce(self, a: str, b: str, rooted: bool) -> "DissimilarityMap":
        if a == b:
            raise MatrixError("cannot merge a taxon with itself")
        if self.n < 3:
            raise MatrixError("need at least three taxa to merge a pair")
        ia, ib = self.index(a), self.index(b)
        merged = f"j_{a}_{b}"
        if merged in self._index:
            raise MatrixError(f"merged taxon name {merged!r} already in use")
        keep = [k for k in range(self.n) if k not in (ia, ib)]
        names = tuple(self._taxa[k] for k in keep) + (merged,)
        m = len(keep)
        v = np.zeros((m + 1, m + 1))
        v[:m, :m] = self._values[np.ix_(keep, keep)]
        row = 0.5 * (self._values[ia, keep] + self._values[ib, keep])
        if rooted:
            row = row - 0.5 * self._values[ia, ib]
        v[m, :m] = row
        v[:m, m] = row
        return DissimilarityMap(names, v)

    def reduce_average(self, a: str, b: str) -> "DissimilarityMap":
        """Merge ``a, b`` into ``j_<a>_<b>`` with the plain average rule."""
        return self._reduce(a, b, rooted=False)

    def reduce_rooted(self, a: str, b: str) -> "DissimilarityMap":
        """Merge ``a, b`` placing the merged taxon at the pair's midpoint.

        Subtracts ``delta(a, b) / 2`` from the averaged row, so on a tree
        metric with ``(a, b)`` a cherry the merged taxon sits exactly at
        the cherry's former root.
        """
        return self._reduce(a, b, rooted=True)


def linf_distance(d1: DissimilarityMap, d2: DissimilarityMap) -> float:
    """Max absolute entry difference between two maps on the same taxa."""
    m2 = d2.aligned_values(d1.taxa)
    return float(np.max(np.abs(d1.values - m2))) if d1.n else 0.0


# -- PHYLIP square-matrix format ------------------------------------------


def parse_phylip(text: str) -> DissimilarityMap:
    """Parse a square PHYLIP distance matrix.

    Accepts arbitrary whitespace between tokens (rows may wrap lines).
    Input asymmetric by at most ``PHYLIP_SYMMETRY_TOL`` is symmetrized by
    averaging, with a warning; larger asymmetry is an error.
    """
    tokens = text.split()
    if not tokens:
        raise PhylipParseError("empty input")
    try:
        n = int(tokens[0])
    except ValueError:
        raise PhylipParseError(f"expected taxon count, got {tokens[0]!r}") from None
    if n < 2:
        raise PhylipParseError("taxon count must be at least 2")
    expected = 1 + n * (n + 1)
    if len(tokens) != expected:
        raise PhylipParseError(
            f"expected {expected} whitespace-separated tokens for {n} taxa, got {len(tokens)}"
        )
    names = []
    values = np.zeros((n, n))
    pos = 1
    for i in range(n):
        names.append(tokens[pos])
        pos += 1
        for j in range(n):
            try:
                values[i, j] = float(tokens[pos])
            except ValueError:
                raise PhylipParseError(
                    f"unparsable distance {tokens[pos]!r} in row {names[-1]!r}"
                ) from None
            pos += 1
    asym = float(np.max(np.abs(values - values.T)))
    if asym > PHYLIP_SYMMETRY_TOL:
        raise PhylipParseError(f"matrix asymmetric by {asym:g}")
    if asym > 0.0:
        warnings.warn(f"symmetrizing input asymmetric by {asym:g}", stacklevel=2)
        values = 0.5 * (values + values.T)
    bad_diag = float(np.max(np.abs(np.diagonal(values))))
    if bad_diag > PHYLIP_SYMMETRY_TOL:
        raise PhylipParseError(f"nonzero diagonal entry {bad_diag:g}")
    np.fill_diagonal(values, 0.0)
    return DissimilarityMap(names, values)


def write_phylip(d: DissimilarityMap) -> str:
    """Serialize to square PHYLIP; values keep at least 10 significant digits."""
    lines = [str(d.n)]
    width = max(len(t) for t in d.taxa)
    for i, name in enumerate(d.taxa):
        row = " ".join(f"{x:.10g}" for x in d.values[i])
        lines.append(f"{name:<{width}} {row}")
    return "\n".join(lines) + "\n"
