"""Root bookkeeping: records, deduplication, subfield counting.

Numerical roots cannot be intersected exactly, so every set operation here
goes through a clustering step with an explicit absolute tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import InvalidInput

__all__ = [
    "RootRecord",
    "RootSet",
    "DEFAULT_DEDUPE_TOL",
    "cluster_values",
    "dedupe",
    "union_count",
    "intersection_term_count",
    "subfield_table",
    "fractional_binomial_count",
    "binomial_branch_table",
]

DEFAULT_DEDUPE_TOL = 1e-8

BranchLabel = tuple[int, int, int, int]  # (term_k, variant, primary, secondary)


@dataclass(frozen=True)
class RootRecord:
    """One converged root together with the branch that produced it."""

    value: complex
    term_k: int
    variant_q: int = 0
    primary_branch: int = 0
    secondary_branch: int = 0
    residual: float = 0.0
    iterations: int = 0
    polished: bool = False
    on_branch: bool = True
    aliases: tuple[BranchLabel, ...] = ()

    def __post_init__(self):
        if not self.residual >= 0:
            raise InvalidInput(f"residual must be >= 0, got {self.residual!r}")
        if self.term_k < 1:
            raise InvalidInput(f"term_k must be >= 1, got {self.term_k!r}")

    @property
    def label(self) -> BranchLabel:
        return (self.term_k, self.variant_q, self.primary_branch, self.secondary_branch)

    @property
    def sort_key(self) -> tuple[int, int, int, int]:
        return (self.term_k, self.primary_branch, self.secondary_branch, self.variant_q)


@dataclass(frozen=True)
class RootSet:
    """Deduplicated roots: pairwise farther apart than ``dedupe_tol``."""

    records: tuple[RootRecord, ...] = ()
    dedupe_tol: float = DEFAULT_DEDUPE_TOL

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[RootRecord]:
        return iter(self.records)

    def values(self) -> list[complex]:
        return [r.value for r in self.records]


def cluster_values(values: Sequence[complex], tol: float) -> list[int]:
    """Cluster ids (transitive closure of ``|a - b| <= tol``), numbered by first appearance."""
    if not tol > 0:
        raise InvalidInput("tolerance must be positive")
    n = len(values)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    order = sorted(range(n), key=lambda i: values[i].real)
    for a, i in enumerate(order):
        for j in order[a + 1 :]:
            if values[j].real - values[i].real > tol:
                break
            if abs(values[j] - values[i]) <= tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    ids: dict[int, int] = {}
    return [ids.setdefault(find(i), len(ids)) for i in range(n)]


def dedupe(records: Iterable[RootRecord], tol: float = DEFAULT_DEDUPE_TOL) -> RootSet:
    """Merge records whose values lie within ``tol`` of each other.

    Each cluster keeps the record with the smallest residual; the labels of
    the others (and any aliases they already carried) move into its
    ``aliases``. Clusters are emitted in order of first appearance.
    """
    records = list(records)
    if not tol > 0:
        raise InvalidInput("dedupe tolerance must be positive")
    ids = cluster_values([r.value for r in records], tol)
    clusters: dict[int, list[RootRecord]] = {}
    for cid, rec in zip(ids, records):
        clusters.setdefault(cid, []).append(rec)
    out = []
    for members in clusters.values():
        best = min(members, key=lambda r: r.residual)
        aliases = list(best.aliases)
        for r in members:
            if r is best:
                continue
            for lab in (r.label, *r.aliases):
                if lab != best.label and lab not in aliases:
                    aliases.append(lab)
        out.append(replace(best, aliases=tuple(aliases)))
    return RootSet(tuple(out), tol)


def union_count(table: Mapping[frozenset[int], int]) -> int:
    """Inclusion-exclusion: ``|A_1 u ... u A_n|`` from all k-wise intersection sizes.

    ``table`` maps every non-empty subset ``J`` of ``{1..n}`` (as a
    frozenset) to ``|intersection of A_j for j in J|``.
    """
    keys = [frozenset(k) for k in table]
    members = sorted(set().union(*keys)) if keys else []
    n = len(members)
    if n == 0:
        raise InvalidInput("empty intersection table")
    if n > 10:
        raise InvalidInput("at most 10 sets are supported")
    norm = {frozenset(k): v for k, v in table.items()}
    total = 0
    for size in range(1, n + 1):
        sign = 1 if size % 2 else -1
        for subset in combinations(members, size):
            key = frozenset(subset)
            if key not in norm:
                raise InvalidInput(f"missing intersection entry for {sorted(key)}")
            total += sign * int(norm[key])
    return total


def intersection_term_count(n: int) -> int:
    """Number of summands in an n-set inclusion-exclusion expansion, ``2**n - 1``."""
    if isinstance(n, bool) or int(n) != n or not 1 <= n <= 62:
        raise InvalidInput(f"n must be an integer in [1, 62], got {n!r}")
    return (1 << int(n)) - 1


def subfield_table(
    subfields: Sequence[Sequence[complex]], tol: float = DEFAULT_DEDUPE_TOL
) -> tuple[dict[frozenset[int], int], int]:
    """Intersection sizes between root sets, matched within ``tol``.

    Returns ``(table, distinct)`` where ``table`` is keyed by 1-based
    subfield index sets and ``distinct`` is the number of clusters over all
    subfields.
    """
    flat = [v for sub in subfields for v in sub]
    ids = cluster_values(flat, tol) if flat else []
    owned: list[set[int]] = []
    pos = 0
    for sub in subfields:
        owned.append(set(ids[pos : pos + len(sub)]))
        pos += len(sub)
    table = {}
    idx = range(1, len(subfields) + 1)
    for size in range(1, len(subfields) + 1):
        for subset in combinations(idx, size):
            common = set.intersection(*(owned[i - 1] for i in subset))
            table[frozenset(subset)] = len(common)
    return table, len(set(ids))


def fractional_binomial_count(m: float, s: float, q_negative: bool) -> int:
    """Headline root-count rule for ``a z^m + b z^s = q``: ``floor(max(m, s)) + [q < 0]``."""
    top = max(float(m), float(s))
    if not (math.isfinite(top) and top > 0):
        raise InvalidInput("the larger exponent must be positive and finite")
    return math.floor(top) + (1 if q_negative else 0)


def binomial_branch_table(alpha: float, u_positive: bool) -> list[int]:
    """Branch indices k giving the distinct roots of ``z**alpha = u`` for real u.

    ``alpha`` is a positive non-integer. With ``[a] = floor(alpha)``:

    * odd ``[a]``, u > 0: ``0, +-1, ..., +-([a]-1)/2``
    * odd ``[a]``, u < 0: the same plus ``-([a]+1)/2``
    * even ``[a]``, u > 0: ``0, +-1, ..., +-[a]/2``
    * even ``[a]``, u < 0: ``0, +-1, ..., +-([a]/2 - 1)`` plus ``-[a]/2``

    For ``alpha < 1`` and u < 0 the list is empty: ``z**alpha`` with the
    principal logarithm never reaches the negative axis.
    """
    alpha = float(alpha)
    if not (math.isfinite(alpha) and alpha > 0):
        raise InvalidInput(f"alpha must be positive and finite, got {alpha!r}")
    if alpha == int(alpha):
        raise InvalidInput("integer exponent: use the indices 0..alpha-1")
    ia = math.floor(alpha)
    if ia == 0 and not u_positive:
        return []
    if ia % 2:
        half = (ia - 1) // 2
        extra = [-(ia + 1) // 2] if not u_positive else []
    else:
        half = ia // 2 if u_positive else ia // 2 - 1
        extra = [-(ia // 2)] if not u_positive else []
    out = [0]
    for j in range(1, half + 1):
        out += [j, -j]
    for e in extra:
        if e not in out:
            out.append(e)
    return out
