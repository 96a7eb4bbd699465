import math
import random
from itertools import combinations

import pytest

from branchroots.catalog import (
    RootRecord,
    binomial_branch_table,
    cluster_values,
    dedupe,
    fractional_binomial_count,
    intersection_term_count,
    subfield_table,
    union_count,
)
from branchroots.errors import InvalidInput


def rec(v, p=0, res=0.0, k=1):
    return RootRecord(complex(v), k, primary_branch=p, residual=res)


def test_dedupe_keeps_best_and_aliases():
    rs = dedupe([rec(1, 0, 1e-12), rec(1 + 1e-10, 1, 1e-15), rec(3, 2)], 1e-8)
    assert len(rs) == 2
    best = rs.records[0]
    assert best.primary_branch == 1
    assert best.aliases == ((1, 0, 0, 0),)


def test_dedupe_idempotent():
    rng = random.Random(1)
    recs = [rec(complex(rng.randint(0, 5), rng.randint(0, 2)) + rng.uniform(0, 1e-9), p=i) for i in range(40)]
    once = dedupe(recs, 1e-8)
    twice = dedupe(once.records, 1e-8)
    assert once.records == twice.records
    values = once.values()
    for a, b in combinations(values, 2):
        assert abs(a - b) > 1e-8


def test_dedupe_tolerance_controls_merging():
    recs = [rec(1), rec(1 + 1e-7)]
    assert len(dedupe(recs, 1e-8)) == 2
    assert len(dedupe(recs, 1e-6)) == 1
    with pytest.raises(InvalidInput):
        dedupe(recs, 0)


def test_cluster_transitive():
    assert cluster_values([0, 0.6, 1.2, 5], 0.7) == [0, 0, 0, 1]


def test_record_validation():
    with pytest.raises(InvalidInput):
        RootRecord(1j, 0)
    with pytest.raises(InvalidInput):
        RootRecord(1j, 1, residual=-1)


def _brute_union(sets):
    return len(set().union(*sets))


def _table(sets):
    n = len(sets)
    return {
        frozenset(c): len(set.intersection(*(sets[i - 1] for i in c)))
        for size in range(1, n + 1)
        for c in combinations(range(1, n + 1), size)
    }


def test_union_count_random_systems():
    rng = random.Random(2024)
    for _ in range(200):
        n = rng.randint(1, 6)
        sets = [set(rng.sample(range(15), rng.randint(0, 10))) for _ in range(n)]
        assert union_count(_table(sets)) == _brute_union(sets)


def test_union_count_missing_entry():
    t = _table([{1, 2}, {2, 3}])
    del t[frozenset({1, 2})]
    with pytest.raises(InvalidInput):
        union_count(t)


def test_intersection_term_count():
    assert [intersection_term_count(n) for n in (1, 2, 3, 10)] == [1, 3, 7, 1023]
    with pytest.raises(InvalidInput):
        intersection_term_count(0)


def test_subfield_table_agrees_with_union():
    a = [1, 2, 3 + 1j]
    b = [2 + 1e-12, 5]
    c = [1, 5, 7]
    table, distinct = subfield_table([a, b, c], 1e-8)
    assert table[frozenset({1})] == 3
    assert table[frozenset({1, 2})] == 1
    assert table[frozenset({1, 2, 3})] == 0
    assert distinct == 5 == union_count(table)


def test_binomial_tables():
    assert binomial_branch_table(math.pi, True) == [0, 1, -1]
    assert binomial_branch_table(math.pi, False) == [0, 1, -1, -2]
    assert binomial_branch_table(math.pi + 1, True) == [0, 1, -1, 2, -2]
    assert binomial_branch_table(math.pi + 1, False) == [0, 1, -1, -2]
    with pytest.raises(InvalidInput):
        binomial_branch_table(3, True)


@pytest.mark.parametrize("alpha", [0.5, 1.3, 2.7, math.pi, 4.2, 5.9, 7.01])
@pytest.mark.parametrize("u", [2.0, -2.0])
def test_binomial_table_enumerates_all_principal_roots(alpha, u):
    # oracle: z = |u|^(1/a) e^{i theta} with a*theta = arg(u) + 2 pi k, |theta| <= pi
    arg = 0.0 if u > 0 else math.pi
    expected = {k for k in range(-20, 21) if -math.pi < (arg + 2 * math.pi * k) / alpha <= math.pi}
    assert set(binomial_branch_table(alpha, u > 0)) == expected


def test_fractional_binomial_count():
    assert fractional_binomial_count(math.pi, 1, False) == 3
    assert fractional_binomial_count(math.pi, 0, True) == 4
    with pytest.raises(InvalidInput):
        fractional_binomial_count(-1, -2, False)


def test_reference_examples():
    assert len(dedupe([rec(1.0), rec(1.0000000567)], 1e-6)) == 1
    assert len(dedupe([rec(2), rec(3)], 1e-6)) == 2
    assert len(dedupe([], 1e-6)) == 0
    three = {frozenset(s): v for s, v in [((1,), 2), ((2,), 2), ((3,), 2), ((1, 2), 1), ((1, 3), 1), ((2, 3), 1), ((1, 2, 3), 1)]}
    assert union_count(three) == 4
    assert union_count({frozenset({1}): 7}) == 7
    assert union_count({frozenset({1}): 3, frozenset({2}): 4, frozenset({1, 2}): 0}) == 7
    assert intersection_term_count(5) == 31
    assert fractional_binomial_count(math.pi + 1, 0, False) == 4
    assert fractional_binomial_count(2, 1, False) == 2
