import math

import pytest

from branchroots.errors import DomainError, InvalidInput, UnknownScenario
from branchroots.scenarios import get_scenario, golden_entries, list_scenarios, run_scenario, zeta_phi
from branchroots.special_fn import zeta

IDS = [
    "trinomial-L1", "trinomial-L2", "exp-trinomial-a", "exp-trinomial-b",
    "exp3-w0", "exp3-w1", "exp3-w2", "exp3-caseb", "three-exp-a", "three-exp-b",
    "zeta-a1", "zeta-a2", "zeta-b1", "zeta-b2",
    "binomial-pi-pos", "binomial-pi-neg", "binomial-pi1-pos", "binomial-pi1-neg", "poly-general",
]


def test_registry_ids():
    assert list_scenarios() == IDS


def test_unknown_scenario():
    with pytest.raises(UnknownScenario):
        run_scenario("nonsense")


def test_golden_labels_lie_in_declared_ranges():
    for sid in IDS:
        sc = get_scenario(sid)
        for g in golden_entries(sid):
            assert g.term_k == sc.term_k
            if g.match == "label":
                assert g.primary in sc.primary_range
                if sc.secondary_range is not None:
                    assert g.secondary in sc.secondary_range
                if sc.variants is not None:
                    assert g.variant in sc.variants


def _by_label(report, primary, secondary=0, variant=0):
    for r in report.records:
        if (r.primary_branch, r.secondary_branch, r.variant_q) == (primary, secondary, variant):
            return r.value
    raise AssertionError("branch not found")


def test_trinomial_conjugate_branches():
    roots, rep = run_scenario("trinomial-L1")
    assert len(roots) == 21
    assert abs(_by_label(rep, -1) - (2.20125675516346 + 4.22307532327606j)) < 1e-10
    assert abs(_by_label(rep, 1) - (2.20125675516346 - 4.22307532327606j)) < 1e-10


def test_exp3_real_root():
    _, rep = run_scenario("exp3-w0")
    assert abs(_by_label(rep, 0) - 1.2330961898317350649) < 1e-12


def test_zeta_a1_positive_fixed_point():
    _, rep = run_scenario("zeta-a1")
    assert abs(_by_label(rep, 1) - 1.8337726516802713962) < 1e-8


@pytest.mark.parametrize("sid", ["zeta-a1", "zeta-a2", "zeta-b1", "zeta-b2"])
def test_zeta_roots_are_fixed_points(sid):
    roots, _ = run_scenario(sid)
    for x in roots.values():
        h = 1e-6 * max(1.0, abs(x))
        slope = (zeta(x + h) - zeta(x - h)) / (2 * h) - 1
        # backward error: distance to the nearest exact fixed point
        assert abs(zeta(x) - x) / abs(slope) < 1e-8 * max(1.0, abs(x)), x


def test_zeta_phi_examples():
    assert zeta_phi(2, 0, 0) == 0
    assert abs(zeta_phi(1, 1, 0) - 1) < 1e-15
    assert abs(zeta_phi(4, math.sqrt(math.pi), 0) - 1) < 1e-15
    assert abs(zeta_phi(3, math.sqrt(math.pi), 0)) < 1e-15
    with pytest.raises(DomainError):
        zeta_phi(3, 0, 1)
    with pytest.raises(InvalidInput):
        zeta_phi(5, 1, 0)


def test_runs_are_deterministic():
    a, _ = run_scenario("three-exp-b")
    b, _ = run_scenario("three-exp-b", threads=4)
    assert a.values() == b.values()


def test_overrides():
    _, rep = run_scenario("exp-trinomial-a", {"max_iters": 1, "polish": False, "retry_x0": ()})
    assert rep.matched_count < len(rep.matches)
    with pytest.raises(InvalidInput):
        run_scenario("exp-trinomial-a", {"bogus": 1})


def test_caseb_conjugate_pair():
    roots, rep = run_scenario("exp3-caseb")
    vals = sorted(roots.values(), key=lambda z: z.imag)
    assert len(vals) == 2
    assert abs(vals[0] - vals[1].conjugate()) < 1e-12
    assert abs(vals[1] - (0.073991657283343 + 2.231446583545j)) < 1e-12
