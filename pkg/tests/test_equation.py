import cmath
import math
import random

import pytest

from branchroots.errors import BranchError, DomainError, InvalidInput
from branchroots.equation import (
    BranchTuple,
    Builtin,
    Equation,
    ExpOfPower,
    GeoExp,
    Power,
    PowerExp,
    Term,
    branch_range,
    complement,
    evaluate,
    invert_term,
    residual_scale,
    term_value,
    u_target,
    variant_count,
)


def trinomial():
    return Equation((Term(1, PowerExp(1, 5, -1)), Term(1, PowerExp(-1, 5, 1))), 10)


def test_evaluate_by_hand():
    eq = trinomial()
    x = 2.0
    want = 2 * 5 ** 0.5 + 0.5 * 25 - 10
    assert abs(evaluate(eq, x) - want) < 1e-13
    assert abs(eq(1)) < 1e-14


def test_complement_and_target():
    eq = Equation((Term(2, Power(2)), Term(3, GeoExp(2)), Term(-1, Power(1))), 4)
    x = 1.5 + 0.5j
    assert abs(complement(eq, 1, x) - (3 * 2**x - x)) < 1e-14
    u = u_target(eq, 1, x)
    # substituting the target for term 1 zeroes the equation
    assert abs(2 * u + 3 * 2**x - x - 4) < 1e-13
    with pytest.raises(IndexError):
        u_target(eq, 4, x)
    with pytest.raises(IndexError):
        complement(eq, 0, x)


def test_construction_rules():
    with pytest.raises(InvalidInput):
        Term(0, Power(2))
    with pytest.raises(InvalidInput):
        Power(0)
    with pytest.raises(InvalidInput):
        ExpOfPower(2, 0)
    with pytest.raises(InvalidInput):
        GeoExp(0)
    with pytest.raises(InvalidInput):
        Builtin("nope")
    with pytest.raises(InvalidInput):
        Equation((), 1)
    with pytest.raises(InvalidInput):
        BranchTuple(0.5)


def test_power_exp_with_zero_power_normalizes():
    t = Term(1, PowerExp(0, 3, 2))
    assert t.kind == ExpOfPower(3, 2)


def test_overflow_and_singularity():
    with pytest.raises(OverflowError):
        term_value(GeoExp(math.e), 800)
    with pytest.raises(DomainError):
        term_value(Power(-1), 0)


def test_residual_scale():
    eq = Equation((Term(1, GeoExp(10)), Term(-1, Power(1))), 3)
    assert residual_scale(eq, 0) == 3
    assert residual_scale(eq, 5) == pytest.approx(1e5)


KINDS = [
    Power(3),
    Power(-2),
    Power(math.pi),
    Power(-1.5),
    GeoExp(7 / 5),
    GeoExp(-(31 ** (1 / 3))),
    ExpOfPower(math.e, 3),
    ExpOfPower(2, -2),
    PowerExp(1, 5, -1),
    PowerExp(-1, 5, 1),
    PowerExp(2.5, 1.5, 0.5),
    PowerExp(2, 0.5, 3),
    PowerExp(-3, 2, 2),
    Builtin("sin_half_pi"),
    Builtin("pi_power_half"),
]


def _forward_on_sheet(kind, x, j):
    """The term evaluated with ``Log x + 2 pi i j`` in every power of x."""
    lx = cmath.log(x) + 2j * math.pi * j

    def pw(p):
        return cmath.exp(p * lx)

    if isinstance(kind, Power):
        return pw(kind.r)
    if isinstance(kind, ExpOfPower):
        return cmath.exp(pw(kind.q) * cmath.log(kind.base))
    if isinstance(kind, PowerExp):
        return pw(kind.r) * cmath.exp(pw(kind.q) * cmath.log(kind.base))
    return term_value(kind, x)


def _exact_variants(kind):
    if kind == Builtin("pi_power_half"):
        return (0,)
    return range(variant_count(kind))


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: repr(k))
def test_inversion_round_trip(kind):
    rng = random.Random(7)
    count = 0
    for _ in range(40):
        u = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        for primary in (-2, -1, 0, 1, 2):
            for variant in _exact_variants(kind):
                for secondary in branch_range(Term(1, kind)):
                    try:
                        x = invert_term(Term(1, kind), u, BranchTuple(primary, secondary, variant))
                        back = [_forward_on_sheet(kind, x, j) for j in range(-3, 4)]
                    except (DomainError, OverflowError):
                        continue
                    # x solves kind(x) = u on some determination of its powers
                    assert min(abs(b - u) for b in back) <= 1e-10 * max(1.0, abs(u)), (kind, u, primary, secondary)
                    count += 1
    assert count > 0


INTEGER_KINDS = [
    k for k in KINDS
    if not isinstance(k, (Builtin, GeoExp))
    and all(e == int(e) for e in (getattr(k, "r", 1), getattr(k, "q", 1)))
]


@pytest.mark.parametrize("kind", INTEGER_KINDS, ids=repr)
def test_integer_exponent_round_trip_is_principal(kind):
    rng = random.Random(3)
    for _ in range(50):
        u = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        for b in (BranchTuple(p, s) for p in (-1, 0, 1) for s in branch_range(Term(1, kind))):
            x = invert_term(Term(1, kind), u, b)
            assert abs(term_value(kind, x) - u) <= 1e-10 * max(1.0, abs(u))


def test_shifted_log_variant_is_exact_minus_one():
    t = Term(1, Builtin("pi_power_half"))
    u = 0.3 - 2j
    exact = invert_term(t, u, BranchTuple(2, 0, 0))
    shifted = invert_term(t, u, BranchTuple(2, 0, 1))
    assert abs(exact - shifted - 1) < 1e-14


def test_branch_range_tables():
    assert branch_range(Term(1, Power(3))) == [0, 1, 2]
    assert branch_range(Term(1, Power(math.pi)), 1) == [0, 1, -1]
    assert branch_range(Term(1, Power(math.pi)), -1) == [0, 1, -1, -2]
    assert branch_range(Term(1, Power(math.pi + 1)), 1) == [0, 1, -1, 2, -2]
    assert sorted(branch_range(Term(1, Power(math.pi + 1)), -1)) == [-2, -1, 0, 1]
    assert branch_range(Term(1, GeoExp(2))) == [0]


def test_secondary_validation():
    with pytest.raises(BranchError):
        invert_term(Term(1, GeoExp(2)), 3, BranchTuple(0, 1))
    with pytest.raises(BranchError):
        invert_term(Term(1, Power(math.pi)), 3, BranchTuple(0, 5))
    with pytest.raises(BranchError):
        invert_term(Term(1, Power(2)), 3, BranchTuple(0, 0, 1))
    # integer exponents cycle, so any index is accepted
    a = invert_term(Term(1, Power(3)), 8, BranchTuple(0, 4))
    b = invert_term(Term(1, Power(3)), 8, BranchTuple(0, 1))
    assert abs(a - b) < 1e-12


def test_builtin_variants():
    assert variant_count(Builtin("sin_half_pi")) == 2
    assert variant_count(Builtin("zeta_ratio_a")) == 0
    with pytest.raises(BranchError):
        invert_term(Term(1, Builtin("sin_half_pi")), 0.5, BranchTuple(0, 0, 2))
    # the exact inverse of pi^(x-1/2)
    x = invert_term(Term(1, Builtin("pi_power_half")), math.sqrt(math.pi), BranchTuple())
    assert abs(x - 1) < 1e-14


def test_reference_values():
    eq = trinomial()
    assert abs(Equation((Term(1, Power(2)),), 0)(3) - 9) < 1e-15
    with pytest.raises(DomainError):
        evaluate(eq, 0)
    assert abs(complement(eq, 1, 1) - 5) < 1e-14
    assert complement(Equation((Term(1, Power(2)),), 0), 1, 7) == 0
    assert abs(u_target(eq, 1, 1) - 5) < 1e-14
    assert u_target(Equation((Term(2, Power(2)),), 8), 1, 3 + 1j) == 4
    x = invert_term(Term(1, PowerExp(1, 5, -1)), 5, BranchTuple(0, 0))
    assert abs(x * 5 ** (1 / x) - 5) < 1e-10
    assert abs(invert_term(Term(1, Power(math.pi)), 2, BranchTuple(0, 0)) - 1.24686) < 1e-5
    assert abs(invert_term(Term(1, GeoExp(math.e)), 1, BranchTuple(1)) - 2j * math.pi) < 1e-14
    assert branch_range(Term(1, Power(4))) == [0, 1, 2, 3]
