import cmath
import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from branchroots.branch_inverse import (
    arcsin_principal,
    lambert_branch_index,
    lambert_w,
    log_branch,
    root_branch,
)
from branchroots.errors import DomainError, InvalidInput

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("k", [-3, -2, -1, 0, 1, 2, 3])
@pytest.mark.parametrize("z", [0.5, -0.2, 3 + 4j, -7 - 1j, 1e-8j, 1e6, -0.3678])
def test_lambert_matches_mpmath(k, z):
    if z == 0 and k != 0:
        return
    got = lambert_w(k, z)
    want = complex(mpmath.lambertw(z, k))
    assert abs(got - want) <= 1e-12 * max(1.0, abs(want))


def test_lambert_at_zero():
    assert lambert_w(0, 0) == 0
    with pytest.raises(DomainError):
        lambert_w(1, 0)


def test_lambert_branch_point():
    w = lambert_w(0, -1 / math.e)
    assert abs(w + 1) < 1e-7
    assert abs(lambert_w(-1, -1 / math.e) + 1) < 1e-7


@settings(max_examples=200, deadline=None)
@given(finite, finite, st.integers(-3, 3))
def test_lambert_inverse_identity(re, im, k):
    z = complex(re, im)
    if z == 0:
        return
    w = lambert_w(k, z)
    assert abs(w * cmath.exp(w) - z) <= 1e-12 * max(1.0, abs(z))
    assert lambert_branch_index(w, z) == k


def test_log_branch_shift():
    z = -2 + 0.5j
    assert log_branch(z, 0) == cmath.log(z)
    assert abs(log_branch(z, 3) - (cmath.log(z) + 6j * math.pi)) < 1e-14


@pytest.mark.parametrize("alpha", [3, 2.5, math.pi, -2, -1.5])
@pytest.mark.parametrize("k", [-2, -1, 0, 1, 2])
def test_root_branch_raises_back(alpha, k):
    u = 1.7 - 0.4j
    z = root_branch(u, alpha, k)
    assert abs(abs(z) - abs(u) ** (1 / alpha)) < 1e-12
    assert abs(z - cmath.exp(cmath.log(u) / alpha) * cmath.exp(2j * math.pi * k / alpha)) < 1e-12


def test_root_branch_integer_cycle():
    roots = {complex(round(root_branch(8, 3, k).real, 12), round(root_branch(8, 3, k).imag, 12)) for k in range(3)}
    assert len(roots) == 3
    assert abs(root_branch(8, 3, 0) - 2) < 1e-14
    assert abs(root_branch(8, 3, 3) - 2) < 1e-12


def test_root_branch_rejects_zero_alpha():
    with pytest.raises(InvalidInput):
        root_branch(1, 0)


@pytest.mark.parametrize("u", [0, 0.5, -1, 2, 1 + 1j, -3j])
def test_arcsin_principal(u):
    got = arcsin_principal(u)
    assert abs(cmath.sin(got) - u) < 1e-13
    # on the cut u > 1 the stdlib side convention is the reference
    assert abs(got - cmath.asin(u)) < 1e-13
    if not (isinstance(u, (int, float)) and abs(u) > 1):
        assert abs(got - complex(mpmath.asin(u))) < 1e-13


def test_reference_values():
    assert log_branch(1, 0) == 0
    assert abs(log_branch(1, 1) - 2j * math.pi) < 1e-15
    assert abs(log_branch(-2, 0) - (math.log(2) + 1j * math.pi)) < 1e-15
    assert abs(root_branch(2, math.pi, 0) - 1.24686) < 1e-5
    # 2^(1/pi) e^(2i): the printed listing transposes two digits of the imaginary part
    assert abs(root_branch(2, math.pi, 1) - (-0.51888 + 1.13377j)) < 1e-5
    assert abs(root_branch(1, 4, 1) - 1j) < 1e-15
    assert arcsin_principal(0) == 0
    assert abs(arcsin_principal(1) - math.pi / 2) < 1e-15
    assert abs(arcsin_principal(2) - (math.pi / 2 + 1.3169578969j)) < 1e-10 or abs(
        arcsin_principal(2) - (math.pi / 2 - 1.3169578969j)
    ) < 1e-10
    assert abs(cmath.sin(arcsin_principal(2)) - 2) < 1e-12


def _bisect(f, lo, hi):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(lo) * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def test_lambert_reference_values():
    omega = _bisect(lambda w: w * math.exp(w) - 1, 0.0, 1.0)
    assert abs(lambert_w(0, 1) - omega) < 1e-14
    w1 = lambert_w(1, 1)
    assert abs(w1 * cmath.exp(w1) - 1) < 1e-12
    assert math.pi < w1.imag < 3 * math.pi


@pytest.mark.parametrize("k", [-3, -1, 0, 1, 2])
@pytest.mark.parametrize("z", [2.2250738585e-313j, 1e-320, -5e-324, -1e-310, 1e308, 1e300j, -1e-200])
def test_lambert_extreme_arguments(k, z):
    want = complex(mpmath.lambertw(z, k))
    got = lambert_w(k, z)
    assert abs(got - want) <= 1e-14 * max(abs(want), 1e-300)
