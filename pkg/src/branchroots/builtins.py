"""Named term functions built from zeta and Gamma, with closed-form inverses.

These cover the fixed-point problem ``zeta(x) = x`` rewritten through the
two Riemann functional equations. Each builtin has a forward evaluator and
zero or more inverse formulas; the inverse index is the ``variant`` field
of a branch tuple.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

from .branch_inverse import TWO_PI, arcsin_principal, as_complex, log_branch
from .errors import DomainError, InvalidInput
from .special_fn import gamma, rgamma, riemann_chi, sinpi, zeta

__all__ = ["BuiltinFunction", "BUILTINS", "get_builtin", "zeta_phi", "zeta_fixed_point_residual"]

_LOG_PI = math.log(math.pi)
_LOG_2PI = math.log(2.0 * math.pi)


def zeta_phi(variant: int, u, w: int) -> complex:
    """The four closed-form inverses used for ``zeta(x) = x``.

    ==========  ====================================================
    variant     formula
    ==========  ====================================================
    1           ``2 (pi - arcsin(u) + 2 pi w) / pi``
    2           ``2 (arcsin(u) + 2 pi w) / pi``
    3           ``-1/2 + (log u + 2 pi i w) / log(pi)``
    4           ``+1/2 + (log u + 2 pi i w) / log(pi)``
    ==========  ====================================================

    Variants 1 and 2 invert ``sin(pi x / 2)``; variant 4 inverts
    ``pi**(x - 1/2)`` exactly, variant 3 is the same map shifted by one.
    """
    u = as_complex(u, "u")
    if isinstance(w, bool) or int(w) != w:
        raise InvalidInput(f"w must be an integer, got {w!r}")
    w = int(w)
    if variant == 1:
        return 2.0 * (math.pi - arcsin_principal(u) + TWO_PI * w) / math.pi
    if variant == 2:
        return 2.0 * (arcsin_principal(u) + TWO_PI * w) / math.pi
    if variant in (3, 4):
        if u == 0:
            raise DomainError("logarithm of zero")
        shift = 0.5 if variant == 4 else -0.5
        return shift + log_branch(u, w) / _LOG_PI
    raise InvalidInput(f"variant must be 1, 2, 3 or 4, got {variant!r}")


def _sin_half_pi(x: complex) -> complex:
    return sinpi(x / 2.0)


def _zeta_ratio_a(x: complex) -> complex:
    # x / zeta(1-x) * (2 pi)^(1-x) / (2 Gamma(1-x))
    return 0.5 * x * cmath.exp((1.0 - x) * _LOG_2PI) * rgamma(1.0 - x) / zeta(1.0 - x)


def _pi_power_half(x: complex) -> complex:
    return cmath.exp((x - 0.5) * _LOG_PI)


def _zeta_ratio_b(x: complex) -> complex:
    # x * Gamma(x/2) / (Gamma((1-x)/2) zeta(1-x))
    return x * gamma(x / 2.0) * rgamma((1.0 - x) / 2.0) / zeta(1.0 - x)


@dataclass(frozen=True)
class BuiltinFunction:
    """A named scalar function usable as a term, with optional inverses."""

    name: str
    forward: Callable[[complex], complex]
    inverses: tuple[Callable[[complex, int], complex], ...] = ()
    description: str = ""

    @property
    def variant_count(self) -> int:
        return len(self.inverses)


BUILTINS: dict[str, BuiltinFunction] = {
    b.name: b
    for b in (
        BuiltinFunction(
            "sin_half_pi",
            _sin_half_pi,
            (lambda u, w: zeta_phi(1, u, w), lambda u, w: zeta_phi(2, u, w)),
            "sin(pi x / 2)",
        ),
        BuiltinFunction(
            "zeta_ratio_a",
            _zeta_ratio_a,
            (),
            "x (2 pi)^(1-x) / (2 Gamma(1-x) zeta(1-x))",
        ),
        BuiltinFunction(
            "pi_power_half",
            _pi_power_half,
            (lambda u, w: zeta_phi(4, u, w), lambda u, w: zeta_phi(3, u, w)),
            "pi^(x - 1/2)",
        ),
        BuiltinFunction(
            "zeta_ratio_b",
            _zeta_ratio_b,
            (),
            "x Gamma(x/2) / (Gamma((1-x)/2) zeta(1-x))",
        ),
    )
}


def get_builtin(name: str) -> BuiltinFunction:
    try:
        return BUILTINS[name]
    except KeyError:
        raise InvalidInput(f"unknown builtin term function {name!r}") from None


def zeta_fixed_point_residual(x) -> complex:
    """``zeta(x) - x``."""
    x = as_complex(x, "x")
    return zeta(x) - x


def riemann_form_sin(x) -> complex:
    """``x - 2 (2 pi)^(x-1) sin(pi x/2) Gamma(1-x) zeta(1-x)``; vanishes where zeta(x) = x."""
    x = as_complex(x, "x")
    return x - riemann_chi(x) * zeta(1.0 - x)


def riemann_form_gamma(x) -> complex:
    """``Gamma(x/2) - zeta(1-x)/x * pi^(x-1/2) Gamma((1-x)/2)``; vanishes where zeta(x) = x."""
    x = as_complex(x, "x")
    return gamma(x / 2.0) - zeta(1.0 - x) / x * _pi_power_half(x) * gamma((1.0 - x) / 2.0)
