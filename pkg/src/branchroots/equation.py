"""Equations of the form ``f(x) = sum(a_i * s_i(x)) - a0`` over typed terms.

Each term kind knows how to evaluate itself and how to invert itself on a
chosen branch, so the iteration engine can solve ``s_k(x) = u`` for any
single term while the others are held at the current iterate.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .branch_inverse import as_complex, lambert_w, log_branch, root_branch
from .builtins import get_builtin
from .catalog import binomial_branch_table
from .errors import BranchError, DomainError, InvalidInput

__all__ = [
    "Power",
    "ExpOfPower",
    "PowerExp",
    "GeoExp",
    "Builtin",
    "TermKind",
    "Term",
    "Equation",
    "BranchTuple",
    "OVERFLOW_LIMIT",
    "term_value",
    "evaluate",
    "complement",
    "u_target",
    "residual_scale",
    "invert_term",
    "branch_range",
    "variant_count",
]

OVERFLOW_LIMIT = 1e300


def _real(value, name: str) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"{name} must be a real number, got {value!r}") from exc
    if not math.isfinite(v):
        raise InvalidInput(f"{name} must be finite, got {value!r}")
    return v


def _check_base(base, name: str = "base") -> complex:
    b = as_complex(base, name)
    if b == 0 or b == 1:
        raise InvalidInput(f"{name} must differ from 0 and 1, got {b!r}")
    return b


@dataclass(frozen=True)
class Power:
    """``x**r``."""

    r: float

    def __post_init__(self):
        object.__setattr__(self, "r", _real(self.r, "r"))
        if self.r == 0:
            raise InvalidInput("Power exponent r must be nonzero")


@dataclass(frozen=True)
class ExpOfPower:
    """``base**(x**q)``."""

    base: complex
    q: float

    def __post_init__(self):
        object.__setattr__(self, "base", _check_base(self.base))
        object.__setattr__(self, "q", _real(self.q, "q"))
        if self.q == 0:
            raise InvalidInput("ExpOfPower exponent q must be nonzero")


@dataclass(frozen=True)
class PowerExp:
    """``x**r * base**(x**q)``."""

    r: float
    base: complex
    q: float

    def __post_init__(self):
        object.__setattr__(self, "r", _real(self.r, "r"))
        object.__setattr__(self, "base", _check_base(self.base))
        object.__setattr__(self, "q", _real(self.q, "q"))
        if self.q == 0:
            raise InvalidInput("PowerExp exponent q must be nonzero")


@dataclass(frozen=True)
class GeoExp:
    """``base**x``."""

    base: complex

    def __post_init__(self):
        object.__setattr__(self, "base", _check_base(self.base))


@dataclass(frozen=True)
class Builtin:
    """A named function from :mod:`branchroots.builtins`."""

    name: str

    def __post_init__(self):
        get_builtin(self.name)


TermKind = Union[Power, ExpOfPower, PowerExp, GeoExp, Builtin]


@dataclass(frozen=True)
class Term:
    """One summand ``coeff * kind(x)``."""

    coeff: complex
    kind: TermKind

    def __post_init__(self):
        c = as_complex(self.coeff, "coeff")
        if c == 0:
            raise InvalidInput("term coefficient must be nonzero")
        object.__setattr__(self, "coeff", c)
        if not isinstance(self.kind, (Power, ExpOfPower, PowerExp, GeoExp, Builtin)):
            raise InvalidInput(f"unsupported term kind {self.kind!r}")
        if isinstance(self.kind, PowerExp) and self.kind.r == 0:
            object.__setattr__(self, "kind", ExpOfPower(self.kind.base, self.kind.q))


@dataclass(frozen=True)
class Equation:
    """``sum(t.coeff * t.kind(x) for t in terms) - a0``; term order is significant."""

    terms: tuple[Term, ...]
    a0: complex = 0j

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise InvalidInput("an equation needs at least one term")
        for t in terms:
            if not isinstance(t, Term):
                raise InvalidInput(f"not a Term: {t!r}")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "a0", as_complex(self.a0, "a0"))

    @property
    def n(self) -> int:
        return len(self.terms)

    def __call__(self, x) -> complex:
        return evaluate(self, x)


@dataclass(frozen=True)
class BranchTuple:
    """Indices selecting one determination of a multivalued inverse.

    ``primary`` is the logarithm or Lambert W branch, ``secondary`` the
    root-of-unity index (for PowerExp, the sheet of ``log u``) and
    ``variant`` the inverse formula for builtins.
    """

    primary: int = 0
    secondary: int = 0
    variant: int = 0

    def __post_init__(self):
        for name in ("primary", "secondary", "variant"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v:
                raise InvalidInput(f"{name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))


# -- forward evaluation -------------------------------------------------------


def _finite(v: complex) -> complex:
    if not (math.isfinite(v.real) and math.isfinite(v.imag)) or abs(v) > OVERFLOW_LIMIT:
        raise OverflowError(f"term value overflowed: {v!r}")
    return v


def _cexp(z: complex) -> complex:
    if z.real > 700:
        raise OverflowError("exponential overflow")
    return cmath.exp(z)


def _power(x: complex, p: float) -> complex:
    """Principal ``x**p``; exact repeated multiplication for small integer p."""
    if x == 0:
        if p < 0:
            raise DomainError("zero raised to a negative power")
        return 0j
    if p == int(p) and abs(p) <= 64:
        try:
            return x ** int(p)
        except ZeroDivisionError as exc:
            raise DomainError(str(exc)) from exc
    return _cexp(p * cmath.log(x))


def term_value(kind: TermKind, x) -> complex:
    """``kind(x)`` without the coefficient."""
    x = as_complex(x, "x")
    if isinstance(kind, Power):
        v = _power(x, kind.r)
    elif isinstance(kind, GeoExp):
        v = _cexp(x * cmath.log(kind.base))
    elif isinstance(kind, ExpOfPower):
        v = _cexp(_power(x, kind.q) * cmath.log(kind.base))
    elif isinstance(kind, PowerExp):
        v = _power(x, kind.r) * _cexp(_power(x, kind.q) * cmath.log(kind.base))
    elif isinstance(kind, Builtin):
        try:
            v = complex(get_builtin(kind.name).forward(x))
        except ZeroDivisionError as exc:
            raise DomainError(f"{kind.name} is singular at {x!r}") from exc
    else:
        raise InvalidInput(f"unsupported term kind {kind!r}")
    return _finite(v)


def evaluate(eq: Equation, x) -> complex:
    """``f(x) = sum(a_i s_i(x)) - a0``.

    Raises:
        DomainError: ``x`` sits on a singularity of some term.
        OverflowError: a term exceeds ~1e300 in magnitude.
    """
    x = as_complex(x, "x")
    total = 0j
    for t in eq.terms:
        total += t.coeff * term_value(t.kind, x)
    return total - eq.a0


def _check_k(eq: Equation, k: int) -> int:
    if isinstance(k, bool) or int(k) != k or not 1 <= int(k) <= eq.n:
        raise IndexError(f"term index {k!r} outside 1..{eq.n}")
    return int(k)


def complement(eq: Equation, k: int, x) -> complex:
    """Sum of every term except the k-th (1-based), coefficients included."""
    k = _check_k(eq, k)
    x = as_complex(x, "x")
    total = 0j
    for i, t in enumerate(eq.terms, start=1):
        if i != k:
            total += t.coeff * term_value(t.kind, x)
    return total


def u_target(eq: Equation, k: int, x) -> complex:
    """``(a0 - complement(eq, k, x)) / a_k``: the value term k must take for f to vanish."""
    k = _check_k(eq, k)
    return (eq.a0 - complement(eq, k, x)) / eq.terms[k - 1].coeff


def residual_scale(eq: Equation, x) -> float:
    """``max(1, |a0|, max_i |a_i s_i(x)|)``: the magnitude against which |f(x)| is judged.

    Evaluates to ``max(1, |a0|)`` when some term cannot be evaluated.
    """
    scale = max(1.0, abs(eq.a0))
    try:
        for t in eq.terms:
            scale = max(scale, abs(t.coeff * term_value(t.kind, x)))
    except (DomainError, OverflowError):
        pass
    return scale


# -- inversion ----------------------------------------------------------------


def variant_count(kind: TermKind) -> int:
    """Number of inverse formulas available for ``kind`` (0 means not invertible)."""
    if isinstance(kind, Builtin):
        return get_builtin(kind.name).variant_count
    return 1


def _unity_exponent(kind: TermKind) -> Optional[float]:
    if isinstance(kind, Power):
        return kind.r
    if isinstance(kind, ExpOfPower):
        return kind.q
    if isinstance(kind, PowerExp):
        # the secondary index is the sheet of log u, which repeats with period r
        return kind.r
    return None


def _root_indices(alpha: float, u_sign_hint: Optional[int]) -> list[int]:
    if alpha == int(alpha):
        return list(range(abs(int(alpha))))
    a = abs(alpha)
    if u_sign_hint is None:
        pos = binomial_branch_table(a, True)
        neg = binomial_branch_table(a, False)
        if alpha > 0:
            return neg if len(neg) > len(pos) else pos
        # mirrored index sets for negative exponents, see below
        pos_m, neg_m = [-k for k in pos], [-k - 1 for k in neg]
        return neg_m if len(neg_m) > len(pos_m) else pos_m
    positive = u_sign_hint > 0
    table = binomial_branch_table(a, positive)
    if alpha > 0:
        return table
    # z**(-a) = u  <=>  z**a = 1/u; for u < 0, Log(1/u) = -Log(u) + 2 pi i shifts the index
    return [-k for k in table] if positive else [-k - 1 for k in table]


def branch_range(term: Term, u_sign_hint: Optional[int] = None) -> list[int]:
    """Finite list of admissible secondary (root-of-unity) indices for ``term``.

    The exponent is ``r`` for Power and PowerExp and ``q`` for ExpOfPower.
    Integer exponents ``n`` give ``0..|n|-1``. Non-integer exponents use the
    real-binomial table for the sign of ``u`` (``u_sign_hint`` = +1 or -1);
    without a hint the larger of the two tables is returned. Kinds without a
    root-of-unity index give ``[0]``.
    """
    kind = term.kind if isinstance(term, Term) else term
    alpha = _unity_exponent(kind)
    if alpha is None:
        return [0]
    return _root_indices(alpha, u_sign_hint)


def _check_secondary(kind: TermKind, secondary: int) -> int:
    alpha = _unity_exponent(kind)
    if alpha is None:
        if secondary != 0:
            raise BranchError(f"{type(kind).__name__} has no root-of-unity index; got {secondary}")
        return 0
    if alpha == int(alpha):
        # e^(2 pi i k / n) is n-periodic in k, any integer is accepted
        return secondary
    allowed = set(_root_indices(alpha, 1)) | set(_root_indices(alpha, -1))
    if secondary not in allowed:
        raise BranchError(f"secondary index {secondary} outside {sorted(allowed)} for exponent {alpha}")
    return secondary


def invert_term(term: Term, u, b: BranchTuple = BranchTuple()) -> complex:
    """Solve ``term.kind(x) = u`` for x on the branch selected by ``b``.

    The coefficient is not involved: ``u`` is the value of the bare
    function. Dispatch by kind:

    * Power r: ``root_branch(u, r, secondary)``
    * GeoExp: ``log_branch(u, primary) / Log(base)``
    * ExpOfPower: ``root_branch(log_branch(u, primary) / Log(base), q, secondary)``
    * PowerExp: Lambert W on branch ``primary`` applied on the sheet
      ``secondary`` of ``log u``
    * Builtin: inverse formula number ``variant`` with ``w = primary``
    """
    kind = term.kind if isinstance(term, Term) else term
    u = as_complex(u, "u")
    if isinstance(kind, Builtin):
        fn = get_builtin(kind.name)
        if not 0 <= b.variant < fn.variant_count:
            raise BranchError(f"builtin {kind.name!r} has {fn.variant_count} inverse variant(s); got {b.variant}")
        return fn.inverses[b.variant](u, b.primary)
    if b.variant != 0:
        raise BranchError(f"{type(kind).__name__} has a single inverse variant; got {b.variant}")
    sec = _check_secondary(kind, b.secondary)
    if isinstance(kind, Power):
        return root_branch(u, kind.r, sec)
    if isinstance(kind, GeoExp):
        return log_branch(u, b.primary) / cmath.log(kind.base)
    if isinstance(kind, ExpOfPower):
        return root_branch(log_branch(u, b.primary) / cmath.log(kind.base), kind.q, sec)
    if isinstance(kind, PowerExp):
        return _invert_power_exp(kind, u, b.primary, sec)
    raise InvalidInput(f"unsupported term kind {kind!r}")


def _invert_power_exp(kind: PowerExp, u: complex, k1: int, m: int) -> complex:
    # x**r * a**(x**q) = u.  Take logs on sheet m and put s = q log x:
    #   (r/q) s + L e^s = l,  l = Log u + 2 pi i m
    # so with c = q/r:  s = c l - W_k1(c L e^(c l))  and  x = e^(s/q).
    # For |q/r| = 1 this equals x = t**(1/q) with t = W / (c L).
    if u == 0:
        raise DomainError("PowerExp inverse is undefined at u = 0")
    c = kind.q / kind.r
    log_a = cmath.log(kind.base)
    z = c * log_branch(u, m)
    w = lambert_w(k1, c * log_a * _cexp(z))
    return _cexp((z - w) / kind.q)


def terms_from(pairs: Iterable[tuple[complex, TermKind]]) -> tuple[Term, ...]:
    """Build terms from ``(coeff, kind)`` pairs."""
    return tuple(Term(c, k) for c, k in pairs)
