"""Branch-indexed elementary inverse functions on the complex plane.

Every function takes an explicit integer branch index; branch 0 is always
the principal determination. Cuts follow the usual conventions: the
logarithm has Im in (-pi, pi], and the Lambert W branches are cut along
the negative real axis with values on the cut taken from above.
"""

from __future__ import annotations

import cmath
import math

from .errors import ConvergenceError, DomainError, InvalidInput

TWO_PI = 2.0 * math.pi
_INV_E = math.exp(-1.0)
_EPS = 2.220446049250313e-16

__all__ = [
    "as_complex",
    "log_branch",
    "root_branch",
    "arcsin_principal",
    "lambert_w",
    "lambert_branch_index",
]


def as_complex(z, name: str = "z") -> complex:
    """Coerce to ``complex``, rejecting non-finite values.

    A negative zero imaginary part is normalised to ``+0.0`` so that real
    inputs on a cut always land on the upper side of it.
    """
    try:
        c = complex(z)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"{name} is not a number: {z!r}") from exc
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise InvalidInput(f"{name} must be finite, got {c!r}")
    if c.imag == 0.0:
        c = complex(c.real, 0.0)
    return c


def _check_branch(k) -> int:
    if isinstance(k, bool) or int(k) != k:
        raise InvalidInput(f"branch index must be an integer, got {k!r}")
    return int(k)


def log_branch(z, k: int = 0) -> complex:
    """Logarithm on branch ``k``: ``Log(z) + 2*pi*i*k``."""
    z = as_complex(z)
    k = _check_branch(k)
    if z == 0:
        raise DomainError("logarithm of zero")
    return cmath.log(z) + complex(0.0, TWO_PI * k)


def root_branch(u, alpha: float, k: int = 0) -> complex:
    """Branch ``k`` of ``u**(1/alpha)``.

    Returns ``exp(Log(u)/alpha) * exp(2*pi*i*k/alpha)``. ``alpha`` may be any
    nonzero real, irrational or negative included; for non-integer alpha
    the branches never repeat and the caller picks the index range.
    """
    u = as_complex(u, "u")
    k = _check_branch(k)
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha == 0.0:
        raise InvalidInput(f"alpha must be finite and nonzero, got {alpha!r}")
    if u == 0:
        if alpha < 0:
            raise DomainError("zero raised to a negative power")
        return 0j
    return cmath.exp(cmath.log(u) / alpha) * cmath.exp(complex(0.0, TWO_PI * k / alpha))


def arcsin_principal(u) -> complex:
    """Principal complex arcsine (real in [-pi/2, pi/2] for real u in [-1, 1])."""
    u = as_complex(u, "u")
    return cmath.asin(u)


def lambert_branch_index(w: complex, z: complex) -> int:
    """Unwinding number of ``w + Log(w) - Log(z)``.

    For ``w = W_k(z)`` this equals ``k`` away from the negative real axis
    near the branch point; it is a cheap sanity check, not a definition.
    """
    return round((w + cmath.log(w) - cmath.log(z)).imag / TWO_PI)


# W about -1/e in powers of p = sqrt(2(e z + 1)).
_BP_SERIES = (-1.0, 1.0, -1.0 / 3.0, 11.0 / 72.0, -43.0 / 540.0, 769.0 / 17280.0,
              -221.0 / 8505.0, 680863.0 / 43545600.0)


def _branch_point_series(z: complex, sign: float) -> complex:
    p = sign * cmath.sqrt(2.0 * (math.e * z + 1.0))
    acc = 0j
    for c in reversed(_BP_SERIES):
        acc = acc * p + c
    return acc


def _in_principal_range(w: complex) -> bool:
    # W_0 maps onto the region right of the curve -eta*cot(eta) + i*eta, |eta| < pi;
    # real z below -1/e lands on the curve itself, hence the slack
    slack = 1e-7 * (1.0 + abs(w))
    eta = w.imag
    if abs(eta) >= math.pi + slack:
        return False
    if abs(eta) < 1e-300:
        return w.real >= -1.0 - slack
    return w.real > -eta / math.tan(eta) - slack


def _guesses(k: int, z: complex):
    on_bp_sheet = k == 0 or (k == -1 and z.imag >= 0.0) or (k == 1 and z.imag < 0.0)
    if on_bp_sheet and abs(z + _INV_E) < 0.3:
        yield _branch_point_series(z, 1.0 if k == 0 else -1.0)
    if k == 0:
        if abs(z) < 0.3:
            yield z * (1.0 - z * (1.0 - 1.5 * z))
        if abs(1.0 + z) > 0.1:
            # Winitzki's approximation of the principal branch
            l = cmath.log(1.0 + z)
            yield l * (1.0 - cmath.log(1.0 + l) / (2.0 + l))
        if abs(z + _INV_E) < 1.5:
            yield _branch_point_series(z, 1.0)
        yield 0.5 * cmath.log(1.0 + z) if abs(1.0 + z) > 1e-3 else complex(-0.5, 0.5)
    l1 = cmath.log(z) + complex(0.0, TWO_PI * k)
    l2 = cmath.log(l1)
    yield l1 - l2 + l2 / l1


def _halley(z: complex, w: complex, tol: float, max_iter: int) -> complex:
    for _ in range(max_iter):
        ew = cmath.exp(w)
        f = w * ew - z
        if abs(f) <= 4.0 * _EPS * (1.0 + abs(w)) * max(abs(z), abs(w * ew)):
            return w
        wp1 = w + 1.0
        if wp1 == 0:
            return w
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if denom == 0:
            break
        dw = f / denom
        w -= dw
        if not (math.isfinite(w.real) and math.isfinite(w.imag)):
            break
        if abs(dw) <= tol * (1.0 + abs(w)):
            return w
    raise ConvergenceError(f"Halley iteration for W(z={z!r}) did not settle in {max_iter} steps")


def _log_newton(target, w, tol: float, max_iter: int, real: bool = False):
    # w + Log(w) = target, well conditioned where w*exp(w) under- or overflows;
    # with real=True solves w + log(-w) = target for real w < 0
    for _ in range(max_iter):
        lw = math.log(-w) if real else cmath.log(w)
        dw = (w + lw - target) / (1.0 + 1.0 / w)
        w -= dw
        if abs(dw) <= tol * (1.0 + abs(w)):
            return w
    raise ConvergenceError(f"log-space iteration for W did not settle in {max_iter} steps")


def lambert_w(k: int, z, *, tol: float = 1e-15, max_iter: int = 60) -> complex:
    """Branch ``k`` of the Lambert W function, the inverse of ``w*exp(w)``.

    Starts from a branch-point series, a small-argument Taylor guess or the
    asymptotic expansion ``L1 - log(L1)`` with ``L1 = Log(z) + 2*pi*i*k``,
    then runs Halley's iteration. When ``|L1|`` is large and ``w*exp(w)``
    cannot be evaluated accurately (subnormal or huge ``z``), the equation
    ``w + Log(w) = L1`` is solved instead. On the principal branch the result is
    checked against the known image region of ``W_0`` and the next starting
    guess is tried if Halley wandered onto a neighbouring sheet.

    Raises:
        DomainError: ``z == 0`` on a branch ``k != 0``.
        ConvergenceError: Halley did not settle within ``max_iter`` steps.
    """
    k = _check_branch(k)
    z = as_complex(z)
    if z == 0:
        if k == 0:
            return 0j
        raise DomainError(f"W_{k}(0) is unbounded")
    on_bp_sheet = k == 0 or (k == -1 and z.imag >= 0.0) or (k == 1 and z.imag < 0.0)
    if on_bp_sheet and abs(z + _INV_E) < 1e-4:
        # Halley stalls on the double root at w = -1; the series is exact to rounding here
        return _branch_point_series(z, 1.0 if k == 0 else -1.0)

    last_exc: ConvergenceError | None = None
    for guess in _guesses(k, z):
        try:
            w = _halley(z, guess, tol, max_iter)
        except (ConvergenceError, OverflowError, ZeroDivisionError, ValueError) as exc:
            last_exc = exc if isinstance(exc, ConvergenceError) else ConvergenceError(str(exc))
            continue
        if k != 0 or _in_principal_range(w):
            return w
    # far from the branch point w*exp(w) may leave the normal float range
    l1 = cmath.log(z) + complex(0.0, TWO_PI * k)
    if abs(l1) > 10.0:
        try:
            if k == -1 and z.imag == 0.0 and z.real < 0.0:
                # the real lower branch: w + log(-w) = log(-z) with w < -1
                lz = math.log(-z.real)
                w = complex(_log_newton(lz, lz - math.log(-lz), tol, max_iter, real=True))
                return w
            w = _log_newton(l1, l1 - cmath.log(l1), tol, max_iter)
        except (ConvergenceError, ZeroDivisionError, ValueError) as exc:
            last_exc = exc if isinstance(exc, ConvergenceError) else ConvergenceError(str(exc))
        else:
            if lambert_branch_index(w, z) == k:
                return w
    raise last_exc or ConvergenceError(f"lambert_w({k}, {z!r}) found no root on branch {k}")
