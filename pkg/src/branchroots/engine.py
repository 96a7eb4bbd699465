"""Fixed-point iteration through one term's branch inverse, plus Newton polish.

For an equation ``sum(a_i s_i(x)) = a0`` and a chosen term k, the map

    x -> s_k^{-1}( (a0 - sum_{i != k} a_i s_i(x)) / a_k )

is iterated on a fixed branch of the inverse. Each branch tends to its own
root, so sweeping the branch indices enumerates a family of roots. A local
Newton solve then sharpens the fixed point to full precision.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence, Union

from .branch_inverse import as_complex
from .catalog import RootRecord
from .equation import (
    BranchTuple,
    Equation,
    branch_range,
    evaluate,
    invert_term,
    residual_scale,
    u_target,
    variant_count,
)
from .errors import BranchRootsError, ConvergenceError, DomainError, InvalidInput

__all__ = [
    "FailureReason",
    "IterConfig",
    "IterationOutcome",
    "BranchOutcome",
    "iterate",
    "newton_polish",
    "newton_solve",
    "enumerate_branches",
    "enumerate_roots",
    "iteration_map",
    "resolve_threads",
]

_EPS = 2.220446049250313e-16
_FAILURES = (DomainError, ConvergenceError, OverflowError, ZeroDivisionError, ValueError)


class FailureReason(str, Enum):
    OVERFLOW = "Overflow"
    DOMAIN_HIT = "DomainHit"
    MAX_ITERS = "MaxIters"
    SINGULAR_DERIVATIVE = "SingularDerivative"


@dataclass(frozen=True)
class IterConfig:
    """Knobs for :func:`iterate`.

    ``x0`` is tried first; on failure each of ``retry_x0`` is tried in turn.
    ``eps`` serves both as the step criterion of the raw iteration and as
    the residual target of the polish, measured relative to
    :func:`~branchroots.equation.residual_scale`.
    """

    max_iters: int = 25
    eps: float = 1e-10
    x0: complex = 0.5
    retry_x0: tuple[complex, ...] = (0.01, 100.0)
    polish: bool = True
    polish_max_iters: int = 60
    overflow_bound: float = 1e12
    trace: bool = False
    double_root_check: bool = True
    line_search: bool = True

    def __post_init__(self):
        if isinstance(self.max_iters, bool) or int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise InvalidInput("max_iters must be an integer >= 1")
        if not (isinstance(self.eps, (int, float)) and self.eps > 0):
            raise InvalidInput("eps must be positive")
        if not self.overflow_bound >= 1e6:
            raise InvalidInput("overflow_bound must be >= 1e6")
        if self.polish_max_iters < 1:
            raise InvalidInput("polish_max_iters must be >= 1")
        object.__setattr__(self, "x0", as_complex(self.x0, "x0"))
        object.__setattr__(self, "retry_x0", tuple(as_complex(v, "retry_x0") for v in self.retry_x0))


@dataclass
class IterationOutcome:
    final_x: complex
    iterations_used: int
    converged: bool
    residual: float
    trace: Optional[list[complex]] = None
    reason: Optional[FailureReason] = None
    raw_x: Optional[complex] = None
    polished: bool = False
    scaled_residual: float = math.inf
    x0: Optional[complex] = None


# -- Newton ----------------------------------------------------------------------


def _safe(func: Callable[[complex], complex], x: complex) -> Optional[complex]:
    try:
        v = complex(func(x))
    except (BranchRootsError, *_FAILURES):
        return None
    if not (math.isfinite(v.real) and math.isfinite(v.imag)):
        return None
    return v


def _cauchy_derivatives(func, x: complex, radius: float, n: int = 16) -> Optional[tuple[complex, complex]]:
    """First and second derivative from the trapezoid rule on a circle."""
    d1 = d2 = 0j
    for j in range(n):
        w = cmath.exp(2j * math.pi * j / n)
        v = _safe(func, x + radius * w)
        if v is None:
            return None
        d1 += v / w
        d2 += v / (w * w)
    return d1 / (n * radius), 2.0 * d2 / (n * radius * radius)


def _double_root_refine(func, x: complex, fx: complex, floor: float) -> complex:
    """Move onto a nearby double root, if the polished point is stuck next to one.

    Newton converges only linearly onto a double root and stalls at a
    distance of roughly sqrt(machine epsilon). When ``f'/f''`` is tiny the
    point is next to a critical point of f; Newton on ``f'`` locates it and
    the move is kept only if ``|f|`` does not grow.
    """
    start = x
    for _ in range(6):
        radius = 1e-3 * max(1.0, abs(x))
        d = _cauchy_derivatives(func, x, radius)
        if d is None or d[1] == 0:
            break
        step = d[0] / d[1]
        if abs(step) > 1e-5 * max(1.0, abs(start)):
            break
        x = x - step
        if abs(step) <= 4 * _EPS * max(1.0, abs(x)):
            break
    if x == start:
        return start
    fn = _safe(func, x)
    if fn is None or abs(fn) > 10.0 * max(abs(fx), floor):
        return start
    return x


def newton_solve(
    func: Callable[[complex], complex],
    x0,
    tol: float,
    max_iters: int = 60,
    *,
    scale: Optional[Callable[[complex], float]] = None,
    double_root_check: bool = False,
    line_search: bool = True,
    trace: Optional[list[complex]] = None,
) -> IterationOutcome:
    """Newton iteration on an arbitrary callable with a finite-difference derivative.

    The derivative is the central difference ``(f(x+h) - f(x-h)) / 2h`` with
    ``h = 1e-7 max(1, |x|)``. A step longer than ten times the previous one
    is halved (at most 20 times) to stay inside the current basin. Iteration
    continues past ``tol`` until the step reaches rounding level or stops
    shrinking, and the best iterate seen is returned. Convergence means
    ``|f(x)| / scale(x) < tol``.
    """
    scale = scale or (lambda _x: 1.0)
    x = as_complex(x0, "x0")
    fx = _safe(func, x)
    if fx is None:
        return IterationOutcome(x, 0, False, math.inf, trace, FailureReason.DOMAIN_HIT, x0=x)
    best_x, best_f = x, fx
    best_r = abs(fx) / scale(x)
    prev_step: Optional[float] = None
    stalls = 0
    used = 0
    reason: Optional[FailureReason] = None
    for used in range(1, max_iters + 1):
        h = 1e-7 * max(1.0, abs(x))
        fp, fm = _safe(func, x + h), _safe(func, x - h)
        if fp is None or fm is None:
            reason = FailureReason.DOMAIN_HIT
            break
        deriv = (fp - fm) / (2.0 * h)
        if abs(deriv) < 1e-300:
            reason = FailureReason.SINGULAR_DERIVATIVE
            break
        if fx == 0:
            break
        step = fx / deriv
        if prev_step is not None:
            for _ in range(20):
                if abs(step) <= 10.0 * prev_step:
                    break
                step *= 0.5
        xn = x - step
        fn = _safe(func, xn)
        halvings = 0
        while fn is None and halvings < 20:
            step *= 0.5
            xn = x - step
            fn = _safe(func, xn)
            halvings += 1
        if fn is None:
            reason = FailureReason.DOMAIN_HIT
            break
        if line_search and best_r >= tol:
            # far from converged: insist on a decrease of |f| before moving
            for _ in range(20):
                if abs(fn) < abs(fx):
                    break
                step *= 0.5
                cand = _safe(func, x - step)
                if cand is not None:
                    xn, fn = x - step, cand
        x, fx = xn, fn
        if trace is not None:
            trace.append(x)
        r = abs(fx) / scale(x)
        if r < best_r:
            best_x, best_f, best_r = x, fx, r
            stalls = 0
        else:
            stalls += 1
        prev_step = abs(step)
        if abs(step) <= 4 * _EPS * max(1.0, abs(x)) or (best_r < tol and stalls >= 3):
            break
    else:
        if best_r >= tol:
            reason = FailureReason.MAX_ITERS
    if reason is FailureReason.SINGULAR_DERIVATIVE:
        return IterationOutcome(x, used, False, abs(fx), trace, reason, x0=as_complex(x0))
    if double_root_check and best_r < tol:
        refined = _double_root_refine(func, best_x, best_f, 4 * _EPS * scale(best_x))
        if refined != best_x:
            best_x = refined
            best_f = func(refined)
            best_r = abs(best_f) / scale(refined)
            if trace is not None:
                trace.append(refined)
    converged = best_r < tol
    if converged:
        reason = None
    elif reason is None:
        reason = FailureReason.MAX_ITERS
    out = IterationOutcome(best_x, used, converged, abs(best_f), trace, reason, x0=as_complex(x0))
    out.scaled_residual = best_r
    out.polished = True
    return out


def newton_polish(
    eq: Equation, x0, tol: float = 1e-10, max_iters: int = 60, *, double_root_check: bool = True,
    trace: bool = False,
) -> IterationOutcome:
    """Newton polish of ``eq`` from ``x0``; see :func:`newton_solve`.

    The residual is judged relative to ``residual_scale(eq, x)`` so that
    equations whose individual terms are huge can still be certified.
    """
    return newton_solve(
        lambda x: evaluate(eq, x),
        x0,
        tol,
        max_iters,
        scale=lambda x: residual_scale(eq, x),
        double_root_check=double_root_check,
        trace=[] if trace else None,
    )


# -- fixed-point iteration -------------------------------------------------------


def iteration_map(eq: Equation, k: int, b: BranchTuple) -> Callable[[complex], complex]:
    """The map ``x -> s_k^{-1}(u_target(eq, k, x))`` on branch ``b``."""
    term = eq.terms[k - 1]
    return lambda x: invert_term(term, u_target(eq, k, x), b)


RefineTargets = Union[None, Callable[[complex], complex], Sequence[Callable[[complex], complex]]]


def _refine_targets(refine: RefineTargets) -> list[Callable[[complex], complex]]:
    if refine is None:
        return []
    if callable(refine):
        return [refine]
    return list(refine)


def _iterate_from(eq, k, b, cfg: IterConfig, x0: complex, refine) -> IterationOutcome:
    step_map = iteration_map(eq, k, b)
    trace: Optional[list[complex]] = [x0] if cfg.trace else None
    x = x0
    used = 0
    reason: Optional[FailureReason] = None
    raw_converged = False
    for used in range(1, cfg.max_iters + 1):
        try:
            xn = step_map(x)
        except (BranchRootsError, *_FAILURES):
            reason = FailureReason.DOMAIN_HIT
            break
        if not (math.isfinite(xn.real) and math.isfinite(xn.imag)) or abs(xn) > cfg.overflow_bound:
            reason = FailureReason.OVERFLOW
            break
        delta = abs(xn - x)
        x = xn
        if trace is not None:
            trace.append(x)
        if delta < cfg.eps:
            raw_converged = True
            break
        fx = _safe(lambda z: evaluate(eq, z), x)
        if fx is not None and abs(fx) < cfg.eps * residual_scale(eq, x):
            raw_converged = True
            break
    raw_x = x
    if reason is not None:
        return IterationOutcome(x, used, False, math.inf, trace, reason, raw_x, x0=x0)

    def resid(z):
        f = _safe(lambda t: evaluate(eq, t), z)
        return (math.inf, math.inf) if f is None else (abs(f), abs(f) / residual_scale(eq, z))

    targets = _refine_targets(refine)
    if not cfg.polish and not targets:
        res, sres = resid(x)
        out = IterationOutcome(x, used, raw_converged, res, trace, None if raw_converged else FailureReason.MAX_ITERS,
                               raw_x, x0=x0)
        out.scaled_residual = sres
        return out

    final = x
    polish_iters = 0
    reason = None
    if cfg.polish:
        pol = newton_polish(eq, x, cfg.eps, cfg.polish_max_iters, double_root_check=cfg.double_root_check)
        final, polish_iters, reason = pol.final_x, pol.iterations_used, pol.reason
    for target in targets:
        ref = newton_solve(target, final, cfg.eps, cfg.polish_max_iters,
                           scale=lambda z: max(1.0, abs(z)), line_search=cfg.line_search)
        polish_iters += ref.iterations_used
        reason = ref.reason
        if ref.converged:
            final = ref.final_x
    res, sres = resid(final)
    if targets:
        # the last refinement target certifies the root; its residual is judged relative to |x|
        last = _safe(targets[-1], final)
        converged = last is not None and abs(last) < cfg.eps * max(1.0, abs(final)) or sres < cfg.eps
    else:
        converged = sres < cfg.eps
    reason = None if converged else (reason or FailureReason.MAX_ITERS)
    if trace is not None:
        trace.append(final)
    out = IterationOutcome(final, used + polish_iters, converged, res, trace, reason, raw_x, True, x0=x0)
    out.scaled_residual = sres
    return out


def iterate(
    eq: Equation,
    k: int,
    b: BranchTuple = BranchTuple(),
    cfg: IterConfig = IterConfig(),
    *,
    refine: RefineTargets = None,
) -> IterationOutcome:
    """Run the fixed-point iteration of term ``k`` on branch ``b``.

    Stops early when two iterates differ by less than ``cfg.eps`` or the
    residual drops below it; an iterate beyond ``cfg.overflow_bound`` or a
    domain error ends the attempt. With ``cfg.polish`` the result is
    refined by Newton (and then by Newton on ``refine`` when given), and
    the raw fixed-point value is kept in ``raw_x``. ``refine`` may be one
    callable or a sequence; each is solved by Newton in turn from the
    previous result, and the last one then decides convergence. Failures are reported
    through ``converged`` and ``reason``, never raised.
    """
    if isinstance(k, bool) or int(k) != k or not 1 <= k <= eq.n:
        raise IndexError(f"term index {k!r} outside 1..{eq.n}")
    last: Optional[IterationOutcome] = None
    for x0 in (cfg.x0, *cfg.retry_x0):
        out = _iterate_from(eq, int(k), b, cfg, x0, refine)
        if out.converged:
            return out
        last = last or out
    return last


def _on_branch(eq: Equation, k: int, b: BranchTuple, x: complex) -> bool:
    try:
        y = iteration_map(eq, k, b)(x)
    except (BranchRootsError, *_FAILURES):
        return False
    return abs(y - x) <= 1e-6 * max(1.0, abs(x))


@dataclass(frozen=True)
class BranchOutcome:
    term_k: int
    branch: BranchTuple
    outcome: IterationOutcome

    def to_record(self, eq: Equation) -> RootRecord:
        o = self.outcome
        return RootRecord(
            value=o.final_x,
            term_k=self.term_k,
            variant_q=self.branch.variant,
            primary_branch=self.branch.primary,
            secondary_branch=self.branch.secondary,
            residual=o.residual,
            iterations=o.iterations_used,
            polished=o.polished,
            on_branch=_on_branch(eq, self.term_k, self.branch, o.final_x),
        )


def resolve_threads(value: Optional[int] = None) -> int:
    """Thread count from an explicit value or ``RF_THREADS`` (0 or unset means one per CPU)."""
    if value is None:
        raw = os.environ.get("RF_THREADS", "1")
        try:
            value = int(raw)
        except ValueError:
            raise InvalidInput(f"RF_THREADS must be an integer, got {raw!r}") from None
    if value < 0:
        raise InvalidInput("thread count must be >= 0")
    return value or (os.cpu_count() or 1)


def enumerate_branches(
    eq: Equation,
    k: int,
    primary_range: Sequence[int],
    cfg: IterConfig = IterConfig(),
    *,
    secondary_range: Optional[Sequence[int]] = None,
    variants: Optional[Sequence[int]] = None,
    refine: RefineTargets = None,
    threads: int = 1,
) -> list[BranchOutcome]:
    """Iterate every branch tuple, converged or not, in the declared order.

    The order is primary ascending, then secondary, then variant,
    independent of ``threads``.
    """
    if isinstance(k, bool) or int(k) != k or not 1 <= k <= eq.n:
        raise IndexError(f"term index {k!r} outside 1..{eq.n}")
    k = int(k)
    primary = sorted(set(int(p) for p in primary_range))
    if not primary:
        raise InvalidInput("primary_range is empty")
    term = eq.terms[k - 1]
    secondary = sorted(set(secondary_range)) if secondary_range is not None else sorted(branch_range(term))
    if variants is None:
        count = variant_count(term.kind)
        if count == 0:
            raise InvalidInput(f"term {k} has no inverse and cannot drive the iteration")
        variants = range(count)
    tuples = [BranchTuple(p, s, v) for p in primary for s in secondary for v in sorted(set(variants))]

    def run(b: BranchTuple) -> BranchOutcome:
        return BranchOutcome(k, b, iterate(eq, k, b, cfg, refine=refine))

    if threads <= 1 or len(tuples) <= 1:
        return [run(b) for b in tuples]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, tuples))


def enumerate_roots(
    eq: Equation,
    k: int,
    primary_range: Sequence[int],
    cfg: IterConfig = IterConfig(),
    *,
    secondary_range: Optional[Sequence[int]] = None,
    variants: Optional[Sequence[int]] = None,
    refine: RefineTargets = None,
    threads: int = 1,
    failures: Optional[list[BranchOutcome]] = None,
) -> list[RootRecord]:
    """Converged roots over all branch tuples, as :class:`RootRecord` objects.

    Branches that fail are appended to ``failures`` when a list is given.
    """
    out = []
    for bo in enumerate_branches(eq, k, primary_range, cfg, secondary_range=secondary_range,
                                 variants=variants, refine=refine, threads=threads):
        if bo.outcome.converged:
            out.append(bo.to_record(eq))
        elif failures is not None:
            failures.append(bo)
    return out
