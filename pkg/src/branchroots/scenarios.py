"""Registry of worked examples with reference roots.

Each scenario fixes an equation, the driving term, the branch sweep and the
iteration settings. Reference values live in ``data/golden.csv``; a row is
matched either by its branch label or, where labels are not reproducible,
by value against every root the run produced.
"""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from typing import Callable, Mapping, Optional, Sequence

from .builtins import riemann_form_gamma, riemann_form_sin, zeta_fixed_point_residual, zeta_phi
from .catalog import DEFAULT_DEDUPE_TOL, RootRecord, RootSet, dedupe
from .engine import BranchOutcome, IterConfig, enumerate_branches
from .equation import (
    Builtin,
    Equation,
    ExpOfPower,
    GeoExp,
    Power,
    PowerExp,
    Term,
    branch_range,
    evaluate,
    residual_scale,
)
from .errors import InvalidInput, UnknownScenario

__all__ = [
    "GoldenEntry",
    "Scenario",
    "GoldenMatch",
    "ScenarioReport",
    "list_scenarios",
    "get_scenario",
    "golden_entries",
    "run_scenario",
    "zeta_phi",
]


@dataclass(frozen=True)
class GoldenEntry:
    term_k: int
    variant: int
    primary: int
    secondary: int
    value: complex
    tol: float
    match: str = "label"  # "label" or "value"

    @property
    def label(self) -> tuple[int, int, int, int]:
        return (self.term_k, self.variant, self.primary, self.secondary)


@dataclass(frozen=True)
class Scenario:
    """A ready-to-run root enumeration.

    ``starts`` lists initial values; each one drives a full branch sweep
    (without the default retries) and the results are pooled.
    ``conjugate_closure`` adds the conjugate of every root, which is valid
    for equations that are real on the real axis; added roots are verified
    by their residual and carry ``on_branch=False``.
    """

    id: str
    title: str
    equation: Equation
    term_k: int
    primary_range: tuple[int, ...]
    cfg: IterConfig = IterConfig()
    secondary_range: Optional[tuple[int, ...]] = None
    variants: Optional[tuple[int, ...]] = None
    refine: tuple[Callable[[complex], complex], ...] = ()
    starts: Optional[tuple[complex, ...]] = None
    conjugate_closure: bool = False
    dedupe_tol: float = DEFAULT_DEDUPE_TOL
    expected_count: Optional[int] = None

    @property
    def golden(self) -> tuple[GoldenEntry, ...]:
        return golden_entries(self.id)


@dataclass(frozen=True)
class GoldenMatch:
    entry: GoldenEntry
    achieved: Optional[complex]
    delta: float

    @property
    def matched(self) -> bool:
        return self.delta <= self.entry.tol


@dataclass
class ScenarioReport:
    scenario_id: str
    records: list[RootRecord]
    roots: RootSet
    matches: list[GoldenMatch]
    failures: list[BranchOutcome] = field(default_factory=list)
    expected_count: Optional[int] = None
    elapsed: float = 0.0

    @property
    def matched_count(self) -> int:
        return sum(m.matched for m in self.matches)

    @property
    def count_ok(self) -> bool:
        return self.expected_count is None or len(self.roots) == self.expected_count

    @property
    def passed(self) -> bool:
        return self.count_ok and all(m.matched for m in self.matches)


def _component_delta(a: complex, b: complex) -> float:
    return max(abs(a.real - b.real), abs(a.imag - b.imag))


def _eq(pairs, a0) -> Equation:
    return Equation(tuple(Term(c, k) for c, k in pairs), a0)


def _build() -> dict[str, Scenario]:
    e = math.e
    trinomial = _eq([(1, PowerExp(1, 5, -1)), (1, PowerExp(-1, 5, 1))], 10)
    exp_tri = _eq([(1, GeoExp(7 / 5)), (1, GeoExp(4 / 5))], 1)
    exp3 = _eq([(1, ExpOfPower(e, 3)), (-1, Power(2))], 5)
    m1 = 43 ** (1 / 5)
    m2 = -(31 ** (1 / 3))
    three_exp = _eq([(1, GeoExp(m1)), (math.pi, GeoExp(m2))], e)
    zeta_a = _eq([(1, Builtin("sin_half_pi")), (-1, Builtin("zeta_ratio_a"))], 0)
    zeta_b = _eq([(1, Builtin("pi_power_half")), (-1, Builtin("zeta_ratio_b"))], 0)
    zeta_cfg = IterConfig(max_iters=10, x0=0.5, retry_x0=(), polish=False)
    # Starting points for the logarithmic forms; a single start leaves
    # several high-imaginary roots unreached.
    zeta_b_starts = (0.5, 1.5, -0.5, 3, -3, 0.5 + 2j, 0.5 - 2j, 0.25, 0.75, 1.25, 0.1)
    poly = _eq([(1, Power(5)), (-1, Power(1))], 1)

    def binomial(sid, alpha, u):
        eq = _eq([(1, Power(alpha))], u)
        sec = tuple(branch_range(eq.terms[0], 1 if u > 0 else -1))
        return Scenario(sid, f"z^{alpha:.6g} = {u:g}", eq, 1, (0,), IterConfig(max_iters=5),
                        secondary_range=sec, expected_count=len(sec))

    items = [
        Scenario("trinomial-L1", "x 5^(1/x) + x^-1 5^x = 10, second term inverted", trinomial, 2,
                 tuple(range(-10, 11)), IterConfig(x0=100, max_iters=25), expected_count=21),
        Scenario("trinomial-L2", "x 5^(1/x) + x^-1 5^x = 10, first term inverted", trinomial, 1,
                 tuple(range(-10, 11)), IterConfig(x0=0.01, max_iters=25)),
        Scenario("exp-trinomial-a", "(7/5)^x + (4/5)^x = 1, first term inverted", exp_tri, 1,
                 tuple(range(-2, 3)), IterConfig(x0=1, max_iters=20)),
        Scenario("exp-trinomial-b", "(7/5)^x + (4/5)^x = 1, second term inverted", exp_tri, 2,
                 tuple(range(-2, 3)), IterConfig(x0=1, max_iters=20)),
        *[
            Scenario(f"exp3-w{w}", f"e^(x^3) - x^2 - 5 = 0, cube-root index {w}", exp3, 1,
                     tuple(range(-6, 7)), IterConfig(x0=1, max_iters=15), secondary_range=(w,))
            for w in (0, 1, 2)
        ],
        Scenario("exp3-caseb", "e^(x^3) - x^2 - 5 = 0, square term inverted", exp3, 2, (0,),
                 IterConfig(x0=1, max_iters=6), starts=(1, 1j)),
        Scenario("three-exp-a", "m1^x + pi m2^x = e, first term inverted", three_exp, 1,
                 tuple(range(0, 14)), IterConfig(x0=-2, max_iters=10)),
        Scenario("three-exp-b", "m1^x + pi m2^x = e, second term inverted", three_exp, 2,
                 tuple(range(-10, 11)), IterConfig(x0=0, max_iters=10)),
        Scenario("zeta-a1", "zeta(x) = x via sin(pi x/2), reflected arcsine", zeta_a, 1,
                 tuple(range(-9, 2)), zeta_cfg, variants=(0,),
                 refine=(riemann_form_sin, zeta_fixed_point_residual)),
        Scenario("zeta-a2", "zeta(x) = x via sin(pi x/2), direct arcsine", zeta_a, 1,
                 tuple(range(-8, 3)), zeta_cfg, variants=(1,),
                 refine=(riemann_form_sin, zeta_fixed_point_residual)),
        Scenario("zeta-b1", "zeta(x) = x via pi^(x-1/2), exact logarithmic inverse", zeta_b, 1,
                 tuple(range(-14, 15)), zeta_cfg, variants=(0,),
                 refine=(riemann_form_gamma, zeta_fixed_point_residual), starts=zeta_b_starts,
                 conjugate_closure=True),
        Scenario("zeta-b2", "zeta(x) = x via pi^(x-1/2), shifted logarithmic inverse", zeta_b, 1,
                 tuple(range(-14, 15)), zeta_cfg, variants=(1,),
                 refine=(riemann_form_gamma, zeta_fixed_point_residual), starts=zeta_b_starts,
                 conjugate_closure=True),
        binomial("binomial-pi-pos", math.pi, 2.0),
        binomial("binomial-pi-neg", math.pi, -2.0),
        binomial("binomial-pi1-pos", math.pi + 1, 2.0),
        binomial("binomial-pi1-neg", math.pi + 1, -2.0),
        Scenario("poly-general", "x^5 - x - 1 = 0", poly, 1, (0,), IterConfig(x0=0.5, max_iters=60),
                 secondary_range=tuple(range(5)), expected_count=5),
    ]
    return {s.id: s for s in items}


_REGISTRY = _build()


def list_scenarios() -> list[str]:
    """Registered scenario ids in a fixed order."""
    return list(_REGISTRY)


def get_scenario(scenario_id: str) -> Scenario:
    try:
        return _REGISTRY[scenario_id]
    except KeyError:
        raise UnknownScenario(scenario_id) from None


@lru_cache(maxsize=None)
def _golden_table() -> dict[str, tuple[GoldenEntry, ...]]:
    text = resources.files("branchroots").joinpath("data/golden.csv").read_text(encoding="utf-8")
    table: dict[str, list[GoldenEntry]] = {}
    for row in csv.DictReader(io.StringIO(text)):
        entry = GoldenEntry(
            term_k=int(row["term_k"]),
            variant=int(row["variant"]),
            primary=int(row["primary"]),
            secondary=int(row["secondary"]),
            value=complex(float(row["re"]), float(row["im"])),
            tol=float(row["tol"]),
            match=row["match"],
        )
        if entry.match not in ("label", "value"):
            raise InvalidInput(f"bad match mode {entry.match!r} in golden table")
        table.setdefault(row["scenario"], []).append(entry)
    return {k: tuple(v) for k, v in table.items()}


def golden_entries(scenario_id: str) -> tuple[GoldenEntry, ...]:
    """Reference rows for ``scenario_id`` (empty when none are shipped)."""
    get_scenario(scenario_id)
    return _golden_table().get(scenario_id, ())


def _conjugates(sc: Scenario, cfg: IterConfig, records: list[RootRecord]) -> list[RootRecord]:
    extra = []
    for r in records:
        z = r.value.conjugate()
        if abs(z - r.value) <= sc.dedupe_tol:
            continue
        try:
            f = evaluate(sc.equation, z)
        except (ArithmeticError, ValueError):
            continue
        if abs(f) < cfg.eps * residual_scale(sc.equation, z):
            extra.append(replace(r, value=z, residual=abs(f), on_branch=False, aliases=()))
    return extra


def _match(entry: GoldenEntry, records: Sequence[RootRecord]) -> GoldenMatch:
    if entry.match == "label":
        for r in records:
            if r.label == entry.label and r.on_branch is not None:
                return GoldenMatch(entry, r.value, _component_delta(r.value, entry.value))
        return GoldenMatch(entry, None, math.inf)
    best, best_d = None, math.inf
    for r in records:
        d = _component_delta(r.value, entry.value)
        if d < best_d:
            best, best_d = r.value, d
    return GoldenMatch(entry, best, best_d)


def run_scenario(
    scenario_id: str,
    overrides: Optional[Mapping[str, object]] = None,
    *,
    threads: int = 1,
) -> tuple[RootSet, ScenarioReport]:
    """Run a registered scenario and compare against its reference rows.

    ``overrides`` replaces :class:`IterConfig` fields by name. Returns the
    deduplicated roots and a report with one :class:`GoldenMatch` per
    reference row; label rows are looked up among the undeduplicated
    records so that every branch keeps its own value.
    """
    sc = get_scenario(scenario_id)
    cfg = sc.cfg
    if overrides:
        unknown = set(overrides) - set(IterConfig.__dataclass_fields__)
        if unknown:
            raise InvalidInput(f"unknown IterConfig field(s): {sorted(unknown)}")
        cfg = replace(cfg, **overrides)
    t0 = time.perf_counter()
    runs = [cfg] if sc.starts is None else [replace(cfg, x0=s, retry_x0=()) for s in sc.starts]
    records: list[RootRecord] = []
    failures: list[BranchOutcome] = []
    for run_cfg in runs:
        for bo in enumerate_branches(sc.equation, sc.term_k, sc.primary_range, run_cfg,
                                     secondary_range=sc.secondary_range, variants=sc.variants,
                                     refine=sc.refine or None, threads=threads):
            if bo.outcome.converged:
                records.append(bo.to_record(sc.equation))
            else:
                failures.append(bo)
    if sc.conjugate_closure:
        records += _conjugates(sc, cfg, records)
    roots = dedupe(records, sc.dedupe_tol)
    matches = [_match(g, records) for g in golden_entries(sc.id)]
    report = ScenarioReport(sc.id, records, roots, matches, failures, sc.expected_count,
                            time.perf_counter() - t0)
    return roots, report
