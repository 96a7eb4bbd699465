"""Command-line front end.

Equation files are JSON::

    {
      "a0": [10, 0],
      "terms": [
        {"coeff": [1, 0], "kind": "power_exp", "params": {"r": 1, "base": [5, 0], "q": -1}},
        {"coeff": [1, 0], "kind": "power_exp", "params": {"r": -1, "base": [5, 0], "q": 1}}
      ],
      "solve": {"term_k": 2, "primary_min": -10, "primary_max": 10, "x0": [100, 0]}
    }

Complex numbers are always ``[re, im]`` pairs; a bare real number is also
accepted. Term kinds and their parameters:

================  ==========================
kind              params
================  ==========================
``power``         ``r``
``exp_of_power``  ``base``, ``q``
``power_exp``     ``r``, ``base``, ``q``
``geo_exp``       ``base``
``builtin``       ``name``
================  ==========================

Optional ``solve`` keys: ``eps``, ``max_iters``, ``polish``,
``dedupe_tol``, ``retry_x0`` (list of pairs), ``secondary`` and
``variants`` (lists of integers for the inverted term).

Exit codes: 0 success, 1 bad input or unknown scenario, 2 no roots found
(``solve``) or golden mismatch (``reproduce``).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field, replace
from typing import Any, Optional, Sequence, TextIO

from .catalog import DEFAULT_DEDUPE_TOL, RootRecord, dedupe, subfield_table, union_count
from .engine import BranchOutcome, IterConfig, enumerate_branches, resolve_threads
from .equation import Builtin, Equation, ExpOfPower, GeoExp, Power, PowerExp, Term, variant_count
from .errors import BranchRootsError, InvalidInput, UnknownScenario
from .scenarios import get_scenario, list_scenarios, run_scenario

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_EMPTY = 2

CSV_COLUMNS = ("term_k", "variant", "primary", "secondary", "re", "im", "residual", "iterations")

_KINDS = {
    "power": (Power, ("r",)),
    "exp_of_power": (ExpOfPower, ("base", "q")),
    "power_exp": (PowerExp, ("r", "base", "q")),
    "geo_exp": (GeoExp, ("base",)),
    "builtin": (Builtin, ("name",)),
}
_SOLVE_KEYS = {
    "term_k", "primary_min", "primary_max", "x0", "eps", "max_iters", "polish",
    "dedupe_tol", "retry_x0", "secondary", "variants",
}


class SpecError(Exception):
    """Malformed equation file."""


@dataclass
class SolveSpec:
    equation: Equation
    term_k: int
    primary_range: tuple[int, ...]
    cfg: IterConfig
    dedupe_tol: float = DEFAULT_DEDUPE_TOL
    secondary: Optional[tuple[int, ...]] = None
    variants: Optional[tuple[int, ...]] = None


def parse_complex(value: Any, where: str) -> complex:
    """``[re, im]`` or a plain real number."""
    if isinstance(value, bool):
        raise SpecError(f"{where}: expected a number or [re, im], got {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        return complex(value[0], value[1])
    raise SpecError(f"{where}: expected a number or [re, im], got {value!r}")


def _int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SpecError(f"{where}: expected an integer, got {value!r}")
    return value


def _int_list(value: Any, where: str) -> tuple[int, ...]:
    if not isinstance(value, list) or not value:
        raise SpecError(f"{where}: expected a non-empty list of integers")
    return tuple(_int(v, where) for v in value)


def _parse_term(raw: Any, index: int) -> Term:
    where = f"term {index}"
    if not isinstance(raw, dict):
        raise SpecError(f"{where}: expected an object")
    kind_tag = raw.get("kind")
    if kind_tag not in _KINDS:
        raise SpecError(f"{where}: unknown kind {kind_tag!r}; expected one of {sorted(_KINDS)}")
    cls, fields = _KINDS[kind_tag]
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise SpecError(f"{where}: params must be an object")
    extra = set(params) - set(fields)
    missing = set(fields) - set(params)
    if extra or missing:
        raise SpecError(f"{where}: {kind_tag} needs params {list(fields)}, got {sorted(params)}")
    args = []
    for name in fields:
        v = params[name]
        if name == "base":
            args.append(parse_complex(v, f"{where}.{name}"))
        elif name == "name":
            if not isinstance(v, str):
                raise SpecError(f"{where}.name: expected a string")
            args.append(v)
        else:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise SpecError(f"{where}.{name}: expected a real number, got {v!r}")
            args.append(float(v))
    coeff = parse_complex(raw.get("coeff", 1), f"{where}.coeff")
    try:
        return Term(coeff, cls(*args))
    except BranchRootsError as exc:
        raise SpecError(f"{where}: {exc}") from None


def parse_spec(doc: Any) -> SolveSpec:
    """Validate a decoded equation document."""
    if not isinstance(doc, dict):
        raise SpecError("top level must be an object")
    raw_terms = doc.get("terms")
    if not isinstance(raw_terms, list) or not raw_terms:
        raise SpecError("'terms' must be a non-empty list")
    terms = tuple(_parse_term(t, i) for i, t in enumerate(raw_terms, start=1))
    eq = Equation(terms, parse_complex(doc.get("a0", 0), "a0"))

    solve = doc.get("solve", {})
    if not isinstance(solve, dict):
        raise SpecError("'solve' must be an object")
    unknown = set(solve) - _SOLVE_KEYS
    if unknown:
        raise SpecError(f"solve: unknown keys {sorted(unknown)}")
    term_k = _int(solve.get("term_k", 1), "solve.term_k")
    if not 1 <= term_k <= eq.n:
        raise SpecError(f"solve.term_k: {term_k} outside 1..{eq.n}")
    lo = _int(solve.get("primary_min", 0), "solve.primary_min")
    hi = _int(solve.get("primary_max", lo), "solve.primary_max")
    if hi < lo:
        raise SpecError("solve: primary_max < primary_min")
    cfg_kw: dict[str, Any] = {}
    if "x0" in solve:
        cfg_kw["x0"] = parse_complex(solve["x0"], "solve.x0")
    if "retry_x0" in solve:
        if not isinstance(solve["retry_x0"], list):
            raise SpecError("solve.retry_x0: expected a list")
        cfg_kw["retry_x0"] = tuple(parse_complex(v, "solve.retry_x0") for v in solve["retry_x0"])
    if "eps" in solve:
        cfg_kw["eps"] = solve["eps"]
    if "max_iters" in solve:
        cfg_kw["max_iters"] = _int(solve["max_iters"], "solve.max_iters")
    if "polish" in solve:
        if not isinstance(solve["polish"], bool):
            raise SpecError("solve.polish: expected true or false")
        cfg_kw["polish"] = solve["polish"]
    try:
        cfg = IterConfig(**cfg_kw)
    except BranchRootsError as exc:
        raise SpecError(f"solve: {exc}") from None
    tol = solve.get("dedupe_tol", DEFAULT_DEDUPE_TOL)
    if isinstance(tol, bool) or not isinstance(tol, (int, float)) or not tol > 0:
        raise SpecError("solve.dedupe_tol: expected a positive number")
    secondary = _int_list(solve["secondary"], "solve.secondary") if "secondary" in solve else None
    variants = _int_list(solve["variants"], "solve.variants") if "variants" in solve else None
    return SolveSpec(eq, term_k, tuple(range(lo, hi + 1)), cfg, float(tol), secondary, variants)


def load_spec(path: str) -> SolveSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON ({exc})") from None
    return parse_spec(doc)


# -- running ---------------------------------------------------------------------


@dataclass
class SolveResult:
    records: list[RootRecord]
    failures: list[BranchOutcome] = field(default_factory=list)
    outcomes: list[BranchOutcome] = field(default_factory=list)


def _solve_term(spec: SolveSpec, k: int, threads: int, trace: bool = False) -> SolveResult:
    cfg = spec.cfg
    if trace and not cfg.trace:
        cfg = replace(cfg, trace=True)
    own = k == spec.term_k
    outcomes = enumerate_branches(
        spec.equation, k, spec.primary_range, cfg,
        secondary_range=spec.secondary if own else None,
        variants=spec.variants if own else None,
        threads=threads,
    )
    res = SolveResult([], [], outcomes)
    for bo in outcomes:
        if bo.outcome.converged:
            res.records.append(bo.to_record(spec.equation))
        else:
            res.failures.append(bo)
    return res


def _row(r: RootRecord) -> dict[str, Any]:
    return {
        "term_k": r.term_k,
        "variant": r.variant_q,
        "primary": r.primary_branch,
        "secondary": r.secondary_branch,
        "re": r.value.real,
        "im": r.value.imag,
        "residual": r.residual,
        "iterations": r.iterations,
        "polished": r.polished,
        "aliases": [list(a) for a in r.aliases],
    }


def build_report(records: Sequence[RootRecord], tol: float) -> dict[str, Any]:
    """Deduplicated rows in branch order plus a summary block."""
    roots = dedupe(records, tol)
    rows = [_row(r) for r in sorted(roots, key=lambda r: r.sort_key)]
    per_subfield: dict[str, int] = {}
    for r in roots:
        per_subfield[str(r.term_k)] = per_subfield.get(str(r.term_k), 0) + 1
    return {
        "roots": rows,
        "summary": {"distinct": len(rows), "dedupe_tol": tol, "per_subfield": per_subfield},
    }


def dump_json(report: dict[str, Any]) -> str:
    return json.dumps(report, indent=2)


def _fmt(x: float) -> str:
    return f"{x:.15g}"


def _fmt_complex(z: complex) -> str:
    return f"{z.real:.15g} {z.imag:+.15g}i"


def write_table(report: dict[str, Any], out: TextIO) -> None:
    header = f"{'k':>3} {'var':>3} {'prim':>5} {'sec':>4}  {'re':>24} {'im':>24}  {'residual':>9} {'it':>3}"
    print(header, file=out)
    for r in report["roots"]:
        mark = "" if r["polished"] else " (unpolished)"
        alias = f"  = {r['aliases']}" if r["aliases"] else ""
        print(
            f"{r['term_k']:>3} {r['variant']:>3} {r['primary']:>5} {r['secondary']:>4}  "
            f"{_fmt(r['re']):>24} {_fmt(r['im']):>24}  {r['residual']:9.2e} {r['iterations']:>3}{mark}{alias}",
            file=out,
        )
    print(f"distinct roots: {report['summary']['distinct']}", file=out)


def write_csv(report: dict[str, Any], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in report["roots"]:
        w.writerow([r[c] if c not in ("re", "im", "residual") else repr(float(r[c])) for c in CSV_COLUMNS])


def _print_traces(outcomes: Sequence[BranchOutcome], out: TextIO) -> None:
    for bo in outcomes:
        o = bo.outcome
        b = bo.branch
        status = "converged" if o.converged else f"failed ({o.reason.value if o.reason else '?'})"
        print(f"# branch primary={b.primary} secondary={b.secondary} variant={b.variant}: {status}", file=out)
        for i, x in enumerate(o.trace or ()):
            print(f"#   {i:3d} {_fmt(x.real)} {_fmt(x.imag)}", file=out)


# -- commands --------------------------------------------------------------------


def cmd_solve(path: str, fmt: str = "table", dedupe_tol: Optional[float] = None, trace: bool = False,
              out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        spec = load_spec(path)
        threads = resolve_threads()
        if dedupe_tol is not None and not dedupe_tol > 0:
            raise SpecError("--dedupe-tol must be positive")
        res = _solve_term(spec, spec.term_k, threads, trace)
    except (SpecError, BranchRootsError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    if trace:
        _print_traces(res.outcomes, err)
    report = build_report(res.records, dedupe_tol if dedupe_tol is not None else spec.dedupe_tol)
    if fmt == "json":
        print(dump_json(report), file=out)
    elif fmt == "csv":
        write_csv(report, out)
    else:
        write_table(report, out)
    if not report["roots"]:
        print("no branch converged", file=err)
        return EXIT_EMPTY
    return EXIT_OK


def count_roots(spec: SolveSpec, threads: int = 1) -> dict[str, Any]:
    """Enumerate every invertible term and compare inclusion-exclusion with a direct count."""
    subfields: dict[int, list[complex]] = {}
    for k in range(1, spec.equation.n + 1):
        if variant_count(spec.equation.terms[k - 1].kind) == 0:
            continue
        recs = _solve_term(spec, k, threads).records
        subfields[k] = [r.value for r in recs]
    if not subfields:
        raise InvalidInput("no term has an inverse")
    order = list(subfields)
    table, distinct = subfield_table([subfields[k] for k in order], spec.dedupe_tol)
    # re-key by term index rather than position
    keyed = {frozenset(order[i - 1] for i in key): v for key, v in table.items()}
    total = union_count(table)
    return {"subfields": order, "table": keyed, "union": total, "distinct": distinct}


def cmd_count(path: str, out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        spec = load_spec(path)
        result = count_roots(spec, resolve_threads())
    except (SpecError, BranchRootsError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    table = result["table"]
    for k in result["subfields"]:
        print(f"subfield {k}: {table[frozenset([k])]} roots", file=out)
    for key in sorted(table, key=lambda s: (len(s), sorted(s))):
        if len(key) > 1:
            print(f"intersection {sorted(key)}: {table[key]}", file=out)
    print(f"inclusion-exclusion total: {result['union']}", file=out)
    print(f"distinct roots: {result['distinct']}", file=out)
    if result["union"] != result["distinct"]:
        print("warning: totals disagree", file=err)
    return EXIT_OK


def _print_reproduce(report, out: TextIO) -> None:
    print(f"== {report.scenario_id}: {len(report.roots)} distinct roots, "
          f"{report.matched_count}/{len(report.matches)} reference rows matched "
          f"({report.elapsed:.2f}s)", file=out)
    if report.matches:
        print(f"  {'branch':>16}  {'expected':>44}  {'achieved':>44}  {'|delta|':>9} {'tol':>7}", file=out)
    for m in report.matches:
        e = m.entry
        lab = f"({e.variant},{e.primary},{e.secondary})" if e.match == "label" else "(by value)"
        exp = _fmt_complex(e.value)
        ach = "-" if m.achieved is None else _fmt_complex(m.achieved)
        flag = "ok" if m.matched else "MISMATCH"
        print(f"  {lab:>16}  {exp:>44}  {ach:>44}  {m.delta:9.2e} {e.tol:7.0e} {flag}", file=out)
    if not report.count_ok:
        print(f"  expected {report.expected_count} distinct roots, got {len(report.roots)}  MISMATCH", file=out)


def cmd_reproduce(target: str, out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ids = list_scenarios() if target == "all" else [target]
    try:
        for sid in ids:
            get_scenario(sid)
        threads = resolve_threads()
    except UnknownScenario:
        print(f"error: unknown scenario {target!r}; see list-scenarios", file=err)
        return EXIT_INPUT
    except BranchRootsError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    ok = True
    for sid in ids:
        _, report = run_scenario(sid, threads=threads)
        _print_reproduce(report, out)
        ok &= report.passed
    if len(ids) > 1:
        print(f"{len(ids)} scenarios run", file=out)
    return EXIT_OK if ok else EXIT_EMPTY


def cmd_list(out: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    for sid in list_scenarios():
        print(f"{sid:18s} {get_scenario(sid).title}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="branchroots", description="Enumerate complex roots branch by branch.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", help="solve the equation in a JSON file")
    s.add_argument("spec")
    s.add_argument("--format", choices=("table", "json", "csv"), default="table")
    s.add_argument("--dedupe-tol", type=float, default=None)
    s.add_argument("--trace", action="store_true", help="print iterates of every branch to stderr")
    r = sub.add_parser("reproduce", help="run a registered scenario and compare with reference roots")
    r.add_argument("scenario", help="scenario id or 'all'")
    c = sub.add_parser("count", help="enumerate all subfields and report inclusion-exclusion counts")
    c.add_argument("spec")
    sub.add_parser("list-scenarios", help="list registered scenario ids")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.command == "solve":
        return cmd_solve(args.spec, args.format, args.dedupe_tol, args.trace)
    if args.command == "reproduce":
        return cmd_reproduce(args.scenario)
    if args.command == "count":
        return cmd_count(args.spec)
    return cmd_list()


if __name__ == "__main__":
    sys.exit(main())
