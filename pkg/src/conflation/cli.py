"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.  Numbers are
written with 12 significant digits so repeated runs diff cleanly.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import repro
from .analysis import (
    aligned_grid,
    competitive_configuration,
    find_dominating_competitive,
    optimal_k,
    pareto_dominates,
    price_ratio_sweep,
    utility_sweep,
)
from .classification import Classification, d_omega, random_perturbation
from .economy import Economy, induce
from .errors import CapacityError, SolverError, ValidationError
from .measures import PiecewiseMeasure
from .solvers import solve, verify_equilibrium

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3
SIG = 12


def _round(obj):
    """Recursively round floats to ``SIG`` significant digits."""
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if not np.isfinite(v) else float(f"{v:.{SIG}g}")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _number(text: str) -> float:
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"not a number: {text!r}") from exc


def _arg_number(text: str) -> float:
    try:
        return _number(text)
    except ValidationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def parse_cuts(text: str) -> Classification:
    return Classification([_number(tok) for tok in text.split(",")])


_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:/\d+)?"
_CONST = re.compile(rf"^[-+]?{_NUM}$")
_AFFINE = re.compile(rf"^(?:(?P<a>[-+]?{_NUM})(?P<sign>[-+]))?(?P<neg>-)?(?:(?P<b>{_NUM})\*)?t$")


def parse_affine(token: str):
    """``(a, b)`` for a cut expression ``a``, ``t``, ``b*t``, ``a+b*t`` or ``a-b*t``."""
    tok = re.sub(r"\s+", "", token)
    if _CONST.match(tok):
        return _number(tok), 0.0
    m = _AFFINE.match(tok)
    if not m or (m.group("sign") and m.group("neg")):
        raise ValidationError(f"cut expression {token!r} is not of the form a+b*t")
    a = _number(m.group("a")) if m.group("a") else 0.0
    b = _number(m.group("b")) if m.group("b") else 1.0
    if m.group("sign") == "-" or m.group("neg"):
        b = -b
    return a, b


def parse_family(text: str):
    """Classification family ``t -> Classification`` from comma-separated affine cuts."""
    terms = [parse_affine(tok) for tok in text.split(",")]

    def family(t: float) -> Classification:
        return Classification([a + b * t for a, b in terms])

    return family


def load_economy(path: str) -> Economy:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read economy file {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: top level must be an object")
    return Economy.from_dict(data)


def _emit(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(_round(obj), indent=2)


def _grid(args) -> np.ndarray:
    if args.grid < 2:
        raise ValidationError("--grid must be at least 2")
    if args.anchors:
        return aligned_grid(args.grid, [_number(a) for a in args.anchors.split(",")])
    return np.linspace(0.0, 1.0, args.grid + 2)[1:-1]


# -- subcommands -------------------------------------------------------------


def cmd_solve(args) -> int:
    e = load_economy(args.economy)
    pi = parse_cuts(args.cuts)
    ce = induce(e, pi)
    eq = solve(ce)
    report = verify_equilibrium(ce, eq, args.tol)
    out = {"cuts": pi.to_list(), **eq.to_dict(),
           "verification": {"passed": report.passed, "tolerance": args.tol,
                            "residuals": report.residuals, "failures": report.failures}}
    _emit(args, _dump(out))
    return EXIT_OK if report.passed else EXIT_NUMERIC


def cmd_sweep(args) -> int:
    e = load_economy(args.economy)
    family = parse_family(args.family)
    grid = _grid(args)
    if args.ratio:
        try:
            a, b = (int(x) for x in args.ratio.split(","))
        except ValueError as exc:
            raise ValidationError(f"--ratio needs two cell indices a,b, got {args.ratio!r}") from exc
        res = price_ratio_sweep(e, family, a, b, grid)
    else:
        res = utility_sweep(e, family, grid)
    _emit(args, res.to_csv())
    if np.any(np.isfinite(res.welfare)):
        print(f"argmax welfare at t={res.argmax_welfare:.{SIG}g}", file=sys.stderr)
    for t, msg in res.failures.items():
        print(f"gap at t={t:.{SIG}g}: {msg}", file=sys.stderr)
    return EXIT_OK


def cmd_pareto(args) -> int:
    e = load_economy(args.economy)
    pi = parse_cuts(args.cuts)
    cfg_a, eq_a = competitive_configuration(e, pi)
    out = {"cuts": pi.to_list(), "utilities": eq_a.utilities}
    if args.against:
        rho = parse_cuts(args.against)
        cfg_b, eq_b = competitive_configuration(e, rho)
        out.update(
            against=rho.to_list(),
            against_utilities=eq_b.utilities,
            dominates=pareto_dominates(e, cfg_a, cfg_b),
            dominated_by=pareto_dominates(e, cfg_b, cfg_a),
        )
    if args.search:
        grid = np.linspace(0.0, 1.0, args.grid + 1)
        hit = find_dominating_competitive(e, cfg_a, grid, args.search)
        out["dominating"] = None if hit is None else {"cuts": hit[0].to_list(), "utilities": hit[1].utilities}
    _emit(args, _dump(out))
    return EXIT_OK


def cmd_optimal_k(args) -> int:
    e = load_economy(args.economy)
    res = optimal_k(e, args.cost, args.grid)
    _emit(args, _dump(res.to_dict()))
    return EXIT_OK


def cmd_repro(args) -> int:
    ids = list(repro.SCENARIOS) if args.all else args.ids
    if not ids:
        raise ValidationError("name scenarios or pass --all")
    reports = [repro.run_scenario(i) for i in ids]
    text = repro.to_json(reports) if args.json else repro.format_table(reports)
    _emit(args, text)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_NUMERIC


def cmd_metric(args) -> int:
    omega = load_economy(args.economy).omega if args.economy else PiecewiseMeasure.lebesgue()
    pi = parse_cuts(args.cuts)
    if args.against:
        rho = parse_cuts(args.against)
    elif args.perturb is not None:
        rho = random_perturbation(pi, args.perturb, args.seed)
    else:
        raise ValidationError("metric needs --against or --perturb")
    _emit(args, _dump({"cuts": pi.to_list(), "against": rho.to_list(), "d_omega": d_omega(pi, rho, omega)}))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conflation", description="Markets over classified goods.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, economy_required=True):
        sp.add_argument("--economy", required=economy_required, help="economy JSON file")
        sp.add_argument("--out", help="write output here instead of stdout")
        return sp

    s = common(sub.add_parser("solve", help="competitive equilibrium of E(pi)"))
    s.add_argument("--cuts", required=True, help="comma-separated cuts, e.g. 0,1/3,1")
    s.add_argument("--tol", type=_arg_number, default=1e-7, help="verification tolerance")
    s.set_defaults(func=cmd_solve)

    s = common(sub.add_parser("sweep", help="equilibria along a one-parameter family (CSV)"))
    s.add_argument("--family", required=True, help="affine cuts, e.g. 0,0.25,0.25+0.5*t,0.75,1")
    s.add_argument("--grid", type=int, default=99, help="number of interior grid points")
    s.add_argument("--anchors", help="values the grid must contain, e.g. 1/6,1/2,5/6")
    s.add_argument("--ratio", help="two cell indices a,b; adds the price ratio p_a/p_b")
    s.set_defaults(func=cmd_sweep)

    s = common(sub.add_parser("pareto", help="compare or search for dominating configurations"))
    s.add_argument("--cuts", required=True)
    s.add_argument("--against", help="second classification to compare with")
    s.add_argument("--search", type=int, metavar="K", help="search up to K cells for a dominating one")
    s.add_argument("--grid", type=int, default=12, help="search grid resolution")
    s.set_defaults(func=cmd_pareto)

    s = common(sub.add_parser("optimal-k", help="welfare-optimal number of commodities"))
    s.add_argument("--cost", type=_arg_number, required=True, help="cost per commodity, in (0, 1)")
    s.add_argument("--grid", type=int, default=100, help="uniform cut-grid resolution")
    s.set_defaults(func=cmd_optimal_k)

    s = sub.add_parser("repro", help="run worked-example scenarios")
    s.add_argument("ids", nargs="*")
    s.add_argument("--all", action="store_true")
    s.add_argument("--json", action="store_true", help="machine-readable report")
    s.add_argument("--out")
    s.set_defaults(func=cmd_repro)

    s = common(sub.add_parser("metric", help="d_omega between two classifications"), economy_required=False)
    s.add_argument("--cuts", required=True)
    s.add_argument("--against")
    s.add_argument("--perturb", type=_arg_number, help="compare with a random perturbation of this size")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_metric)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "tol", 1.0) <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (ValidationError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
