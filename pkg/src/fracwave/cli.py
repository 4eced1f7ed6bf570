"""Command-line front end: list, derive, verify, eval, fracderiv."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .catalog import ConstraintError, catalog_json, get_branch, get_family
from .expansion import (
    EQUATIONS,
    SolverStall,
    UnknownEquationError,
    compare_systems,
    derive_system,
    get_equation,
    printed_param_sets,
    solve_triangular,
    verify_param_set,
)
from .expansion.printed import PRINTED_SYSTEMS, printed_system
from .fracderiv import (
    QuadratureError,
    QuadratureSettings,
    TransformParams,
    mrl_power_rule,
    mrl_quadrature,
    wave_coordinate,
)
from .symexpr import DomainError, Num, compile_numeric, format_expr, parse, substitute
from .verify import DEFAULT_SEED, POLE_GUARD, Grid, _Guard, _has_complex_constant, audit_json, family_audit

PARAMS = ("k", "c", "A", "L", "M", "B0", "p", "q", "r", "xi0", "alpha", "beta", "pm")
DEFAULTS = {"k": 1, "A": 1, "xi0": 0, "pm": 1, "alpha": 1, "beta": 1}


class CliError(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


def _number(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fracwave", description="exp(-Phi) expansion toolkit")
    ap.add_argument("--version", action="version", version=f"fracwave {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--output", "-o", help="write the artifact here instead of stdout")
        p.add_argument("--config", help="JSON file with default option values")
        p.add_argument("--seed", type=int, help="random seed (default: $FRACWAVE_SEED or built-in)")

    p = sub.add_parser("list", help="catalog of composed families (JSON)")
    p.add_argument("equation", nargs="*", metavar="EQUATION")
    common(p)

    p = sub.add_parser("derive", help="derivation report for one equation (JSON)")
    p.add_argument("equation", metavar="EQUATION")
    common(p)

    p = sub.add_parser("verify", help="full residual audit (JSON)")
    p.add_argument("equation", nargs="*", metavar="EQUATION")
    p.add_argument("--samples", type=int, default=64)
    common(p)

    p = sub.add_parser("eval", help="evaluate a family on an (x, t) grid (CSV)")
    p.add_argument("equation", metavar="EQUATION")
    p.add_argument("--family", required=False, help="family id (e.g. u1_5) or branch id (e.g. T2tanh)")
    p.add_argument("--grid", help="x:start:stop:count,t:start:stop:count")
    for name in PARAMS:
        p.add_argument(f"--{name}", type=_number, default=None)
    common(p)

    p = sub.add_parser("fracderiv", help="D^alpha z^power at z (single number)")
    p.add_argument("--alpha", type=float, required=False)
    p.add_argument("--power", type=float, default=None)
    p.add_argument("--z", type=float, default=None)
    p.add_argument("--method", choices=("quadrature", "power-rule"), default="quadrature")
    p.add_argument("--panels", type=int, default=None)
    p.add_argument("--rel-tol", type=float, default=None)
    common(p)
    return ap


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("FRACWAVE_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise CliError("validation", f"FRACWAVE_SEED is not an integer: {env!r}") from None
    return DEFAULT_SEED


def _apply_config(args) -> None:
    if not getattr(args, "config", None):
        return
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError("config", f"cannot read config {args.config}: {exc}") from None
    if not isinstance(cfg, dict):
        raise CliError("config", "config must be a JSON object")
    for key, value in cfg.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise CliError("config", f"unknown config key {key!r}")
        if getattr(args, attr) in (None, []):
            if attr in PARAMS:
                value = Fraction(str(value))
            setattr(args, attr, value)


def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# --- subcommands ----------------------------------------------------------------


def cmd_list(args) -> str:
    for n in args.equation:
        get_equation(n)
    names = args.equation or None
    return _dump({"families": catalog_json(names)})


def derive_report(name: str, seed: int = DEFAULT_SEED) -> dict:
    spec = get_equation(name)
    amap, sys_ = derive_system(spec)
    report = {
        "equation": spec.name,
        "N": sys_.N,
        "ansatz": {f: format_expr(a.expr) for f, a in amap.items()},
        "system": [{"label": lab, "expr": format_expr(e)} for lab, e in zip(sys_.labels, sys_.equations)],
    }
    sets = []
    try:
        derived = solve_triangular(sys_)
        report["solver"] = "solved"
    except SolverStall as exc:
        derived = []
        report["solver"] = SolverStall.outcome
        report["solver_note"] = str(exc)
    for ps in list(derived) + printed_param_sets(spec.name):
        d = ps.to_json()
        d["verification"] = verify_param_set(sys_, ps, seed=seed).to_json(sys_.labels)
        sets.append(d)
    report["param_sets"] = sets
    if spec.name in PRINTED_SYSTEMS:
        report["printed_system_comparison"] = [r.to_json() for r in compare_systems(sys_, printed_system(spec.name))]
    return report


def cmd_derive(args) -> str:
    return _dump(derive_report(args.equation, _seed(args)))


def cmd_verify(args) -> str:
    for n in args.equation:
        get_equation(n)
    return audit_json(family_audit(args.equation or None, seed=_seed(args), samples=args.samples))


def _fmt17(v: float) -> str:
    return format(float(v), ".17g")


def cmd_eval(args) -> str:
    spec = get_equation(args.equation)
    if not args.family:
        raise CliError("validation", "eval needs --family")
    if not args.grid:
        raise CliError("validation", "eval needs --grid")
    try:
        grid = Grid.parse(args.grid)
    except ValueError as exc:
        raise CliError("validation", f"bad grid: {exc}") from None
    try:
        fam = get_family(spec.name, args.family)
    except KeyError as exc:
        raise CliError("validation", str(exc.args[0])) from None
    vals = {k: getattr(args, k) for k in PARAMS if getattr(args, k) is not None}
    for k, v in DEFAULTS.items():
        vals.setdefault(k, Fraction(v))
    alpha, beta = float(vals.pop("alpha")), float(vals.pop("beta"))
    c_override = vals.pop("c", None)
    # pinned aux values come from the branch
    for k, v in get_branch(fam.branch).fixed:
        pinned = substitute(parse(v), vals)
        vals.setdefault(k, pinned.value if isinstance(pinned, Num) else None)
    needed = sorted((fam.fields[0][1].free_symbols | fam.speed.free_symbols | set(spec.constants)) - {"xi"})
    for extra in fam.fields[1:]:
        needed = sorted(set(needed) | (extra[1].free_symbols - {"xi"}))
    missing = [n for n in needed if n not in vals or vals[n] is None]
    if missing:
        raise CliError("validation", f"missing parameters for {fam.family_id}: {', '.join(missing)}")
    fam.check(vals)
    fields = {n: substitute(e, vals) for n, e in fam.fields}
    speed = substitute(fam.speed, vals)
    if c_override is not None:
        speed = parse(str(c_override))
    if _has_complex_constant(list(fields.values()) + [speed]):
        raise CliError("domain", f"{fam.family_id} is complex-valued for these parameters")
    tr = spec.transform
    kval = float(substitute(parse(tr.k), vals).value)
    cval = float(substitute(parse(tr.speed), {**vals, "c": speed}).value) if not speed.free_symbols else None
    if cval is None:
        raise CliError("validation", "speed is not numeric")
    b_order = {"free": beta, "alpha": alpha, "1": 1.0}[tr.beta]
    try:
        tp = TransformParams(kval, cval, alpha=alpha, beta=b_order, sign=tr.sign)
    except ValueError as exc:
        raise CliError("validation", str(exc)) from None
    xs, ts = grid.axes()
    X, T = np.meshgrid(xs, ts, indexing="ij")
    X, T = X.ravel(), T.ravel()
    try:
        xi = wave_coordinate(X, T, tp)
    except ValueError as exc:
        raise CliError("domain", str(exc)) from None
    names = [n for n, _ in fam.fields]
    fns = [compile_numeric(fields[n], ["xi"], "numpy") for n in names]
    guard = _Guard(list(fields.values()), "xi", "numpy")
    with np.errstate(all="ignore"):
        cols = [np.broadcast_to(f(xi), xi.shape) for f in fns]
        ok = guard.distance(xi) >= POLE_GUARD
        for col in cols:
            ok &= np.isfinite(col)
    head = ["x", "t"] + (["u"] if len(names) == 1 else ["u", "v"])
    lines = [",".join(head)]
    for i in np.nonzero(ok)[0]:
        row = [X[i], T[i]] + [col[i] for col in cols]
        lines.append(",".join(_fmt17(v) for v in row))
    lines.append(f"# omitted: {int(ok.size - np.count_nonzero(ok))}")
    return "\n".join(lines) + "\n"


def cmd_fracderiv(args) -> str:
    if args.alpha is None or args.power is None or args.z is None:
        raise CliError("validation", "fracderiv needs --alpha, --power and --z")
    a, g, z = args.alpha, args.power, args.z
    try:
        if args.method == "power-rule" or a == 1:
            val = mrl_power_rule(a, g, z)
        else:
            kw = {}
            if args.panels is not None:
                kw["panels"] = args.panels
            if args.rel_tol is not None:
                kw["rel_tol"] = args.rel_tol
            settings = QuadratureSettings(**kw)
            val = mrl_quadrature(lambda s: np.asarray(s, dtype=float) ** g, a, z, settings)
    except (ValueError, QuadratureError) as exc:
        raise CliError("domain", str(exc)) from None
    if not math.isfinite(val):
        raise CliError("domain", "non-finite result")
    return _fmt17(val) + "\n"


COMMANDS = {
    "list": cmd_list,
    "derive": cmd_derive,
    "verify": cmd_verify,
    "eval": cmd_eval,
    "fracderiv": cmd_fracderiv,
}


def _fail(kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return 1


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        _apply_config(args)
        _emit(args, COMMANDS[args.command](args))
    except CliError as exc:
        return _fail(exc.kind, str(exc))
    except ConstraintError as exc:
        return _fail("constraint", str(exc))
    except UnknownEquationError as exc:
        return _fail("validation", str(exc))
    except KeyError as exc:
        return _fail("validation", str(exc.args[0]) if exc.args else "unknown key")
    except (DomainError, ValueError, ZeroDivisionError) as exc:
        return _fail("domain", str(exc))
    except OSError as exc:
        return _fail("io", str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
