"""Command-line front end.

    bcheun eval --gamma 0.5 --delta 0.3 --epsilon 1 --alpha 1.2 --q 0.7 \\
        --method beta_single --order 40 --z 0.2,0.05 --compare origin_series
    bcheun converge ... --orders 5,10,20,40
    bcheun recurrence-check ... --kind v12 --n-max 25
    bcheun terminate --gamma 0.5 --epsilon 1 --N 1 --seed-q 1 --seed-delta 1

Exit codes: 0 success, 1 usage or parameter error, 2 numerical
non-convergence (or a failed check).
"""

from __future__ import annotations

import argparse
import cmath
import csv
import json
import sys
import time

import numpy as np

from . import __version__, expansions, reference
from .errors import BcHeunError, NoRoot, NumericalError, ParameterError
from .expansions import ExpansionKind
from .frobenius import OdeKind, recurrence_report
from .model import BcHeunParams, residual

EXPANSION_METHODS = [k.value for k in ExpansionKind]
ORACLE_METHODS = ["origin_series", "closed_form_eps0", "quadrature", "quadrature_special"]
METHODS = EXPANSION_METHODS + ORACLE_METHODS

EVAL_COLUMNS = ("z_re", "z_im", "u_re", "u_im", "residual", "terms_used", "converged")
CONVERGED_RESIDUAL = 1e-8


class UsageError(ParameterError):
    pass


def parse_complex(text: str) -> complex:
    """``"re,im"`` or ``"re"`` -> complex."""
    parts = [s.strip() for s in str(text).split(",")]
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise UsageError(f"cannot parse complex value {text!r} (expected re,im)")


def parse_grid(text: str) -> list:
    """``"r0:r1:steps@arg"``: ``steps`` radii from r0 to r1 along angle ``arg`` (radians)."""
    try:
        radii, _, arg = text.partition("@")
        r0, r1, steps = radii.split(":")
        r0, r1, steps = float(r0), float(r1), int(steps)
        theta = float(arg) if arg else 0.0
    except ValueError as exc:
        raise UsageError(f"bad grid spec {text!r} (expected r0:r1:steps@arg)") from exc
    if steps < 1:
        raise UsageError("grid needs at least one step")
    rs = [r0] if steps == 1 else list(np.linspace(r0, r1, steps))
    return [r * cmath.exp(1j * theta) for r in rs]


def _add_param_args(ap):
    ap.add_argument("--params", help="JSON file with gamma, delta, epsilon, alpha, q as [re, im]")
    for name in ("gamma", "delta", "epsilon", "alpha", "q"):
        ap.add_argument(f"--{name}", help=f"{name} as re,im")


def load_params(args) -> BcHeunParams:
    if args.params:
        with open(args.params) as fh:
            data = json.load(fh)
        overrides = {n: parse_complex(getattr(args, n)) for n in ("gamma", "delta", "epsilon", "alpha", "q")
                     if getattr(args, n) is not None}
        return BcHeunParams.from_dict(data).replace(**overrides)
    vals = {}
    for n in ("gamma", "delta", "epsilon", "alpha", "q"):
        v = getattr(args, n)
        if v is None:
            raise UsageError(f"missing --{n} (or give --params)")
        vals[n] = parse_complex(v)
    return BcHeunParams(**vals)


def _points(args) -> list:
    pts = [parse_complex(z) for z in (args.z or [])]
    if args.grid:
        pts += parse_grid(args.grid)
    if not pts:
        raise UsageError("no evaluation points: give --z and/or --grid")
    return pts


# ---------------------------------------------------------------------------
# method dispatch


class _Evaluator:
    """Uniform ``(u, u', u'')``, terms and convergence flag for any method."""

    def __init__(self, method, p, N, args):
        self.method, self.p, self.N = method, p, N
        self.allow_outside = getattr(args, "allow_outside", False)
        self.c1 = parse_complex(args.c1)
        self.c2 = parse_complex(args.c2)
        self.sol = None
        if method in EXPANSION_METHODS:
            kw = {"root_choice": args.root} if method == "beta_double" else {}
            self.sol = expansions.expand(method, p, N, **kw)
        elif method == "origin_series":
            self.series = reference.origin_series(p, N)

    def __call__(self, z):
        m, p = self.method, self.p
        if self.sol is not None:
            u, u1, u2 = self.sol.evaluate(z, allow_outside=self.allow_outside)
            return u, u1, u2, self.N + 1, self.sol.converged_at(z)
        if m == "origin_series":
            u, u1, u2 = self.series.evaluate(z)
            c = self.series.coeffs
            terms = np.abs(c) * abs(z) ** np.arange(len(c))
            ok = float(np.max(terms[-3:])) <= expansions.CONVERGED_TOL * float(np.max(terms))
            return u, u1, u2, self.N + 1, ok
        if m == "closed_form_eps0":
            u, u1, u2 = reference.closed_form_eps0(p, z, self.c1, self.c2, derivatives=True)
        elif m == "quadrature":
            u, u1, u2 = reference.quadrature_alpha_q_zero(p, z, self.c1, self.c2, derivatives=True)
        else:
            u, u1, u2 = expansions.quadrature_special(p, z, self.c1, self.c2, derivatives=True)
        return u, u1, u2, 0, True


def _oracle_match(ev: _Evaluator, points):
    """Origin-series oracle scale-matched to the evaluated solution at the first point."""
    basis = reference.origin_basis(ev.p, max(4 * ev.N, 120))
    zb = points[0]
    u, u1, _, _, _ = ev(zb)
    A, B = reference.match_to_basis(basis, zb, u, u1)
    return lambda z: A * basis[0](z) + B * basis[1](z)


def _fmt(x: float) -> str:
    return repr(float(x))


def _emit(rows, columns, fmt, extra, out):
    if fmt == "json":
        payload = dict(extra)
        payload["rows"] = [dict(zip(columns, r)) for r in rows]
        out.write(json.dumps(payload, sort_keys=True) + "\n")
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) if isinstance(v, float) else v for v in r])


def _meta(args, argv):
    if getattr(args, "meta", False):
        sys.stderr.write(json.dumps({"version": __version__, "argv": argv,
                                     "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S")}) + "\n")


# ---------------------------------------------------------------------------
# commands


def cmd_eval(args) -> int:
    p = load_params(args)
    pts = _points(args)
    ev = _Evaluator(args.method, p, args.order, args)
    oracle = _oracle_match(ev, pts) if args.compare else None
    rows, all_ok, worst_diff = [], True, 0.0
    for z in pts:
        u, u1, u2, nterms, ok = ev(z)
        res = residual(p, z, u, u1, u2).relative
        ok = bool(ok and res <= CONVERGED_RESIDUAL)
        all_ok &= ok
        row = [float(z.real), float(z.imag), float(u.real), float(u.imag), float(res), nterms, int(ok)]
        if oracle is not None:
            ref = oracle(z)
            diff = abs(u - ref) / max(abs(ref), 1e-300)
            worst_diff = max(worst_diff, diff)
            row.append(float(diff))
        rows.append(row)
    cols = EVAL_COLUMNS + (("diff",) if oracle is not None else ())
    extra = {"method": args.method, "N": args.order, "params": p.to_dict()}
    if oracle is not None:
        extra["max_diff"] = worst_diff
    _emit(rows, cols, args.output, extra, sys.stdout)
    if oracle is not None and args.output == "csv":
        sys.stderr.write(f"max_diff vs {args.compare}: {worst_diff:.3e}\n")
    return 0 if all_ok else 2


def cmd_converge(args) -> int:
    p = load_params(args)
    pts = _points(args)
    orders = [int(s) for s in args.orders.split(",")]
    rows, flags = [], []
    basis = reference.origin_basis(p, max(4 * max(orders), 120))
    for N in orders:
        ev = _Evaluator(args.method, p, N, args)
        zb = pts[0]
        u, u1, _, _, _ = ev(zb)
        A, B = reference.match_to_basis(basis, zb, u, u1)
        worst_res = worst_diff = 0.0
        ok_all = True
        for z in pts:
            u, u1, u2, _, ok = ev(z)
            worst_res = max(worst_res, residual(p, z, u, u1, u2).relative)
            ref = A * basis[0](z) + B * basis[1](z)
            worst_diff = max(worst_diff, abs(u - ref) / max(abs(ref), 1e-300))
            ok_all &= bool(ok)
        rows.append([N, float(worst_res), float(worst_diff), int(ok_all)])
        flags.append(ok_all)
    _emit(rows, ("N", "max_residual", "max_diff", "converged"), args.output,
          {"method": args.method, "params": p.to_dict()}, sys.stdout)
    # residuals must not grow (factor 3 slack) once a row has converged
    if True in flags:
        first = flags.index(True)
        res = [r[1] for r in rows[first:]]
        if any(b > 3 * a for a, b in zip(res, res[1:])):
            return 2
    return 0 if flags and flags[-1] else 2


def cmd_recurrence_check(args) -> int:
    p = load_params(args)
    kind = {"v12": OdeKind.AUX_V12, "w23": OdeKind.AUX_W23}[args.kind]
    rep = recurrence_report(p, kind, args.n_max, root=args.root)
    rows, worst = [], 0.0
    for slot, err in rep.items():
        if slot == "mu":
            continue
        rows.append([slot, float(err)])
        worst = max(worst, float(err))
    _emit(rows, ("slot", "max_rel_err"), args.output, {"kind": args.kind, "params": p.to_dict()}, sys.stdout)
    return 0 if worst <= args.tol else 2


def cmd_terminate(args) -> int:
    gamma, eps = parse_complex(args.gamma), parse_complex(args.epsilon)
    try:
        p = expansions.find_terminating_params(gamma, eps, args.N, parse_complex(args.seed_q),
                                               parse_complex(args.seed_delta))
    except NoRoot as exc:
        sys.stdout.write(json.dumps({"status": "no_root", "reason": str(exc)}, sort_keys=True) + "\n")
        return 2
    cert = expansions.check_termination(p, ExpansionKind.BETA_SINGLE, args.N)
    sys.stdout.write(json.dumps(cert.to_dict(), sort_keys=True) + "\n")
    return 0 if cert.ok else 2


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bcheun", description="Biconfluent Heun expansions and oracles")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, with_points=True):
        _add_param_args(sp)
        sp.add_argument("--output", choices=("csv", "json"), default="csv")
        sp.add_argument("--meta", action="store_true", help="write run metadata to stderr")
        if with_points:
            sp.add_argument("--method", choices=METHODS, default="beta_single")
            sp.add_argument("--z", action="append", help="evaluation point re,im (repeatable)")
            sp.add_argument("--grid", help="r0:r1:steps@arg")
            sp.add_argument("--allow-outside", action="store_true")
            sp.add_argument("--root", choices=("z1", "z2"), default="z1")
            sp.add_argument("--c1", default="1")
            sp.add_argument("--c2", default="0")

    sp = sub.add_parser("eval", help="evaluate one method at points")
    common(sp)
    sp.add_argument("--order", type=int, default=40)
    sp.add_argument("--compare", choices=("origin_series",))
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("converge", help="residual and oracle error against truncation order")
    common(sp)
    sp.add_argument("--orders", default="5,10,20,40")
    sp.set_defaults(func=cmd_converge)

    sp = sub.add_parser("recurrence-check", help="engine bands against printed closed forms")
    common(sp, with_points=False)
    sp.add_argument("--kind", choices=("v12", "w23"), default="v12")
    sp.add_argument("--root", choices=("z1", "z2"), default="z1")
    sp.add_argument("--n-max", type=int, default=25)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.set_defaults(func=cmd_recurrence_check)

    sp = sub.add_parser("terminate", help="search parameters with a terminating series")
    sp.add_argument("--gamma", required=True)
    sp.add_argument("--epsilon", required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--seed-q", default="1")
    sp.add_argument("--seed-delta", default="1")
    sp.add_argument("--meta", action="store_true")
    sp.set_defaults(func=cmd_terminate)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    _meta(args, argv)
    try:
        return args.func(args)
    except (ParameterError, ValueError, OSError, KeyError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        sys.stderr.write(f"error: {msg}\n")
        return 1
    except (NumericalError, BcHeunError, ArithmeticError) as exc:
        sys.stderr.write(f"error: {str(exc).splitlines()[0]}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
