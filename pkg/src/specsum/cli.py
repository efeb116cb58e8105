"""Command-line front end: zero tables, modes, sums, traces, kernels, expansions, verification.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical failure.
"""

import argparse
import contextlib
import csv
import io
import json
import math
import sys
from collections import OrderedDict

import numpy as np

from . import __version__
from .errors import SpecsumError
from .oracle import REPORT_VERSION, SUITES, check_case, suite_cases

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
DOMAINS = ("interval", "disk", "ball", "annulus", "shell", "exterior_disk")


class UsageError(Exception):
    pass


def _h_value(text):
    """Robin parameter: a nonnegative number or 'inf' (Dirichlet)."""
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'inf', got {text!r}")
    if math.isnan(v) or v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0 or 'inf', got {text!r}")
    return v


def _point(text):
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated coordinates, got {text!r}")


def _common(p, geometry=True):
    if geometry:
        p.add_argument("--domain", choices=DOMAINS, default="disk")
        p.add_argument("--a", type=float, default=None, help="inner radius (annulus, shell, exterior disk)")
        p.add_argument("--b", type=float, default=1.0, help="outer radius; eigenvalues scale as alpha^2/b^2")
        p.add_argument("--h-inner", type=_h_value, default=math.inf, help="inner Robin parameter (inf = Dirichlet)")
        p.add_argument("--h-outer", type=_h_value, default=math.inf, help="outer Robin parameter (inf = Dirichlet)")
    p.add_argument("--format", choices=("json", "csv", "table"), default="json")


def build_parser():
    parser = argparse.ArgumentParser(prog="specsum", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"specsum {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("zeros", help="positive zeros of the characteristic function")
    _common(p)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--count", type=int, default=10)

    p = sub.add_parser("modes", help="eigenmodes (zero mode included) with normalisations")
    _common(p)
    p.add_argument("--n", type=int, default=0, help="largest angular index listed")
    p.add_argument("--count", type=int, default=10, help="modes per angular index")

    p = sub.add_parser("sum", help="closed-form value of a named identity, or a spectral power sum")
    _common(p)
    p.add_argument("--formula", help="identity id (e.g. zeta, D1, T2-DD, Rayleigh, Sneddon-R, Calogero-2D)")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--n", type=int, default=None,
                   help="mode index of the identity; for power sums the largest angular index")
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--h", type=_h_value, default=None, help="Robin parameter of the identity")
    p.add_argument("--z", type=float, default=None)
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--x0", type=float, default=None)
    p.add_argument("--j", type=int, default=None)
    p.add_argument("--count", type=int, default=1000, help="modes per angular index in a power sum")
    p.add_argument("--from-file", help="JSON output of 'modes' to sum over instead of recomputing")

    p = sub.add_parser("trace", help="Laplace-transformed heat trace")
    _common(p)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--D", type=float, default=1.0)
    p.add_argument("--N", type=int, default=None, help="angular cut (default ceil(10 + 5 q b))")

    p = sub.add_parser("kernel", help="Laplace-transformed heat kernel between two points")
    _common(p)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--D", type=float, default=1.0)
    p.add_argument("--x", type=_point, required=True, help="Cartesian coordinates, comma separated")
    p.add_argument("--x0", type=_point, required=True)
    p.add_argument("--N", type=int, default=None)

    p = sub.add_parser("expand", help="Fourier-Bessel / Dini coefficients of x^nu or 1")
    _common(p, geometry=False)
    p.add_argument("--kind", choices=("FourierBessel-D", "FourierBessel-N", "Dini"), default="FourierBessel-D")
    p.add_argument("--nu", type=float, default=0.0)
    p.add_argument("--h", type=_h_value, default=math.inf)
    p.add_argument("--function", choices=("power", "one"), default="power", help="x^nu or the constant 1")
    p.add_argument("--terms", type=int, default=16)
    p.add_argument("--x", type=float, default=None, help="also report the reconstruction at x")

    p = sub.add_parser("verify", help="closed forms against brute-force series")
    _common(p, geometry=False)
    p.add_argument("--suite", choices=SUITES, default="tables")
    p.add_argument("--formula", help="restrict to one identity id")
    p.add_argument("--tol", type=float, default=None, help="relative tolerance (default: per case)")
    p.add_argument("--terms", type=int, default=None, help="series terms K (default: per case)")
    p.add_argument("--seed-grid", type=int, default=None, help="seed for a random subsample of the grid")
    p.add_argument("--count", type=int, default=None, help="subsample size used with --seed-grid")
    p.add_argument("--report", help="write the full JSON report to this path")
    return parser


# -- output ----------------------------------------------------------------------

def _jsonable(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if isinstance(v, (np.floating,)):
        return _jsonable(float(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _emit(out, payload, rows_key=None, fmt="json"):
    """JSON prints the payload; CSV and table print the rows (or the payload as one row)."""
    if fmt == "json":
        out.write(json.dumps(_jsonable(payload), indent=2) + "\n")
        return
    rows = payload[rows_key] if rows_key else [
        {k: v for k, v in payload.items() if not isinstance(v, (dict, list))}]
    if not rows:
        return
    cols = list(rows[0].keys())
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([repr(r[c]) if isinstance(r[c], float) else r[c] for c in cols])
        out.write(buf.getvalue())
        return
    cells = [[_cell(r[c]) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    out.write("  ".join(c.rjust(w) for c, w in zip(cols, widths)) + "\n")
    for row in cells:
        out.write("  ".join(v.rjust(w) for v, w in zip(row, widths)) + "\n")


def _cell(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


# -- geometry ---------------------------------------------------------------------

def _geometry(args):
    from .spectra import BoundaryCondition, RadialDomain

    fam = args.domain
    if fam in ("annulus", "shell", "exterior_disk"):
        if args.a is None:
            raise UsageError(f"--a is required for --domain {fam}")
        a = args.a
    else:
        if args.a not in (None, 0.0):
            raise UsageError(f"--a must be omitted or 0 for --domain {fam}")
        a = 0.0
    if fam != "exterior_disk" and not args.b > 0:
        raise UsageError("--b must be > 0")
    if fam in ("annulus", "shell") and not 0 < a < args.b:
        raise UsageError("--a must satisfy 0 < a < b")
    if fam == "exterior_disk" and not a > 0:
        raise UsageError("--a must be > 0")
    dom = RadialDomain(fam, a, args.b)
    return dom, BoundaryCondition(args.h_inner, args.h_outer)


def _geom_meta(dom, bc):
    return {"domain": {"family": dom.family, "a": dom.a, "b": dom.b},
            "bc": {"h_inner": bc.h_inner, "h_outer": bc.h_outer}}


# -- verbs --------------------------------------------------------------------------

def cmd_zeros(args, out):
    from .spectra import characteristic_of
    from .zeros import zero_table

    if args.count < 1:
        raise UsageError("--count must be >= 1")
    if args.n < 0:
        raise UsageError("--n must be >= 0")
    dom, bc = _geometry(args)
    if dom.family == "exterior_disk":
        raise UsageError("--domain exterior_disk has no discrete spectrum")
    tab = zero_table(characteristic_of(dom, bc, args.n), args.count)
    rows = [OrderedDict(k=i + 1, alpha=float(a), **{"lambda": float(a / dom.b) ** 2})
            for i, a in enumerate(tab.alphas)]
    payload = {"version": REPORT_VERSION, **_geom_meta(dom, bc), "n": args.n,
               "zero_mode": bool(tab.zero_mode), "residual_bound": tab.residual_bound, "zeros": rows}
    _emit(out, payload, "zeros", args.format)
    return EXIT_OK


def cmd_modes(args, out):
    from .spectra import eigenvalues

    if args.count < 1 or args.n < 0:
        raise UsageError("--count must be >= 1 and --n >= 0")
    dom, bc = _geometry(args)
    if dom.family == "exterior_disk":
        raise UsageError("--domain exterior_disk has no discrete spectrum")
    nmax = 0 if dom.family == "interval" else args.n
    rows = []
    for n in range(nmax + 1):
        for m in eigenvalues(dom, bc, n, args.count):
            rows.append(OrderedDict(n=n, k=m.k, alpha=float(m.alpha), **{"lambda": float(m.lam)},
                                    c_squared=float(m.c_squared), degeneracy=dom.degeneracy(n),
                                    zero_mode=bool(m.zero_mode)))
    payload = {"version": REPORT_VERSION, **_geom_meta(dom, bc), "modes": rows}
    _emit(out, payload, "modes", args.format)
    return EXIT_OK


_SUM_PARAMS = ("m", "n", "nu", "h", "z", "x", "x0", "j")


def _power_sum(lams, m):
    lams = [v for v in lams if v > 0]
    return math.fsum(v ** (-m) for v in lams), len(lams)


def cmd_sum(args, out):
    from .sums import named_formula

    if args.formula:
        if args.from_file:
            raise UsageError("--from-file cannot be combined with --formula")
        params = {k: getattr(args, k) for k in _SUM_PARAMS if getattr(args, k) is not None}
        closed, spec = named_formula(args.formula, params)
        payload = {"version": REPORT_VERSION, "formula_id": args.formula, "params": params,
                   "value": float(closed), "decay_class": spec.decay_class}
        _emit(out, payload, None, args.format)
        return EXIT_OK
    m = 1 if args.m is None else args.m
    if m < 1:
        raise UsageError("--m must be >= 1")
    if args.from_file:
        try:
            with open(args.from_file) as fh:
                data = json.load(fh)
            modes = data["modes"]
            lams = [float(r["lambda"]) for r in modes]
            weights = [int(r.get("degeneracy", 1)) for r in modes]
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"--from-file: cannot read modes ({exc})")
        source = args.from_file
    else:
        from .spectra import eigenvalues

        dom, bc = _geometry(args)
        if dom.family == "exterior_disk":
            raise UsageError("--domain exterior_disk has no discrete spectrum")
        # same listing as 'modes': n = 0..--n, --count modes each, degeneracy weights
        lams, weights = [], []
        for n in range(max(args.n or 0, 0) + 1):
            for md in eigenvalues(dom, bc, n, args.count):
                lams.append(float(md.lam))
                weights.append(dom.degeneracy(n))
        source = "computed"
    terms = [w * v ** (-m) for v, w in zip(lams, weights) if v > 0]
    payload = {"version": REPORT_VERSION, "source": source, "m": m,
               "value": math.fsum(terms), "terms": len(terms)}
    _emit(out, payload, None, args.format)
    return EXIT_OK


def cmd_trace(args, out):
    from .sums import heat_trace

    if not args.p > 0 or not args.D > 0:
        raise UsageError("--p and --D must be > 0")
    dom, bc = _geometry(args)
    if dom.family == "exterior_disk":
        raise UsageError("--domain exterior_disk has no discrete spectrum")
    res = heat_trace(dom, bc, args.p, args.D, args.N)
    payload = {"version": REPORT_VERSION, **_geom_meta(dom, bc), "p": args.p, "D": args.D,
               "value": res.value, "N_used": res.n_used, "tail_est": res.tail_estimate,
               "diverges": res.diverges}
    _emit(out, payload, None, args.format)
    return EXIT_OK


def cmd_kernel(args, out):
    import warnings

    from .kernels import propagator

    if not args.p > 0 or not args.D > 0:
        raise UsageError("--p and --D must be > 0")
    dom, bc = _geometry(args)
    d = dom.dim
    for flag, pt in (("--x", args.x), ("--x0", args.x0)):
        if len(pt) != d:
            raise UsageError(f"{flag} needs {d} coordinate(s) for --domain {dom.family}")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = propagator(dom, bc, args.p, args.D, args.x if d > 1 else args.x[0],
                         args.x0 if d > 1 else args.x0[0], args.N)
    payload = {"version": REPORT_VERSION, **_geom_meta(dom, bc), "p": args.p, "D": args.D,
               "x": args.x, "x0": args.x0, "value": res.value, "N_used": res.N_used,
               "tail_est": res.tail_est}
    if caught:
        payload["warnings"] = [str(w.message) for w in caught]
    _emit(out, payload, None, args.format)
    return EXIT_OK


def cmd_expand(args, out):
    from .kernels import expand, power_coefficients, reconstruct

    if args.terms < 1:
        raise UsageError("--terms must be >= 1")
    if args.function == "power":
        ec = power_coefficients(args.kind, args.nu, args.h, args.terms)
        exact = None if args.x is None else args.x ** args.nu
    else:
        ec = expand(lambda y: 1.0, args.kind, args.nu, args.h, args.terms)
        exact = None if args.x is None else 1.0
    rows = [OrderedDict(k=i + 1, alpha=float(a), coefficient=float(c))
            for i, (a, c) in enumerate(zip(ec.alphas, ec.coeffs))]
    payload = {"version": REPORT_VERSION, "kind": ec.kind, "nu": ec.nu, "h": ec.h,
               "function": args.function, "K": ec.K, "coefficients": rows}
    if args.x is not None:
        payload["x"] = args.x
        payload["reconstruction"] = float(reconstruct(ec, args.x))
        payload["exact"] = exact
    _emit(out, payload, "coefficients", args.format)
    return EXIT_OK


def cmd_verify(args, out):
    cases = suite_cases(args.suite)
    if args.formula:
        cases = [c for c in cases if c.formula_id == args.formula]
        if not cases:
            raise UsageError(f"--formula {args.formula!r} has no cases in suite {args.suite!r}")
    if args.tol is not None and not args.tol > 0:
        raise UsageError("--tol must be > 0")
    if args.terms is not None and args.terms < 100:
        raise UsageError("--terms must be >= 100")
    if args.seed_grid is not None:
        rng = np.random.default_rng(args.seed_grid)
        size = min(args.count or max(1, len(cases) // 10), len(cases))
        pick = np.sort(rng.choice(len(cases), size=size, replace=False))
        cases = [cases[i] for i in pick]
    elif args.count is not None:
        raise UsageError("--count applies only together with --seed-grid")
    records = []
    for case in cases:
        rec = check_case(case, args.tol, args.terms)
        if rec is not None:
            records.append(rec)
    summary = OrderedDict()
    for r in records:
        s = summary.setdefault(r.formula_id, {"formula_id": r.formula_id, "checked": 0, "passed": 0,
                                               "max_abs_err": 0.0, "max_rel_err": 0.0})
        s["checked"] += 1
        s["passed"] += int(r.passed)
        s["max_abs_err"] = max(s["max_abs_err"], r.abs_err)
        if math.isfinite(r.rel_err):
            s["max_rel_err"] = max(s["max_rel_err"], r.rel_err)
    rows = list(summary.values())
    ok = all(r.passed for r in records)
    payload = {"version": REPORT_VERSION, "suite": args.suite, "checked": len(records),
               "passed": sum(r.passed for r in records), "all_passed": ok, "summary": rows}
    if args.report:
        report = dict(payload)
        report["records"] = [r.to_dict() for r in records]
        with open(args.report, "w") as fh:
            json.dump(_jsonable(report), fh, indent=2)
    _emit(out, payload, "summary", args.format)
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"zeros": cmd_zeros, "modes": cmd_modes, "sum": cmd_sum, "trace": cmd_trace,
            "kernel": cmd_kernel, "expand": cmd_expand, "verify": cmd_verify}


def run(argv=None, out=None, err=None):
    """Execute one command; returns the exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.verb](args, out)
    except UsageError as exc:
        err.write(f"specsum {args.verb}: error: {exc}\n")
        return EXIT_USAGE
    except SpecsumError as exc:
        err.write(f"specsum {args.verb}: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERIC


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
