"""Command-line front end.

    laxpi eval     --spec PATH [--method M] [--n N]
    laxpi compare  --spec PATH
    laxpi check    {lax,group,transform,identities,bcdh} [--spec PATH] [--seed S]
    laxpi bcdh     --spec PHI --spec PSI

``--spec`` takes a file path or the name of a shipped spec (``so3_test``,
``heis_p2tq``, ``so3_const_l3``, ``zero_so3``).  ``LAXPI_THREADS`` caps the
number of worker threads used to fan out independent method runs.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np

from . import checks
from .algebra import GroupPoint, expm, log_matrix
from .bcdh import bcdh_pair
from .curves import Curve, load_curve
from .errors import LaxpiError
from .prodint import LN2, bcdh_log, nilpotent_log, ode_evolve, riemann_product

METHODS = ("riemann", "rk4", "bcdh-log", "nilpotent-log")
DEFAULT_N = {"riemann": 4096, "rk4": 1024, "bcdh-log": 512, "nilpotent-log": 256}
SUITES = ("lax", "group", "transform", "identities", "bcdh")
DEFAULT_SPEC = {"lax": "so3_test", "group": "so3_test", "transform": "heis_p2tq",
                "identities": "so3_test", "bcdh": "so3_test"}


def resolve_spec(name):
    p = Path(name)
    if p.exists():
        return p
    stem = name[:-5] if name.endswith(".json") else name
    res = resources.files("laxpi") / "data" / f"{stem}.json"
    if res.is_file():
        return Path(str(res))
    raise FileNotFoundError(f"no spec file or shipped spec named {name!r}")


def _load(name, grid_n=None):
    return load_curve(resolve_spec(name), grid_n)


def _threads():
    try:
        return max(1, int(os.environ.get("LAXPI_THREADS", "1")))
    except ValueError:
        return 1


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _regrid_even(curve, n):
    n = int(n)
    if n < 2 or n % 2:
        raise ValueError("--n must be an even integer >= 2 for log methods")
    return curve if curve.grid_n == n else curve.regrid(n)


def run_method(curve, method, n=None, tol=1e-9):
    """Final group matrix, optional log coordinates and diagnostics."""
    n = n or DEFAULT_N[method]
    A = curve.algebra
    t0 = time.perf_counter()
    logc = None
    if method == "riemann":
        traj = riemann_product(curve, n)
        M, diag = traj.points[-1], dict(traj.diagnostics)
    elif method == "rk4":
        traj = ode_evolve(curve, n)
        M, diag = traj.points[-1], dict(traj.diagnostics)
    elif method == "bcdh-log":
        X = bcdh_log(_regrid_even(curve, n), tol, check=False)
        logc = X.samples[-1]
        M, diag = expm(A.mat(logc)), dict(X.diagnostics)
        diag["grid_n"] = n
    elif method == "nilpotent-log":
        X = nilpotent_log(_regrid_even(curve, n))
        logc = X.samples[-1]
        M, diag = expm(A.mat(logc)), dict(X.diagnostics)
        diag["grid_n"] = n
    else:
        raise ValueError(f"unknown method {method!r}")
    if logc is None:
        try:
            logc = log_matrix(GroupPoint(A, M)).coords
        except LaxpiError:
            logc = None
    ms = 1e3 * (time.perf_counter() - t0)
    return {"method": method, "matrix": np.asarray(M), "log": logc, "diagnostics": diag,
            "wall_time_ms": ms}


def _write(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(type(obj))


def cmd_eval(args):
    curve = _load(args.spec[0])
    res = run_method(curve, args.method, args.n, args.tol)
    A = curve.algebra
    if args.format == "json":
        doc = {"method": res["method"], "algebra": A.name, "basis": list(A.basis_names),
               "interval": [curve.a, curve.b], "matrix": res["matrix"],
               "log_coords": res["log"], "diagnostics": res["diagnostics"]}
        _write(json.dumps(doc, indent=2, default=_jsonable) + "\n", args.out)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["field", "value"])
        w.writerow(["method", res["method"]])
        for (i, j), v in np.ndenumerate(res["matrix"]):
            w.writerow([f"matrix[{i}][{j}]", _fmt(v)])
        if res["log"] is not None:
            for name, v in zip(A.basis_names, res["log"]):
                w.writerow([f"log[{name}]", _fmt(v)])
        for k, v in res["diagnostics"].items():
            w.writerow([f"diag.{k}", _fmt(v)])
        _write(buf.getvalue(), args.out)
    return 0


def applicable_methods(curve):
    out = ["riemann", "rk4"]
    if curve.l1_norm() < LN2:
        out.append("bcdh-log")
    if curve.algebra.nil_order is not None:
        out.append("nilpotent-log")
    return out


def cmd_compare(args):
    curve = _load(args.spec[0])
    methods = applicable_methods(curve)

    def job(m):
        n = args.n if (args.n and m == "riemann") else None
        if m == "bcdh-log":
            n = max(curve.grid_n, DEFAULT_N["bcdh-log"])
        if m == "nilpotent-log":
            n = curve.grid_n
        return run_method(curve, m, n, args.tol)

    with ThreadPoolExecutor(max_workers=min(_threads(), len(methods))) as ex:
        results = list(ex.map(job, methods))
    rows = []
    for i in range(len(results)):
        for j in range(i + 1, len(results)):
            ra, rb = results[i], results[j]
            dev = float(np.linalg.norm(ra["matrix"] - rb["matrix"]))
            ms = 0.0 if args.no_timing else ra["wall_time_ms"] + rb["wall_time_ms"]
            rows.append((ra["method"], rb["method"], dev, ms))
    if args.format == "json":
        doc = [{"method_a": a, "method_b": b, "frobenius_deviation": d, "wall_time_ms": t}
               for a, b, d, t in rows]
        _write(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["method_a", "method_b", "frobenius_deviation", "wall_time_ms"])
        for a, b, d, t in rows:
            w.writerow([a, b, _fmt(d), _fmt(t)])
        _write(buf.getvalue(), args.out)
    return 0


def run_suite(suite, spec=None, seed=42):
    name = spec or DEFAULT_SPEC[suite]
    curve = _load(name)
    if suite == "lax":
        return checks.lax_suite(curve, seed)
    if suite == "group":
        return checks.group_suite(curve.algebra, seed)
    if suite == "transform":
        return checks.transform_suite(curve, seed)
    if suite == "identities":
        return checks.identity_suite(curve, seed)
    if suite == "bcdh":
        return checks.bcdh_suite(curve, seed)
    raise ValueError(suite)


def cmd_check(args):
    spec = args.spec[0] if args.spec else None
    rows = run_suite(args.suite, spec, args.seed)
    ok = all(c.passed for c in rows)
    if args.format == "json":
        doc = {"suite": args.suite, "pass": ok,
               "checks": [{"name": c.name, "value": c.value, "threshold": c.threshold,
                           "lower": c.lo if c.mode == "range" else None, "pass": c.passed}
                          for c in rows]}
        _write(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "value", "threshold", "pass"])
        for c in rows:
            thr = f"[{_fmt(c.lo)}, {_fmt(c.threshold)}]" if c.mode == "range" else _fmt(c.threshold)
            w.writerow([c.name, _fmt(c.value), thr, "pass" if c.passed else "FAIL"])
        _write(buf.getvalue(), args.out)
    return 0 if ok else 1


def cmd_bcdh(args):
    if not args.spec:
        raise ValueError("bcdh needs --spec PHI [--spec PSI]")
    phi = _load(args.spec[0])
    psi = _load(args.spec[1]) if len(args.spec) > 1 else Curve.zero(phi.algebra, phi.interval, phi.grid_n)
    x_psi, x_pp = bcdh_pair(phi, psi, args.tol)
    A = phi.algebra
    total = x_psi.coords + x_pp.samples[-1]
    doc = {"algebra": A.name, "basis": list(A.basis_names), "x_psi": x_psi.coords,
           "x_phi_psi_b": x_pp.samples[-1], "log_coords": total,
           "residual": x_pp.diagnostics.get("residual"), "outer_terms": x_pp.diagnostics.get("outer_terms")}
    if args.format == "json":
        _write(json.dumps(doc, indent=2, default=_jsonable) + "\n", args.out)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["field", "value"])
        for key in ("x_psi", "x_phi_psi_b", "log_coords"):
            for name, v in zip(A.basis_names, doc[key]):
                w.writerow([f"{key}[{name}]", _fmt(v)])
        w.writerow(["residual", _fmt(doc["residual"])])
        _write(buf.getvalue(), args.out)
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", action="append", default=[],
                        help="curve spec path or shipped spec name (repeatable)")
    common.add_argument("--method", choices=METHODS, default="rk4")
    common.add_argument("--n", type=int, default=None, help="steps or grid size")
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = argparse.ArgumentParser(prog="laxpi", description="Product integrals on matrix Lie groups.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("eval", parents=[common], help="evaluate a product integral")
    cmp_ = sub.add_parser("compare", parents=[common], help="pairwise method deviations")
    cmp_.add_argument("--no-timing", action="store_true",
                      help="write 0 for wall_time_ms so output is bit-reproducible")
    chk = sub.add_parser("check", parents=[common], help="run an invariant suite")
    chk.add_argument("suite", choices=SUITES)
    sub.add_parser("bcdh", parents=[common], help="two-curve BCDH logarithm")
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tol <= 0:
        parser.error("--tol must be positive")
    if args.command in ("eval", "compare") and not args.spec:
        parser.error(f"{args.command} needs --spec")
    handlers = {"eval": cmd_eval, "compare": cmd_compare, "check": cmd_check, "bcdh": cmd_bcdh}
    try:
        return handlers[args.command](args)
    except (LaxpiError, ValueError, FileNotFoundError, KeyError) as exc:
        print(f"laxpi: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
