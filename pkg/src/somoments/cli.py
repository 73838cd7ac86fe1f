"""Experiment runner: reproducible, seeded, report-emitting commands.

Subcommands: moments, predict, identities, arith-check, ils-check,
vanishing.  Exit code 0 when all gates pass, 2 when any gate fails, 1 on
usage errors.  Numeric output is full-precision decimal; re-running a
command with an identical configuration (including the worker count, which
keys the RNG partitioning) reproduces the CSV body byte for byte.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .arith import (
    SumParams,
    gauss_square_identity,
    hecke_power_coeffs,
    kloosterman_char_expansion_r_residual,
    kloosterman_char_expansion_residual,
    kloosterman_sum,
    ramanujan_sum,
    euler_phi,
    is_prime,
    mobius,
)
from .besselmellin import ils_sum_residual
from .predictions import centered_moment_prediction, mean_limit
from .rmt import EnsembleSpec, mc_moments
from .testfn import ft_identity_residual, make_fejer, make_hat_spline
from .vanishing import moment_bound, order_vanishing_bound


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(x):
    """Full-precision decimal for floats; plain text otherwise."""
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


@dataclass
class Report:
    command: str
    config: dict
    rows: list
    schema: list
    gates_passed: bool = True
    wall_clock: float = 0.0
    version: str = __version__
    workers: int = 1


def emit_report(report: Report, path=None, fmt="csv"):
    """Write the report; CSV carries the header row plus data rows only,
    JSON carries the full object with a `rows` array."""
    if fmt == "csv":
        lines = [",".join(report.schema)]
        for row in report.rows:
            lines.append(",".join(_fmt(row[k]) for k in report.schema))
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        obj = {
            "command": report.command,
            "config": report.config,
            "schema": report.schema,
            "rows": report.rows,
            "gates_passed": report.gates_passed,
            "wall_clock": report.wall_clock,
            "version": report.version,
            "workers": report.workers,
        }
        text = json.dumps(obj, indent=2, default=_fmt) + "\n"
    else:
        raise UsageError(f"unknown format {fmt!r}")
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise RuntimeError(f"cannot write report to {path}: {exc}") from exc


def _test_function(args):
    if getattr(args, "hat_file", None):
        if not os.path.exists(args.hat_file):
            raise UsageError(f"hat file {args.hat_file} does not exist")
        with open(args.hat_file) as fh:
            return make_hat_spline(fh.read())
    if getattr(args, "sigma", None) is None:
        raise UsageError("either --sigma or --hat-file is required")
    return make_fejer(args.sigma)


def _add_common(sub, sampling=False, default_format="csv"):
    sub.add_argument("--sigma", type=float, default=None)
    sub.add_argument("--hat-file", type=str, default=None)
    sub.add_argument("--out", type=str, default=None)
    sub.add_argument("--format", choices=("csv", "json"), default=default_format)
    if sampling:
        sub.add_argument("--seed", type=int, required=True)
        sub.add_argument(
            "--workers",
            type=int,
            default=int(os.environ.get("SOMOMENTS_WORKERS", "1")),
        )


def build_parser():
    p = _Parser(prog="somoments", description=__doc__)
    subs = p.add_subparsers(dest="command")

    m = subs.add_parser("moments", help="Monte Carlo centered moments over SO(M)")
    m.add_argument("--M", type=int, nargs="+", required=True)
    m.add_argument("--samples", type=int, required=True)
    m.add_argument("--n-max", type=int, default=4)
    m.add_argument("--centering", choices=("analytic", "empirical"), default="analytic")
    _add_common(m, sampling=True)

    pr = subs.add_parser("predict", help="closed-form moment prediction")
    pr.add_argument("--parity", choices=("even", "odd"), required=True)
    pr.add_argument("--n", type=int, required=True)
    _add_common(pr, default_format="json")

    ident = subs.add_parser("identities", help="Fourier-identity residual gates")
    ident.add_argument("--suite", choices=("appendix-d",), default="appendix-d")
    ident.add_argument("--n", type=int, nargs="+", default=[1, 2])
    _add_common(ident)

    ac = subs.add_parser("arith-check", help="exponential-sum identity sweeps")
    ac.add_argument(
        "--lemma",
        choices=("c1", "c4", "gauss2", "weil", "ramanujan", "hecke"),
        required=True,
    )
    ac.add_argument("--max-q", type=int, default=30)
    ac.add_argument("--max-n", type=int, default=10)
    ac.add_argument("--out", type=str, default=None)
    ac.add_argument("--format", choices=("csv", "json"), default="json")

    ils = subs.add_parser("ils-check", help="arithmetic-sum vs sinc-moment diagnostic")
    ils.add_argument("--k", type=int, default=2)
    ils.add_argument("--N-list", type=int, nargs="+", required=True)
    ils.add_argument("--eps", type=float, default=0.05)
    ils.add_argument("--b-cut", type=int, default=1000)
    _add_common(ils)

    v = subs.add_parser("vanishing", help="order-of-vanishing probability bounds")
    v.add_argument("--n", type=int, default=2)
    v.add_argument("--r-max", type=int, default=9)
    v.add_argument("--parity", choices=("even", "odd"), default="odd")
    _add_common(v)
    return p


def _run_moments(args):
    f = _test_function(args)
    rows = []
    for M in args.M:
        spec = EnsembleSpec.from_dimension(M)
        ests = mc_moments(
            spec,
            f,
            n_max=args.n_max,
            samples=args.samples,
            seed=args.seed,
            centering=args.centering,
            workers=args.workers,
        )
        for est in ests:
            try:
                pred = centered_moment_prediction(spec.parity, est.n, f).value
            except ValueError:
                pred = math.nan
            rows.append(
                {
                    "parity": spec.parity,
                    "M": M,
                    "sigma": f.sigma,
                    "n": est.n,
                    "samples": est.samples,
                    "centering": est.centering,
                    "estimate": est.value,
                    "std_err": est.std_err,
                    "prediction": pred,
                }
            )
    schema = [
        "parity",
        "M",
        "sigma",
        "n",
        "samples",
        "centering",
        "estimate",
        "std_err",
        "prediction",
    ]
    return rows, schema, True


def _run_predict(args):
    f = _test_function(args)
    pred = centered_moment_prediction(args.parity, args.n, f)
    rows = [
        {
            "parity": pred.parity,
            "n": pred.n,
            "sigma": f.sigma,
            "gaussian_part": pred.gaussian_part,
            "correction": pred.correction,
            "value": pred.value,
        }
    ]
    schema = ["parity", "n", "sigma", "gaussian_part", "correction", "value"]
    return rows, schema, True


_IDENTITY_TOL = {1: 1e-8, 2: 1e-5, 3: 1e-4}


def _run_identities(args):
    f = _test_function(args)
    rows = []
    ok = True
    for n in args.n:
        tol = _IDENTITY_TOL.get(n)
        if tol is None:
            raise UsageError("identities support n in {1, 2, 3}")
        res = ft_identity_residual(f, n)
        passed = abs(res) <= tol
        ok = ok and passed
        rows.append(
            {
                "suite": args.suite,
                "n": n,
                "sigma": f.sigma,
                "residual": res,
                "tol": tol,
                "pass": passed,
            }
        )
    return rows, ["suite", "n", "sigma", "residual", "tol", "pass"], ok


def _run_arith(args):
    checks = 0
    failures = 0
    worst = 0.0
    lemma = args.lemma
    if lemma == "c1":
        for N in (3, 5, 7, 11):
            for b in range(1, args.max_q + 1):
                if math.gcd(N, b) != 1:
                    continue
                for m in range(1, 4):
                    for P in range(1, b + 1):
                        if math.gcd(P, b) != 1:
                            continue
                        res = kloosterman_char_expansion_residual(
                            SumParams(m=m, N=N, b=b, P=P)
                        )
                        checks += 1
                        worst = max(worst, res)
                        failures += res > 1e-9
    elif lemma == "c4":
        for N in (3, 5, 7):
            for b in range(1, args.max_q + 1):
                if math.gcd(N, b) != 1:
                    continue
                for Q in range(1, args.max_n + 1):
                    if math.gcd(Q, N) != 1:
                        continue
                    r = math.gcd(Q, b)
                    if math.gcd(r, b // r) != 1:
                        continue
                    res = kloosterman_char_expansion_r_residual(
                        SumParams(m=1, N=N, b=b, Q=Q)
                    )
                    checks += 1
                    worst = max(worst, res)
                    failures += res > 1e-9
    elif lemma == "gauss2":
        for q in range(1, args.max_q + 1):
            for n in range(1, args.max_n + 1):
                if math.gcd(n, q) != 1:
                    continue
                res = abs(gauss_square_identity(q, n))
                checks += 1
                worst = max(worst, res)
                failures += res > 1e-6
    elif lemma == "weil":
        for q in range(1, args.max_q + 1):
            for m in range(args.max_n + 1):
                for n in range(args.max_n + 1):
                    kloosterman_sum(m, n, q)  # raises on violation
                    checks += 1
    elif lemma == "ramanujan":
        for q in range(1, args.max_q + 1):
            for n in range(1, args.max_n + 1):
                ramanujan_sum(n, q)  # raises on dual-formula disagreement
                checks += 1
    elif lemma == "hecke":
        for n in range(1, min(args.max_n, 30) + 1):
            hecke_power_coeffs(n)  # self-checks against Chebyshev
            checks += 1
    rows = [
        {
            "lemma": lemma,
            "checks": checks,
            "failures": failures,
            "worst_residual": worst,
        }
    ]
    return rows, ["lemma", "checks", "failures", "worst_residual"], failures == 0


def _run_ils(args):
    f = _test_function(args)
    rows = []
    for N in args.N_list:
        out = ils_sum_residual(f, args.k, N, eps=args.eps, b_cut=args.b_cut)
        rows.append(
            {"N": N, "lhs": out.lhs, "rhs": out.rhs, "residual": out.residual}
        )
    return rows, ["N", "lhs", "rhs", "residual"], True


def _run_vanishing(args):
    f = _test_function(args)
    B = moment_bound(f, args.parity, args.n)
    rows = []
    for r in range(3, args.r_max + 1, 2):
        vb = order_vanishing_bound(r, args.n, B)
        rows.append({"r": r, "n": args.n, "B": B, "bound": float(vb.probability_bound)})
    return rows, ["r", "n", "B", "bound"], True


_RUNNERS = {
    "moments": _run_moments,
    "predict": _run_predict,
    "identities": _run_identities,
    "arith-check": _run_arith,
    "ils-check": _run_ils,
    "vanishing": _run_vanishing,
}


def run(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError("a subcommand is required")
    t0 = time.perf_counter()
    rows, schema, ok = _RUNNERS[args.command](args)
    report = Report(
        command=args.command,
        config={k: v for k, v in vars(args).items() if k not in ("out", "format")},
        rows=rows,
        schema=schema,
        gates_passed=ok,
        wall_clock=time.perf_counter() - t0,
        workers=getattr(args, "workers", 1),
    )
    emit_report(report, path=getattr(args, "out", None), fmt=getattr(args, "format", "csv"))
    return 0 if ok else 2


def main(argv=None):
    try:
        return run(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
