"""Command-line interface.

Data goes to standard output (or ``--out``), diagnostics to standard error.
Exit codes: 0 success / all checks passed, 1 a check failed, 2 usage or
configuration error.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys

import numpy as np

from . import acceptance, backend
from .core import HSDistribution, comparison_pdf, hs_sample
from .harness import ks_one_sample, ks_two_sample
from .occurrences import (
    IVScenario,
    TwinModel,
    iv_log_gap_target,
    iv_simulate,
    jeffreys_binomial_draw,
    jeffreys_multinomial_draw,
    jeffreys_target,
    twin_simulate,
    twin_target,
)
from .rng import RngStream
from .sums import HSSumDistribution, sum_sample

DEFAULT_REPS = 100_000


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """15 significant digits; ``-0`` prints as ``0``."""
    s = f"{float(x):.15g}"
    return "0" if s == "-0" else s


def _num(x):
    return float(fmt(x))


def _write(args, text: str):
    if getattr(args, "out", None):
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _report(scenario, params, rep, seed):
    return {
        "scenario": scenario,
        "params": {k: _num(v) if isinstance(v, float) else v for k, v in params.items()},
        "n": _num(rep.n_effective) if isinstance(rep.n_effective, float) else int(rep.n_effective),
        "ks_statistic": _num(rep.ks_statistic),
        "threshold": _num(rep.threshold),
        "passed": rep.passed,
        "mean": _num(rep.mean),
        "variance": _num(rep.variance),
        "seed": seed,
    }


def _emit_reports(args, reports) -> int:
    _write(args, _json(reports[0] if len(reports) == 1 else reports))
    return 0 if all(r["passed"] for r in reports) else 1


# -- dist --------------------------------------------------------------------

def cmd_dist(args) -> int:
    if args.subject == "hs":
        dist = HSDistribution(args.loc, args.scale)
    else:
        dist = HSSumDistribution(args.n, args.scale)
    if args.action == "sample":
        rng = RngStream(args.seed, args.stream)
        if args.subject == "hs":
            batch = hs_sample(dist, rng, args.count)
        else:
            batch = sum_sample(dist, rng, args.count)
        _write(args, _csv(["value"], ([v] for v in batch.values)))
        return 0
    if args.action == "quantile":
        if args.p is None:
            raise UsageError("quantile needs --p")
        inputs = args.p
        values = dist.quantile(np.array(inputs))
        label = "p"
    else:
        if args.x is None:
            raise UsageError(f"{args.action} needs --x")
        inputs = args.x
        values = getattr(dist, args.action)(np.array(inputs))
        label = "x"
    if len(inputs) == 1:
        _write(args, fmt(values[0]) + "\n")
    else:
        _write(args, _csv([label, args.action], zip(inputs, values)))
    return 0


# -- figure1 -----------------------------------------------------------------

def cmd_figure1(args) -> int:
    if not args.lo < args.hi:
        raise UsageError("need --lo < --hi")
    if not args.step > 0:
        raise UsageError("need --step > 0")
    count = int(math.floor((args.hi - args.lo) / args.step + 1e-9)) + 1
    y = args.lo + args.step * np.arange(count)
    cols = [comparison_pdf(f, y) for f in ("hs", "normal", "logistic")]
    _write(args, _csv(["y", "hs", "normal", "logistic"], zip(y, *cols)))
    return 0


# -- scenarios ---------------------------------------------------------------

def _samples_out(path, header, columns):
    if path:
        with open(path, "w", newline="\n") as fh:
            fh.write(_csv(header, zip(*columns)))


def cmd_twin(args) -> int:
    model = TwinModel(args.mu, args.sigma, args.rho)
    target = twin_target(model)
    batch = twin_simulate(model, RngStream(args.seed, args.stream), args.reps)
    rep = ks_one_sample(batch, target.cdf, args.alpha)
    params = {"mu": args.mu, "sigma": args.sigma, "rho": args.rho, "alpha": args.alpha,
              "target_location": target.location, "target_scale": target.scale,
              "redraws": batch.redraw_count}
    _samples_out(args.samples_out, ["v"], [batch.values])
    return _emit_reports(args, [_report("twin", params, rep, args.seed)])


def cmd_jeffreys(args) -> int:
    target = jeffreys_target()
    params = {"alpha": args.alpha, "target_n": target.n, "target_scale": target.scale}
    reports, columns = [], {}
    draws = {}
    modes = ["multinomial", "binomial"] if args.mode == "both" else [args.mode]
    for k, mode in enumerate(modes):
        draw = jeffreys_multinomial_draw if mode == "multinomial" else jeffreys_binomial_draw
        batch = draw(RngStream(args.seed, args.stream + k), args.reps)
        draws[mode] = batch
        rep = ks_one_sample(batch, target.cdf, args.alpha)
        reports.append(_report(f"jeffreys-{mode}", params, rep, args.seed))
        columns[mode] = batch.values
    if len(modes) == 2:
        rep = ks_two_sample(draws["multinomial"], draws["binomial"], args.alpha)
        reports.append(_report("jeffreys-two-sample", {"alpha": args.alpha}, rep, args.seed))
    _samples_out(args.samples_out, [f"w_{m}" for m in columns], list(columns.values()))
    return _emit_reports(args, reports)


def cmd_iv(args) -> int:
    s = IVScenario(sigma_y=args.sigma_y, rho_yd=args.rho_yd, p_d=args.p_d, p_treat=args.p_treat,
                   n_units=args.n, sigma_d=args.sigma_d)
    target = iv_log_gap_target(s)
    res = iv_simulate(s, RngStream(args.seed, args.stream), args.reps, method=args.method,
                      threads=args.threads)
    rep = ks_one_sample(res.log_gap(), target.cdf, threshold=args.ks_tol)
    params = {"sigma_y": s.sigma_y, "sigma_d": s.sigma_d, "rho_yd": s.rho_yd, "p_d": s.p_d,
              "p_treat": s.p_treat, "n_units": s.n_units, "method": args.method,
              "eta": s.eta, "ls_limit": s.ls_limit,
              "target_location": target.location, "target_scale": target.scale,
              "median_beta_iv": float(np.median(res.beta_iv.values)),
              "redraws": res.redraw_count}
    _samples_out(args.samples_out, ["beta_iv", "beta_ls"], [res.beta_iv.values, res.beta_ls.values])
    return _emit_reports(args, [_report("iv", params, rep, args.seed)])


def cmd_verify(args) -> int:
    lines = []

    def show(res):
        lines.append(res.line())
        if not args.out:
            print(res.line(), flush=True)
        print(res.timing(), file=sys.stderr)

    print(f"kernel backend: {backend.name()}", file=sys.stderr)
    results = acceptance.run_all(threads=args.threads, on_result=show)
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    return 0 if all(r.passed for r in results) else 1


# -- parser ------------------------------------------------------------------

def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _u64(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"expected a 64-bit unsigned integer, got {text}")
    return v


def _alpha(text):
    v = float(text)
    if v not in (0.05, 0.01):
        raise argparse.ArgumentTypeError("alpha must be 0.05 or 0.01")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hsecant", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True):
        sp.add_argument("--out", help="write output to PATH instead of stdout")
        if seed:
            sp.add_argument("--seed", type=_u64, default=0)
            sp.add_argument("--stream", type=_u64, default=0)

    d = sub.add_parser("dist", help="evaluate or sample an HS or HS-sum law")
    d.add_argument("subject", choices=["hs", "hs-sum"])
    d.add_argument("action", choices=["pdf", "cdf", "quantile", "sample"])
    d.add_argument("--loc", type=float, default=0.0, help="location (hs only)")
    d.add_argument("--scale", type=float, default=1.0)
    d.add_argument("--n", type=_positive_int, default=2, help="number of summands (hs-sum)")
    d.add_argument("--x", type=float, nargs="+")
    d.add_argument("--p", type=float, nargs="+")
    d.add_argument("--count", type=_positive_int, default=1000, help="sample size")
    common(d)
    d.set_defaults(func=cmd_dist)

    f = sub.add_parser("figure1", help="HS, normal and logistic densities on a grid (CSV)")
    f.add_argument("--lo", type=float, default=-4.0)
    f.add_argument("--hi", type=float, default=4.0)
    f.add_argument("--step", type=float, default=0.01)
    common(f, seed=False)
    f.set_defaults(func=cmd_figure1)

    t = sub.add_parser("twin", help="Fisher-z of the twin intraclass correlation vs its HS law")
    t.add_argument("--rho", type=float, default=0.0)
    t.add_argument("--mu", type=float, default=0.0)
    t.add_argument("--sigma", type=float, default=1.0)
    t.add_argument("--reps", type=_positive_int, default=DEFAULT_REPS)
    t.add_argument("--alpha", type=_alpha, default=0.01)
    t.add_argument("--samples-out")
    common(t)
    t.set_defaults(func=cmd_twin)

    j = sub.add_parser("jeffreys", help="log odds ratio under the Jeffreys prior vs pi*(Y1+Y2)")
    j.add_argument("--mode", choices=["multinomial", "binomial", "both"], default="multinomial")
    j.add_argument("--reps", type=_positive_int, default=DEFAULT_REPS)
    j.add_argument("--alpha", type=_alpha, default=0.01)
    j.add_argument("--samples-out")
    common(j)
    j.set_defaults(func=cmd_jeffreys)

    v = sub.add_parser("iv", help="log|beta_IV - beta_LS| for an invalid instrument vs its HS limit")
    v.add_argument("--rho-yd", type=float, default=0.0)
    v.add_argument("--sigma-y", type=float, default=1.0)
    v.add_argument("--p-d", type=float, default=0.5)
    v.add_argument("--sigma-d", type=float, default=None, help="must equal sqrt(p_d (1 - p_d))")
    v.add_argument("--p-treat", type=float, default=0.5)
    v.add_argument("--n", type=_positive_int, default=10_000, help="units per replication")
    v.add_argument("--reps", type=_positive_int, default=DEFAULT_REPS)
    v.add_argument("--method", choices=["units", "cells"], default="units")
    v.add_argument("--threads", type=_positive_int, default=1)
    v.add_argument("--ks-tol", type=float, default=0.02)
    v.add_argument("--samples-out")
    common(v)
    v.set_defaults(func=cmd_iv)

    a = sub.add_parser("verify", help="run the acceptance suite")
    a.add_argument("--threads", type=_positive_int, default=1)
    common(a, seed=False)
    a.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"hsecant {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
