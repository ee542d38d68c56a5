"""Command-line front end.

Subcommands ``test``, ``constants`` and ``verify``; every command writes JSON
that echoes its configuration, the seed and the package version, so reruns
with the same flags give byte-identical files.

Exit codes: 0 success, 2 input error, 3 tied data, 4 budget too small,
5 verification failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import canonical, harness
from ._version import __version__
from .canonical import load_constants, pinned_constants
from .empirical import SortedSample
from .exceptions import BudgetError, MonoHazardError, TiesError
from .statistics import TestReport, compute_statistic, sample_diagnostics, standardize

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_TIES = 3
EXIT_BUDGET = 4
EXIT_VERIFY = 5

SUITES = ("clt", "tail", "scaling", "localization", "constant-hazard")
TAIL_Z = (2.0, 2.5, 3.0, 3.5, 4.0)


class InputError(MonoHazardError):
    pass


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    return obj


def dumps(obj):
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def _emit(text, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def read_data(path):
    """Observations from a text file: one value per line, ``#`` starts a comment.

    A line may also be a single-column CSV row. Raises :class:`InputError`
    naming the offending line.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read data file {path}: {exc}") from None
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        fields = [f.strip() for f in body.split(",")]
        if len(fields) > 1 and any(fields[1:]):
            raise InputError(f"line {lineno}: expected a single column, got {body!r}")
        try:
            val = float(fields[0])
        except ValueError:
            raise InputError(f"line {lineno}: not a number: {fields[0]!r}") from None
        if not math.isfinite(val) or val <= 0:
            raise InputError(f"line {lineno}: observations must be positive and finite, got {fields[0]!r}")
        values.append(val)
    if not values:
        raise InputError(f"data file {path} contains no observations")
    return np.array(values)


def _count(text):
    """Integer flag that also accepts scientific notation such as ``1e6``."""
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not val.is_integer() or val < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}")
    return int(val)


def _counts(text):
    return [_count(t) for t in text.split(",")]


def _seed(text):
    val = _count(text)
    if val >= 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return val


def _real(text):
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(val):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return val


def _common(p):
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--threads", type=_count, default=1, help="worker threads (results do not depend on it)")
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json", help="csv only for raw draw dumps")


def build_parser():
    parser = argparse.ArgumentParser(prog="monohazard", description="Tests for an increasing hazard rate.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="compute a test statistic for a data file")
    t.add_argument("--data", required=True)
    t.add_argument("--a", type=_real, default=1.0)
    t.add_argument("--stat", choices=("T", "U"), default="T")
    t.add_argument("--model", default=None, help="null model spec, e.g. linhaz:1,1")
    t.add_argument("--constants", default=None, help="constants JSON (default: shipped fixture)")
    t.add_argument("--lower", type=_real, default=0.0)
    t.add_argument("--jitter", action="store_true", help="break ties instead of failing")
    _common(t)
    t.set_defaults(func=cmd_test)

    c = sub.add_parser("constants", help="estimate the canonical constants")
    c.add_argument("--c", type=_count, default=canonical.DEFAULT_C)
    c.add_argument("--reps", type=_count, default=canonical.DEFAULT_REPLICATIONS)
    c.add_argument("--delta", type=_real, default=canonical.DEFAULT_DELTA)
    c.add_argument("--lpad", type=_real, default=canonical.DEFAULT_LPAD)
    _common(c)
    c.set_defaults(func=cmd_constants)

    v = sub.add_parser("verify", help="run a verification experiment")
    v.add_argument("suite", choices=SUITES)
    v.add_argument("--kind", choices=("surrogate", "T", "U"), default="surrogate")
    v.add_argument("--model", default="linhaz:1,1")
    v.add_argument("--constants", default=None)
    v.add_argument("--a", type=_real, default=None, help="interval end; curvature coefficient for 'scaling'")
    v.add_argument("--b", type=_real, default=1.0, help="diffusion coefficient for 'scaling'")
    v.add_argument("--n", type=_counts, default=None, help="sample size(s); comma-separated for 'localization'")
    v.add_argument("--reps", type=_count, default=None)
    v.add_argument("--delta", type=_real, default=None)
    v.add_argument("--c", type=_real, default=50.0)
    v.add_argument("--lpad", type=_real, default=canonical.DEFAULT_LPAD)
    _common(v)
    v.set_defaults(func=cmd_verify)
    return parser


def _config(args):
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def _constants(path):
    return pinned_constants() if path is None else load_constants(path)


def _require_json(args):
    if args.format != "json":
        raise InputError(f"--format csv is only available for draw dumps, not for '{args.command}'")


def cmd_test(args):
    _require_json(args)
    if not args.a > 0:
        raise InputError("--a must be positive")
    data = read_data(args.data)
    sample = SortedSample.from_observations(data, ties="jitter" if args.jitter else "raise")
    value = compute_statistic(sample, args.a, args.stat)
    diag = sample_diagnostics(sample, args.a)
    if args.model is None:
        report = TestReport(args.stat, value, sample.n, args.a, diagnostics=diag)
    else:
        consts = _constants(args.constants)
        diag["constants_seed"] = consts.seed
        report = standardize(value, args.stat, sample.n, args.model, consts, a=args.a, lower=args.lower, diagnostics=diag)
    out = report.to_dict()
    out.update(seed=args.seed, version=__version__, config=_config(args))
    _emit(dumps(out), args.out)
    return EXIT_OK


def cmd_constants(args):
    _require_json(args)
    if not args.delta > 0:
        raise InputError("--delta must be positive")
    if not args.lpad > 0:
        raise InputError("--lpad must be positive")
    k = canonical.estimate_constants(
        c=args.c, replications=args.reps, delta=args.delta, l_pad=args.lpad, seed=args.seed, threads=args.threads
    )
    _emit(k.to_json(), args.out)
    d = k.details
    sys.stderr.write(
        f"e_abs_c0={k.e_abs_c0:.6g} (se {k.se_e_abs_c0:.2g}) sigma2={k.sigma2:.6g} (se {k.se_sigma2:.2g}); "
        f"var(Q_c)/c={d.sigma2_a:.6g} (se {d.se_sigma2_a:.2g}), agreement {d.agreement_z:.2f} SE\n"
    )
    return EXIT_OK


def _check(name, observed, ok, threshold):
    return {"name": name, "observed": observed, "threshold": threshold, "passed": bool(ok)}


def _verify_clt(args):
    kind = args.kind
    surrogate = kind == "surrogate"
    n = (args.n or [1_000_000 if surrogate else 100_000])[0]
    reps = args.reps or (2000 if surrogate else 500)
    a = 1.0 if args.a is None else args.a
    rep = harness.clt_experiment(
        kind, args.model, n, reps, _constants(args.constants), args.seed, a=a, delta_x=args.delta, threads=args.threads
    )
    lo, hi, mtol = (0.85, 1.15, 0.05) if surrogate else (0.75, 1.3, 0.10)
    checks = [
        _check("var_ratio", rep.var_ratio, lo <= rep.var_ratio <= hi, [lo, hi]),
        _check("mean_rel_error", rep.mean_check["rel_error"], rep.mean_check["rel_error"] < mtol, mtol),
    ]
    if surrogate:
        checks.append(_check("ks_p_pilot", rep.ks_p_pilot, rep.ks_p_pilot > 0.01, 0.01))
    return rep.to_dict(), checks, rep.draws


def _verify_tail(args):
    reps = args.reps or 1_000_000
    delta = args.delta or canonical.TAIL_DELTA
    rep = canonical.tail_check(TAIL_Z, reps, args.seed, delta=delta, half_width=args.lpad, threads=args.threads)
    ols, wls = rep.slope(), rep.slope(weighted=True)
    target = canonical.AIRY_SLOPE
    rel = abs(ols - target) / abs(target)
    body = {"rows": rep.rows(), "slope_ols": ols, "slope_weighted": wls, "target_slope": target, "replications": reps}
    return body, [_check("slope_rel_error", rel, rel <= 0.15, 0.15)], None


def _verify_scaling(args):
    a = 1.0 if args.a is None else args.a
    rep = canonical.scaling_check(
        a,
        args.b,
        c=args.c,
        replications=args.reps or 1000,
        seed=args.seed,
        delta=args.delta or canonical.DEFAULT_DELTA,
        l_pad=args.lpad,
        threads=args.threads,
    )
    checks = [
        _check("mean_ratio", rep.mean_ratio, rep.mean_ok, {"predicted": rep.predicted_mean_ratio, "se": rep.mean_ratio_se}),
        _check("var_ratio", rep.var_ratio, rep.var_ok, {"predicted": rep.predicted_var_ratio, "se": rep.var_ratio_se}),
    ]
    return rep.to_dict(), checks, None


def _decreasing(xs):
    return all(b < a for a, b in zip(xs, xs[1:]))


def _verify_localization(args):
    ns = args.n or [10**6, 10**8, 10**10]
    a = 1.0 if args.a is None else args.a
    reports = [
        harness.localization_check(
            args.model, n, args.delta, args.reps or 200, args.seed, a=a, threads=args.threads
        ).to_dict()
        for n in ns
    ]
    big = [r["big_mismatch_frequency"] for r in reports]
    small = [r["small_no_knot_frequency"] for r in reports]
    in_range = all(0 <= f <= 1 for f in big + small)
    checks = [_check("frequencies_in_unit_interval", in_range, in_range, [0, 1])]
    if len(ns) > 1:
        checks.append(_check("big_mismatch_decreasing", big, _decreasing(big), "strictly decreasing"))
        checks.append(_check("small_no_knot_decreasing", small, _decreasing(small), "strictly decreasing"))
    return {"reports": reports}, checks, None


def _verify_constant_hazard(args):
    n = (args.n or [10_000])[0]
    reps = args.reps or 2000
    a = 1.0 if args.a is None else args.a
    rep = harness.constant_hazard_experiment(
        1.0, a, n, reps, args.delta or 1e-4, args.seed, threads=args.threads
    )
    rate = harness.rate_check(1.0, a, (n, 10 * n), reps, args.seed, threads=args.threads)
    rel = rep.relative_differences
    checks = [
        _check("median_rel_diff", rel[0], rel[0] < 0.10, 0.10),
        _check("q90_rel_diff", rel[1], rel[1] < 0.10, 0.10),
        _check("var_ratio_sqrt_n", rate["var_ratio_sqrt_n"], 0.8 <= rate["var_ratio_sqrt_n"] <= 1.25, [0.8, 1.25]),
        _check("var_ratio_n_5_6", rate["var_ratio_n_5_6"], rate["var_ratio_n_5_6"] > 1.5, 1.5),
    ]
    draws = np.column_stack([rep.empirical, rep.limit])
    return {"quantiles": rep.to_dict(), "rate": rate}, checks, draws


_VERIFY = {
    "clt": _verify_clt,
    "tail": _verify_tail,
    "scaling": _verify_scaling,
    "localization": _verify_localization,
    "constant-hazard": _verify_constant_hazard,
}


def _draws_csv(draws, suite):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if draws.ndim == 1:
        w.writerow(["draw"])
        w.writerows([repr(float(x))] for x in draws)
    else:
        w.writerow(["empirical", "limit"] if suite == "constant-hazard" else [f"c{i}" for i in range(draws.shape[1])])
        w.writerows([repr(float(x)) for x in row] for row in draws)
    return buf.getvalue()


def cmd_verify(args):
    body, checks, draws = _VERIFY[args.suite](args)
    passed = all(c["passed"] for c in checks)
    for c in checks:
        sys.stderr.write(f"{'PASS' if c['passed'] else 'FAIL'} {args.suite}.{c['name']}: {c['observed']} (threshold {c['threshold']})\n")
    if args.format == "csv":
        if draws is None:
            raise InputError(f"suite '{args.suite}' produces no draws to dump as csv")
        _emit(_draws_csv(draws, args.suite), args.out)
    else:
        report = {
            "suite": args.suite,
            "result": body,
            "checks": checks,
            "passed": passed,
            "seed": args.seed,
            "version": __version__,
            "config": _config(args),
        }
        _emit(dumps(report), args.out)
    return EXIT_OK if passed else EXIT_VERIFY


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TiesError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_TIES
    except BudgetError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_BUDGET
    except (MonoHazardError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
