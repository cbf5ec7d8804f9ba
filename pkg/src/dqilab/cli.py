"""Command-line front end.  Every command writes CSV (or an instance file) and
echoes its resolved configuration as ``#`` comment lines first.

Exit codes: 0 ok, 1 usage error, 2 computation error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from .dqi_state import DqiCoefficients, build_dqi_state
from .fp_linalg import BudgetExceeded, check_distance_condition, row_degrees
from .instance import DegreeDistribution, format_instance, make_opi, make_random_instance, make_xorsat, read_instance
from .noise import NoiseModel, expected_score_exact, noisy_sampler, sampled_score, tau_summary
from .predictor import (
    build_A,
    d_parameter,
    expected_score_theorem1,
    principal_eigenpair,
    score_bounds_sparsity,
)

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_VERIFY = 0, 1, 2, 3
NA = "NA"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def fmt(x) -> str:
    if x is None:
        return NA
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % float(x)


class BadArgumentText(UsageError):
    pass


def _usage_on_bad_text(fn):
    def wrapped(text, *rest):
        try:
            return fn(text, *rest)
        except (ValueError, ZeroDivisionError) as exc:
            raise BadArgumentText(f"cannot parse {text!r}: {exc}") from exc

    wrapped.__name__, wrapped.__doc__ = fn.__name__, fn.__doc__
    return wrapped


@_usage_on_bad_text
def parse_grid(text: str) -> list:
    """``"start:stop:step"`` with both ends included, or a comma list, or one value."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"grid must be start:stop:step, got {text!r}")
        start, stop, step = (Fraction(s) for s in parts)
        if step <= 0 or stop < start:
            raise UsageError("grid needs step > 0 and stop >= start")
        count = math.floor((stop - start) / step)
        return [float(start + k * step) for k in range(count + 1)]
    return [float(Fraction(s)) for s in text.split(",") if s.strip()]


@_usage_on_bad_text
def parse_w(text: str, m: int, l: int, d: float) -> DqiCoefficients:
    """``principal`` or comma-separated entries, each ``re`` or ``re:im``."""
    if text == "principal":
        return DqiCoefficients(principal_eigenpair(build_A(m, l, d))[1])
    vals = []
    for item in text.split(","):
        re_im = item.split(":")
        if len(re_im) == 1:
            vals.append(complex(float(re_im[0]), 0.0))
        elif len(re_im) == 2:
            vals.append(complex(float(re_im[0]), float(re_im[1])))
        else:
            raise UsageError(f"bad coefficient {item!r}")
    c = DqiCoefficients(np.array(vals))
    if c.l != l:
        raise UsageError(f"--w has {c.l + 1} entries but --l {l} needs {l + 1}")
    if c.norm_sq == 0:
        raise UsageError("--w is the zero vector")
    return c.normalized()


@_usage_on_bad_text
def parse_inject(text: str | None) -> dict:
    if not text:
        return {}
    out = {}
    for item in text.split(","):
        k, f = item.split(":")
        out[int(k)] = float(Fraction(f))
    return out


class CsvOut:
    def __init__(self, args, config: dict):
        self.buf = io.StringIO()
        self.path = getattr(args, "output", None)
        for key, val in config.items():
            self.buf.write(f"# {key}={val}\n")

    def comment(self, text: str):
        self.buf.write(f"# {text}\n")

    def header(self, cols):
        self.buf.write(",".join(cols) + "\n")

    def row(self, vals):
        self.buf.write(",".join(fmt(v) if not isinstance(v, str) else v for v in vals) + "\n")

    def close(self):
        text = self.buf.getvalue()
        if self.path and self.path != "-":
            with open(self.path, "w", encoding="ascii", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def _load(args):
    try:
        return read_instance(args.instance)
    except OSError as exc:
        raise UsageError(f"cannot read instance: {exc}") from exc


def _w_text(c: DqiCoefficients) -> str:
    return ",".join(f"{fmt(z.real)}:{fmt(z.imag)}" for z in c.w)


def _pmap(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


# -- gen ---------------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.family == "opi":
        if args.p is None or args.n is None:
            raise UsageError("gen opi needs --p and --n")
        inst = make_opi(args.p, args.n, r=args.r, seed=args.seed)
    elif args.family == "xorsat":
        if args.m is None or args.n is None or args.deg is None:
            raise UsageError("gen xorsat needs --m, --n and --deg")
        inst = make_xorsat(args.m, args.n, DegreeDistribution.parse(args.deg), rhs_mode=args.rhs, seed=args.seed)
    else:
        if None in (args.p, args.m, args.n, args.r):
            raise UsageError("gen random needs --p, --m, --n and --r")
        inst = make_random_instance(args.p, args.m, args.n, args.r, args.seed)
    text = format_instance(inst)
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- predict -----------------------------------------------------------------


def cmd_predict(args) -> int:
    inst = _load(args)
    d = d_parameter(inst.p, inst.r)
    A = build_A(inst.m, args.l, d)
    lam, _ = principal_eigenpair(A)
    coeffs = parse_w(args.w, inst.m, args.l, d)
    if args.assume_distance:
        verdict = "assumed"
    else:
        dc = check_distance_condition(inst.B, args.l, budget=args.distance_budget)
        verdict = {True: "holds", False: "fails", None: "undecided"}[dc.holds]
    deg = row_degrees(inst.B)
    out = CsvOut(
        args,
        {
            "command": "predict",
            "instance": args.instance,
            "p,m,n,r": f"{inst.p},{inst.m},{inst.n},{inst.r}",
            "l": args.l,
            "w": _w_text(coeffs),
            "eps": args.eps,
            "distance_condition": verdict,
        },
    )
    ok = verdict in ("holds", "assumed")
    if not ok:
        out.comment("predicted_s and bounds omitted: the closed form needs 2l+1 < d_perp")
    out.header(["epsilon", "tau1", "tauinf", "lambda_max", "predicted_s", "lower_bound", "upper_bound"])
    base = inst.m * inst.r / inst.p
    for eps in parse_grid(args.eps):
        noise = NoiseModel(eps)
        tau = tau_summary(inst.B, noise)
        if ok:
            pred = expected_score_theorem1(inst, coeffs, noise, distance_check=True)
            lo, hi = score_bounds_sparsity(inst, coeffs, noise, int(deg.min()), int(deg.max()))
            out.row([eps, tau.tau1, tau.tau_inf, lam, pred, base + lo, base + hi])
        else:
            out.row([eps, tau.tau1, tau.tau_inf, lam, None, None, None])
    out.close()
    return EXIT_OK


# -- simulate / sweep --------------------------------------------------------


def _simulate_point(job):
    inst, coeffs, eps, shots, seed = job
    state = build_dqi_state(inst, coeffs)
    if abs(state.norm_sq - 1.0) > 1e-9:
        state = state.normalized()
    noise = NoiseModel(eps)
    exact = expected_score_exact(inst, state, noise)
    if not shots:
        return exact, None, None
    mean, se = sampled_score(inst, noisy_sampler(state, noise, seed, shots))
    return exact, mean, se


def cmd_simulate(args) -> int:
    inst = _load(args)
    if args.shots and not args.sampled:
        raise UsageError("--shots requires --sampled")
    shots = (args.shots or 100_000) if args.sampled else 0
    coeffs = parse_w(args.w, inst.m, args.l, d_parameter(inst.p, inst.r))
    grid = parse_grid(args.eps)
    out = CsvOut(
        args,
        {
            "command": "simulate",
            "instance": args.instance,
            "p,m,n,r": f"{inst.p},{inst.m},{inst.n},{inst.r}",
            "l": args.l,
            "w": _w_text(coeffs),
            "eps": args.eps,
            "shots": shots,
            "seed": args.seed,
        },
    )
    out.header(["epsilon", "exact_s", "sampled_s", "stderr", "shots"])
    seeds = np.random.SeedSequence(args.seed).spawn(len(grid))
    jobs = [(inst, coeffs, eps, shots, s) for eps, s in zip(grid, seeds)]
    for eps, (exact, mean, se) in zip(grid, _pmap(_simulate_point, jobs, args.jobs)):
        out.row([eps, exact, mean, se, shots])
    out.close()
    return EXIT_OK


def _sweep_point(job):
    inst, coeffs, eps, ok = job
    noise = NoiseModel(eps)
    tau = tau_summary(inst.B, noise)
    exact = _simulate_point((inst, coeffs, eps, 0, None))[0]
    pred = expected_score_theorem1(inst, coeffs, noise, distance_check=True) if ok else None
    return tau.tau1, pred, exact


def cmd_sweep(args) -> int:
    """Closed form next to the exact simulator over an epsilon grid."""
    inst = _load(args)
    coeffs = parse_w(args.w, inst.m, args.l, d_parameter(inst.p, inst.r))
    dc = check_distance_condition(inst.B, args.l, budget=args.distance_budget)
    grid = parse_grid(args.eps)
    out = CsvOut(
        args,
        {
            "command": "sweep",
            "instance": args.instance,
            "p,m,n,r": f"{inst.p},{inst.m},{inst.n},{inst.r}",
            "l": args.l,
            "w": _w_text(coeffs),
            "eps": args.eps,
            "distance_condition": {True: "holds", False: "fails", None: "undecided"}[dc.holds],
        },
    )
    out.header(["epsilon", "tau1", "predicted_s", "exact_s", "abs_diff"])
    rows = _pmap(_sweep_point, [(inst, coeffs, eps, dc.holds is True) for eps in grid], args.jobs)
    for eps, (tau1, pred, exact) in zip(grid, rows):
        out.row([eps, tau1, pred, exact, None if pred is None else abs(pred - exact)])
    out.close()
    return EXIT_OK


# -- decode-lab --------------------------------------------------------------


def cmd_decode_lab(args) -> int:
    from .decoder_lab import DecoderPolicy, build_decoder, export_table, theorem3_experiment

    inst = _load(args)
    if inst.p != 2 or inst.r != 1:
        raise UsageError("decode-lab needs a p = 2, r = 1 instance")
    coeffs = parse_w(args.w, inst.m, args.l, 0.0)
    policy = DecoderPolicy(parse_inject(args.inject), seed=args.inject_seed)
    table, part = build_decoder(inst, args.l, policy)
    if part.gamma_max >= 1.0:
        k = int(np.argmax(part.gamma))
        raise ValueError(f"the decoder fails on every weight-{k} error; the lower bound needs gamma_max < 1")
    if args.export_table:
        with open(args.export_table, "w", encoding="ascii", newline="\n") as fh:
            fh.write(export_table(table))
    out = CsvOut(
        args,
        {
            "command": "decode-lab",
            "instance": args.instance,
            "p,m,n,r": f"{inst.p},{inst.m},{inst.n},{inst.r}",
            "l": args.l,
            "w": _w_text(coeffs),
            "eps": args.eps,
            "inject": args.inject or "",
            "inject_seed": args.inject_seed,
            "gamma": ";".join(fmt(g) for g in part.gamma),
            "samples": args.samples if args.samples else "exhaustive",
        },
    )
    out.header(["epsilon", "gamma_max", "measured_mean", "bound_m1", "bound_m1sq", "stderr"])
    for eps in parse_grid(args.eps):
        res = theorem3_experiment(inst, coeffs, NoiseModel(eps), table, part, samples=args.samples, seed=args.seed)
        out.row([eps, res.gamma_max, res.measured_mean, res.bound_m1, res.bound_m1sq, res.stderr])
    out.close()
    return EXIT_OK


# -- verify ------------------------------------------------------------------


def cmd_verify(args) -> int:
    from .verify import run_verification

    damping = None
    if args.corrupt_damping:
        def damping(eps, L):  # deliberately wrong exponent
            return (1 - eps) ** (L + 1)
    results = run_verification(quick=args.quick, damping=damping)
    failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        line = f"{status} {res.name} cases={res.cases}"
        if not res.passed:
            failed += 1
            line += f" failures={res.failures} first: {res.first_failure}"
        print(line)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_VERIFY if failed else EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="dqilab", description="Noisy DQI predictions, simulation and verification.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("family", choices=("opi", "xorsat", "random"))
    g.add_argument("--p", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--r", type=int)
    g.add_argument("--deg", help="degree distribution, e.g. 3:0.5,4:0.5")
    g.add_argument("--rhs", default="uniform", choices=("uniform", "zero"))
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    def common(sp, eps_default="0"):
        sp.add_argument("--instance", required=True)
        sp.add_argument("--l", type=int, required=True)
        sp.add_argument("--w", default="principal", help="'principal' or re:im,re:im,...")
        sp.add_argument("--eps", default=eps_default, help="value, comma list, or start:stop:step")
        sp.add_argument("-o", "--output")

    pr = sub.add_parser("predict", help="closed-form expected score")
    common(pr)
    pr.add_argument("--assume-distance", action="store_true", help="skip the dual-distance check")
    pr.add_argument("--distance-budget", type=int, default=10**7)
    pr.set_defaults(func=cmd_predict)

    si = sub.add_parser("simulate", help="exact (and optionally sampled) noisy score")
    common(si)
    si.add_argument("--sampled", action="store_true")
    si.add_argument("--shots", type=int)
    si.add_argument("--seed", type=int, default=0)
    si.add_argument("--jobs", type=int, default=1)
    si.set_defaults(func=cmd_simulate)

    sw = sub.add_parser("sweep", help="closed form versus exact simulator over an epsilon grid")
    common(sw, "0:1:0.1")
    sw.add_argument("--distance-budget", type=int, default=10**7)
    sw.add_argument("--jobs", type=int, default=1)
    sw.set_defaults(func=cmd_sweep)

    dl = sub.add_parser("decode-lab", help="imperfect-decoder experiment for Max-XORSAT")
    common(dl)
    dl.add_argument("--inject", help="weight:fraction pairs, e.g. 1:0.1,2:0.1")
    dl.add_argument("--inject-seed", type=int, default=0)
    dl.add_argument("--samples", type=int, help="Monte-Carlo right-hand sides instead of all 2^m")
    dl.add_argument("--seed", type=int, default=0)
    dl.add_argument("--export-table", help="write the syndrome table here")
    dl.set_defaults(func=cmd_decode_lab)

    ve = sub.add_parser("verify", help="run the oracle and invariant suite")
    ve.add_argument("--quick", action="store_true", help="smaller enumeration ranges")
    ve.add_argument("--corrupt-damping", action="store_true", help="self-test: use a wrong damping formula")
    ve.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, BadArgumentText) as exc:
        sys.stderr.write(f"dqilab: usage error: {exc}\n")
        return EXIT_USAGE
    except (ValueError, ArithmeticError, MemoryError, BudgetExceeded, OverflowError, OSError) as exc:
        sys.stderr.write(f"dqilab: {type(exc).__name__}: {exc}\n")
        return EXIT_COMPUTE


if __name__ == "__main__":
    raise SystemExit(main())
