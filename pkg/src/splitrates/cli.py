"""Command-line surface: rate tables, region maps, the two benchmark
experiments, the certification fuzz suites, and rate-vs-step-size sweeps.

Exit codes: 0 on success, 1 on domain/parameter errors (including missing
files), 2 when a verification suite reports a violation.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

import numpy as np

from . import regions as regions_mod
from . import verification
from .exceptions import ConvergenceFailure, DivergenceError, DomainError, ParameterError
from .experiments import (
    DenoiseConfig,
    RestoreConfig,
    config_from_json,
    run_denoise,
    run_restore,
)
from .plotting import rate_sweep_svg
from .rates import (
    Algorithm,
    ProblemParams,
    RateResult,
    Setting,
    admissible_interval,
    optimal,
    rate,
    rate_curve,
)
from .verification import GaussianPairSampler, check_averaged, check_cocoercive

_TWO_OP = ["ea", "ppa", "fbs_grad_f", "fbs_prox_f", "prs", "drs"]


def _params_from_args(args):
    beta = math.inf if args.beta in ("inf", None) else float(args.beta)
    return ProblemParams(alpha=args.alpha, beta=beta, rho=args.rho)


def _algo_list(spec):
    if spec == "all":
        return [Algorithm(a) for a in _TWO_OP]
    return [Algorithm(a) for a in spec.split(",")]


def _cmd_rates(args):
    params = _params_from_args(args)
    setting = Setting(args.setting)
    rows = []
    for algo in _algo_list(args.algo):
        if args.optimal:
            choice = optimal(algo, setting, params)
            rows.append(RateResult(algo, setting, choice.tau_star, choice.rate_star))
        else:
            rows.append(RateResult(algo, setting, args.tau, rate(algo, setting, params, args.tau)))
    if args.csv:
        print("algorithm,setting,tau,rate")
        for r in rows:
            print(f"{r.algorithm.value},{r.setting.value},{r.tau:.12g},{r.rate:.12g}")
    else:
        kind = "optimal step-size" if args.optimal else f"step-size tau={args.tau}"
        print(f"# {kind}, alpha={params.alpha} beta={params.beta} rho={params.rho}")
        for r in rows:
            print(f"{r.algorithm.value:>12s}  tau={r.tau:<12.6g} rate={r.rate:.6g}")
    return 0


def _cmd_regions(args):
    if args.beta is not None and args.rho is not None:
        label = regions_mod.classify(args.beta, args.rho)
        print(f"{label.winner.value} ({label.region_id})")
        return 0
    betas, rhos = regions_mod.default_grid(
        n_beta=args.grid, n_rho=args.grid,
        beta_span=(args.beta_min, args.beta_max), rho_span=(args.rho_min, args.rho_max),
    )
    table = regions_mod.region_map(betas, rhos)
    if args.out_csv:
        table.write_csv(args.out_csv)
        print(f"wrote {args.out_csv}")
    if args.out_svg:
        table.write_svg(args.out_svg)
        print(f"wrote {args.out_svg}")
    if not (args.out_csv or args.out_svg):
        counts = {}
        for row in table.winners:
            for w in row:
                counts[w.value] = counts.get(w.value, 0) + 1
        print(json.dumps(counts))
    return 0


def _apply_overrides(cfg, args, fields):
    updates = {}
    for name in fields:
        value = getattr(args, name, None)
        if value is not None:
            updates[name] = value
    if getattr(args, "algorithms", None) is not None:
        updates["algorithms"] = tuple(args.algorithms.split(","))
    return dataclasses.replace(cfg, **updates) if updates else cfg


def _cmd_denoise(args):
    cfg = config_from_json(args.config, "denoise") if args.config else DenoiseConfig()
    cfg = _apply_overrides(cfg, args, ["n", "n_segments", "chi", "mu", "noise_sigma",
                                       "max_iter", "seed"])
    result = run_denoise(cfg, out_dir=args.out)
    _print_experiment(result, args.out)
    return 0


def _cmd_restore(args):
    cfg = config_from_json(args.config, "restore") if args.config else RestoreConfig()
    cfg = _apply_overrides(cfg, args, ["n_pixels", "m_rows", "chi", "mu", "wavelet_levels",
                                       "noise_sigma", "max_iter", "seed"])
    result = run_restore(cfg, out_dir=args.out)
    _print_experiment(result, args.out)
    return 0


def _print_experiment(result, out):
    for name, trace in result.traces.items():
        e0 = trace.errors[0] if len(trace.errors) else float("nan")
        eN = trace.errors[-1] if len(trace.errors) else float("nan")
        print(f"{name:>6s}  tau={trace.step_size:<12.6g} rate={trace.theoretical_rate:<10.6g} "
              f"error {e0:.3e} -> {eN:.3e}")
    if result.params.get("predicted_winner"):
        print(f"predicted winner: {result.params['predicted_winner']}")
    for name in result.diverged:
        print(f"{name}: diverged")
    if out:
        print(f"outputs in {out}")


def _cmd_verify(args):
    report = {"contraction_fuzz": None, "averagedness": [], "example1": []}
    fuzz = verification.contraction_fuzz(n_cases=args.cases, seed=args.seed)
    fuzz_out = {k: v for k, v in fuzz.items() if k != "worst"}
    fuzz_out["worst_margin"] = min(v["margin"] for v in fuzz["worst"].values())
    report["contraction_fuzz"] = fuzz_out
    violated = fuzz["violated"]

    rng = np.random.default_rng(args.seed)
    from .rates import averaged_constant
    from .verification import _build_operator, _diag_quadratic

    for _ in range(5):
        alpha = 10.0 ** rng.uniform(-1, 1)
        beta = 10.0 ** rng.uniform(-1, 1)
        dim = 5
        f = _diag_quadratic(rng.uniform(0.0, 1.0 / alpha, dim))
        g = _diag_quadratic(rng.uniform(0.0, 1.0 / beta, dim))
        tau = 0.5 * 2.0 * alpha * beta / (alpha + beta)
        for algo in (Algorithm.EA, Algorithm.FBS_GRAD_F, Algorithm.PRS, Algorithm.DRS):
            mu = averaged_constant(algo, alpha, beta, tau)
            op = _build_operator(algo, f, g, tau)
            rep = check_averaged(op.apply, mu, GaussianPairSampler(dim, seed=args.seed),
                                 args.pairs)
            report["averagedness"].append({"algorithm": algo.value, **rep.to_dict()})
            violated = violated or rep.violated

    from .operators import DiagonalQuadratic, LinearMap

    for k in range(5):
        nx, nu = 4, 3
        lam_f = rng.uniform(0.5, 2.0, nx)
        lam_h = rng.uniform(0.5, 2.0, nu)
        f = DiagonalQuadratic(lam_f)
        D = LinearMap.from_matrix(rng.standard_normal((nu, nx)))
        eta = 0.5 * min(lam_f.min(), 1.0 / lam_h.max())
        op_a, op_b = verification.build_example1(
            f, lambda u, lam=lam_h: u / lam, lam_h.max(), lam_h.min(), D, eta
        )
        sampler = GaussianPairSampler(nx + nu, seed=args.seed + k)
        rep_a = verification.check_strongly_monotone(
            op_a, op_a.claimed_strong_monotonicity, sampler, args.pairs)
        rep_b = check_cocoercive(op_b, op_b.claimed_cocoercivity, sampler, args.pairs)
        report["example1"].append({"A": rep_a.to_dict(), "B": rep_b.to_dict()})
        violated = violated or rep_a.violated or rep_b.violated

    text = json.dumps(report, indent=2, default=float)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        print(text)
    if violated:
        print("VIOLATIONS FOUND", file=sys.stderr)
        return 2
    return 0


def _cmd_sweep(args):
    params = _params_from_args(args)
    setting = Setting(args.setting)
    curves = []
    rows = []
    for algo in _algo_list(args.algo):
        hi, inclusive = admissible_interval(algo, params)
        hi_eff = args.tau_max if args.tau_max is not None else hi
        if math.isinf(hi_eff):
            hi_eff = 4.0 * math.sqrt(params.alpha / max(params.rho, 1e-12))
        lo = args.tau_min if args.tau_min is not None else hi_eff / args.count
        taus = np.linspace(lo, hi_eff, args.count)
        if not inclusive:
            taus = taus[taus < hi]
        taus = taus[taus > 0]
        values = rate_curve(algo, setting, params, taus)
        curves.append((algo.value, taus, values, False))
        rows.extend((algo.value, t, v) for t, v in zip(taus, values))
    if args.out_csv:
        with open(args.out_csv, "w") as fh:
            fh.write("algorithm,tau,rate\n")
            for name, t, v in rows:
                fh.write(f"{name},{t:.12g},{v:.12g}\n")
        print(f"wrote {args.out_csv}")
    if args.out_svg:
        rate_sweep_svg(curves, args.out_svg)
        print(f"wrote {args.out_svg}")
    if not (args.out_csv or args.out_svg):
        for name, t, v in rows[:: max(1, len(rows) // 40)]:
            print(f"{name},{t:.6g},{v:.6g}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="splitrates",
        description="rates, regions, and benchmarks for first-order splitting methods",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rates", help="evaluate contraction factors")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", default="inf")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--setting", choices=["cocoercive", "optimization"],
                   default="cocoercive")
    p.add_argument("--algo", default="all", help="comma list or 'all'")
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--optimal", action="store_true")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(fn=_cmd_rates)

    p = sub.add_parser("regions", help="classify points or map a grid")
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--grid", type=int, default=50)
    p.add_argument("--beta-min", type=float, default=1e-2)
    p.add_argument("--beta-max", type=float, default=1e4)
    p.add_argument("--rho-min", type=float, default=1e-4)
    p.add_argument("--rho-max", type=float, default=0.99)
    p.add_argument("--out-csv", default=None)
    p.add_argument("--out-svg", default=None)
    p.set_defaults(fn=_cmd_regions)

    p = sub.add_parser("denoise", help="piecewise-constant denoising benchmark")
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--n-segments", dest="n_segments", type=int, default=None)
    p.add_argument("--chi", type=float, default=None)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--noise-sigma", dest="noise_sigma", type=float, default=None)
    p.add_argument("--algorithms", default=None, help="comma list")
    p.add_argument("--max-iter", dest="max_iter", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(fn=_cmd_denoise)

    p = sub.add_parser("restore", help="image restoration benchmark")
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--n-pixels", dest="n_pixels", type=int, default=None)
    p.add_argument("--m-rows", dest="m_rows", type=int, default=None)
    p.add_argument("--chi", type=float, default=None)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--wavelet-levels", dest="wavelet_levels", type=int, default=None)
    p.add_argument("--noise-sigma", dest="noise_sigma", type=float, default=None)
    p.add_argument("--algorithms", default=None, help="comma list")
    p.add_argument("--max-iter", dest="max_iter", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(fn=_cmd_restore)

    p = sub.add_parser("verify", help="run the certification fuzz suites")
    p.add_argument("--cases", type=int, default=500)
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("sweep", help="rate-vs-step-size curves")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", default="inf")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--setting", choices=["cocoercive", "optimization"],
                   default="cocoercive")
    p.add_argument("--algo", default="all")
    p.add_argument("--tau-min", type=float, default=None)
    p.add_argument("--tau-max", type=float, default=None)
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--out-csv", default=None)
    p.add_argument("--out-svg", default=None)
    p.set_defaults(fn=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (DomainError, ParameterError, ConvergenceFailure, DivergenceError,
            FileNotFoundError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
