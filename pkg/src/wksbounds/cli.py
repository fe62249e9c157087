"""Command-line interface.

Subcommands::

    wksbounds bound     pointwise or uniform error bound (JSON/CSV)
    wksbounds plan      smallest schedule stage for (eps, delta, p, T)
    wksbounds sweep     plan over grids of eps/delta/p (CSV)
    wksbounds simulate  Monte Carlo per-t errors and one reconstruction path
    wksbounds verify    dominance / exceedance / bound-gap checks

Every subcommand accepts ``--config FILE`` with a JSON object whose keys are
the snake_case flag names; explicit flags override it. The master seed
defaults to the ``SUBSAMPLE_SEED`` environment variable, which both the
config file and ``--seed`` override.

Exit codes: 0 success, 1 usage, 2 violated bound precondition, 3 infeasible
plan, 4 numerical failure, 5 a verification check failed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import bounds, planner, simulate
from .bounds import SamplingScheme
from .exceptions import (CapacityError, DomainError, NumericalError, PlanningInfeasible,
                         ValidityError)
from .orlicz import PowerOrlicz
from .spectral import MaternHalfModel, NormalizedTailModel, TabulatedDensityModel
from .wks import exact_mse

EXIT_OK, EXIT_USAGE, EXIT_VALIDITY, EXIT_INFEASIBLE, EXIT_NUMERIC, EXIT_CHECK = range(6)
SEED_ENV = "SUBSAMPLE_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def dumps(obj) -> str:
    """JSON with floats written to 17 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return format(x, ".17g") if math.isfinite(x) else "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _floats(text):
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text):
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _seed(text):
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _add_model(p, default="matern"):
    g = p.add_argument_group("signal model")
    g.add_argument("--model", choices=["matern", "normalized-tail", "tabulated"], default=default)
    g.add_argument("--alpha-scale", type=float, default=1.0, help="Matérn range parameter")
    g.add_argument("--density-csv", help="lambda,density table for --model tabulated")
    g.add_argument("--density-meta", help='JSON with {"tail_exponent": e}')


def _add_scheme(p, with_stage=True):
    g = p.add_argument_group("sampling scheme")
    g.add_argument("--omega", type=float)
    g.add_argument("--n", type=int)
    g.add_argument("--lambda", dest="lambda_band", type=float)
    if with_stage:
        g.add_argument("--stage", type=int, help="use omega=2^N, n=N^2 2^N, lambda=band_ratio*omega")
    g.add_argument("--band-ratio", type=float, default=0.75)


def _add_mc(p, realizations=50):
    g = p.add_argument_group("Monte Carlo")
    g.add_argument("--realizations", type=int, default=realizations)
    g.add_argument("--seed", type=_seed)
    g.add_argument("--grid-points", type=int, default=201)
    g.add_argument("--workers", type=int, default=1)
    g.add_argument("--method", choices=["auto", "markov", "cholesky"], default="auto")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wksbounds", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bound", help="evaluate the pointwise or uniform bound")
    _add_model(b)
    _add_scheme(b)
    b.add_argument("--t", type=float, help="time for --pointwise")
    b.add_argument("--T", dest="T", type=float, help="horizon for --uniform")
    mode = b.add_mutually_exclusive_group()
    mode.add_argument("--pointwise", dest="kind", action="store_const", const="pointwise")
    mode.add_argument("--uniform", dest="kind", action="store_const", const="uniform")
    b.add_argument("--z", type=float, help="free parameter for --pointwise (default: minimal)")
    b.add_argument("--out", choices=["json", "csv"], default="json")

    def plan_args(q):
        q.add_argument("--epsilon", type=float)
        q.add_argument("--delta", type=float)
        q.add_argument("--p", type=float, default=2.0)
        q.add_argument("--T", dest="T", type=float, default=1.0)
        q.add_argument("--c-x", type=float, default=1.0)
        q.add_argument("--orlicz-alpha", type=float, default=2.0)
        q.add_argument("--band-ratio", type=float, default=0.75)
        q.add_argument("--n-max", type=int, default=40)
        q.add_argument("--use-quadrature", action="store_true")
        _add_model(q, default="normalized-tail")

    pl = sub.add_parser("plan", help="smallest stage meeting accuracy and reliability")
    plan_args(pl)

    sw = sub.add_parser("sweep", help="plan over grids of epsilon, delta and p")
    plan_args(sw)
    sw.add_argument("--epsilons", type=_floats)
    sw.add_argument("--deltas", type=_floats)
    sw.add_argument("--ps", type=_floats)
    sw.add_argument("--match-alpha-to-p", action="store_true")
    sw.add_argument("--workers", type=int, default=1)
    sw.add_argument("--output")

    sim = sub.add_parser("simulate", help="Monte Carlo errors and a reconstruction path")
    _add_model(sim)
    _add_scheme(sim)
    sim.add_argument("--T", dest="T", type=float, default=1.0)
    _add_mc(sim)
    sim.add_argument("--output-dir")

    ver = sub.add_parser("verify", help="check bounds against exact and Monte Carlo errors")
    ver.add_argument("--mode", choices=["mse-dominance", "lp-exceedance", "figure5"], required=True)
    _add_model(ver)
    ver.add_argument("--stages", type=_ints)
    ver.add_argument("--band-ratio", type=float, default=0.75)
    ver.add_argument("--T", dest="T", type=float, default=1.0)
    ver.add_argument("--p", type=float, default=2.0)
    ver.add_argument("--epsilon", type=float)
    ver.add_argument("--eps-factor", type=float, default=1.5)
    ver.add_argument("--orlicz-alpha", type=float, default=2.0)
    ver.add_argument("--t-points", type=int, default=101)
    _add_mc(ver, realizations=None)
    ver.add_argument("--output")

    for sp in sub.choices.values():
        sp.add_argument("--config", help="JSON file with default values for the flags")
    parser.subcommands = sub.choices
    return parser


def _apply_config(parser, argv):
    """Parse once to find the subcommand and --config, then reparse with its defaults."""
    args = parser.parse_args(argv)
    subparser = parser.subcommands[args.command]
    defaults = {}
    env = os.environ.get(SEED_ENV)
    if env is not None and "seed" in vars(args):
        try:
            defaults["seed"] = _seed(env)
        except (ValueError, argparse.ArgumentTypeError):
            raise UsageError(f"{SEED_ENV} must be a 64-bit unsigned decimal integer, got {env!r}")
    if getattr(args, "config", None):
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}")
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        known = {a.dest for a in subparser._actions}
        unknown = sorted(set(cfg) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        defaults.update(cfg)
    if defaults:
        subparser.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def _model(args):
    if args.model == "matern":
        return MaternHalfModel(args.alpha_scale)
    if args.model == "normalized-tail":
        return NormalizedTailModel()
    if not args.density_csv:
        raise UsageError("--model tabulated needs --density-csv")
    return TabulatedDensityModel.from_files(args.density_csv, args.density_meta)


def _scheme(args):
    stage = getattr(args, "stage", None)
    if stage is not None:
        return planner.Schedule(band_ratio=args.band_ratio).scheme(stage)
    if args.omega is None or args.n is None:
        raise UsageError("give --stage, or --omega and --n (and optionally --lambda)")
    lam = args.lambda_band if args.lambda_band is not None else args.band_ratio * args.omega
    return SamplingScheme(args.omega, args.n, lam)


def _emit(text, path=None, out=None):
    out = out or sys.stdout
    if path:
        Path(path).write_text(text)
    else:
        out.write(text)


def cmd_bound(args, out):
    model, scheme = _model(args), _scheme(args)
    kind = args.kind or ("pointwise" if args.t is not None else "uniform")
    if kind == "pointwise":
        if args.t is None:
            raise UsageError("--pointwise needs --t")
        br = (bounds.a_n(args.t, scheme, model, args.z) if args.z is not None
              else bounds.a_n_auto(args.t, scheme, model))
        record = br.to_dict()
    else:
        if args.T is None:
            raise UsageError("--uniform needs --T")
        br = bounds.a_tilde(args.T, scheme, model)
        record = {"z_star": br.z_used, "c_tilde": br.c_value, "d_tilde": br.d_value,
                  "tail": br.tail, "total": br.total, "valid": br.valid}
    if args.out == "json":
        out.write(dumps(record) + "\n")
    else:
        out.write(",".join(record) + "\n")
        out.write(",".join(dumps(v) for v in record.values()) + "\n")
    return EXIT_OK


def _plan_request(args, epsilon=None, delta=None):
    eps = args.epsilon if epsilon is None else epsilon
    dlt = args.delta if delta is None else delta
    if eps is None or dlt is None:
        raise UsageError("--epsilon and --delta are required")
    return planner.PlanRequest(
        epsilon=eps, delta=dlt, p=args.p, T=args.T, model=_model(args), c_x=args.c_x,
        family=PowerOrlicz(args.orlicz_alpha),
        schedule=planner.Schedule(band_ratio=args.band_ratio, N_max=args.n_max),
        use_quadrature=args.use_quadrature)


def cmd_plan(args, out):
    req = _plan_request(args)
    try:
        res = planner.plan(req)
    except PlanningInfeasible as exc:
        out.write(dumps({"feasible": False, "message": str(exc), "trajectory": exc.trajectory}) + "\n")
        raise
    record = res.to_dict()
    record["feasible"] = True
    out.write(dumps(record) + "\n")
    return EXIT_OK


def cmd_sweep(args, out):
    eps = args.epsilons or ([args.epsilon] if args.epsilon is not None else [])
    dls = args.deltas or ([args.delta] if args.delta is not None else [])
    if not eps or not dls:
        raise UsageError("sweep needs --epsilons/--epsilon and --deltas/--delta")
    base = _plan_request(args, eps[0], dls[0])
    cells = planner.plan_sweep(base, eps, dls, args.ps or [], args.match_alpha_to_p, args.workers)
    _emit(planner.sweep_to_csv(cells), args.output, out)
    return EXIT_OK


def _mc_config(args, default_realizations):
    m = args.realizations if args.realizations is not None else default_realizations
    seed = args.seed if args.seed is not None else 0
    return simulate.McConfig(num_realizations=m, master_seed=seed, eval_grid_points=args.grid_points)


def cmd_simulate(args, out):
    model, scheme = _model(args), _scheme(args)
    cfg = _mc_config(args, 50)
    ev = np.linspace(0.0, args.T, cfg.eval_grid_points)
    errors, x, x_n = simulate.error_paths(scheme, model, ev, cfg, args.method, args.workers,
                                          keep_paths=True)
    sq = errors ** 2
    sup = simulate.sup_rms_from_errors(errors, ev)
    rows = simulate.per_t_table(scheme, model, sup)
    try:
        at = bounds.a_tilde(args.T, scheme, model).total
    except ValidityError:
        at = None
    summary = {"omega": scheme.omega, "n": scheme.n, "lambda": scheme.lambda_band, "T": args.T,
               "num_realizations": cfg.num_realizations, "master_seed": cfg.master_seed,
               "eval_grid_points": cfg.eval_grid_points, "mc_sup_rms": sup.estimate,
               "mc_sup_rms_stderr": sup.stderr, "a_tilde": at,
               "max_empirical_mse": float(sq.mean(axis=0).max())}
    if args.output_dir:
        d = Path(args.output_dir)
        d.mkdir(parents=True, exist_ok=True)
        with open(d / "per_t.csv", "w") as fh:
            simulate.write_per_t_csv(rows, fh)
        with open(d / "path.csv", "w") as fh:
            simulate.write_path_csv(ev, x[0], x_n[0], fh)
        (d / "summary.json").write_text(dumps(summary) + "\n")
    else:
        simulate.write_per_t_csv(rows, out)
    return EXIT_OK


def _verify_mse(args, model):
    stages = args.stages or [3, 4, 5]
    report, ok = [], True
    ts = np.linspace(0.0, args.T, args.t_points)
    for N in stages:
        scheme = planner.Schedule(band_ratio=args.band_ratio).scheme(N)
        mse = np.array([exact_mse(float(t), scheme, model) for t in ts])
        bsq = np.array([bounds.a_n_auto(float(t), scheme, model).total ** 2 for t in ts])
        violations = int(np.count_nonzero(mse > bsq))
        ok &= violations == 0
        report.append({"N": N, "violations": violations, "max_exact_mse": float(mse.max()),
                       "min_bound_sq": float(bsq.min()), "max_ratio": float((mse / bsq).max())})
    return ok, {"mode": "mse-dominance", "stages": report}


def _verify_lp(args, model):
    stages = args.stages or [4]
    cfg = _mc_config(args, 200)
    family = PowerOrlicz(args.orlicz_alpha)
    report, ok = [], True
    for N in stages:
        scheme = planner.Schedule(band_ratio=args.band_ratio).scheme(N)
        if args.epsilon is not None:
            eps = args.epsilon
        else:
            S = bounds.s_np(scheme, model, args.T, args.p).value
            eps = args.eps_factor * bounds.validity_threshold(S, args.p, family)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", simulate.GridResolutionWarning)
            res = simulate.empirical_lp_exceedance(scheme, model, args.T, args.p, eps, cfg, family,
                                                   method=args.method, workers=args.workers)
        for w in caught:
            print(f"wksbounds: warning: N={N}: {w.message}", file=sys.stderr)
        ok &= res.margin_ok is True
        rec = res.to_dict()
        rec["N"] = N
        report.append(rec)
    return ok, {"mode": "lp-exceedance", "stages": report}


def _verify_figure5(args, model):
    stages = args.stages or [3, 4, 5]
    cfg = _mc_config(args, 50)
    rows = []
    for N in stages:
        scheme = planner.Schedule(band_ratio=args.band_ratio).scheme(N)
        at = bounds.a_tilde(args.T, scheme, model).total
        mc = simulate.empirical_sup_rms(scheme, model, args.T, cfg, args.method, args.workers)
        rows.append({"N": N, "a_tilde": at, "mc_sup": mc.estimate, "mc_stderr": mc.stderr,
                     "gap": at - mc.estimate})
    gaps = [r["gap"] for r in rows]
    positive = all(g > 0 for g in gaps)
    decreasing = all(b < a for a, b in zip(gaps, gaps[1:]))
    return positive and decreasing, {"mode": "figure5", "stages": rows,
                                     "gap_positive": positive, "gap_decreasing": decreasing}


def cmd_verify(args, out):
    model = _model(args)
    check = {"mse-dominance": _verify_mse, "lp-exceedance": _verify_lp,
             "figure5": _verify_figure5}[args.mode]
    ok, report = check(args, model)
    report["passed"] = ok
    _emit(dumps(report) + "\n", args.output, out)
    return EXIT_OK if ok else EXIT_CHECK


COMMANDS = {"bound": cmd_bound, "plan": cmd_plan, "sweep": cmd_sweep,
            "simulate": cmd_simulate, "verify": cmd_verify}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        return COMMANDS[args.command](args, out)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    except (UsageError, DomainError) as exc:
        print(f"wksbounds: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidityError as exc:
        print(f"wksbounds: precondition violated: {exc}", file=sys.stderr)
        return EXIT_VALIDITY
    except PlanningInfeasible as exc:
        print(f"wksbounds: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (NumericalError, CapacityError) as exc:
        print(f"wksbounds: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
