"""Command-line surface.

Subcommands::

    decay         closed-form decay rate, exit time(s) and atom weights
    mlp           sampled most-likely exit path as CSV
    oracle-check  closed form vs. the discretized variational oracle
    simulate      Monte Carlo exit-probability estimates + decay-curve report
    mlf           Mittag-Leffler function / M-Wright density values

All floats print with 9 significant digits; CSV uses ',' separators, '.'
decimals and a header row, so outputs diff cleanly.  Exit codes: 0 success,
1 failed oracle check, 2 validation error, 3 numerical error, 4 insufficient
data.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .decay import ExitHalfspace, most_likely_path
from .errors import ExitDecayError, ValidationError
from .kernels import TimeGrid
from .montecarlo import decay_curve, estimate_exit_prob
from .oracle import DiscretizedProblem, oracle_halfspace, oracle_quadrant
from .rates import rate_equal, rate_indep
from .scalelaw import GgbmParams, ScaleLaw, mittag_leffler, mwright_density
from .scenario import Scenario, load_scenario


def _fmt(x: float) -> str:
    return f"{float(x):.9g}"


def _fmt_seq(xs) -> str:
    return " ".join(_fmt(x) for x in np.atleast_1d(xs))


def _write_text(path: str | Path, text: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _emit(text: str, out: str | None) -> None:
    if out:
        _write_text(out, text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# decay


def _cmd_decay(args) -> int:
    scenario = load_scenario(args.scenario)
    result = scenario.compute_decay()
    laws = scenario.laws()
    lines = [
        f"model: {result.geometry}/{result.coupling}",
        f"w: {_fmt(result.w)}",
        f"t_star: {_fmt_seq(result.t_star)}",
        f"c_star: {_fmt_seq(result.c_star)}",
        f"d: {_fmt_seq([law.d for law in laws])}",
        f"theta: {_fmt_seq([law.theta for law in laws])}",
    ]
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        payload = {
            "model": f"{result.geometry}/{result.coupling}",
            "w": float(result.w),
            "t_star": np.atleast_1d(result.t_star).tolist(),
            "c_star": np.atleast_1d(result.c_star).tolist(),
            "d": [law.d for law in laws],
            "theta": [law.theta for law in laws],
        }
        import json

        _write_text(args.out, json.dumps(payload, indent=2) + "\n")
    return 0


# ---------------------------------------------------------------------------
# mlp


def _mlp_csv(scenario: Scenario, result, sampled) -> str:
    halfspace = isinstance(scenario.exit, ExitHalfspace)
    p = scenario.p
    header = ["u"] + [f"z_{i + 1}" for i in range(p)]
    if halfspace:
        header.append("residual")
    else:
        header += [f"residual_{i + 1}" for i in range(p)]
    rows = [",".join(header)]
    for j, u in enumerate(sampled.times):
        z = sampled.values[:, j]
        cells = [_fmt(u)] + [_fmt(v) for v in z]
        if halfspace:
            cells.append(_fmt(float(scenario.exit.xi @ z) - scenario.exit.x))
        else:
            cells += [_fmt(z[i] - scenario.exit.levels[i]) for i in range(p)]
        rows.append(",".join(cells))
    return "\n".join(rows) + "\n"


def _cmd_mlp(args) -> int:
    scenario = load_scenario(args.scenario)
    result = scenario.compute_decay()
    # sample on a uniform [0, T] grid with the exact exit time(s) spliced in
    base = np.linspace(0.0, scenario.horizon, args.grid_points)
    times = np.union1d(base, np.atleast_1d(result.t_star))
    grid = TimeGrid(scenario.horizon, times)
    sampled = most_likely_path(result, scenario.exit, scenario.kernels, grid)
    text = _mlp_csv(scenario, result, sampled)
    _emit(text, args.out)
    if args.out:
        sys.stdout.write(f"w: {_fmt(result.w)}\nt_star: {_fmt_seq(result.t_star)}\n")
        sys.stdout.write(f"wrote {args.out}\n")
        if not args.no_plot:
            from .plotting import save_most_likely_path

            target = save_most_likely_path(
                sampled.times, sampled.values, args.out, exit_times=result.t_star
            )
            sys.stdout.write(f"wrote {target}\n")
    return 0


# ---------------------------------------------------------------------------
# oracle-check


def _cmd_oracle_check(args) -> int:
    scenario = load_scenario(args.scenario)
    result = scenario.compute_decay()
    model = scenario.perturbation_model()
    prob = DiscretizedProblem.uniform(args.m, scenario.kernels, scenario.exit, model)
    if scenario.geometry == "halfspace":
        oracle = oracle_halfspace(prob)
    else:
        oracle = oracle_quadrant(prob)
    gap = abs(oracle.w - result.w) / max(abs(result.w), 1e-300)
    ok = gap <= args.tolerance
    lines = [
        f"closed_form_w: {_fmt(result.w)}",
        f"oracle_w: {_fmt(oracle.w)}",
        f"rel_gap: {_fmt(gap)}",
        f"tolerance: {_fmt(args.tolerance)}",
        f"grid_points: {args.m}",
        f"status: {'PASS' if ok else 'FAIL'}",
    ]
    sys.stdout.write("\n".join(lines) + "\n")
    if args.out:
        import json

        payload = {
            "closed_form_w": float(result.w),
            "oracle_w": float(oracle.w),
            "rel_gap": float(gap),
            "tolerance": args.tolerance,
            "grid_points": args.m,
            "status": "PASS" if ok else "FAIL",
        }
        _write_text(args.out, json.dumps(payload, indent=2) + "\n")
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# simulate


def _rows_csv(rows) -> str:
    out = ["gamma,samples,hits,p_hat,ci_low,ci_high,log_rate"]
    for r in rows:
        cells = [
            _fmt(r.gamma),
            str(r.samples),
            str(r.hits),
            _fmt(r.p_hat),
            _fmt(r.ci_low),
            _fmt(r.ci_high),
            _fmt(r.log_rate) if r.log_rate is not None else "",
        ]
        out.append(",".join(cells))
    return "\n".join(out) + "\n"


def _cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    gammas = [float(g) for g in args.gammas.split(",")] if args.gammas else None
    config = scenario.sim_config(
        grid_points=args.grid_points, gammas=gammas, samples=args.samples,
        seed=args.seed, batch=args.batch,
    )
    model = scenario.perturbation_model_for_simulation()
    rows = estimate_exit_prob(config, scenario.exit, model, scenario.kernels)
    text = _rows_csv(rows)
    _emit(text, args.out)

    w_ref = args.wref
    if w_ref is None:
        try:
            w_ref = scenario.compute_decay().w
        except ValidationError:
            w_ref = None
    if w_ref is not None:
        report = decay_curve(rows, w_ref)
        sys.stdout.write(f"w_ref: {_fmt(report.w_ref)}\n")
        for pt in report.points:
            sys.stdout.write(
                f"gamma {_fmt(pt.gamma)}: -log_rate {_fmt(pt.minus_log_rate)} "
                f"rel_err {_fmt(pt.rel_err)}\n"
            )
        sys.stdout.write(f"monotone_trend: {report.monotone_trend}\n")
    else:
        sys.stdout.write("decay-curve report skipped: no reference rate (use --wref)\n")
    if args.out:
        sys.stdout.write(f"wrote {args.out}\n")
        if not args.no_plot:
            from .plotting import save_decay_curve

            target = save_decay_curve(rows, w_ref, args.out)
            sys.stdout.write(f"wrote {target}\n")
    return 0


# ---------------------------------------------------------------------------
# mlf


def _cmd_mlf(args) -> int:
    if (args.z is None) == (args.tau is None):
        raise ValidationError("mlf: provide exactly one of --z (Mittag-Leffler) or --tau (M-Wright)")
    if args.z is not None:
        value = mittag_leffler(args.beta, args.z)
    else:
        value = mwright_density(args.beta, args.tau)
    sys.stdout.write(_fmt(value) + "\n")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exitdecay",
        description="Exit-probability decay rates for randomly scaled Gaussian processes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decay", help="closed-form decay rate of a scenario")
    d.add_argument("scenario")
    d.add_argument("--out", help="also write the result as JSON to this path")
    d.set_defaults(func=_cmd_decay)

    m = sub.add_parser("mlp", help="sample the most likely exit path as CSV")
    m.add_argument("scenario")
    m.add_argument("--grid-points", type=int, default=201)
    m.add_argument("--out", help="write CSV here instead of stdout")
    m.add_argument("--no-plot", action="store_true", help="skip the figure next to --out")
    m.set_defaults(func=_cmd_mlp)

    o = sub.add_parser("oracle-check", help="compare the closed form with the grid oracle")
    o.add_argument("scenario")
    o.add_argument("--m", type=int, default=40, help="oracle grid size")
    o.add_argument("--tolerance", type=float, default=1e-3)
    o.add_argument("--out", help="also write the comparison as JSON to this path")
    o.set_defaults(func=_cmd_oracle_check)

    s = sub.add_parser("simulate", help="Monte Carlo exit-probability estimates")
    s.add_argument("scenario")
    s.add_argument("--gammas", help="comma-separated speed ladder, e.g. 1,2,4,8")
    s.add_argument("--samples", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--grid-points", type=int)
    s.add_argument("--batch", type=int)
    s.add_argument("--wref", type=float, help="reference decay rate for the curve report")
    s.add_argument("--out", help="write CSV here instead of stdout")
    s.add_argument("--no-plot", action="store_true", help="skip the figure next to --out")
    s.set_defaults(func=_cmd_simulate)

    f = sub.add_parser("mlf", help="Mittag-Leffler function / M-Wright density values")
    f.add_argument("--beta", type=float, required=True)
    f.add_argument("--z", type=float, help="evaluate the Mittag-Leffler function at z")
    f.add_argument("--tau", type=float, help="evaluate the M-Wright density at tau")
    f.set_defaults(func=_cmd_mlf)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ExitDecayError as err:
        sys.stderr.write(f"error: {err}\n")
        return err.exit_code


if __name__ == "__main__":
    sys.exit(main())
