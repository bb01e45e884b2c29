"""Command-line interface.

Subcommands:
  sweep         run an alpha sweep and write CSV (and optionally JSON/figures)
  ground-space  enumerate and describe a problem's ground space
  crossings     locate where A(s) and alpha*B(s) cross the temperature
  gadget        write a ring-with-pendants problem file

Exit codes: 0 success, 2 invalid configuration, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from .ising import IsingProblem, enumerate_ground_space, load_problem, make_gadget, save_problem
from .schedule import AnnealSchedule, default_schedule, load_schedule_csv


def _parse_problem(text: str) -> tuple[IsingProblem, str]:
    if text.startswith("gadget:"):
        n_core = int(text.split(":", 1)[1])
        return make_gadget(n_core), text
    return load_problem(text), text


def _parse_schedule(text: str) -> AnnealSchedule:
    if text == "default":
        return default_schedule()
    return load_schedule_csv(text)


def _parse_alphas(text: str) -> list[float]:
    if text == "default":
        from .runner import default_alpha_grid

        return default_alpha_grid()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("alpha range must look like start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("alpha range step must be positive")
        if stop < start:
            raise ValueError("alpha range stop must be >= start")
        n = int(round((stop - start) / step)) + 1
        values = [round(start + k * step, 12) for k in range(n)]
        return [v for v in values if v <= stop + 1e-12]
    return [float(p) for p in text.split(",") if p.strip()]


def _cmd_sweep(args) -> int:
    from .engines import NoiseModel
    from .runner import ExperimentConfig, emit_csv, emit_json, format_csv, run_experiment

    problem, label = _parse_problem(args.problem)
    schedule = _parse_schedule(args.schedule)
    sigma_h = args.sigma_h
    if sigma_h is None:
        sigma_h = 0.24 if args.model == "sssv" else 0.0
    config = ExperimentConfig(
        problem=problem,
        schedule=schedule,
        alphas=tuple(_parse_alphas(args.alphas)),
        model=args.model,
        noise=NoiseModel(sigma_h=sigma_h, sigma_j=args.sigma_j),
        runs_per_alpha=args.runs,
        sweeps=args.sweeps,
        temperature=args.temp,
        transverse_sign=args.transverse_sign,
        base_seed=args.seed,
        freeze_noise=args.freeze_noise,
        compute_gibbs_distance=args.gibbs,
        problem_label=label,
    )
    # When the table goes to stdout, commentary moves to stderr.
    echo = sys.stdout if args.out else sys.stderr
    print(f"problem            {label} ({problem.n_spins} spins)", file=echo)
    print(f"model              {config.model}", file=echo)
    print(f"schedule           {schedule.name}", file=echo)
    print(f"alphas             {len(config.alphas)} points in "
          f"[{min(config.alphas):g}, {max(config.alphas):g}]", file=echo)
    print(f"runs per alpha     {config.runs_per_alpha}", file=echo)
    print(f"sweeps             {config.sweeps}", file=echo)
    print(f"temperature        {config.temperature:g} GHz", file=echo)
    print(f"transverse sign    {config.transverse_sign:+d}", file=echo)
    print(f"sigma_h, sigma_j   {config.noise.sigma_h:g}, {config.noise.sigma_j:g}",
          file=echo)
    print(f"base seed          {config.base_seed}", file=echo)
    if config.freeze_noise:
        print("noise              frozen across all runs", file=echo)

    def report(rec):
        ratio = rec.summary.ratio
        text = "undefined" if ratio is None else f"{ratio:.4f}"
        print(f"  alpha={rec.alpha:<8g} p_gs={rec.summary.p_gs:.4f} "
              f"ratio={text}", file=echo)

    result = run_experiment(config, workers=args.workers, progress=report)
    if args.out:
        emit_csv(result, args.out)
        print(f"wrote {args.out}", file=echo)
    else:
        sys.stdout.write(format_csv(result))
    if args.json:
        emit_json(result, args.json, include_histogram=args.histogram)
        print(f"wrote {args.json}", file=echo)
    if args.plot:
        from .plots import plot_sweep

        plot_sweep(result, args.plot)
        print(f"wrote {args.plot}", file=echo)
    return 0


def _cmd_ground_space(args) -> int:
    problem, label = _parse_problem(args.problem)
    info = enumerate_ground_space(problem)
    print(f"problem        {label} ({problem.n_spins} spins)")
    print(f"ground energy  {_energy_str(info.ground_energy)}")
    print(f"degeneracy     {info.degeneracy}")
    print(f"isolated       {1 if info.isolated_index is not None else 0}")
    print(f"clustered      {info.clustered_count}")
    return 0


def _energy_str(e: float) -> str:
    return f"{int(e)}" if float(e).is_integer() else repr(float(e))


def _cmd_crossings(args) -> int:
    schedule = _parse_schedule(args.schedule)
    s_a, s_b = schedule.crossings(args.alpha, args.temp)
    print(f"schedule     {schedule.name}")
    print(f"alpha        {args.alpha:g}")
    print(f"temperature  {args.temp:g} GHz")
    print(f"s_A          {'never' if s_a is None else repr(s_a)}   "
          "(transverse term falls below T)")
    print(f"s_B          {'never' if s_b is None else repr(s_b)}   "
          "(scaled problem term rises above T)")
    if args.plot:
        from .plots import plot_schedule

        plot_schedule(schedule, args.plot, alpha=args.alpha, temperature=args.temp)
        print(f"wrote {args.plot}")
    return 0


def _cmd_gadget(args) -> int:
    problem = make_gadget(args.cores)
    save_problem(problem, args.out)
    print(f"wrote {args.out} ({problem.n_spins} spins, "
          f"{len(problem.couplings)} couplings)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinanneal",
        description="Classical rotor and annealing experiments on benchmark gadgets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run an alpha sweep and write results")
    p.add_argument("--problem", required=True,
                   help="gadget:N or a problem JSON file")
    p.add_argument("--model", choices=("sssv", "sa"), default="sssv")
    p.add_argument("--sigma-h", type=float, default=None,
                   help="field-offset sigma in GHz (default 0.24 for sssv, 0 for sa)")
    p.add_argument("--sigma-j", type=float, default=0.0,
                   help="coupling-offset sigma in GHz (default 0)")
    p.add_argument("--alphas", default="default",
                   help="'default', comma list, or start:stop:step")
    p.add_argument("--runs", type=int, default=10000)
    p.add_argument("--sweeps", type=int, default=1500)
    p.add_argument("--temp", type=float, default=0.22)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--schedule", default="default",
                   help="'default' or a schedule CSV file")
    p.add_argument("--gibbs", action="store_true",
                   help="also compute the TV distance to the final Gibbs state")
    p.add_argument("--out", default=None, help="CSV destination (default: stdout)")
    p.add_argument("--json", default=None, help="also write full JSON result here")
    p.add_argument("--histogram", action="store_true",
                   help="include per-configuration histograms in the JSON")
    p.add_argument("--freeze-noise", action="store_true",
                   help="draw one noise realization and share it across runs")
    p.add_argument("--transverse-sign", type=int, choices=(-1, 1), default=-1)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--plot", default=None, help="render the sweep figure to this file")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("ground-space", help="describe a problem's ground space")
    p.add_argument("--problem", required=True,
                   help="gadget:N or a problem JSON file")
    p.set_defaults(func=_cmd_ground_space)

    p = sub.add_parser("crossings", help="schedule crossing points vs temperature")
    p.add_argument("--schedule", default="default")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--temp", type=float, default=0.22)
    p.add_argument("--plot", default=None,
                   help="render the schedule figure to this file")
    p.set_defaults(func=_cmd_crossings)

    p = sub.add_parser("gadget", help="write a ring-with-pendants problem file")
    p.add_argument("--cores", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gadget)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
