"""Command-line entry point: synthesis, simulation, oracle comparison, and
scaling benchmarks.

Configuration precedence: built-in defaults < TOML config file (--config) <
explicit command-line flags.  Every run echoes its fully resolved
configuration to config.echo.json in the output directory.
"""

import argparse
import functools
import json
import math
import os
import sys

import numpy as np

from . import bench as bench_mod
from .demand import load_demand_csv, save_demand_csv, synthesize_demand
from .fleet import base_fleet, load_fleet, save_fleet, synthesize_fleet
from .oracle import OracleProblem, OracleUnit, exhaustive_uc, gap
from .sim import (run_simulation, write_census_csv, write_decisions_csv,
                  write_report_json)
from .system import EngineConfig

try:
    import tomllib
except ImportError:  # python < 3.11
    import tomli as tomllib

EXIT_OK = 0
EXIT_SHORTFALL = 1
EXIT_USAGE = 2


def _parser():
    p = argparse.ArgumentParser(prog="rruc",
                                description="relax-and-round unit commitment engine")
    p.add_argument("--config", help="TOML config file (flags override it)")
    sub = p.add_subparsers(dest="command", required=True)

    sf = sub.add_parser("synth-fleet", help="write a synthesized fleet JSON")
    sf.add_argument("--multiplier", type=int, default=1)
    sf.add_argument("--seed", type=int, default=0)
    sf.add_argument("--out", default=".")

    sd = sub.add_parser("synth-demand", help="write a synthetic demand CSV")
    sd.add_argument("--low-gw", type=float, default=78.6)
    sd.add_argument("--peak-gw", type=float, default=160.2)
    sd.add_argument("--days", type=int, default=8)
    sd.add_argument("--dt", type=float, default=5.0)
    sd.add_argument("--seed", type=int, default=0)
    sd.add_argument("--out", default=".")

    sim = sub.add_parser("simulate", help="run a rolling-horizon simulation")
    sim.add_argument("--model", choices=("runtime", "ramp_piecewise", "ramp_smooth"),
                     default="runtime")
    sim.add_argument("--fleet", help="fleet JSON (default: bundled base fleet)")
    sim.add_argument("--multiplier", type=int, default=1)
    sim.add_argument("--demand", help="demand CSV (default: synthesized)")
    sim.add_argument("--days", type=int, default=2)
    sim.add_argument("--dt", type=float, default=5.0)
    sim.add_argument("--sigma-gw", type=float, default=None,
                     help="forecast sigma in GW (default: scaled with fleet)")
    sim.add_argument("--beta", type=float, default=None)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--parallel", action="store_true", default=None)
    sim.add_argument("--out", default=".")

    bn = sub.add_parser("bench", help="scaling study across fleet multiples")
    bn.add_argument("--model", choices=("runtime", "ramp_piecewise", "ramp_smooth"),
                    default="runtime")
    bn.add_argument("--multipliers", default="1,2,4,8,16")
    bn.add_argument("--days", type=int, default=2)
    bn.add_argument("--dt", type=float, default=5.0)
    bn.add_argument("--seed", type=int, default=0)
    bn.add_argument("--out", default=".")

    oc = sub.add_parser("oracle-compare",
                        help="sweep vs exhaustive enumeration on random instances")
    oc.add_argument("--units", type=int, default=12)
    oc.add_argument("--instances", type=int, default=50)
    oc.add_argument("--seed", type=int, default=0)
    oc.add_argument("--out", default=".")
    return p


def _load_config_file(path):
    with open(path, "rb") as f:
        return tomllib.load(f)


def _engine_config(args, file_cfg):
    cfg = EngineConfig()
    relax = file_cfg.get("relax", {})
    cfg.relax_tol = relax.get("tol", cfg.relax_tol)
    cfg.relax_max_outer = relax.get("max_outer", cfg.relax_max_outer)
    cfg.relax_max_inner = relax.get("max_inner", cfg.relax_max_inner)
    sweep = file_cfg.get("sweep", {})
    cfg.sweep_parallel = sweep.get("parallel", cfg.sweep_parallel)
    cfg.sweep_max_width = sweep.get("max_width", cfg.sweep_max_width)
    ramp = file_cfg.get("ramp", {})
    cfg.beta = ramp.get("beta", cfg.beta)
    cfg.ramp_profile = ramp.get("profile", cfg.ramp_profile)
    if getattr(args, "beta", None) is not None:
        cfg.beta = args.beta
    if getattr(args, "parallel", None) is not None:
        cfg.sweep_parallel = args.parallel
    return cfg


def _echo_config(args, cfg, outdir):
    payload = {"argv": {k: v for k, v in vars(args).items() if k != "func"},
               "engine": {k: v for k, v in vars(cfg).items()}}
    with open(os.path.join(outdir, "config.echo.json"), "w") as f:
        json.dump(payload, f, indent=1, sort_keys=True, default=str)


def main(argv=None):
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK

    file_cfg = _load_config_file(args.config) if args.config else {}
    outdir = getattr(args, "out", ".")
    os.makedirs(outdir, exist_ok=True)
    cfg = _engine_config(args, file_cfg)
    _echo_config(args, cfg, outdir)

    if args.command == "synth-fleet":
        fleet = synthesize_fleet(base_fleet(), args.multiplier, args.seed)
        save_fleet(fleet, os.path.join(outdir, "fleet.json"))
        print(f"wrote fleet.json with {len(fleet)} generators")
        return EXIT_OK

    if args.command == "synth-demand":
        trace = synthesize_demand(args.low_gw * 1000.0, args.peak_gw * 1000.0,
                                  args.days, args.dt, args.seed)
        save_demand_csv(trace, os.path.join(outdir, "demand.csv"))
        print(f"wrote demand.csv with {trace.horizon} periods")
        return EXIT_OK

    if args.command == "simulate":
        return _run_simulate(args, cfg, outdir)

    if args.command == "bench":
        multipliers = [int(x) for x in args.multipliers.split(",")]
        report = bench_mod.scaling_study(base_fleet(), multipliers, args.model,
                                         cfg, days=args.days, dt=args.dt,
                                         seed=args.seed)
        bench_mod.write_scaling_csv(report, os.path.join(outdir, "scaling.csv"))
        bench_mod.write_scaling_svg(report, os.path.join(outdir, "scaling.svg"))
        print(f"model={report.model} exponent={report.fitted_exponent:.3f} "
              f"time x{report.per_doubling_time_ratio:.2f}/doubling "
              f"objective x{report.per_doubling_objective_ratio:.4f}/doubling")
        return EXIT_OK

    if args.command == "oracle-compare":
        return _run_oracle_compare(args, cfg, outdir)

    return EXIT_USAGE


def _run_simulate(args, cfg, outdir):
    if args.fleet:
        fleet = load_fleet(args.fleet)
    else:
        fleet = synthesize_fleet(base_fleet(), args.multiplier, args.seed)
    if args.sigma_gw is not None:
        sigma = args.sigma_gw * 1000.0
    else:
        sigma = (bench_mod.FULL_SYSTEM_SIGMA_MW * args.multiplier
                 / bench_mod.FULL_SYSTEM_MULTIPLIER)
    if args.demand:
        trace = load_demand_csv(args.demand, dt=args.dt, sigma_d=sigma)
    else:
        scale = args.multiplier / bench_mod.FULL_SYSTEM_MULTIPLIER
        trace = synthesize_demand(bench_mod.FULL_SYSTEM_LOW_MW * scale,
                                  bench_mod.FULL_SYSTEM_PEAK_MW * scale,
                                  args.days, args.dt, args.seed, sigma_d=sigma)
    report = run_simulation(fleet, trace, args.model, cfg)
    write_report_json(report, os.path.join(outdir, "report.json"))
    write_decisions_csv(report, os.path.join(outdir, "decisions.csv"))
    write_census_csv(report, os.path.join(outdir, "census.csv"))
    shortfalls = [t for t, f in report.flags if f == "shortfall"]
    print(f"{report.horizon} periods, objective "
          f"{report.total_objective_excl_warmup:.6g}, "
          f"{len(shortfalls)} shortfall periods")
    return EXIT_SHORTFALL if shortfalls else EXIT_OK


@functools.lru_cache(maxsize=1)
def _instance_unit_pool():
    """Unit pool the random instances sample from: a jittered triple of the
    bundled base fleet, so instance parameters follow the fleet distribution."""
    from .fleet import base_fleet, synthesize_fleet
    return tuple(synthesize_fleet(base_fleet(), 3, seed=42))


def random_oracle_instance(rng, n_units):
    """Random single-period commitment instance as the rolling engine sees
    one: units sampled from the fleet distribution, demand on a daily cycle,
    the 72 h forecast envelope given by the cycle extremes, and previous
    commitments produced by the engine itself one period (5 min) earlier.

    The previous-status bootstrap solves the same instance at the prior
    demand point twice, starting from all-on, so u0 is a fixed point of the
    engine's own decision rule rather than an arbitrary coin flip."""
    from .testing import sweep_single_period

    pool = _instance_unit_pool()
    picks = rng.choice(len(pool), size=n_units, replace=False)
    gens = [pool[int(j)] for j in picks]
    total = sum(g.p_max for g in gens)
    low = rng.uniform(0.30, 0.45) * total
    peak = rng.uniform(1.25, 1.6) * low
    frac = rng.uniform(0.0, 1.0)
    demand = low + (peak - low) * (1.0 - math.cos(2.0 * math.pi * frac)) / 2.0
    prev_frac = frac - 5.0 / 1440.0
    prev_demand = low + (peak - low) * (
        1.0 - math.cos(2.0 * math.pi * prev_frac)) / 2.0
    sigma = 0.01 * peak

    def build(prev_on, d):
        units = [OracleUnit(
            a=g.cost.a, b=g.cost.b, c=g.cost.c,
            p_min=g.p_min, p_max=g.p_max,
            switch_penalty=0.5 * (g.start_costs["hot"] + g.shutdown_cost),
            prev_committed=(j in prev_on),
        ) for j, g in enumerate(gens)]
        return OracleProblem(discretionary=units, must_run=[], demand=d,
                             d_max_72=peak, d_min_72=low, sigma_d=sigma)

    prev_on = frozenset(range(n_units))
    for _ in range(2):
        prev_on = sweep_single_period(build(prev_on, prev_demand)).committed
    return build(prev_on, demand)


def _run_oracle_compare(args, cfg, outdir):
    from .testing import sweep_single_period

    rng = np.random.default_rng(args.seed)
    gaps = []
    while len(gaps) < args.instances:
        problem = random_oracle_instance(rng, args.units)
        oracle = exhaustive_uc(problem)
        if not oracle.feasible:
            continue
        sweep_obj = sweep_single_period(problem, cfg).objective
        gaps.append(gap(sweep_obj, oracle))
    gaps = np.array(gaps)
    print(f"{len(gaps)} feasible instances; max gap {np.max(gaps):.4%}, "
          f"median gap {np.median(gaps):.4%}")
    with open(os.path.join(outdir, "oracle_gaps.json"), "w") as f:
        json.dump({"gaps": gaps.tolist()}, f, indent=1)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
