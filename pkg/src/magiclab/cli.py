"""Command line interface.

Subcommands: sweep (Monte Carlo order-parameter sweeps), sp-prob (TCB
purification records), perc (percolation statistics or the analytic
critical point), collapse (finite-size scaling fit of a sweep CSV) and
validate (oracle equivalence suites).  Exit codes: 0 success, 1 runtime
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="magiclab")
    sub = ap.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="run a Monte Carlo sweep")
    sw.add_argument("--config", help="JSON config file (keys = ExperimentConfig fields)")
    sw.add_argument("--kind", choices=["sweep_p_fixed_qD", "sweep_p_fixed_q", "sweep_alpha"])
    sw.add_argument("--seed", type=int)
    sw.add_argument("--threads", type=int)
    sw.add_argument("--realizations", type=int)
    sw.add_argument("--out")

    sp = sub.add_parser("sp-prob", help="stabilizer purification experiment")
    sp.add_argument("--n", type=int, nargs="+", default=[8, 10, 12])
    sp.add_argument("--p", type=float, default=0.1)
    sp.add_argument("--shots", type=int, default=2000)
    sp.add_argument("--d-max", type=int, default=120)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--out", default="sp.csv")

    pc = sub.add_parser("perc", help="percolation statistics / critical point")
    pc.add_argument("--sigma", type=float, default=0.05)
    pc.add_argument("--solve", action="store_true", help="print the analytic critical rate")
    pc.add_argument("--sizes", type=int, nargs="+", default=[32, 64, 128, 256])
    pc.add_argument("--p-grid", type=float, nargs="+",
                    default=[0.42, 0.44, 0.46, 0.48, 0.50, 0.52, 0.54])
    pc.add_argument("--realizations", type=int, default=200)
    pc.add_argument("--seed", type=int, default=1)
    pc.add_argument("--out", default="perc.csv")

    co = sub.add_parser("collapse", help="finite-size scaling fit")
    co.add_argument("--in", dest="infile", required=True)
    co.add_argument("--control", choices=["p", "alpha"], default="p")
    co.add_argument("--range", type=float, nargs=2, default=None,
                    help="search window for the critical point")
    co.add_argument("--out", help="write the fit as JSON")

    va = sub.add_parser("validate", help="oracle equivalence suites")
    va.add_argument("--max-n", type=int, default=6)
    va.add_argument("--instances", type=int, default=50)
    va.add_argument("--seed", type=int, default=7)
    return ap


def cmd_sweep(args) -> int:
    from .harness import ExperimentConfig, run_sweep, write_csv, SWEEP_HEADER

    if args.config:
        try:
            config = ExperimentConfig.from_file(args.config)
        except FileNotFoundError:
            print(f"config file not found: {args.config}", file=sys.stderr)
            return 2
        except (json.JSONDecodeError, ValueError) as ex:
            print(f"bad config: {ex}", file=sys.stderr)
            return 2
    else:
        config = ExperimentConfig()
    for key in ("kind", "seed", "threads", "realizations", "out"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(config, key, val)
    t0 = time.time()
    lines = run_sweep(config, progress=_progress)
    write_csv(config.out, SWEEP_HEADER, lines, config, time.time() - t0)
    print(f"\nwrote {len(lines)} rows to {config.out}")
    return 0


def _progress(done, total):
    if done % 50 == 0 or done == total:
        print(f"\r{done}/{total}", end="", file=sys.stderr, flush=True)


def cmd_sp(args) -> int:
    from .harness import SP_HEADER, run_sp, write_csv

    lines = run_sp(args.n, args.p, args.shots, args.d_max, args.seed)
    write_csv(args.out, SP_HEADER, lines)
    print(f"wrote {len(lines)} rows to {args.out}")
    return 0


def cmd_perc(args) -> int:
    from .percolation import critical_p_tn
    from .harness import PERC_HEADER, run_perc, write_csv

    if args.solve:
        print(f"{critical_p_tn(args.sigma):.4f}")
        return 0
    lines = run_perc(args.sizes, args.p_grid, args.sigma, args.realizations, args.seed)
    write_csv(args.out, PERC_HEADER, lines)
    print(f"wrote {len(lines)} rows to {args.out}")
    return 0


def cmd_collapse(args) -> int:
    from .harness import aggregate_sweep, fss_collapse

    try:
        with open(args.infile) as fh:
            lines = fh.read().splitlines()
    except FileNotFoundError:
        print(f"input not found: {args.infile}", file=sys.stderr)
        return 2
    points = aggregate_sweep(lines[1:], control=args.control)
    xs = sorted({x for _, x, _, _ in points})
    rng = args.range or (min(xs), max(xs))
    res = fss_collapse(points, tuple(rng))
    out = {
        "control": args.control,
        "critical": res.critical,
        "nu": res.nu,
        "quality": res.quality,
        "critical_err": res.critical_err,
        "nu_err": res.nu_err,
    }
    print(json.dumps(out, indent=2))
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(out, fh, indent=2)
            fh.write("\n")
    return 0


def cmd_validate(args) -> int:
    from .verify import distribution_check, random_instance, theorem1_check

    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for i in range(args.instances):
        inst = random_instance(rng, n_max=args.max_n)
        tv = distribution_check(inst)
        worst = max(worst, tv)
        if tv > 1e-9:
            print(f"FAIL distribution equivalence: instance {i}, TV {tv:.3e}")
            return 1
        if not theorem1_check(inst):
            print(f"FAIL stabilizerness equivalence: instance {i}")
            return 1
    print(f"validate: {args.instances} instances ok, worst TV {worst:.3e}")
    return 0


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as ex:
        return ex.code if isinstance(ex.code, int) else 2
    handlers = {
        "sweep": cmd_sweep,
        "sp-prob": cmd_sp,
        "perc": cmd_perc,
        "collapse": cmd_collapse,
        "validate": cmd_validate,
    }
    try:
        return handlers[args.command](args)
    except KeyboardInterrupt:
        return 1
    except Exception as ex:  # runtime failure contract
        print(f"error: {ex}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
