"""Command-line front end: ``ymhk run|gradcheck|oracle|green|scale|diag``.

Exit codes: 0 success / check passed, 1 check failed, 2 usage or config
error, 3 flow aborted on non-finite values.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import platform
import sys
import time
from pathlib import Path

import numpy as np

from ymhk import __version__, checks
from ymhk.config import ConfigError, load_config, with_overrides
from ymhk.diagnostics import dump_report
from ymhk.flow import FlowAborted, run
from ymhk.io import save_state

log = logging.getLogger("ymhk")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NAN = 0, 1, 2, 3


def _out_dir(args, cfg=None) -> Path | None:
    d = args.out_dir or (cfg.out_dir if cfg is not None else "") or os.environ.get("YMHK_OUT_DIR", "")
    return Path(d) if d else None


def _emit(reports: list[dict], out_dir: Path | None, stem: str) -> int:
    for rep in reports:
        print(dump_report(rep))
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        payload = reports[0] if len(reports) == 1 else reports
        (out_dir / f"{stem}.json").write_text(json.dumps(payload, indent=2, sort_keys=True, default=float) + "\n")
    return EXIT_OK if all(r["pass"] for r in reports) else EXIT_FAIL


def cmd_run(args) -> int:
    try:
        cfg = with_overrides(load_config(args.config), seed=args.seed)
        fc = cfg.flow_config()
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = _out_dir(args, cfg)
    if args.dry_run:
        print(f"config {args.config} ok: {cfg.group} N={cfg.N} k={cfg.k} t_end={fc.t_end:g} dt_max={fc.dt_max:g}")
        return EXIT_OK
    if out is None:
        print("error: no output directory (use --out-dir, out_dir in the config, or YMHK_OUT_DIR)", file=sys.stderr)
        return EXIT_USAGE
    out.mkdir(parents=True, exist_ok=True)

    def snapshot(state, nstep):
        save_state(out / f"snap_{nstep:06d}.bin", state)

    manifest = {
        "config": cfg.as_dict(),
        "config_path": str(args.config),
        "seed": cfg.seed,
        "workers": args.workers,
        "versions": {"ymhk": __version__, "numpy": np.__version__, "python": platform.python_version()},
    }
    t0 = time.perf_counter()
    status = EXIT_OK
    try:
        final, traj = run(cfg.initial_state(), fc, on_snapshot=snapshot)
        save_state(out / "final.bin", final)
        manifest.update(status="ok", t_final=final.t, last_good_t=final.t)
    except FlowAborted as exc:
        traj = exc.trajectory
        save_state(out / "aborted.bin", exc.state)
        manifest.update(status="nan_abort", message=str(exc), last_good_t=exc.state.t)
        status = EXIT_NAN
    if traj is not None:
        traj.to_csv(out / "trajectory.csv")
        manifest.update(records=len(traj), rejected_steps=traj.rejected_steps, flags=traj.flags)
    manifest["wall_time_s"] = time.perf_counter() - t0
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True, default=float) + "\n")
    return status


def cmd_gradcheck(args) -> int:
    if not 3 <= args.N <= 6 or args.k < 0:
        print("error: gradcheck needs 3 <= N <= 6 and k >= 0", file=sys.stderr)
        return EXIT_USAGE
    return _emit([checks.gradcheck(args.group, args.k, args.N, args.seed)], _out_dir(args), "gradcheck")


def cmd_oracle(args) -> int:
    try:
        cfg = with_overrides(load_config(args.config), seed=args.seed)
        rep = checks.oracle(cfg)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return _emit([rep], _out_dir(args, cfg), "oracle")


def cmd_green(args) -> int:
    if args.N < 3:
        print("error: N must be >= 3", file=sys.stderr)
        return EXIT_USAGE
    return _emit([checks.green(args.N)], _out_dir(args), "green")


def cmd_scale(args) -> int:
    if args.m < 2 or args.k < 0:
        print("error: need m >= 2 and k >= 0", file=sys.stderr)
        return EXIT_USAGE
    return _emit([checks.scaling(args.k, args.m, args.seed, fd=args.fd)], _out_dir(args), "scale")


def cmd_diag(args) -> int:
    try:
        reports = checks.run_suite(args.suite)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    return _emit(reports, _out_dir(args), f"diag_{args.suite}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default=None, help="output directory (fallback: YMHK_OUT_DIR)")
    common.add_argument("--workers", type=int, default=1, help="inner data-parallel workers")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="ymhk", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", parents=[common], help="run the flow from a config file")
    r.add_argument("--config", required=True)
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--dry-run", action="store_true", help="validate the config and exit")
    r.set_defaults(func=cmd_run)

    g = sub.add_parser("gradcheck", parents=[common], help="adjoint gradient vs finite differences")
    g.add_argument("group", choices=["U1", "SU2"])
    g.add_argument("k", type=int)
    g.add_argument("N", type=int)
    g.add_argument("seed", type=int)
    g.set_defaults(func=cmd_gradcheck)

    o = sub.add_parser("oracle", parents=[common], help="RK4 run vs closed-form U1 flow")
    o.add_argument("--config", required=True)
    o.add_argument("--seed", type=int, default=None)
    o.set_defaults(func=cmd_oracle)

    gr = sub.add_parser("green", parents=[common], help="Green function and oscillation identity")
    gr.add_argument("N", type=int)
    gr.set_defaults(func=cmd_green)

    s = sub.add_parser("scale", parents=[common], help="scaling-law commutation check")
    s.add_argument("k", type=int)
    s.add_argument("m", type=int)
    s.add_argument("seed", type=int)
    s.add_argument("--fd", action="store_true", help="also run the lattice refinement study")
    s.set_defaults(func=cmd_scale)

    d = sub.add_parser("diag", parents=[common], help="run a diagnostic suite")
    d.add_argument("suite", help=f"one of {sorted(checks.SUITES)} or 'all'")
    d.set_defaults(func=cmd_diag)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
