"""Command-line front end: run catalog experiments and the self-check suite.

Exit codes: 0 all runs converged (or finished feasible), 1 some run exhausted
its budget while infeasible, 2 usage or configuration error, 3 divergence.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import harness, pnm
from .solver import CONVERGED, DivergenceError

__all__ = ["main", "parse_config", "write_run_outputs", "ConfigError"]

_ENV_OUT = "BALLAST_OUT"

_CONFIG_KEYS = {
    "experiment": str,
    "name": str,
    "size": int,
    "seed": int,
    "lines": int,
    "mu": float,
    "epsilon": float,
    "sigma": float,
    "iterations": int,
    "kernel": str,
}


class ConfigError(ValueError):
    pass


def parse_config(path):
    """Read a flat ``key = value`` file (# comments, blank lines allowed)."""
    settings = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _CONFIG_KEYS:
                raise ConfigError(
                    f"{path}:{lineno}: unknown key {key!r} "
                    f"(valid: {', '.join(sorted(_CONFIG_KEYS))})"
                )
            if key in settings:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            caster = _CONFIG_KEYS[key]
            try:
                settings[key] = caster(value)
            except ValueError:
                raise ConfigError(
                    f"{path}:{lineno}: cannot parse {value!r} as {caster.__name__}"
                ) from None
    if "experiment" not in settings:
        raise ConfigError(f"{path}: missing required key 'experiment'")
    return settings


def _fmt(x):
    return repr(float(x))


def write_run_outputs(report, run_dir, partial=False):
    """Write history.csv, timing.csv, summary.json, and the image files.

    Wall-clock times go only into timing.csv, so every other artifact is
    byte-identical across repeat runs of the same configuration.
    """
    os.makedirs(run_dir, exist_ok=True)
    paths = {}

    hist_path = os.path.join(run_dir, "history.csv")
    with open(hist_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("k,objective,constraint_norm,primal_residual,mse\n")
        for rec in report.history:
            fh.write(
                f"{rec.k},{_fmt(rec.objective)},{_fmt(rec.constraint_norm)},"
                f"{_fmt(rec.primal_residual)},{_fmt(rec.mse)}\n"
            )
    paths["history"] = "history.csv"

    timing_path = os.path.join(run_dir, "timing.csv")
    with open(timing_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("k,wall_time_s\n")
        for rec in report.history:
            fh.write(f"{rec.k},{_fmt(rec.wall_time)}\n")
    paths["timing"] = "timing.csv"

    inst = report.instance
    vmin = float(np.min(inst.truth))
    vmax = float(np.max(inst.truth))
    truth_q, _, _ = pnm.quantize_u16(inst.truth, vmin, vmax)
    pnm.write_pgm16(os.path.join(run_dir, "truth.pgm"), truth_q)
    paths["truth"] = "truth.pgm"

    if report.estimate is not None:
        est = report.estimate
        if np.iscomplexobj(est):
            est = np.abs(est)
        est_q, _, _ = pnm.quantize_u16(est, vmin, vmax)
        pnm.write_pgm16(os.path.join(run_dir, "reconstruction.pgm"), est_q)
        paths["reconstruction"] = "reconstruction.pgm"

    if inst.degraded is not None and np.shape(inst.degraded) == np.shape(inst.truth):
        deg = inst.degraded
        if np.iscomplexobj(deg):
            deg = np.abs(deg)
        deg_q, _, _ = pnm.quantize_u16(deg, vmin, vmax)
        pnm.write_pgm16(os.path.join(run_dir, "degraded.pgm"), deg_q)
        paths["degraded"] = "degraded.pgm"

    mask = inst.extras.get("mask")
    if mask is not None and getattr(mask, "dtype", None) == np.dtype(bool):
        pnm.write_pbm(os.path.join(run_dir, "mask.pbm"), mask)
        paths["mask"] = "mask.pbm"

    paths["summary"] = "summary.json"
    summary = {
        "name": report.name,
        "formulation": report.formulation,
        "penalty": report.penalty_kind,
        "status": report.status,
        "partial": bool(partial),
        "iterations": report.iterations,
        "epsilon": report.epsilon,
        "sigma": report.sigma,
        "mu": report.config.mu,
        "max_iterations": report.config.max_iterations,
        "seed": inst.seed,
        "final": {
            "objective": report.final_objective,
            "constraint_norm": report.final_constraint_norm,
            "mse": report.final_mse,
            "degraded_mse": report.degraded_mse,
            "isnr_db": report.isnr_db,
            "relative_error": report.relative_error,
        },
        "operator_calls": {
            "forward": report.forward_calls,
            "adjoint": report.adjoint_calls,
        },
        "quantization": {"vmin": vmin, "vmax": vmax},
        "files": paths,
    }
    with open(os.path.join(run_dir, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")
    return paths


def _execute_run(spec):
    """Worker for one run; returns a plain dict so it survives pickling."""
    name = spec["experiment"]
    run_dir = spec["run_dir"]
    try:
        setup = harness.build_experiment(
            name,
            size=spec.get("size"),
            seed=spec.get("seed", 0),
            lines=spec.get("lines"),
            mu=spec.get("mu"),
            iterations=spec.get("iterations"),
            epsilon=spec.get("epsilon"),
            sigma=spec.get("sigma"),
            kernel=spec.get("kernel"),
        )
    except (KeyError, ValueError) as exc:
        return {"name": name, "status": "error", "message": str(exc), "exit": 2}
    try:
        report = harness.run_experiment(setup)
    except DivergenceError as exc:
        # keep whatever history exists so the blow-up can be inspected
        os.makedirs(run_dir, exist_ok=True)
        with open(os.path.join(run_dir, "history.csv"), "w", encoding="utf-8",
                  newline="\n") as fh:
            fh.write("k,objective,constraint_norm,primal_residual,mse\n")
            for rec in exc.history:
                fh.write(
                    f"{rec.k},{_fmt(rec.objective)},{_fmt(rec.constraint_norm)},"
                    f"{_fmt(rec.primal_residual)},{_fmt(rec.mse)}\n"
                )
        with open(os.path.join(run_dir, "summary.json"), "w", encoding="utf-8") as fh:
            json.dump(
                {"name": spec.get("name") or setup.name, "status": "diverged",
                 "partial": True, "message": str(exc),
                 "iterations": len(exc.history)},
                fh, indent=2, sort_keys=True,
            )
            fh.write("\n")
        return {
            "name": spec.get("name") or setup.name,
            "status": "diverged",
            "message": str(exc),
            "exit": 3,
            "run_dir": run_dir,
        }
    run_name = spec.get("name") or setup.name
    write_run_outputs(report, run_dir)
    feasible = report.final_constraint_norm <= (
        (1.0 + report.config.feasibility_slack) * report.epsilon
    )
    if report.status == CONVERGED or feasible:
        code = 0
    else:
        code = 1
    return {
        "name": run_name,
        "status": report.status,
        "iterations": report.iterations,
        "mse": report.final_mse,
        "constraint": report.final_constraint_norm,
        "epsilon": report.epsilon,
        "run_dir": run_dir,
        "exit": code,
    }


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ballast",
        description="Constrained ADMM solvers for imaging inverse problems.",
    )
    parser.add_argument(
        "--validate", action="store_true",
        help="run the self-check suite (same as the 'validate' subcommand)",
    )
    sub = parser.add_subparsers(dest="command")

    run = sub.add_parser("run", help="run one or more catalog experiments")
    run.add_argument("--experiment", help="catalog experiment name")
    run.add_argument(
        "--config", action="append", default=[], metavar="FILE",
        help="flat key=value config file; repeatable, one run per file",
    )
    run.add_argument("--mu", type=float, help="override the ADMM penalty weight")
    run.add_argument("--epsilon", type=float, help="override the constraint radius")
    run.add_argument("--iterations", type=int, help="override the iteration budget")
    run.add_argument("--seed", type=int, help="noise/geometry seed (default 0)")
    run.add_argument("--size", type=int, help="image side length")
    run.add_argument("--lines", type=int, help="radial sampling lines (Fourier runs)")
    run.add_argument("--sigma", type=float, help="override the noise level")
    run.add_argument("--kernel", help="override the blur kernel family (deblur runs)")
    run.add_argument("--jobs", type=int, default=1, help="run this many configs in parallel")
    run.add_argument("--out", help=f"output root (default from ${_ENV_OUT} or ./runs)")
    run.add_argument("--overwrite", action="store_true",
                     help="allow replacing an existing run directory")
    run.add_argument("--list", action="store_true", help="list experiment names and exit")

    sub.add_parser("validate", help="run the self-check suite")
    return parser


def _cmd_validate():
    from .validate import run_suite

    ok, results, elapsed = run_suite()
    for res in results:
        print(res)
    print(f"{'OK' if ok else 'FAILED'} ({len(results)} checks, {elapsed:.1f}s)")
    if elapsed > 60.0:
        print(f"warning: validate suite took {elapsed:.1f}s (budget 60s)",
              file=sys.stderr)
    return 0 if ok else 1


def _cmd_run(args, parser):
    if args.list:
        for name in harness.experiment_names():
            print(name)
        return 0
    specs = []
    for cfg_path in args.config:
        try:
            settings = parse_config(cfg_path)
        except (OSError, ConfigError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        specs.append(settings)
    if args.experiment:
        specs.append({"experiment": args.experiment})
    if not specs:
        print("error: nothing to run; pass --experiment or --config", file=sys.stderr)
        return 2

    overrides = {
        key: getattr(args, key)
        for key in ("mu", "epsilon", "iterations", "size", "lines", "sigma", "kernel")
        if getattr(args, key) is not None
    }
    out_root = args.out or os.environ.get(_ENV_OUT) or "runs"
    for spec in specs:
        spec.update(overrides)
        if args.seed is not None:
            spec["seed"] = args.seed
        else:
            spec.setdefault("seed", 0)
        spec["experiment"] = harness.canonical_experiment_name(spec["experiment"])
        if spec["experiment"] not in harness.EXPERIMENTS:
            print(
                f"error: unknown experiment {spec['experiment']!r} "
                f"(see 'ballast run --list')",
                file=sys.stderr,
            )
            return 2
        run_name = spec.get("name") or spec["experiment"]
        spec["run_dir"] = os.path.join(out_root, run_name)

    dirs = [spec["run_dir"] for spec in specs]
    if len(set(dirs)) != len(dirs):
        print("error: two runs target the same output directory; set distinct names",
              file=sys.stderr)
        return 2
    if not args.overwrite:
        for d in dirs:
            if os.path.exists(os.path.join(d, "summary.json")):
                print(
                    f"error: {d} already holds a run; pass --overwrite to replace it",
                    file=sys.stderr,
                )
                return 2

    if args.jobs > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(_execute_run, specs))
    else:
        outcomes = [_execute_run(spec) for spec in specs]

    worst = 0
    for res in outcomes:
        if res["status"] == "error":
            print(f"{res['name']}: error: {res['message']}", file=sys.stderr)
        elif res["status"] == "diverged":
            print(f"{res['name']}: diverged: {res['message']}", file=sys.stderr)
        else:
            print(
                f"{res['name']}: {res['status']} after {res['iterations']} iterations, "
                f"mse={res['mse']:.4g}, constraint={res['constraint']:.4g} "
                f"(epsilon={res['epsilon']:.4g}) -> {res['run_dir']}"
            )
        worst = max(worst, res["exit"])
    return worst


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    if argv and argv[0] in ("run", "validate"):
        args = parser.parse_args(argv)
    else:
        args = parser.parse_args(argv)
        if not args.validate:
            parser.print_usage(sys.stderr)
            print("error: pass a subcommand ('run' or 'validate') or --validate",
                  file=sys.stderr)
            return 2
        args.command = "validate"
    if args.command == "validate" or (args.command is None and args.validate):
        return _cmd_validate()
    if args.command == "run":
        return _cmd_run(args, parser)
    parser.print_usage(sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
