"""``adabkb-bench`` command-line entry point."""
import argparse
import json
import logging
import sys

from .experiment import ALGORITHMS, ConfigError, RunConfig, run_experiment
from .objectives import registry_lookup, registry_names

# RunConfig fields that may come from flags
_FIELDS = ("algorithm", "objective", "external_cmd", "bounds", "budget", "reps", "seed",
           "lengthscale", "lam", "noise_sigma", "F", "delta", "epsilon", "beta_lambda_exponent",
           "N", "h_max", "qbar",
           "grid_points_per_dim", "random_grid_size", "time_threshold_secs", "external_timeout",
           "assume_zero_optimum", "continue_after_stop", "check_leaf_bound", "out")


def _parse_lengthscale(text):
    parts = [float(v) for v in text.split(",") if v.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("empty lengthscale")
    return parts[0] if len(parts) == 1 else parts


def _parse_bounds(text):
    """``lo:hi,lo:hi,...`` or a JSON list of pairs."""
    try:
        if text.lstrip().startswith("["):
            pairs = json.loads(text)
        else:
            pairs = [[float(v) for v in item.split(":")] for item in text.split(",")]
        if not pairs or any(len(p) != 2 for p in pairs):
            raise ValueError
        return [[float(a), float(b)] for a, b in pairs]
    except (ValueError, TypeError, json.JSONDecodeError):
        raise argparse.ArgumentTypeError(f"bad bounds {text!r}; use lo:hi,lo:hi") from None


def build_parser():
    ap = argparse.ArgumentParser(prog="adabkb-bench", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment")
    run.add_argument("--config", help="flat JSON config; flags given explicitly override it")
    run.add_argument("--algorithm", choices=ALGORITHMS)
    src = run.add_mutually_exclusive_group()
    src.add_argument("--objective")
    src.add_argument("--external-cmd")
    run.add_argument("--bounds", type=_parse_bounds, help="box for --external-cmd, e.g. -5:10,0:15")
    run.add_argument("--budget", type=int)
    run.add_argument("--reps", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--lengthscale", type=_parse_lengthscale,
                     help="one value, or comma-separated per-dimension values for ARD")
    run.add_argument("--lambda", dest="lam", type=float)
    run.add_argument("--noise-sigma", type=float)
    run.add_argument("--F", type=float)
    run.add_argument("--delta", type=float)
    run.add_argument("--epsilon", type=float)
    run.add_argument("--beta-lambda-exponent", type=int, choices=(1, 2),
                     help="power of lambda in the confidence width (default 2)")
    run.add_argument("--N", type=int)
    run.add_argument("--h-max", type=int)
    run.add_argument("--qbar", type=float)
    run.add_argument("--grid-points-per-dim", type=int)
    run.add_argument("--random-grid-size", type=int)
    run.add_argument("--time-threshold-secs", type=float)
    run.add_argument("--external-timeout", type=float)
    run.add_argument("--assume-zero-optimum", action="store_true", default=None)
    run.add_argument("--continue-after-stop", action="store_true", default=None)
    run.add_argument("--no-leaf-bound-check", dest="check_leaf_bound", action="store_false",
                     default=None, help="do not abort when the leaf set exceeds T*N*h_max")
    run.add_argument("--out")

    sub.add_parser("list-objectives", help="list registered objectives")

    val = sub.add_parser("validate-config", help="check a config file without running it")
    val.add_argument("config")
    return ap


def _config_from_args(args):
    data = {}
    if args.config:
        data = json.loads(open(args.config, encoding="utf-8").read())
        if not isinstance(data, dict):
            raise ConfigError("config must be a flat JSON object")
    # a source given on the command line replaces the one from the file
    if args.objective is not None:
        data.pop("external_cmd", None)
    if args.external_cmd is not None:
        data.pop("objective", None)
    for name in _FIELDS:
        value = getattr(args, name)
        if value is not None:
            data[name] = value
    return RunConfig.from_mapping(data)


def _report(summary, out):
    steps = summary["steps"]
    for run in summary["runs"]:
        status = "FAILED " + run["failed"] if run["failed"] else run["stop_reason"]
        if run["truncated"]:
            status += " (truncated)"
        print(f"seed {run['seed']}: {run['evaluations']} evaluations, "
              f"{run['total_time']:.2f}s, {status}", file=out)
    if steps:
        last = steps[-1]
        if "avg_regret_mean" in last:
            ci = last["avg_regret_ci"]
            ci = f" +- {ci:.4g}" if ci is not None else ""
            print(f"average regret at t={last['t']}: {last['avg_regret_mean']:.6g}{ci}", file=out)
        print(f"best f at t={last['t']}: {last['best_f_mean']:.6g}", file=out)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "list-objectives":
            for name in registry_names():
                obj = registry_lookup(name)
                sides = [f"[{a:g}, {b:g}]" for a, b in zip(obj.domain.lower, obj.domain.upper)]
                box = f"{sides[0]}^{obj.dim}" if len(set(sides)) == 1 else " x ".join(sides)
                print(f"{name}\tdim={obj.dim}\toptimum={obj.known_optimum}\t{box}")
            return 0
        if args.command == "validate-config":
            cfg = RunConfig.from_file(args.config)
            print(json.dumps(cfg.to_dict(), indent=2))
            return 0
        cfg = _config_from_args(args)
        summary, _ = run_experiment(cfg)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _report(summary, sys.stdout)
    return 1 if all(r["failed"] for r in summary["runs"]) else 0


if __name__ == "__main__":
    sys.exit(main())
