"""Command-line interface: simulate, fit, test, mixing, reconstruct, study.

Configs are strict JSON (unknown keys fail loudly), every JSON output embeds
the fully resolved config and seed, and CSV outputs get a `<name>.meta.json`
provenance sidecar.  Exit codes: 0 success, 2 config/validation error,
1 runtime error.  Test decisions are data in the output JSON, never exit
status.  Seed precedence: --seed flag > CPK_SEED env > config value.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from .coupling import coalescence_experiment
from .estimate import fit_cmle
from .model import ContractionError, IntensitySpec
from .montecarlo import (
    mixing_study,
    moment_study,
    normality_study,
    replicate_seed,
    size_study,
)
from .reconstruct import reconstruction_sweep
from .simulate import Trajectory, read_counts_csv, read_trajectory_csv, simulate, uniform_stream
from .spectest import run_test

DEFAULT_SEED = 0


class CliConfigError(ValueError):
    """Configuration or validation problem: maps to exit code 2."""


def _load_json(path: str) -> dict:
    if not os.path.exists(path):
        raise CliConfigError(f"missing file: {path}")
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise CliConfigError(f"invalid JSON in {path}: {exc}") from exc


def _strict_keys(obj: dict, allowed: set, context: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise CliConfigError(f"unknown keys in {context}: {sorted(unknown)}")


def _spec_from_obj(obj: dict) -> IntensitySpec:
    try:
        return IntensitySpec.from_json_dict(obj)
    except ContractionError:
        raise
    except ValueError as exc:
        raise CliConfigError(str(exc)) from exc


def _load_run_config(path: str, allowed_extra: set) -> tuple[IntensitySpec, dict]:
    """Accept either a bare intensity-spec JSON or {'spec': ..., <run keys>}."""
    obj = _load_json(path)
    if "family" in obj:
        spec = _spec_from_obj(obj)
        return spec, {}
    _strict_keys(obj, {"spec"} | allowed_extra, path)
    if "spec" not in obj:
        raise CliConfigError(f"config {path} needs a 'spec' object (or be a bare intensity spec)")
    spec = _spec_from_obj(obj["spec"])
    return spec, {k: v for k, v in obj.items() if k != "spec"}


def _resolve_seed(flag_seed, config_seed) -> int:
    if flag_seed is not None:
        return int(flag_seed)
    env = os.environ.get("CPK_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise CliConfigError(f"CPK_SEED must be an integer, got {env!r}") from exc
    if config_seed is not None:
        return int(config_seed)
    return DEFAULT_SEED


def _write_json(path: str, doc: dict) -> None:
    with open(path, "w") as fh:
        fh.write(json.dumps(doc, sort_keys=True, indent=2))
        fh.write("\n")


def _write_meta(out_path: str, command: str, config: dict) -> None:
    _write_json(out_path + ".meta.json", {"command": command, "config": config})


# -- subcommands -----------------------------------------------------------


def _cmd_simulate(args) -> int:
    spec, cfg = _load_run_config(args.config, {"n", "burn_in", "seed", "lambda_start"})
    n = args.n if args.n is not None else cfg.get("n")
    if n is None:
        raise CliConfigError("simulate needs --n or a config 'n'")
    burn_in = args.burn_in if args.burn_in is not None else cfg.get("burn_in", 500)
    lambda_start = args.lambda_start if args.lambda_start is not None else cfg.get("lambda_start")
    seed = _resolve_seed(args.seed, cfg.get("seed"))
    traj = simulate(spec, n=int(n), lambda_start=lambda_start, burn_in=int(burn_in), seed=seed)
    traj.to_csv(args.out)
    _write_meta(args.out, "simulate", {
        "spec": spec.to_json_dict(), "n": int(n), "burn_in": int(burn_in),
        "lambda_start": traj.lambda_start, "seed": seed,
    })
    return 0


def _cmd_fit(args) -> int:
    counts = read_counts_csv(args.counts)
    result = fit_cmle(args.family, counts,
                      options={"lambda_start": args.lambda_start} if args.lambda_start is not None else None)
    doc = result.to_json_dict()
    doc["config"] = {"counts": args.counts, "family": args.family,
                     "lambda_start": args.lambda_start}
    _write_json(args.out, doc)
    return 0


def _cmd_test(args) -> int:
    if (args.family is None) == (args.hypothesis is None):
        raise CliConfigError("test needs exactly one of --family (composite) or --hypothesis (simple)")
    counts = read_counts_csv(args.counts)
    if args.family is not None:
        hypothesis = args.family
        hyp_doc = {"family": args.family}
    else:
        spec = _spec_from_obj(_load_json(args.hypothesis))
        hypothesis = spec
        hyp_doc = spec.to_json_dict()
    report = run_test(counts, hypothesis, alpha=args.alpha, lambda_start=args.lambda_start)
    doc = report.to_json_dict()
    doc["config"] = {"counts": args.counts, "hypothesis": hyp_doc,
                     "alpha": args.alpha, "lambda_start": args.lambda_start}
    _write_json(args.out, doc)
    return 0


def _cmd_mixing(args) -> int:
    spec, cfg = _load_run_config(args.config, {"n_values", "tail", "replicates", "seed",
                                               "pool_size", "burn_in"})
    n_values = [int(v) for v in args.n_values.split(",")] if args.n_values else cfg.get("n_values")
    if not n_values:
        raise CliConfigError("mixing needs --n-values or a config 'n_values'")
    tail = args.tail if args.tail is not None else cfg.get("tail", 50)
    replicates = args.replicates if args.replicates is not None else cfg.get("replicates", 1000)
    seed = _resolve_seed(args.seed, cfg.get("seed"))
    pool_size = int(cfg.get("pool_size", 100_000))
    burn_in = int(cfg.get("burn_in", 500))

    pool = simulate(spec, n=pool_size, burn_in=burn_in, seed=replicate_seed(seed, 0)).intensities
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "empirical_nonconv", "bound", "se", "trunc_err"])
        for j, n in enumerate(n_values):
            rng = uniform_stream(replicate_seed(seed, j + 1))
            res = coalescence_experiment(spec, int(n), int(tail), int(replicates), rng, pool=pool)
            writer.writerow([n, f"{res.estimate:.17g}", f"{res.bound:.17g}",
                             f"{res.se:.17g}", f"{res.trunc_err:.17g}"])
    _write_meta(args.out, "mixing", {
        "spec": spec.to_json_dict(), "n_values": list(map(int, n_values)), "tail": int(tail),
        "replicates": int(replicates), "pool_size": pool_size, "burn_in": burn_in, "seed": seed,
    })
    return 0


def _parse_depths(text: str) -> list[int]:
    depths = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-")
            depths.extend(range(int(lo), int(hi) + 1))
        else:
            depths.append(int(part))
    return depths


def _cmd_reconstruct(args) -> int:
    spec, _ = _load_run_config(args.config, set())
    counts, intensities = read_trajectory_csv(args.traj)
    traj = Trajectory(counts=counts, intensities=intensities, spec=spec,
                      seed=0, burn_in=0, lambda_start=float(intensities[0]))
    rows = reconstruction_sweep(spec, traj, _parse_depths(args.depths))
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["d", "max_err", "bound"])
        for row in rows:
            writer.writerow([row.depth, f"{row.max_abs_error:.17g}", f"{row.bound:.17g}"])
    _write_meta(args.out, "reconstruct", {
        "spec": spec.to_json_dict(), "traj": args.traj, "depths": _parse_depths(args.depths),
    })
    return 0


_STUDY_KEYS = {
    "size": {"study", "family", "truth", "n", "replicates", "alpha", "seed", "burn_in"},
    "normality": {"study", "family", "truth", "n", "replicates", "mode", "seed", "burn_in"},
    "mixing": {"study", "spec", "n_values", "tail", "replicates", "seed", "pool_size", "burn_in"},
    "moment": {"study", "spec", "n", "kappa_bar", "seed", "burn_in", "batches"},
}


def _theta_from_truth(family: str, truth: dict) -> tuple:
    spec = _spec_from_obj({"family": family, "params": truth})
    return spec.params


def _cmd_study(args) -> int:
    cfg = _load_json(args.config)
    kind = cfg.get("study")
    if kind not in _STUDY_KEYS:
        raise CliConfigError(f"config 'study' must be one of {sorted(_STUDY_KEYS)}, got {kind!r}")
    _strict_keys(cfg, _STUDY_KEYS[kind], args.config)
    seed = _resolve_seed(args.seed, cfg.get("seed"))
    threads = args.threads

    try:
        if kind == "size":
            theta0 = _theta_from_truth(cfg["family"], cfg["truth"])
            summary = size_study(cfg["family"], theta0, int(cfg["n"]), int(cfg["replicates"]),
                                 float(cfg["alpha"]), seed, burn_in=int(cfg.get("burn_in", 500)),
                                 threads=threads)
        elif kind == "normality":
            theta0 = _theta_from_truth(cfg["family"], cfg["truth"])
            summary = normality_study(cfg["family"], theta0, int(cfg["n"]), int(cfg["replicates"]),
                                      seed, mode=cfg.get("mode", "oracle"),
                                      burn_in=int(cfg.get("burn_in", 500)), threads=threads)
        elif kind == "mixing":
            spec = _spec_from_obj(cfg["spec"])
            summary = mixing_study(spec, cfg["n_values"], int(cfg.get("tail", 50)),
                                   int(cfg["replicates"]), seed,
                                   pool_size=int(cfg.get("pool_size", 100_000)),
                                   burn_in=int(cfg.get("burn_in", 500)))
        else:
            spec = _spec_from_obj(cfg["spec"])
            summary = moment_study(spec, int(cfg["n"]), seed, float(cfg["kappa_bar"]),
                                   burn_in=int(cfg.get("burn_in", 500)),
                                   batches=int(cfg.get("batches", 100)))
    except KeyError as exc:
        raise CliConfigError(f"study config missing key: {exc}") from exc

    with open(args.out, "w") as fh:
        fh.write(summary.to_json())
        fh.write("\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cpk", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a trajectory to CSV")
    p.add_argument("--config", required=True, help="intensity spec (or full run config) JSON")
    p.add_argument("--n", type=int)
    p.add_argument("--burn-in", dest="burn_in", type=int)
    p.add_argument("--lambda-start", dest="lambda_start", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fit", help="conditional ML fit from a counts CSV")
    p.add_argument("--counts", required=True)
    p.add_argument("--family", required=True, choices=["linear", "expar", "fractional"])
    p.add_argument("--lambda-start", dest="lambda_start", type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("test", help="specification test from a counts CSV")
    p.add_argument("--counts", required=True)
    p.add_argument("--family", choices=["linear", "expar", "fractional"],
                   help="composite hypothesis: fit this family first")
    p.add_argument("--hypothesis", help="simple hypothesis: intensity spec JSON path")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--lambda-start", dest="lambda_start", type=float)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_test)

    p = sub.add_parser("mixing", help="coalescence frequencies vs the mixing bound")
    p.add_argument("--config", required=True)
    p.add_argument("--n-values", dest="n_values", help="comma-separated gaps, e.g. 5,10,20")
    p.add_argument("--tail", type=int)
    p.add_argument("--replicates", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mixing)

    p = sub.add_parser("reconstruct", help="depth sweep of intensity reconstruction errors")
    p.add_argument("--traj", required=True, help="trajectory CSV (t,N,lambda)")
    p.add_argument("--config", required=True, help="intensity spec JSON")
    p.add_argument("--depths", default="1-20", help="e.g. 1-20 or 1,2,5,10")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("study", help="run a Monte Carlo study from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, default=os.cpu_count())
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_study)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliConfigError, ContractionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: missing file: {exc.filename}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())
