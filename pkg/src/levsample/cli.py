"""Command-line driver: data generation, leverage computation, single solves,
Monte Carlo experiment grids, and timing benchmarks.

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O failure.
Logs go to stderr; data goes to files or stdout.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import os
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, io
from .datagen import (
    DEFAULT_SIGMA2,
    DesignSpec,
    default_beta,
    gen_design,
    gen_response,
    leverage_summary,
)
from .fastlev import ApproxLeverageConfig, SketchRankError, approx_leverage, timing_benchmark
from .linalg import RegressionProblem, leverage_scores_exact, solve_ols, solve_wls
from .sampling import build_distribution
from .stats import run_conditional, run_unconditional

log = logging.getLogger("levsample")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


class ConfigError(ValueError):
    pass


def _parse_sizes(text: str) -> list[tuple[int, int]]:
    sizes = []
    for part in text.split(","):
        try:
            n, p = part.lower().split("x")
            sizes.append((int(n), int(p)))
        except ValueError as err:
            raise ConfigError(f"bad size {part!r}, expected NxP") from err
    return sizes


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="levsample")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-data", help="generate a synthetic design + response")
    g.add_argument("--family", required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--df", type=int, default=None)
    g.add_argument("--keep", type=int, default=None)
    g.add_argument("--sigma2", type=float, default=DEFAULT_SIGMA2)
    g.add_argument("--out", required=True)

    lv = sub.add_parser("leverage", help="exact or approximate leverage scores")
    lv.add_argument("--input", required=True)
    lv.add_argument("--method", choices=("exact", "bfast", "gfast"), default="exact")
    lv.add_argument("--r1", type=int, default=None)
    lv.add_argument("--r2", type=int, default=None)
    lv.add_argument("--seed", type=int, default=0)
    lv.add_argument("--out", default=None)

    sv = sub.add_parser("solve", help="full-sample OLS/WLS solve")
    sv.add_argument("--input", required=True)
    sv.add_argument("--response", required=True)
    sv.add_argument("--weights", default=None)

    ex = sub.add_parser("experiment", help="run a bias/variance experiment grid")
    ex.add_argument("--config", required=True)
    ex.add_argument("--seed", type=int, default=None, help="override master_seed")
    ex.add_argument("--threads", type=int, default=None)
    ex.add_argument("--out", default=None, help="override output_dir")

    b = sub.add_parser("bench", help="exact vs approximate leverage timings")
    b.add_argument("--sizes", required=True, help="e.g. 100x10,500x20")
    b.add_argument("--methods", default="exact,bfast,gfast")
    b.add_argument("--reps", type=int, default=3)
    b.add_argument("--r1", type=int, default=None)
    b.add_argument("--r2", type=int, default=None)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", required=True)
    return parser


def cmd_gen_data(args) -> int:
    spec = DesignSpec(
        family=args.family, n=args.n, p=args.p, seed=args.seed, df=args.df, keep=args.keep
    )
    X = gen_design(spec)
    beta0 = default_beta(X.shape[1])
    y = gen_response(X, beta0, args.sigma2, seed=np.random.SeedSequence(args.seed, spawn_key=(1,)))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "design_csv": "design.csv",
        "design_bin": "design.bin",
        "response": "response.csv",
        "beta0": "beta0.csv",
    }
    io.save_matrix_csv(X, out / files["design_csv"])
    io.save_matrix_bin(X, out / files["design_bin"])
    io.save_vector_csv(y, out / files["response"])
    io.save_vector_csv(beta0, out / files["beta0"])
    manifest = {
        "family": spec.family,
        "n": spec.n,
        "p": X.shape[1],
        "seed": spec.seed,
        "sigma2": args.sigma2,
        "files": files,
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    log.info("wrote %s (%d files + manifest)", out, len(files))
    return EXIT_OK


def cmd_leverage(args) -> int:
    X = io.load_matrix(args.input)
    n, p = X.shape
    if args.method == "exact":
        scores = leverage_scores_exact(X)
    else:
        kind = "binary" if args.method == "bfast" else "gaussian"
        r1 = args.r1 if args.r1 is not None else 2 * p
        r2 = args.r2 if args.r2 is not None else int(np.ceil(10 * np.log(n)))
        cfg = ApproxLeverageConfig(r1=r1, r2=r2, kind=kind, seed=args.seed)
        scores = approx_leverage(X, cfg).scores
    if args.out:
        io.write_scores_csv(scores, args.out)
        log.info("wrote scores to %s", args.out)
    s = leverage_summary(scores, p)
    print("n,min,median,max,mean,std_dev,max_over_min,max_over_mean,max_over_median")
    print(
        f"{n},{s.min:.6g},{s.median:.6g},{s.max:.6g},{s.mean:.6g},"
        f"{s.std_dev:.6g},{s.max_over_min:.6g},{s.max_over_mean:.6g},"
        f"{s.max_over_median:.6g}"
    )
    return EXIT_OK


def cmd_solve(args) -> int:
    X = io.load_matrix(args.input)
    y = io.load_vector_csv(args.response)
    if args.weights:
        w = io.load_vector_csv(args.weights)
        beta = solve_wls(X, y, w).beta_hat_wls
    else:
        beta = solve_ols(X, y).beta_hat
    for v in beta:
        print(io.FLOAT_FMT % v)
    return EXIT_OK


def _load_config(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}:{err.lineno}: invalid JSON: {err.msg}") from err


def _require(cfg: dict, key: str, typ=None):
    if key not in cfg:
        raise ConfigError(f"config is missing required field {key!r}")
    val = cfg[key]
    if typ is not None and not isinstance(val, typ):
        raise ConfigError(f"config field {key!r} has wrong type {type(val).__name__}")
    return val


def _scheme_distribution(entry: dict, X, h_exact, approx_cache: dict):
    """Build the sampling distribution for one scheme entry of the config."""
    name = _require(entry, "scheme", str)
    if name not in ("UNIF", "LEV", "SLEV", "LEVUNW"):
        raise ConfigError(f"unknown scheme {name!r}")
    n, p = X.shape
    if name == "UNIF":
        return build_distribution("UNIF", n=n), True
    source = entry.get("source", "exact")
    if source == "exact":
        scores = h_exact
    elif source in ("bfast", "gfast"):
        r1 = entry.get("r1", 2 * p)
        r2 = entry.get("r2", int(np.ceil(10 * np.log(n))))
        kind = "binary" if source == "bfast" else "gaussian"
        key = (kind, r1, r2, entry.get("approx_seed", 0))
        if key not in approx_cache:
            cfg = ApproxLeverageConfig(r1=r1, r2=r2, kind=kind, seed=key[3])
            approx_cache[key] = approx_leverage(X, cfg).scores
        scores = approx_cache[key]
    else:
        raise ConfigError(f"unknown leverage source {source!r}")
    base = "LEV" if name in ("LEV", "LEVUNW") else "SLEV"
    alpha = entry.get("alpha")
    if base == "SLEV" and alpha is None:
        raise ConfigError("SLEV scheme entry needs an alpha")
    dist = build_distribution(base, scores=scores, alpha=alpha, source=source)
    return dist, name != "LEVUNW"


def cmd_experiment(args) -> int:
    cfg = _load_config(args.config)
    design_cfg = _require(cfg, "design", dict)
    try:
        spec = DesignSpec(
            family=_require(design_cfg, "family", str),
            n=_require(design_cfg, "n", int),
            p=_require(design_cfg, "p", int),
            seed=design_cfg.get("seed", 0),
            df=design_cfg.get("df"),
            keep=design_cfg.get("keep"),
        )
    except ValueError as err:
        raise ConfigError(str(err)) from err
    mode = _require(cfg, "mode", str)
    if mode not in ("conditional", "unconditional"):
        raise ConfigError(f"mode must be conditional|unconditional, got {mode!r}")
    r_grid = _require(cfg, "r_grid", list)
    if not r_grid or any((not isinstance(r, int)) or r < 1 for r in r_grid):
        raise ConfigError("r_grid must be a nonempty list of positive ints")
    reps = cfg.get("reps", 1000)
    if reps < 2:
        raise ConfigError("reps must be >= 2")
    master_seed = args.seed if args.seed is not None else cfg.get("master_seed", 0)
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("LEVSAMPLE_THREADS", "1"))
    out_dir = Path(args.out if args.out else cfg.get("output_dir", "."))
    sigma2 = cfg.get("sigma2", DEFAULT_SIGMA2)
    scheme_entries = _require(cfg, "schemes", list)
    if not scheme_entries:
        raise ConfigError("schemes list is empty")

    t0 = time.perf_counter()
    X = gen_design(spec)
    beta0_cfg = cfg.get("beta0", "default")
    if beta0_cfg == "default":
        beta0 = default_beta(X.shape[1])
    else:
        beta0 = np.asarray(beta0_cfg, dtype=float)
        if beta0.shape[0] != X.shape[1]:
            raise ConfigError(f"beta0 has length {beta0.shape[0]}, expected {X.shape[1]}")
    y = gen_response(
        X, beta0, sigma2, seed=np.random.SeedSequence(spec.seed, spawn_key=(1,))
    )
    problem = RegressionProblem(X, y, beta0=beta0, sigma2=sigma2)
    h_exact = leverage_scores_exact(X)
    gen_seconds = time.perf_counter() - t0

    approx_cache: dict = {}
    cells = []
    for si, entry in enumerate(scheme_entries):
        dist, weighted = _scheme_distribution(entry, X, h_exact, approx_cache)
        label = entry["scheme"]
        for ri, r in enumerate(r_grid):
            seed = np.random.SeedSequence(master_seed, spawn_key=(si, ri))
            cells.append((label, dist, weighted, r, seed))

    runner = run_conditional if mode == "conditional" else run_unconditional

    def _run_cell(cell):
        label, dist, weighted, r, seed = cell
        rep = runner(problem, dist, r, weighted=weighted, reps=reps, seed=seed)
        return dataclasses.replace(rep, scheme=label)

    t1 = time.perf_counter()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(_run_cell, cells))
    else:
        reports = [_run_cell(cell) for cell in cells]
    run_seconds = time.perf_counter() - t1

    out_dir.mkdir(parents=True, exist_ok=True)
    io.write_reports_csv(reports, out_dir / "reports.csv")
    digest_src = dict(cfg)
    digest_src["master_seed"] = master_seed
    digest = hashlib.sha256(
        json.dumps(digest_src, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()
    record = {
        "config_digest": digest,
        "master_seed": master_seed,
        "mode": mode,
        "reps": reps,
        "rows": len(reports),
        "timing_seconds": {"generation": gen_seconds, "experiment": run_seconds},
        "library_version": __version__,
        "numpy_version": np.__version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    with open(out_dir / "run_record.json", "w") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")
    log.info("wrote %d report rows to %s", len(reports), out_dir / "reports.csv")
    return EXIT_OK


def cmd_bench(args) -> int:
    sizes = _parse_sizes(args.sizes)
    methods = args.methods.split(",")
    kinds = []
    if "bfast" in methods:
        kinds.append("binary")
    if "gfast" in methods:
        kinds.append("gaussian")
    rows = timing_benchmark(
        sizes, reps=args.reps, kinds=kinds, r1=args.r1, r2=args.r2, seed=args.seed
    )
    rows = [row for row in rows if row["method"] in methods]
    io.write_timing_csv(rows, args.out)
    meta = {
        "platform": platform.platform(),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "reps": args.reps,
    }
    with open(str(args.out) + ".meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    log.info("wrote %d timing rows to %s", len(rows), args.out)
    return EXIT_OK


COMMANDS = {
    "gen-data": cmd_gen_data,
    "leverage": cmd_leverage,
    "solve": cmd_solve,
    "experiment": cmd_experiment,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as err:
        log.error("config error: %s", err)
        return EXIT_CONFIG
    except SketchRankError as err:
        log.error("numerical failure: %s", err)
        return EXIT_NUMERICAL
    except ValueError as err:
        log.error("config error: %s", err)
        return EXIT_CONFIG
    except OSError as err:
        log.error("I/O error: %s", err)
        return EXIT_IO


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
