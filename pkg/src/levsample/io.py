"""File formats: headered CSV and raw binary matrices, record CSV schemas."""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

FLOAT_FMT = "%.17g"


def save_matrix_csv(X, path) -> None:
    """Write a matrix as CSV: first line `n,p`, then one row per line."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n, p = X.shape
    with open(path, "w") as fh:
        fh.write(f"{n},{p}\n")
        for row in X:
            fh.write(",".join(FLOAT_FMT % v for v in row) + "\n")


def load_matrix_csv(path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().strip()
        n, p = (int(v) for v in header.split(","))
        X = np.loadtxt(fh, delimiter=",", ndmin=2)
    if X.shape != (n, p):
        raise ValueError(f"{path}: header says {n}x{p}, data is {X.shape}")
    return X


def save_matrix_bin(X, path) -> None:
    """Raw little-endian binary: two u64 dims then n*p f64, row-major."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n, p = X.shape
    with open(path, "wb") as fh:
        fh.write(struct.pack("<QQ", n, p))
        fh.write(np.ascontiguousarray(X, dtype="<f8").tobytes())


def load_matrix_bin(path) -> np.ndarray:
    with open(path, "rb") as fh:
        n, p = struct.unpack("<QQ", fh.read(16))
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != n * p:
        raise ValueError(f"{path}: expected {n * p} values, found {data.size}")
    return data.reshape(n, p).astype(float)


def load_matrix(path) -> np.ndarray:
    path = Path(path)
    if path.suffix == ".bin":
        return load_matrix_bin(path)
    return load_matrix_csv(path)


def save_vector_csv(v, path) -> None:
    save_matrix_csv(np.asarray(v, dtype=float).reshape(-1, 1), path)


def load_vector_csv(path) -> np.ndarray:
    return load_matrix_csv(path).reshape(-1)


def write_scores_csv(scores, path) -> None:
    """Leverage scores CSV: `index,score`."""
    with open(path, "w") as fh:
        fh.write("index,score\n")
        for i, s in enumerate(np.asarray(scores, dtype=float)):
            fh.write(f"{i},{FLOAT_FMT % s}\n")


def write_estimates_csv(records, path) -> None:
    """Subsample estimate rows: `scheme,alpha,r,seed,trial,rank,rank_deficient,beta_0..`."""
    records = list(records)
    if not records:
        raise ValueError("no estimate records to write")
    p = len(records[0]["beta"])
    cols = ["scheme", "alpha", "r", "seed", "trial", "rank", "rank_deficient"]
    cols += [f"beta_{j}" for j in range(p)]
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for rec in records:
            alpha = rec.get("alpha")
            row = [
                rec["scheme"],
                "" if alpha is None else FLOAT_FMT % alpha,
                str(rec["r"]),
                str(rec["seed"]),
                str(rec["trial"]),
                str(rec["rank"]),
                str(int(rec["rank_deficient"])),
            ]
            row += [FLOAT_FMT % b for b in rec["beta"]]
            fh.write(",".join(row) + "\n")


REPORT_COLUMNS = [
    "scheme",
    "alpha",
    "mode",
    "weighted",
    "r",
    "reps",
    "bias_sq",
    "variance_trace",
    "mse",
    "analytic_variance_trace",
    "rank_deficient_count",
]


def write_reports_csv(reports, path) -> None:
    """Bias/variance report rows, one per (scheme, r) cell."""
    with open(path, "w") as fh:
        fh.write(",".join(REPORT_COLUMNS) + "\n")
        for rep in reports:
            alpha = "" if rep.alpha is None else repr(float(rep.alpha))
            analytic = (
                ""
                if rep.analytic_variance_trace is None
                else FLOAT_FMT % rep.analytic_variance_trace
            )
            row = [
                rep.scheme,
                alpha,
                rep.mode,
                str(int(rep.weighted)),
                str(rep.r),
                str(rep.reps),
                FLOAT_FMT % rep.bias_sq,
                FLOAT_FMT % rep.variance_trace,
                FLOAT_FMT % rep.mse,
                analytic,
                str(rep.rank_deficient_count),
            ]
            fh.write(",".join(row) + "\n")


def write_timing_csv(rows, path) -> None:
    """Timing table CSV: `n,p,method,r1,r2,median_seconds`."""
    with open(path, "w") as fh:
        fh.write("n,p,method,r1,r2,median_seconds\n")
        for row in rows:
            fh.write(
                f"{row['n']},{row['p']},{row['method']},"
                f"{row.get('r1', '')},{row.get('r2', '')},"
                f"{FLOAT_FMT % row['median_seconds']}\n"
            )
