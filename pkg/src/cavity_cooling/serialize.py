"""CSV/JSON writers shared by the command-line runner and the demo scripts."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

FLOAT_FMT = "{:.17g}"


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return FLOAT_FMT.format(float(x))


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def read_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [[float(v) for v in line.split(",")] for line in fh if line.strip()]
    return header, rows


def write_distribution(path, probs):
    write_csv(path, ("n", "p_n"), ((n, p) for n, p in enumerate(probs)))


def write_wigner(path, grid, w, meta: dict):
    """Row-major ``x,p,W`` table plus a ``.json`` sidecar describing the grid."""
    path = Path(path)
    X, P = grid.mesh()
    write_csv(path, ("x", "p", "W"), zip(X.ravel(), P.ravel(), w.ravel()))
    write_json(path.with_suffix(".json"), {"grid": grid.to_dict(), **meta})


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


def write_json(path, data):
    # float repr is the shortest string that round-trips exactly
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(_plain(data), fh, indent=2, sort_keys=True)
        fh.write("\n")
