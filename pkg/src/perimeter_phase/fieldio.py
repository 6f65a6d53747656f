"""Reading and writing grid fields.

Two formats, both with a JSON sidecar describing the grid:

* raw binary: little-endian float64 node values in C order, sidecar at
  path + ".json";
* CSV: header row then one row per node with index, coordinates, and the
  value printed with %.17g (lossless for float64).
"""

from __future__ import annotations

import csv
import json
import os
from typing import Tuple

import numpy as np

from .energy import ScalarField
from .geometry import Domain

_FLOAT_FMT = "%.17g"


def _sidecar_path(path: str) -> str:
    return path + ".json"


def _write_sidecar(domain: Domain, path: str) -> None:
    meta = {
        "dim": domain.dim,
        "n": domain.n,
        "h": domain.h,
        "shape": list(domain.node_shape),
        "domain": domain.to_dict(),
    }
    with open(_sidecar_path(path), "w", encoding="utf-8") as f:
        json.dump(meta, f, sort_keys=True, indent=2)
        f.write("\n")


def _read_sidecar(path: str) -> Domain:
    with open(_sidecar_path(path), "r", encoding="utf-8") as f:
        meta = json.load(f)
    return Domain.from_dict(meta["domain"])


def save_binary(field: ScalarField, path: str) -> None:
    field.values.astype("<f8").tofile(path)
    _write_sidecar(field.domain, path)


def load_binary(path: str) -> ScalarField:
    domain = _read_sidecar(path)
    values = np.fromfile(path, dtype="<f8")
    expected = int(np.prod(domain.node_shape))
    if values.size != expected:
        raise OSError(
            f"{path}: expected {expected} float64 values, found {values.size}"
        )
    return ScalarField(domain, values.reshape(domain.node_shape))


def save_csv(field: ScalarField, path: str) -> None:
    domain = field.domain
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        if domain.dim == 1:
            writer.writerow(["index", "x", "value"])
            for i, (x, v) in enumerate(zip(domain.nodes_x, field.values)):
                writer.writerow([i, _FLOAT_FMT % x, _FLOAT_FMT % v])
        else:
            writer.writerow(["index", "x", "y", "value"])
            flat_x = domain.nodes_x.ravel()
            flat_y = domain.nodes_y.ravel()
            flat_v = field.values.ravel()
            for i in range(flat_v.size):
                writer.writerow(
                    [i, _FLOAT_FMT % flat_x[i], _FLOAT_FMT % flat_y[i], _FLOAT_FMT % flat_v[i]]
                )
    _write_sidecar(field.domain, path)


def load_csv(path: str) -> ScalarField:
    domain = _read_sidecar(path)
    values = np.empty(int(np.prod(domain.node_shape)))
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        value_col = header.index("value")
        count = 0
        for row in reader:
            values[int(row[0])] = float(row[value_col])
            count += 1
    if count != values.size:
        raise OSError(f"{path}: expected {values.size} rows, found {count}")
    return ScalarField(domain, values.reshape(domain.node_shape))


def load_field(path: str) -> ScalarField:
    """Dispatch on extension: .csv loads CSV, anything else raw binary."""
    if path.endswith(".csv"):
        return load_csv(path)
    return load_binary(path)
