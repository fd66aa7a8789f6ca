"""Signal/image I/O: headerless little-endian float64 binary with a JSON
sidecar describing the shape, plus CSV for 1-D signals."""

from __future__ import annotations

import json
import os

import numpy as np


def save_array(path, arr):
    """Write raw '<f8' bytes to path and {shape, dtype} to path + '.json'."""
    arr = np.asarray(arr, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(arr.tobytes())
    with open(str(path) + ".json", "w") as fh:
        json.dump({"shape": list(arr.shape), "dtype": "f64"}, fh)


def load_array(path):
    """Read an array saved by save_array; '.csv' paths load as 1-D signals."""
    path = str(path)
    if path.endswith(".csv"):
        return np.atleast_1d(np.loadtxt(path, delimiter=",", dtype=float))
    sidecar = path + ".json"
    if not os.path.exists(sidecar):
        raise FileNotFoundError(f"missing JSON sidecar {sidecar}")
    with open(sidecar) as fh:
        meta = json.load(fh)
    if meta.get("dtype") != "f64":
        raise ValueError(f"unsupported dtype {meta.get('dtype')!r} in {sidecar}")
    with open(path, "rb") as fh:
        flat = np.frombuffer(fh.read(), dtype="<f8")
    return flat.reshape(meta["shape"]).copy()
