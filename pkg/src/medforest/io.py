"""Native JSON instance format.

A file holds one object with keys n, k, Q, q, d and optionally c,
labels, meta. A matrix is either {"kind": "matrix", "rows": [[...]]}
or {"kind": "euclidean", "points": [[x, y], ...]}; euclidean input is
expanded to a full matrix on load (distances rounded to 1e-12), and
writing always emits matrix form, so write -> read -> write is
byte-identical.
"""

from __future__ import annotations

import json
import math
import os

import numpy as np

from medforest.errors import ParseError
from medforest.instance import Instance


def euclidean_matrix(points) -> np.ndarray:
    """Pairwise distances of 2-d points, rounded to 12 decimal places."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ParseError(f"euclidean points must be Nx2, got shape {pts.shape}")
    n = pts.shape[0]
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            dist = round(math.hypot(pts[i, 0] - pts[j, 0], pts[i, 1] - pts[j, 1]), 12)
            d[i, j] = d[j, i] = dist
    return d


def _parse_matrix(obj, n: int, name: str, source: str) -> np.ndarray:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ParseError(f"{name} must be an object with a 'kind' key", source)
    kind = obj["kind"]
    if kind == "matrix":
        rows = obj.get("rows")
        if not isinstance(rows, list) or len(rows) != n:
            raise ParseError(f"{name}.rows must be a list of {n} rows", source)
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != n:
                raise ParseError(f"{name}.rows[{i}] must have {n} entries", source)
        try:
            return np.asarray(rows, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{name}.rows: {exc}", source)
    if kind == "euclidean":
        points = obj.get("points")
        if not isinstance(points, list) or len(points) != n:
            raise ParseError(f"{name}.points must be a list of {n} points", source)
        try:
            return euclidean_matrix(points)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{name}.points: {exc}", source)
    raise ParseError(f"{name}.kind must be 'matrix' or 'euclidean', got {kind!r}", source)


def instance_from_dict(data: dict, source: str = "<dict>") -> Instance:
    """Build an Instance from parsed JSON, with located error messages."""
    if not isinstance(data, dict):
        raise ParseError("top level must be a JSON object", source)
    for key in ("n", "k", "Q", "q", "d"):
        if key not in data:
            raise ParseError(f"missing required key {key!r}", source)
    try:
        n = int(data["n"])
        k = int(data["k"])
    except (TypeError, ValueError) as exc:
        raise ParseError(f"n/k: {exc}", source)
    Q = data["Q"]
    if Q is not None:
        try:
            Q = float(Q)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"Q: {exc}", source)
    q = data["q"]
    if not isinstance(q, list) or len(q) != n:
        raise ParseError(f"q must be a list of {n} demands", source)
    d = _parse_matrix(data["d"], n, "d", source)
    c = _parse_matrix(data["c"], n, "c", source) if data.get("c") is not None else None
    labels = data.get("labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != n):
        raise ParseError(f"labels must be a list of {n} strings", source)
    meta = data.get("meta") or {}
    if not isinstance(meta, dict):
        raise ParseError("meta must be an object", source)
    try:
        return Instance(
            q=q, d=d, k=k, Q=Q, c=c,
            labels=tuple(labels) if labels is not None else None,
            meta=meta,
        )
    except ValueError as exc:
        raise ParseError(str(exc), source)


def instance_to_dict(inst: Instance) -> dict:
    out = {
        "n": inst.n,
        "k": inst.k,
        "Q": inst.Q,
        "q": [float(x) for x in inst.q],
        "d": {"kind": "matrix", "rows": [[float(x) for x in row] for row in inst.d]},
    }
    if inst.c is not None:
        out["c"] = {"kind": "matrix", "rows": [[float(x) for x in row] for row in inst.c]}
    if inst.labels is not None:
        out["labels"] = list(inst.labels)
    if inst.meta:
        out["meta"] = inst.meta
    return out


def read_instance(path: str) -> Instance:
    source = os.fspath(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(str(exc), source)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, source, exc.lineno)
    return instance_from_dict(data, source=source)


def dumps(obj) -> str:
    """Canonical JSON used for all machine output: sorted keys, stable floats."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_instance(path: str, inst: Instance) -> None:
    text = dumps(instance_to_dict(inst))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
