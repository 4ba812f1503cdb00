"""JSON map/QMT files and CSV trajectory export.

Map files hold ``n``, ``m``, ``lambda``, ``A`` (n x m) and ``B`` (m x n).
Entries are JSON numbers (read as doubles) or strings such as ``"-3/4"``
(read as exact rationals).
"""
from __future__ import annotations

import csv
import json
from fractions import Fraction

import numpy as np

from . import scalar as sc
from .core import validate
from .errors import QPMapError
from .transform import qmt


class FileFormatError(QPMapError):
    """Malformed input file; ``pointer`` is a JSON pointer to the offending value."""

    def __init__(self, path, pointer, reason):
        self.path, self.pointer, self.reason = path, pointer, reason
        super().__init__(f"{path}: {pointer or '/'}: {reason}")


def _entry(value, path, pointer):
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise FileFormatError(path, pointer, f"expected a number or rational string, got {value!r}")
    if isinstance(value, str):
        try:
            return sc.to_scalar(value)
        except ValueError:
            raise FileFormatError(path, pointer, f"malformed rational {value!r}") from None
    return float(value)


def _matrix(obj, key, rows, cols, path):
    data = obj.get(key)
    if not isinstance(data, list) or len(data) != rows:
        raise FileFormatError(path, f"/{key}", f"expected {rows} rows")
    out = []
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            raise FileFormatError(path, f"/{key}/{i}", f"expected {cols} entries")
        out.append([_entry(v, path, f"/{key}/{i}/{j}") for j, v in enumerate(row)])
    return out


def map_from_dict(obj, path="<map>"):
    if not isinstance(obj, dict):
        raise FileFormatError(path, "", "top level must be an object")
    for key in ("n", "m"):
        if not isinstance(obj.get(key), int) or isinstance(obj.get(key), bool):
            raise FileFormatError(path, f"/{key}", "expected an integer")
    n, m = obj["n"], obj["m"]
    lam = obj.get("lambda")
    if not isinstance(lam, list) or len(lam) != n:
        raise FileFormatError(path, "/lambda", f"expected {n} entries")
    lam = [_entry(v, path, f"/lambda/{i}") for i, v in enumerate(lam)]
    A = _matrix(obj, "A", n, m, path)
    B = _matrix(obj, "B", m, n, path) if m or obj.get("B") else []
    try:
        return validate(n, m, lam, A if m else [[]] * n, B or None)
    except QPMapError as exc:
        raise FileFormatError(path, "", str(exc)) from exc


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FileFormatError(path, "", f"invalid JSON: {exc.msg}") from exc


def load_map(path):
    return map_from_dict(_read_json(path), str(path))


def dumps_map(qp):
    return json.dumps(qp.to_dict(), indent=2)


def save_map(qp, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_map(qp) + "\n")


def qmt_from_dict(obj, path="<qmt>"):
    if not isinstance(obj, dict) or not isinstance(obj.get("C"), list) or not obj["C"]:
        raise FileFormatError(path, "/C", "expected a square matrix")
    n = len(obj["C"])
    C = _matrix(obj, "C", n, n, path)
    try:
        return qmt(C)
    except QPMapError as exc:
        raise FileFormatError(path, "/C", str(exc)) from exc


def load_qmt(path):
    return qmt_from_dict(_read_json(path), str(path))


def encode(value):
    """JSON encoding of a scalar: rationals as strings, everything else as float."""
    if isinstance(value, Fraction):
        return str(value)
    return float(value)


def write_trajectory_csv(traj, fh):
    """Write ``t,x1,...,xn`` rows with 17 significant digits to a file object."""
    n = traj.u.shape[1]
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["t"] + [f"x{i + 1}" for i in range(n)])
    for t, x in enumerate(np.exp(traj.u)):
        writer.writerow([t] + [f"{v:.17g}" for v in x])


def save_trajectory_csv(traj, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_trajectory_csv(traj, fh)


def read_trajectory_csv(path):
    """Inverse of :func:`save_trajectory_csv`; returns (t, x) arrays."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0].astype(int), data[:, 1:]
