"""Flat-file formats: JSON matrix documents and CSV trajectory tables.

Numbers are serialized with 17 significant digits so binary doubles round
trip exactly.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import InputError

__all__ = [
    "fmt17",
    "matrix_to_doc",
    "doc_to_matrix",
    "load_matrix",
    "dump_matrix",
    "parse_complex_list",
    "format_complex_list",
    "trajectory_to_csv",
]


def fmt17(x: float) -> str:
    return format(float(x), ".17g")


def matrix_to_doc(x) -> dict:
    x = np.asarray(x, dtype=complex)
    n = x.shape[0]
    return {
        "n": n,
        "entries": [[v.real, v.imag] for v in x.ravel()],
    }


def doc_to_matrix(doc) -> np.ndarray:
    if not isinstance(doc, dict) or "n" not in doc or "entries" not in doc:
        raise InputError("matrix document needs fields 'n' and 'entries'")
    try:
        n = int(doc["n"])
        entries = [complex(float(re), float(im)) for re, im in doc["entries"]]
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed matrix document: {exc}") from exc
    if n <= 0 or len(entries) != n * n:
        raise InputError(f"expected {n}*{n} [re, im] pairs, got {len(entries)}")
    x = np.array(entries, dtype=complex).reshape(n, n)
    if not np.all(np.isfinite(x)):
        raise InputError("matrix entries must be finite")
    return x


def load_matrix(path) -> np.ndarray:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read matrix document {path}: {exc}") from exc
    return doc_to_matrix(doc)


def dump_matrix(x, path=None) -> str:
    doc = matrix_to_doc(x)
    text = json.dumps(doc, indent=2)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text


def parse_complex_list(text) -> np.ndarray:
    """Parse '1,-1' or '1+2j,3-1j' style comma-separated complex values."""
    try:
        values = [complex(part.strip().replace(" ", "")) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise InputError(f"cannot parse complex list {text!r}: {exc}") from exc
    if not values:
        raise InputError("empty value list")
    return np.array(values, dtype=complex)


def format_complex_list(values) -> str:
    parts = []
    for v in np.asarray(values, dtype=complex):
        parts.append(f"{fmt17(v.real)}{'+' if v.imag >= 0 else '-'}{fmt17(abs(v.imag))}j")
    return ",".join(parts)


def trajectory_to_csv(traj, path, header_fields=None):
    """Write a trajectory table: t, re/im of every entry (1-based labels), drift."""
    n = traj.samples[0].shape[0]
    cols = ["t"]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            cols.append(f"re(X_{i}{j})")
            cols.append(f"im(X_{i}{j})")
    cols.append("drift")
    lines = []
    fields = dict(header_fields or {})
    fields.setdefault("method", traj.method)
    for key, value in fields.items():
        lines.append(f"# {key}={value}")
    lines.append(",".join(cols))
    for t, sample, drift in zip(traj.times, traj.samples, traj.drift):
        row = [fmt17(t)]
        for v in sample.ravel():
            row.append(fmt17(v.real))
            row.append(fmt17(v.imag))
        row.append(fmt17(drift))
        lines.append(",".join(row))
    text = "\n".join(lines) + "\n"
    with open(path, "w") as fh:
        fh.write(text)
    return text
