"""CSV readers and writers for datasets, case tables, and chain traces.

Every file this package emits round-trips through the readers here.
Floats are written with ``repr`` (shortest exact form), so round trips are
lossless and byte-stable across runs.
"""

from __future__ import annotations

import csv

import numpy as np

from .exceptions import ValidationError
from .validation import as_matrix


def _fmt(v) -> str:
    return repr(float(v))


def write_dataset_csv(path, X, Y) -> None:
    """Write one sample per row with header ``x0..x{n-1},y0..y{m-1}``."""
    X = as_matrix(X, name="X")
    Y = as_matrix(Y, name="Y")
    if X.shape[0] != Y.shape[0]:
        raise ValidationError("X and Y row counts differ")
    header = [f"x{i}" for i in range(X.shape[1])] + [f"y{j}" for j in range(Y.shape[1])]
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for xr, yr in zip(X, Y):
            writer.writerow([_fmt(v) for v in xr] + [_fmt(v) for v in yr])


def read_dataset_csv(path):
    """Read a dataset written by :func:`write_dataset_csv`; returns (X, Y)."""
    with open(path, "r", newline="", encoding="ascii") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValidationError(f"{path}: empty dataset file")
    header = rows[0]
    n_x = 0
    while n_x < len(header) and header[n_x] == f"x{n_x}":
        n_x += 1
    n_y = 0
    while n_x + n_y < len(header) and header[n_x + n_y] == f"y{n_y}":
        n_y += 1
    if n_x == 0 or n_y == 0 or n_x + n_y != len(header):
        expected = "x0..x{n-1},y0..y{m-1}"
        bad = header[n_x + n_y] if n_x + n_y < len(header) else header[-1]
        raise ValidationError(
            f"{path}: header must be {expected}; unexpected column {bad!r}"
        )
    data = _parse_rows(rows[1:], len(header), path)
    return data[:, :n_x], data[:, n_x:]


def _parse_rows(rows, width, path) -> np.ndarray:
    out = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ValidationError(
                f"{path}: row {i + 2} has {len(row)} fields, expected {width}"
            )
        try:
            out[i] = [float(v) for v in row]
        except ValueError as exc:
            raise ValidationError(f"{path}: row {i + 2}: {exc}") from None
    return out


def write_cases_csv(path, case_ids, values, prefix: str = "y") -> None:
    """Write per-case rows with header ``case,<prefix>0..``.

    ``case_ids`` may repeat (one row per posterior sample).
    """
    values = as_matrix(values, name="values")
    if len(case_ids) != values.shape[0]:
        raise ValidationError("case_ids and values row counts differ")
    header = ["case"] + [f"{prefix}{j}" for j in range(values.shape[1])]
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for cid, row in zip(case_ids, values):
            writer.writerow([str(cid)] + [_fmt(v) for v in row])


def read_cases_csv(path, prefix: str = "y"):
    """Read a case table; returns ``(case_ids, values)`` row-parallel."""
    with open(path, "r", newline="", encoding="ascii") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValidationError(f"{path}: empty case file")
    header = rows[0]
    if not header or header[0] != "case":
        raise ValidationError(f"{path}: missing leading 'case' column")
    for j, name in enumerate(header[1:]):
        if name != f"{prefix}{j}":
            raise ValidationError(
                f"{path}: expected column '{prefix}{j}', found {name!r}"
            )
    ids = [row[0] for row in rows[1:]]
    values = _parse_rows([row[1:] for row in rows[1:]], len(header) - 1, path)
    return ids, values


def group_by_case(case_ids, values) -> dict:
    """Split row-parallel values into per-case blocks, first-seen order."""
    groups: dict = {}
    for cid, row in zip(case_ids, np.asarray(values, dtype=float)):
        groups.setdefault(cid, []).append(row)
    return {cid: np.asarray(block) for cid, block in groups.items()}


def write_chain_csv(path, record) -> None:
    """Write one chain trace: ``step,accepted,energy,p0..p{d-1}``."""
    samples = record.samples
    header = ["step", "accepted", "energy"] + [
        f"p{j}" for j in range(samples.shape[1])
    ]
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for t in range(samples.shape[0]):
            writer.writerow(
                [str(t), str(int(record.accept_flags[t])), _fmt(record.energies[t])]
                + [_fmt(v) for v in samples[t]]
            )


def read_chain_csv(path):
    """Read a chain trace; returns ``(steps, accept_flags, energies, samples)``."""
    with open(path, "r", newline="", encoding="ascii") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValidationError(f"{path}: empty chain file")
    header = rows[0]
    if header[:3] != ["step", "accepted", "energy"]:
        raise ValidationError(f"{path}: bad chain header {header[:3]!r}")
    for j, name in enumerate(header[3:]):
        if name != f"p{j}":
            raise ValidationError(f"{path}: expected column 'p{j}', found {name!r}")
    data = _parse_rows(rows[1:], len(header), path)
    steps = data[:, 0].astype(int)
    flags = data[:, 1].astype(bool)
    return steps, flags, data[:, 2], data[:, 3:]
