"""Readers for the solver's CSV artifact formats.

All artifacts are plain CSV with an optional block of ``#key=value``
metadata comment lines before the header row.  The convergence table
additionally carries one string column (the norm kind) and a repeated
``slope`` column whose verbatim text is preserved so figures can quote
it exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class MissingColumnError(ValueError):
    """An expected CSV column is absent; the message names it."""

    def __init__(self, path, column: str, found):
        self.column = column
        super().__init__(
            f"{path}: missing column {column!r} (found {', '.join(found)})"
        )


@dataclass(frozen=True)
class Table:
    """One parsed artifact: metadata, column names, and numeric columns."""

    meta: dict[str, str]
    columns: list[str]
    data: np.ndarray  # shape (n_rows, n_numeric_columns)

    def column(self, path, name: str) -> np.ndarray:
        if name not in self.columns:
            raise MissingColumnError(path, name, self.columns)
        return self.data[:, self.columns.index(name)]


def read_table(path) -> Table:
    """Read a metadata-commented CSV whose data columns are all numeric."""
    meta: dict[str, str] = {}
    columns: list[str] | None = None
    rows: list[list[float]] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                meta[key.strip()] = value.strip()
                continue
            if columns is None:
                columns = [c.strip() for c in line.split(",")]
                continue
            rows.append([float(v) for v in line.split(",")])
    if columns is None:
        raise ValueError(f"{path}: no header row found")
    data = np.array(rows, dtype=float) if rows else np.empty((0, len(columns)))
    if rows and data.shape[1] != len(columns):
        raise ValueError(f"{path}: row width does not match the header")
    return Table(meta=meta, columns=columns, data=data)


@dataclass(frozen=True)
class ConvergenceSweep:
    """One alpha-sweep of the convergence table.

    ``slope_text`` is the slope column's verbatim CSV text, identical on
    every row of the sweep; figures quote it unmodified so the annotation
    matches the artifact exactly.
    """

    alpha_text: str
    norm_kind: str
    h: np.ndarray
    error: np.ndarray
    slope_text: str


_CONV_HEADER = ["alpha", "h", "norm_kind", "error", "slope"]


def read_convergence(path) -> list[ConvergenceSweep]:
    """Read a convergence table, grouping rows into per-(alpha, norm) sweeps."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty convergence table")
    header = [c.strip() for c in lines[0].split(",")]
    for name in _CONV_HEADER:
        if name not in header:
            raise MissingColumnError(path, name, header)
    idx = {name: header.index(name) for name in _CONV_HEADER}

    groups: dict[tuple[str, str, str], list[tuple[float, float]]] = {}
    for ln in lines[1:]:
        rec = [v.strip() for v in ln.split(",")]
        key = (rec[idx["alpha"]], rec[idx["norm_kind"]], rec[idx["slope"]])
        groups.setdefault(key, []).append(
            (float(rec[idx["h"]]), float(rec[idx["error"]]))
        )
    sweeps = []
    for (alpha_text, norm_kind, slope_text), pairs in groups.items():
        pairs.sort(reverse=True)
        h = np.array([p[0] for p in pairs])
        err = np.array([p[1] for p in pairs])
        sweeps.append(
            ConvergenceSweep(
                alpha_text=alpha_text,
                norm_kind=norm_kind,
                h=h,
                error=err,
                slope_text=slope_text,
            )
        )
    sweeps.sort(key=lambda s: float(s.alpha_text))
    return sweeps
