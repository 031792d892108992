"""Discrete norms, errors against oracles, and empirical convergence orders."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .core import GridSpec, SolutionHistory

__all__ = [
    "NormKind",
    "ErrorReport",
    "discrete_norm",
    "error_against_oracle",
    "estimate_order",
    "write_convergence_csv",
]


class NormKind(enum.Enum):
    L1 = "l1"
    L2 = "l2"
    LINF = "linf"


@dataclass(frozen=True)
class ErrorReport:
    h: float
    norm_kind: NormKind
    value: float
    measured_at: float
    restriction: tuple[float, float]


def discrete_norm(row: np.ndarray, h: float, kind: NormKind) -> float:
    """Discrete p-norm (h * sum |u_i|^p)^(1/p); linf is the plain maximum."""
    row = np.asarray(row, dtype=float)
    if kind is NormKind.LINF:
        return float(np.max(np.abs(row))) if row.size else 0.0
    if kind is NormKind.L1:
        return float(h * np.sum(np.abs(row)))
    if kind is NormKind.L2:
        return float(np.sqrt(h * np.sum(row * row)))
    raise ValueError(f"unknown norm kind {kind}")


def _restriction_slice(grid: GridSpec, restriction: tuple[float, float] | None):
    if restriction is None:
        return slice(None), (grid.x_min, grid.x_max)
    lo, hi = restriction
    if lo < grid.x_min - 1e-12 or hi > grid.x_max + 1e-12:
        raise ValueError(f"restriction {restriction} not contained in the domain")
    x = grid.x
    mask = (x >= lo - 1e-12) & (x <= hi + 1e-12)
    idx = np.nonzero(mask)[0]
    return slice(idx[0], idx[-1] + 1), (lo, hi)


def error_against_oracle(
    history: SolutionHistory,
    oracle,
    t: float,
    kind: NormKind,
    restriction: tuple[float, float] | None = None,
) -> ErrorReport:
    """Norm of (numeric row - oracle row) at stored time t on a sub-interval.

    ``oracle`` is either a callable mapping (i_array, t) to cell-average
    values or a precomputed full-row array.
    """
    grid = history.grid
    n = grid.time_index(t)
    sl, bounds = _restriction_slice(grid, restriction)
    numeric = history.row(n)[sl]
    if callable(oracle):
        i = np.arange(grid.n_space)[sl]
        expected = np.asarray(oracle(i, t), dtype=float)
    else:
        expected = np.asarray(oracle, dtype=float)[sl]
    value = discrete_norm(numeric - expected, grid.h, kind)
    return ErrorReport(h=grid.h, norm_kind=kind, value=value, measured_at=t, restriction=bounds)


def estimate_order(pairs) -> tuple[float, float, float]:
    """Least-squares slope of log(error) vs log(h): (slope, intercept, r^2).

    Pairs with non-positive error (exact matches) are excluded with a
    warning; at least three usable pairs are required.
    """
    hs, errs = [], []
    for h, e in pairs:
        if e <= 0.0:
            warnings.warn(f"excluding non-positive error {e} at h={h} from the order fit")
            continue
        hs.append(h)
        errs.append(e)
    if len(hs) < 3:
        raise ValueError("estimate_order needs at least 3 positive (h, error) pairs")
    if not all(a > b for a, b in zip(hs[:-1], hs[1:])):
        raise ValueError("h values must be strictly decreasing")
    lh = np.log(hs)
    le = np.log(errs)
    slope, intercept = np.polyfit(lh, le, 1)
    pred = slope * lh + intercept
    ss_res = float(np.sum((le - pred) ** 2))
    ss_tot = float(np.sum((le - le.mean()) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r_squared


def write_convergence_csv(path, records) -> None:
    """Convergence table: alpha, h, norm_kind, error, slope.

    ``records`` is an iterable of (alpha, h, norm_kind, error, slope); the
    sweep's fitted slope is repeated on each of its rows.
    """
    with open(path, "w", newline="") as fh:
        fh.write("alpha,h,norm_kind,error,slope\n")
        for alpha, h, kind, error, slope in records:
            kind_name = kind.value if isinstance(kind, NormKind) else str(kind)
            fh.write(f"{alpha:.17g},{h:.17g},{kind_name},{error:.17g},{slope:.17g}\n")
