"""Discrete fractional material derivatives acting on a solution history."""

from __future__ import annotations

import enum

import numpy as np

from .core import CoefficientTable, SolutionHistory, SolverParams, gamma_fn

__all__ = [
    "OperatorSign",
    "discrete_material_derivative",
    "discrete_material_derivative_row",
    "combined_operator",
    "combined_operator_row",
]


class OperatorSign(enum.Enum):
    """Selects (d/dt + d/dx)^alpha (plus) or (d/dt - d/dx)^alpha (minus)."""

    PLUS = +1
    MINUS = -1

    @property
    def shift(self) -> int:
        # The "+" operator reads upwind to the left (i - ...), the "-" one
        # to the right (i + ...).
        return -1 if self is OperatorSign.PLUS else +1


def discrete_material_derivative_row(
    history: SolutionHistory,
    n: int,
    sign: OperatorSign,
    coeffs: CoefficientTable,
) -> np.ndarray:
    """Full-row evaluation of the discrete fractional material derivative.

    Returns h^{-a}/Gamma(2-a) * [u_{i -+ 1}^n - sum_{j<n} d_{n-j} u_{i -+ (n-j+1)}^j]
    for every cell i, with out-of-domain reads equal to zero.  This is the
    performance path: the history sum walks contiguous shifted slices.
    """
    if not 1 <= n <= history.grid.n_time:
        raise ValueError(f"n must lie in [1, {history.grid.n_time}], got {n}")
    if n > history.filled:
        raise IndexError(f"history row {n} is not populated")
    s = sign.shift
    d = coeffs.d
    acc = history.shifted_row(n, s).copy()
    for j in range(n):
        k = n - j
        acc -= d[k] * history.shifted_row(j, s * (k + 1))
    scale = history.grid.h ** (-coeffs.alpha) / gamma_fn(2.0 - coeffs.alpha)
    return scale * acc


def discrete_material_derivative(
    history: SolutionHistory,
    n: int,
    i: int,
    sign: OperatorSign,
    coeffs: CoefficientTable,
    strict: bool = False,
) -> float:
    """Single-point evaluation at cell i and time level n."""
    if not 1 <= n <= history.grid.n_time:
        raise ValueError(f"n must lie in [1, {history.grid.n_time}], got {n}")
    if n > history.filled:
        raise IndexError(f"history row {n} is not populated")
    s = sign.shift
    d = coeffs.d
    acc = history.value(n, i + s, strict=strict)
    for j in range(n):
        k = n - j
        acc -= d[k] * history.value(j, i + s * (k + 1), strict=strict)
    scale = history.grid.h ** (-coeffs.alpha) / gamma_fn(2.0 - coeffs.alpha)
    return scale * acc


def combined_operator(
    history: SolutionHistory,
    n: int,
    i: int,
    params: SolverParams,
    coeffs: CoefficientTable,
) -> float:
    """Convex combination p * minus-branch + (1-p) * plus-branch at one point."""
    minus = discrete_material_derivative(history, n, i, OperatorSign.MINUS, coeffs)
    plus = discrete_material_derivative(history, n, i, OperatorSign.PLUS, coeffs)
    return params.p * minus + (1.0 - params.p) * plus


def combined_operator_row(
    history: SolutionHistory,
    n: int,
    params: SolverParams,
    coeffs: CoefficientTable,
) -> np.ndarray:
    minus = discrete_material_derivative_row(history, n, OperatorSign.MINUS, coeffs)
    plus = discrete_material_derivative_row(history, n, OperatorSign.PLUS, coeffs)
    return params.p * minus + (1.0 - params.p) * plus
