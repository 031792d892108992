"""Closed-form reference solutions: self-similar walk PDFs and the monomial source."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .core import GridSpec, gamma_fn

__all__ = [
    "ProfileKind",
    "SimilarityProfile",
    "phi",
    "pdf_at",
    "monomial_solution",
    "profile_cell_average",
    "profile_cell_averages",
    "profile_mass",
]


class ProfileKind(enum.Enum):
    WAIT_FIRST = "wait_first"
    JUMP_FIRST = "jump_first"
    STANDARD_WALK = "standard_walk"


# The two-sided denominator shared by the walk profiles.  The published
# negative branch of the wait-first profile swaps the (1-y)/(1+y) factors;
# that variant breaks both unit mass and the p <-> 1-p mirror duality
# (numerically verified), so the duality-consistent form is used here.
def _denominator(alpha: float, p: float, y: float) -> float:
    q = 1.0 - p
    return (
        p * p * (1.0 - y) ** (2 * alpha)
        + q * q * (1.0 + y) ** (2 * alpha)
        + 2.0 * p * q * ((1.0 - y) * (1.0 + y)) ** alpha * math.cos(alpha * math.pi)
    )


@dataclass(frozen=True)
class SimilarityProfile:
    """Self-similar profile phi with u(x, t) = phi(x/t) / t.

    Unit mass is verified by quadrature at construction (tolerance 1e-6);
    pass ``check=False`` to skip the verification for throwaway instances.
    """

    kind: ProfileKind
    alpha: float
    p: float
    check: bool = True

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie strictly in (0, 1), got {self.alpha}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.check:
            mass = profile_mass(self)
            if abs(mass - 1.0) > 1e-6:
                raise ValueError(
                    f"profile {self.kind.value}(alpha={self.alpha}, p={self.p}) "
                    f"integrates to {mass}, not 1"
                )


def phi(profile: SimilarityProfile, y: float) -> float:
    """Similarity profile value; signed infinity (never NaN) at singular points."""
    a = profile.alpha
    # The widely quoted closed forms follow the opposite Fourier sign
    # convention from the transform pair behind this solver's symbol
    # p (s - i xi)^a + (1 - p) (s + i xi)^a, so p and 1 - p swap roles;
    # here p must weight the leftward characteristic, matching the
    # numerically validated Green's function (see kernel module).
    q, p = profile.p, 1.0 - profile.p
    s = math.sin(a * math.pi)

    if profile.kind is ProfileKind.WAIT_FIRST:
        if y == 0.0:
            return math.inf
        if abs(y) >= 1.0:
            # the (1 -+ y)^alpha factor kills the removable boundary limit
            return 0.0
        if y > 0.0:
            return p * s / math.pi * (1.0 - y) ** a * y ** (a - 1.0) / _denominator(a, p, y)
        return q * s / math.pi * (1.0 + y) ** a * (-y) ** (a - 1.0) / _denominator(a, q, -y)

    if profile.kind is ProfileKind.STANDARD_WALK:
        if abs(y) > 1.0:
            return 0.0
        if abs(y) == 1.0:
            return math.inf if p * q > 0.0 else 0.0
        num = (1.0 - y) ** (a - 1.0) * (1.0 + y) ** a + (1.0 + y) ** (a - 1.0) * (1.0 - y) ** a
        return p * q * s / math.pi * num / _denominator(a, p, y)

    if profile.kind is ProfileKind.JUMP_FIRST:
        if y > 1.0:
            return p * s / (math.pi * y) / (p * (y - 1.0) ** a + q * (y + 1.0) ** a)
        if y < -1.0:
            return q * s / (-math.pi * y) / (q * (-y - 1.0) ** a + p * (-y + 1.0) ** a)
        if y == 0.0:
            # limit of |(1+y)^a - (1-y)^a| / |y|
            return p * q * s / math.pi * 2.0 * a / _denominator(a, p, 0.0)
        num = abs((1.0 + y) ** a - (1.0 - y) ** a)
        return p * q * s / (math.pi * abs(y)) * num / _denominator(a, p, y)

    raise ValueError(f"unknown profile kind {profile.kind}")


def pdf_at(profile: SimilarityProfile, x: float, t: float) -> float:
    """Density value u(x, t) = phi(x/t) / t."""
    if not t > 0:
        raise ValueError(f"pdf_at requires t > 0, got {t}")
    return phi(profile, x / t) / t


def monomial_solution(mu: float, alpha: float, t: float) -> float:
    """Exact x-independent solution for the source t^mu with zero initial data."""
    if mu < 0:
        raise ValueError(f"mu must be >= 0, got {mu}")
    if t == 0.0:
        return 0.0
    return gamma_fn(mu + 1.0) * t ** (mu + alpha) / gamma_fn(mu + alpha + 1.0)


# --- quadrature machinery -------------------------------------------------
#
# The profiles have algebraic endpoint singularities: y^(a-1) at 0 for
# wait-first and (1 -+ y)^(a-1) at +-1 for the standard walk.  Plain
# adaptive quadrature stalls there, so integration intervals are split at
# the singular abscissae and a graded change of variables y = y0 +- z^(1/a)
# flattens the singular endpoint before handing the piece to quad.

_QUAD_KW = dict(limit=200, epsabs=1e-12, epsrel=1e-10)


def _quad_graded(f, a: float, b: float, alpha: float, singular_at: str):
    """Integrate f on [a, b] with an algebraic singularity at one endpoint."""
    width = b - a
    if width <= 0:
        return 0.0
    inv = 1.0 / alpha
    # The singular factor w^(1-alpha) (w = distance to the endpoint) is
    # recomputed from the rounded evaluation point, not from z, so the
    # w^(alpha-1) blow-up in f cancels consistently even when z**inv
    # underflows below the floating-point spacing at the endpoint.
    if singular_at == "lower":

        def g(z):
            y = a + z**inv
            if y == a:
                y = math.nextafter(a, b)
            return f(y) * inv * (y - a) ** (1.0 - alpha)

    else:

        def g(z):
            y = b - z**inv
            if y == b:
                y = math.nextafter(b, a)
            return f(y) * inv * (b - y) ** (1.0 - alpha)

    val, _ = quad(g, 0.0, width**alpha, **_QUAD_KW)
    return val


def _singular_points(profile: SimilarityProfile) -> list[float]:
    if profile.kind is ProfileKind.WAIT_FIRST:
        return [-1.0, 0.0, 1.0]
    if profile.kind is ProfileKind.STANDARD_WALK:
        return [-1.0, 1.0]
    return [-1.0, 0.0, 1.0]  # jump-first: kinks, no blow-up


def _integrate_phi(profile: SimilarityProfile, a: float, b: float) -> float:
    """Integral of phi over the finite interval [a, b], singularity-aware."""
    if b <= a:
        return 0.0
    points = [s for s in _singular_points(profile) if a < s < b]
    edges = [a] + points + [b]
    sing = set(_singular_points(profile))
    total = 0.0
    f = lambda y: phi(profile, y)
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        lo_sing, hi_sing = lo in sing, hi in sing
        if lo_sing and hi_sing:
            mid = 0.5 * (lo + hi)
            total += _quad_graded(f, lo, mid, profile.alpha, "lower")
            total += _quad_graded(f, mid, hi, profile.alpha, "upper")
        elif lo_sing:
            total += _quad_graded(f, lo, hi, profile.alpha, "lower")
        elif hi_sing:
            total += _quad_graded(f, lo, hi, profile.alpha, "upper")
        else:
            total += quad(f, lo, hi, **_QUAD_KW)[0]
    return total


def _integrate_phi_tail(profile: SimilarityProfile, r: float, side: int) -> float:
    """Integral of phi over (r, inf) (side=+1) or (-inf, -r) (side=-1), r >= 1."""
    if profile.kind is not ProfileKind.JUMP_FIRST:
        return 0.0
    f = lambda u: phi(profile, side / u) / u**2
    val, _ = quad(f, 0.0, 1.0 / r, **_QUAD_KW)
    return val


def profile_mass(profile: SimilarityProfile, extent: float = math.inf) -> float:
    """Total mass of phi, optionally restricted to |y| <= extent."""
    r = min(extent, 1.0) if profile.kind is not ProfileKind.JUMP_FIRST else extent
    if math.isinf(r):
        core = _integrate_phi(profile, -1.0, 1.0)
        return core + _integrate_phi_tail(profile, 1.0, +1) + _integrate_phi_tail(profile, 1.0, -1)
    core = _integrate_phi(profile, -min(r, 1.0), min(r, 1.0))
    if profile.kind is ProfileKind.JUMP_FIRST and r > 1.0:
        core += _integrate_phi(profile, 1.0, r) + _integrate_phi(profile, -r, -1.0)
    return core


# Gauss-Legendre nodes reused by the vectorized fast path.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def profile_cell_average(profile: SimilarityProfile, i: int, t: float, grid: GridSpec) -> float:
    """Cell average (1/h) * integral of u(., t) over cell i (0-based grid index)."""
    if not t > 0:
        raise ValueError(f"profile_cell_average requires t > 0, got {t}")
    h = grid.h
    lo = (grid.i_min + i - 0.5) * h
    hi = lo + h
    # in similarity variables the cell is [lo/t, hi/t] and u dx = phi dy
    val = _integrate_phi(profile, lo / t, hi / t)
    return val / h


def profile_cell_averages(
    profile: SimilarityProfile, t: float, grid: GridSpec
) -> np.ndarray:
    """Cell averages of u(., t) for every grid cell.

    Cells at a safe distance from the singular abscissae use fixed-order
    Gauss-Legendre (the integrand is analytic there); the handful of cells
    touching {0, +-t} fall back to the graded adaptive path.
    """
    if not t > 0:
        raise ValueError(f"profile_cell_averages requires t > 0, got {t}")
    h = grid.h
    lo = (grid.i_min + np.arange(grid.n_space) - 0.5) * h / t
    hi = lo + h / t

    sing = np.array(_singular_points(profile))
    # a cell is "hot" when its closure comes within one cell of a singular point
    margin = h / t
    hot = np.zeros(grid.n_space, dtype=bool)
    for s in sing:
        hot |= (lo - margin <= s) & (s <= hi + margin)
    if profile.kind is not ProfileKind.JUMP_FIRST:
        # fully-outside-support cells are exactly zero
        outside = (hi <= -1.0) | (lo >= 1.0)
    else:
        outside = np.zeros(grid.n_space, dtype=bool)

    out = np.zeros(grid.n_space)
    cold = ~hot & ~outside
    if np.any(cold):
        mid = 0.5 * (lo[cold] + hi[cold])
        half = 0.5 * (hi[cold] - lo[cold])
        y = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        vals = _phi_vec(profile, y)
        out[cold] = (vals * _GL_WEIGHTS[None, :]).sum(axis=1) * half
    for i in np.nonzero(hot & ~outside)[0]:
        out[i] = _integrate_phi(profile, lo[i], hi[i])
    # out holds the integral of phi in similarity variables, which equals
    # the integral of u over the cell in x; divide by h for the average
    return out / h


def _phi_vec(profile: SimilarityProfile, y: np.ndarray) -> np.ndarray:
    """Vectorized phi for points away from singular abscissae."""
    a = profile.alpha
    # same p <-> 1-p convention swap as in phi()
    q, p = profile.p, 1.0 - profile.p
    s = math.sin(a * math.pi)
    c = math.cos(a * math.pi)
    out = np.zeros_like(y)

    def denom(pp, yy):
        qq = 1.0 - pp
        return (
            pp * pp * (1.0 - yy) ** (2 * a)
            + qq * qq * (1.0 + yy) ** (2 * a)
            + 2.0 * pp * qq * ((1.0 - yy) * (1.0 + yy)) ** a * c
        )

    if profile.kind is ProfileKind.WAIT_FIRST:
        m = (y > 0) & (y < 1)
        out[m] = p * s / np.pi * (1.0 - y[m]) ** a * y[m] ** (a - 1.0) / denom(p, y[m])
        m = (y < 0) & (y > -1)
        out[m] = q * s / np.pi * (1.0 + y[m]) ** a * (-y[m]) ** (a - 1.0) / denom(q, -y[m])
    elif profile.kind is ProfileKind.STANDARD_WALK:
        m = np.abs(y) < 1
        ym = y[m]
        num = (1.0 - ym) ** (a - 1.0) * (1.0 + ym) ** a + (1.0 + ym) ** (a - 1.0) * (1.0 - ym) ** a
        out[m] = p * q * s / np.pi * num / denom(p, ym)
    else:  # jump-first
        m = y > 1
        out[m] = p * s / (np.pi * y[m]) / (p * (y[m] - 1.0) ** a + q * (y[m] + 1.0) ** a)
        m = y < -1
        out[m] = q * s / (-np.pi * y[m]) / (q * (-y[m] - 1.0) ** a + p * (1.0 - y[m]) ** a)
        m = (np.abs(y) < 1) & (y != 0)
        ym = y[m]
        num = np.abs((1.0 + ym) ** a - (1.0 - ym) ** a)
        out[m] = p * q * s / (np.pi * np.abs(ym)) * num / denom(p, ym)
        m = y == 0
        out[m] = p * q * s / np.pi * 2.0 * a / denom(p, 0.0)
    return out
