"""Independent numerical evaluation of the Green kernel via transform inversion.

The kernel is G_t(x) = F^{-1}{ L^{-1}{ 1/zeta(xi, s) }(t) }(x) with
zeta(xi, s) = p (s - i xi)^a + (1-p) (s + i xi)^a, principal branch.

Laplace leg: zeta is zero-free away from its two branch cuts
{Re s <= 0, Im s = -+xi} (the argument of ((s - i xi)/(s + i xi))^a can
never reach an odd multiple of pi for 0 < a < 1), so the Bromwich contour
collapses onto the cut boundary and P(xi, t) at t = 1 becomes a pair of
e^{Re s}-damped ray integrals.  That damping keeps the evaluation stable
at every xi; a conventional Talbot contour (kept as a cross-check) hits
its e^r roundoff floor near 1e-5 in double precision.

Fourier leg: the ray integrals expose the phase structure
P(xi) = e^{i xi} A(xi) + e^{-i xi} B(xi) with A, B smooth and decaying
only algebraically (~ xi^{-2a}).  The inversion integral is computed as a
truncated oscillatory quadrature: Gauss panels resolve every phase
e^{i (x -+ 1) xi} up to a radius Xi, and the remainder is summed by
repeated integration by parts, whose terms use analytic xi-derivatives of
A and B at Xi and gain a factor ~ 1/(|k| Xi) per order.  The radius is
enlarged as the phase frequency |k| = |x -+ t| approaches zero — the
kernel is singular on the light cone |x| = t, and points too close to it
are rejected with the truncation radius in the error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import gamma_fn

__all__ = [
    "ContourSpec",
    "KernelQuery",
    "ContourError",
    "eval_P",
    "eval_P_talbot",
    "eval_G1",
    "eval_G",
    "kernel_mass",
    "expected_kernel_mass",
    "zeta",
]

_MAX_NODES = 2**14
_XI_HEAD = 400.0  # default truncation radius of the Fourier integral
_XI_CAP = 2.0e4  # largest radius before giving up near the light cone
_K_SAFETY = 12.0  # required |k| * Xi for the integration-by-parts tail
_TAIL_TERMS = 5


class ContourError(RuntimeError):
    """Quadrature failed to converge within its node or radius budget."""


@dataclass(frozen=True)
class ContourSpec:
    """Inversion controls: seed node count and Talbot cross-check geometry.

    ``M`` seeds the doubling convergence loop of the ray quadrature.  The
    Talbot cross-check uses radius r_factor * M; its crossings of the
    horizontal cut rays at height -+xi sit at Re s > 0 only while
    |xi| < (pi/2) r, which xi_margin guards.
    """

    M: int = 64
    r_factor: float = 0.4
    xi_margin: float = 1.0

    def __post_init__(self):
        if self.M < 16:
            raise ValueError(f"contour node count M must be >= 16, got {self.M}")
        if self.xi_margin <= 2.0 / math.pi:
            raise ValueError("xi_margin must exceed 2/pi for the contour to clear the cuts")


@dataclass(frozen=True)
class KernelQuery:
    alpha: float
    p: float
    xi: float = 0.0
    contour: ContourSpec = field(default_factory=ContourSpec)

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie strictly in (0, 1), got {self.alpha}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")


def zeta(alpha: float, p: float, xi, s):
    """The transform-space denominator, principal branch powers."""
    return p * (s - 1j * xi) ** alpha + (1.0 - p) * (s + 1j * xi) ** alpha


# --- branch-cut (inverse Laplace) leg --------------------------------------


def _u_quadrature(alpha: float, xi_min: float, n: int):
    """Log-substituted trapezoid for integrals of e^{-u} f(u) over (0, inf).

    f vanishes at least like u^alpha near zero, so the substitution
    u = e^v decays double-sided; the lower limit tracks the smallest xi in
    play because the integrand develops structure at u ~ xi.
    """
    v_lo = -35.0 / min(1.0, 1.0 - alpha)
    if xi_min > 0.0:
        v_lo = min(v_lo, math.log(xi_min) - 40.0)
    v = np.linspace(v_lo, 4.5, n)
    u = np.exp(v)
    return u, np.exp(-u) * u * (v[1] - v[0])


def _ab_raw(alpha: float, p: float, xi: np.ndarray, n: int):
    """Smooth phase coefficients of P(xi, 1) = e^{i xi} A + e^{-i xi} B.

    A and B are the jump integrals of 1/zeta along the upper and lower
    cut; on the upper cut only (s - i xi)^a jumps (values u^a e^{+-i pi a})
    while (s + i xi)^a stays continuous, and conversely below.  Requires
    xi > 0 elementwise.
    """
    q = 1.0 - p
    u, wgt = _u_quadrature(alpha, float(xi.min()), n)
    ua = u**alpha
    eia = complex(np.exp(1j * math.pi * alpha))
    a_out = np.empty(xi.shape, dtype=complex)
    b_out = np.empty(xi.shape, dtype=complex)
    for lo in range(0, xi.size, 4096):
        x = xi[lo : lo + 4096, None]
        cont = q * (-u[None, :] + 2j * x) ** alpha
        jump = 1.0 / (p * ua / eia + cont) - 1.0 / (p * ua * eia + cont)
        a_out[lo : lo + 4096] = (jump @ wgt) / (2j * math.pi)
        cont = p * (-u[None, :] - 2j * x) ** alpha
        jump = 1.0 / (q * ua / eia + cont) - 1.0 / (q * ua * eia + cont)
        b_out[lo : lo + 4096] = (jump @ wgt) / (2j * math.pi)
    return a_out, b_out


def _strip_zero(alpha: float, p: float) -> complex | None:
    """Zero of zeta between the cuts, as sigma = s / xi, or None.

    The condition p (sigma - i)^a = -(1-p) (sigma + i)^a fixes the Moebius
    ratio z = (sigma - i) / (sigma + i) to ((1-p)/p)^(1/a) e^{-i pi / a},
    so sigma = i (1 + z) / (1 - z) in closed form.  The continuous angle
    arg(sigma - i) - arg(sigma + i) is bounded below by -2 pi, so the
    required value -pi / a is attainable only for alpha > 1/2, and even
    then the candidate is a genuine zero only when it lands back on the
    principal sheet (inside the strip, left of the Bromwich line); strong
    asymmetry in p pushes it off the sheet, in which case there is no
    zero at all and the cut integrals carry everything.
    """
    if alpha <= 0.5 or p in (0.0, 1.0):
        return None
    q = 1.0 - p
    z = (q / p) ** (1.0 / alpha) * np.exp(-1j * math.pi / alpha)
    sigma = complex(1j * (1.0 + z) / (1.0 - z))
    residual = p * (sigma - 1j) ** alpha + q * (sigma + 1j) ** alpha
    if abs(residual) > 1e-8 or sigma.real >= 0.0 or abs(sigma.imag) >= 1.0:
        return None
    return sigma


def _pole_coefficient(alpha: float, p: float, sigma: complex) -> complex:
    """Residue prefactor: P gains c xi^(1-a) e^{xi sigma} from the zero."""
    q = 1.0 - p
    return 1.0 / (alpha * (p * (sigma - 1j) ** (alpha - 1.0) + q * (sigma + 1j) ** (alpha - 1.0)))


def _falling(alpha: float, j: int) -> float:
    out = 1.0
    for i in range(j):
        out *= alpha - i
    return out


def _ab_derivs_raw(alpha: float, p: float, xi0: float, n: int, orders: int):
    """xi-derivatives of A and B at a single point, orders 0..orders-1.

    Differentiates under the jump integrals: only w = -u +- 2i xi depends
    on xi, so d/dxi = +-2i d/dw and the derivatives of 1/phi follow from
    the Leibniz recursion on phi * (1/phi) = 1.
    """
    q = 1.0 - p
    u, wgt = _u_quadrature(alpha, xi0, n)
    ua = u**alpha
    eia = complex(np.exp(1j * math.pi * alpha))

    def one_cut(w, cut_weight, cont_weight, dxi_dw):
        phi_pows = [cont_weight * _falling(alpha, j) * w ** (alpha - j) for j in range(orders)]
        out = []
        sides = []
        for phase in (1.0 / eia, eia):
            r = [1.0 / (cut_weight * ua * phase + phi_pows[0])]
            for m in range(1, orders):
                acc = np.zeros_like(r[0])
                for j in range(1, m + 1):
                    acc += math.comb(m, j) * phi_pows[j] * r[m - j]
                r.append(-r[0] * acc)
            sides.append(r)
        below, above = sides
        for m in range(orders):
            val = ((below[m] - above[m]) @ wgt) / (2j * math.pi)
            out.append(dxi_dw**m * val)
        return out

    a_d = one_cut(-u + 2j * xi0, p, q, 2j)
    b_d = one_cut(-u - 2j * xi0, q, p, -2j)
    return np.array(a_d), np.array(b_d)


def _converge(fn, seed: int, rtol: float):
    """Double the node count of fn(n) until the result stabilizes."""
    n = max(seed, 256)
    prev = fn(n)
    while n <= _MAX_NODES:
        n *= 2
        cur = fn(n)
        scale = max(max(float(np.max(np.abs(c))) for c in cur), 1e-300)
        if all(float(np.max(np.abs(c - pr))) <= rtol * scale for c, pr in zip(cur, prev)):
            return cur
        prev = cur
    raise ContourError(f"ray quadrature did not converge with up to {_MAX_NODES} nodes")


def _cut_P(alpha: float, p: float, xi: np.ndarray, n: int) -> np.ndarray:
    """P(xi, 1) for xi >= 0 with a fixed node count (used by the doubling loop)."""
    xi = np.asarray(xi, dtype=float)
    out = np.empty(xi.shape, dtype=complex)
    zero = xi == 0.0
    if np.any(zero):
        # the cuts merge on the negative reals where zeta = s^alpha jumps
        # by 2i sin(pi a) u^{-a} in reciprocal
        u, wgt = _u_quadrature(alpha, 0.0, n)
        val = np.sum(wgt * u**-alpha) * math.sin(math.pi * alpha) / math.pi
        out[zero] = val
    if np.any(~zero):
        pos = xi[~zero]
        a, b = _ab_raw(alpha, p, pos, n)
        out[~zero] = np.exp(1j * pos) * a + np.exp(-1j * pos) * b
        sigma = _strip_zero(alpha, p)
        if sigma is not None:
            c = _pole_coefficient(alpha, p, sigma)
            out[~zero] += c * pos ** (1.0 - alpha) * np.exp(pos * sigma)
    return out


def eval_P(query: KernelQuery, rtol: float = 1e-8) -> complex:
    """P(xi, 1), converged by doubling the quadrature node count.

    Negative frequencies use the conjugate symmetry P(-xi) = conj(P(xi)),
    which follows from zeta(-xi, conj s) = conj(zeta(xi, s)).
    """
    x = np.array([abs(query.xi)])
    (val,) = _converge(lambda n: (_cut_P(query.alpha, query.p, x, n),), query.contour.M, rtol)
    val = complex(val[0])
    return val.conjugate() if query.xi < 0 else val


def eval_P_talbot(query: KernelQuery, M: int | None = None) -> complex:
    """P(xi, 1) on a fixed Talbot contour s = r theta (cot theta + i).

    Fully independent of the ray quadrature, but only trustworthy for
    moderate M: the radius r = r_factor * M amplifies roundoff as e^r, so
    double-precision accuracy bottoms out near 1e-5 around M ~ 64.  Needs
    |xi| < (pi/2) r so the contour clears the cut endpoints.
    """
    spec = query.contour
    M = spec.M if M is None else M
    r = spec.r_factor * M
    if abs(query.xi) * spec.xi_margin >= 0.5 * math.pi * r:
        raise ContourError(
            f"Talbot radius {r:g} cannot clear the cut endpoints at height {query.xi:g}"
        )
    theta = (np.arange(M) + 0.5) * (2.0 * np.pi / M) - np.pi
    cot = np.cos(theta) / np.sin(theta)
    s = r * theta * (cot + 1j)
    ds = r * (cot - theta / np.sin(theta) ** 2 + 1j)
    dz = zeta(query.alpha, query.p, query.xi, s)
    if not np.all(np.abs(dz) > 0.0):
        raise ContourError("zeta vanished on the contour")
    return complex(np.sum(np.exp(s) / dz * ds) / (1j * M))


def contour_min_abs_zeta(query: KernelQuery) -> float:
    """Minimum |zeta| along the cut-adjacent abscissae (zero-free check)."""
    a, p, x = query.alpha, query.p, abs(query.xi)
    u = np.exp(np.linspace(-35.0, 4.5, 512))
    vals = []
    for sign in (+1.0, -1.0):
        s = -u + 1j * sign * x
        vals.append(np.abs(zeta(a, p, x, s + 1e-12j)))
        vals.append(np.abs(zeta(a, p, x, s - 1e-12j)))
    return float(np.min(vals))


# --- oscillatory Fourier leg -----------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _panel_rule(edges: np.ndarray):
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


def _head_nodes(radius: float, max_freq: float):
    """Panels on (0, radius]: geometric near zero, oscillation-limited beyond.

    Returns (nodes, weights, n_inner); the first n_inner nodes cover
    (0, min(1, radius)], where the phase-split coefficients A and B can be
    individually singular (only their combination P is regular) and the
    integrand must therefore be assembled unsplit.
    """
    width = min(2.0, 4.5 / (max_freq + 1.0))
    inner = min(1.0, radius)
    edges = np.concatenate([[0.0], np.geomspace(1e-6 * inner, inner, 14)])
    n_inner = (len(edges) - 1) * len(_GL_NODES)
    if radius > inner:
        n = int(math.ceil((radius - inner) / width))
        edges = np.concatenate([edges, np.linspace(inner, radius, n + 1)[1:]])
    nodes, weights = _panel_rule(edges)
    return nodes, weights, n_inner


def _tail_by_parts(k, derivs, radius: float):
    """integral_radius^inf e^{i k xi} g(xi) d xi from g's derivatives there.

    Repeated integration by parts; all boundary terms at infinity vanish
    because g and its derivatives decay.  Valid once |k| * radius is a
    few times the number of terms.
    """
    ik = 1j * np.asarray(k)
    total = np.zeros(np.shape(k), dtype=complex)
    for order, g in enumerate(derivs):
        total -= (-1.0) ** order * g / ik ** (order + 1)
    return np.exp(ik * radius) * total


def _require_offcone(kmin: float) -> float:
    if kmin < _K_SAFETY / _XI_CAP:
        raise ContourError(
            "evaluation point lies within ~"
            f"{_K_SAFETY / _XI_CAP:.1e} of the kernel light cone; the "
            f"truncation radius needed exceeds the cap {_XI_CAP:g}"
        )
    return min(max(_XI_HEAD, _K_SAFETY / kmin), _XI_CAP)


def _check_degenerate(p: float) -> None:
    if p in (0.0, 1.0):
        raise ValueError(
            "the kernel is a transported point mass for p in {0, 1}; "
            "pointwise evaluation is only defined for 0 < p < 1"
        )


def _G_values(alpha: float, p: float, t: float, x: np.ndarray, spec: ContourSpec) -> np.ndarray:
    """G_t(x) = (1/pi) Re int_0^inf [e^{i(x+t)xi} A_t + e^{i(x-t)xi} B_t] d xi.

    A_t(xi) = t^{a-1} A(t xi) and likewise B_t, so each t gets its own ray
    quadratures at scaled frequencies — the scaling identity is never
    assumed here, making this an independent check of it.
    """
    k_a = x + t
    k_b = x - t
    kmin = float(min(np.min(np.abs(k_a)), np.min(np.abs(k_b))))
    radius = _require_offcone(kmin)
    max_freq = float(max(np.max(np.abs(k_a)), np.max(np.abs(k_b))))
    nodes, weights, n_in = _head_nodes(radius, max_freq)

    scale = t ** (alpha - 1.0)
    a, b = _converge(lambda n: _ab_raw(alpha, p, t * nodes, n), spec.M, 1e-9)
    # inner region: assemble P unsplit (A, B may individually blow up at 0)
    wP = weights[:n_in] * scale * (
        np.exp(1j * t * nodes[:n_in]) * a[:n_in] + np.exp(-1j * t * nodes[:n_in]) * b[:n_in]
    )
    wa = weights[n_in:] * (scale * a[n_in:])
    wb = weights[n_in:] * (scale * b[n_in:])
    out = np.empty(x.shape, dtype=complex)
    for lo in range(0, x.size, 1024):
        blk = slice(lo, lo + 1024)
        out[blk] = np.exp(1j * np.outer(x[blk], nodes[:n_in])) @ wP
        out[blk] += np.exp(1j * np.outer(k_a[blk], nodes[n_in:])) @ wa
        out[blk] += np.exp(1j * np.outer(k_b[blk], nodes[n_in:])) @ wb

    a_d, b_d = _converge(
        lambda n: _ab_derivs_raw(alpha, p, t * radius, n, _TAIL_TERMS), spec.M, 1e-9
    )
    a_d = [scale * t**m * v for m, v in enumerate(a_d)]
    b_d = [scale * t**m * v for m, v in enumerate(b_d)]
    out += _tail_by_parts(k_a, a_d, radius) + _tail_by_parts(k_b, b_d, radius)

    sigma = _strip_zero(alpha, p)
    if sigma is not None:
        # the residue part c xi^{1-a} e^{t sigma xi} of P(xi, t) Fourier-
        # inverts in closed form (no truncation needed)
        c = _pole_coefficient(alpha, p, sigma)
        out += c * gamma_fn(2.0 - alpha) * (-t * sigma - 1j * x) ** (alpha - 2.0)
    return out.real / math.pi


def eval_G1(x, query: KernelQuery) -> np.ndarray:
    """G_1 at one or many positions; rejects points too close to x = -+1.

    The kernel vanishes for |x| > 1 (P has exponential type 1 in xi, the
    transform-side signature of light-cone support), which the evaluation
    reproduces numerically rather than assuming.
    """
    _check_degenerate(query.p)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return _G_values(query.alpha, query.p, 1.0, x, query.contour)


def eval_G(x, t: float, query: KernelQuery) -> np.ndarray:
    """G_t evaluated directly at time t (no use of the t-scaling identity)."""
    _check_degenerate(query.p)
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return _G_values(query.alpha, query.p, t, x, query.contour)


def _over_xi_derivs(derivs, radius: float):
    """Derivatives of g(xi)/xi at the radius from the derivatives of g."""
    out = []
    for order in range(len(derivs)):
        acc = 0.0 + 0.0j
        for j in range(order + 1):
            acc += (
                math.comb(order, j)
                * derivs[j]
                * (-1.0) ** (order - j)
                * math.factorial(order - j)
                * radius ** -(order - j + 1)
            )
        out.append(acc)
    return out


def kernel_mass(t: float, query: KernelQuery, extent: float | None = None) -> float:
    """Integral of G_t over [-extent, extent], expected t^(a-1)/Gamma(a).

    Integrating the box window against the transform first (Parseval)
    turns the x-integral into int_0^inf P(xi, t) 2 sin(extent xi)/xi dxi,
    whose four phase components all oscillate at |k| >= extent - t; this
    avoids quadrature across the light-cone singularities at x = -+t.
    The window must contain the support [-t, t], so the result is the
    total mass.
    """
    _check_degenerate(query.p)
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    X = t + 1.0 if extent is None else extent
    if X <= t:
        raise ValueError(f"extent {X} does not contain the kernel support [-{t}, {t}]")
    radius = _require_offcone(min(X - t, 1.0))
    nodes, weights, _ = _head_nodes(radius, X + t)

    scale = t ** (query.alpha - 1.0)
    a, b = _converge(lambda n: _ab_raw(query.alpha, query.p, t * nodes, n), query.contour.M, 1e-9)
    g = (np.exp(1j * t * nodes) * a + np.exp(-1j * t * nodes) * b) * scale
    head = np.sum(weights * g * 2.0 * np.sin(X * nodes) / nodes)

    a_d, b_d = _converge(
        lambda n: _ab_derivs_raw(query.alpha, query.p, t * radius, n, _TAIL_TERMS),
        query.contour.M,
        1e-9,
    )
    a_d = [scale * t**m * v for m, v in enumerate(a_d)]
    b_d = [scale * t**m * v for m, v in enumerate(b_d)]
    a_over = _over_xi_derivs(a_d, radius)
    b_over = _over_xi_derivs(b_d, radius)
    tails = (
        _tail_by_parts(t + X, a_over, radius)
        - _tail_by_parts(t - X, a_over, radius)
        + _tail_by_parts(X - t, b_over, radius)
        - _tail_by_parts(-(t + X), b_over, radius)
    ) / 1j
    total = head + tails
    sigma = _strip_zero(query.alpha, query.p)
    if sigma is not None:
        # Residue component integrated over the window in closed form.  The
        # cut component alone is not light-cone supported: outside |x| = t
        # it exactly cancels the residue's algebraic tail, so both window
        # integrals are needed for their sum to equal the total mass.
        c = _pole_coefficient(query.alpha, query.p, sigma)
        total += (c / 1j) * gamma_fn(1.0 - query.alpha) * (
            (-t * sigma - 1j * X) ** (query.alpha - 1.0)
            - (-t * sigma + 1j * X) ** (query.alpha - 1.0)
        )
    return float(total.real / math.pi)


def expected_kernel_mass(t: float, alpha: float) -> float:
    return t ** (alpha - 1.0) / gamma_fn(alpha)
