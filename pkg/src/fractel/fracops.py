"""Riemann-Liouville fractional integral, derivative, initial limits and a
discrete graded-mesh oracle.

Sign conventions follow the fractional-integration literature where the
integral order is negative:

    J^sigma g(t) = Gamma(-sigma)**-1 * int_0^t g(xi) (t-xi)**(-sigma-1) dxi,
    sigma < 0,

and the Riemann-Liouville derivative of order rho in (0, 1] is
``d/dt J^(rho-1) g`` (for rho = 1 the classical derivative).

The derivative of a closed-form callable is taken by complex-step
differentiation of the quadrature representation of ``J^(rho-1) g``: the
whole quadrature map is analytic in ``t``, so ``Im J(t + i*h) / h``
reproduces the t-derivative to machine precision without any difference
cancellation.

``gl_derivative_grid`` is the independent low-order oracle: a
product-integration discretization (piecewise-linear in the regularized
samples) of ``J^(rho-1)`` on the graded mesh, followed by finite
differencing.  It never shares code with the analytic path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma, rgamma

from ._quad import convolve_singular, jacobi_rule, legendre_rule
from .exceptions import NoLimitError
from .sources import PowerPoly

__all__ = [
    "SingularFunctionSamples",
    "graded_grid",
    "rl_integral",
    "rl_derivative",
    "rl_limit",
    "gl_derivative_grid",
]

_CS_REL = 1e-100  # complex-step size relative to t


@dataclass(frozen=True)
class SingularFunctionSamples:
    """Samples of g on a grid in (0, T] with a known power singularity.

    ``singular_exponent`` is the nu for which t**(-nu) * g(t) stays bounded
    near zero (nu = rho - 1 for solution-type functions).
    """

    grid: np.ndarray
    values: np.ndarray
    singular_exponent: float = 0.0

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if grid.ndim != 1 or grid.size < 2:
            raise ValueError("grid must be a 1-D array with at least two nodes")
        if grid[0] <= 0.0 or np.any(np.diff(grid) <= 0.0):
            raise ValueError("grid must be strictly increasing with grid[0] > 0")
        if values.shape != grid.shape:
            raise ValueError("values must match grid shape")

    @property
    def regularized(self):
        """t**(-nu) * g(t) on the grid."""
        return self.values * self.grid ** (-self.singular_exponent)


def graded_grid(horizon, n, rho):
    """Graded mesh t_j = T (j/n)**(2/rho), j = 1..n, clustered at zero."""
    j = np.arange(1, n + 1, dtype=float)
    return horizon * (j / n) ** (2.0 / rho)


def _resolve_data(g, singular_exponent):
    """Split g into (nu, h) with g(t) = t**nu * h(t), h smooth-ish."""
    if isinstance(g, PowerPoly):
        return g, None
    if isinstance(g, SingularFunctionSamples):
        nu = g.singular_exponent
        w = np.ascontiguousarray(g.regularized)
        grid = g.grid

        def h(tau):
            tr = np.real(tau)
            if np.iscomplexobj(w):
                return np.interp(tr, grid, w.real, left=w[0].real) + 1j * np.interp(
                    tr, grid, w.imag, left=w[0].imag
                )
            return np.interp(tr, grid, w, left=w[0])

        return None, (nu, h)
    if callable(g):
        nu = float(singular_exponent)

        def h(tau):
            return g(tau) * tau ** (-nu) if nu != 0.0 else g(tau)

        return None, (nu, h)
    if isinstance(g, (int, float, complex)):
        c = complex(g)

        def h(tau):
            return np.full(np.shape(tau), c.real) if c.imag == 0 else np.full(np.shape(tau), c)

        return None, (0.0, h)
    raise TypeError(f"cannot integrate object of type {type(g).__name__}")


def _rl_integral_raw(g, sigma, t, singular_exponent):
    """J^sigma g at (possibly complex) t > 0; sigma < 0."""
    mu = -sigma
    poly, pair = _resolve_data(g, singular_exponent)
    if poly is not None:
        # power rule termwise: J^sigma t**e = G(e+1)/G(e+1-sigma) t**(e-sigma)
        out = 0.0
        for m, c in enumerate(poly.coeffs):
            if c != 0.0:
                e = poly.base + m
                out = out + c * gamma(e + 1.0) * float(rgamma(e + 1.0 + mu)) * t ** (e + mu)
        return out
    nu, h = pair
    raw = convolve_singular(t, mu, 1.0, lambda u: np.ones_like(u), nu, h)
    return raw * float(rgamma(mu))


def rl_integral(g, sigma, t, singular_exponent=0.0):
    """Riemann-Liouville integral J^sigma g(t) for sigma < 0, t > 0.

    ``g`` may be a callable, a PowerPoly, a constant, or
    SingularFunctionSamples (linear interpolation of the regularized values;
    accuracy then limited by the sampling).
    """
    if not (sigma < 0.0):
        raise ValueError(f"sigma must be negative, got {sigma}")
    if not (np.real(t) > 0.0):
        raise ValueError(f"t must be positive, got {t}")
    out = _rl_integral_raw(g, sigma, t, singular_exponent)
    if isinstance(out, np.ndarray) and out.ndim == 0:
        out = out.item()
    if isinstance(out, complex) and out.imag == 0.0:
        return out.real
    return out


def rl_derivative(g, rho, t, singular_exponent=0.0):
    """Riemann-Liouville derivative of order rho in (0, 1] at t > 0.

    Closed-form inputs differentiate the quadrature representation of
    J^(rho-1) by a complex step, so they must be evaluable at complex times
    near the positive axis (all closed-form data in this package are).
    Sampled data fall back to the discrete graded-mesh scheme, interpolated
    at the requested time.
    """
    if not (0.0 < rho <= 1.0):
        raise ValueError(f"rho must lie in (0, 1], got {rho}")
    if not (t > 0.0):
        raise ValueError(f"t must be positive, got {t}")
    if isinstance(g, SingularFunctionSamples):
        if not (g.grid[0] <= t <= g.grid[-1]):
            raise ValueError(f"t={t} outside the sampled range")
        d = gl_derivative_grid(g, rho)
        if np.iscomplexobj(d):
            re = np.interp(t, g.grid, d.real)
            im = np.interp(t, g.grid, d.imag)
            return complex(re, im)
        return float(np.interp(t, g.grid, d))
    if isinstance(g, PowerPoly):
        return float(np.real(g.rl_derivative(rho)(t)))
    hstep = t * _CS_REL
    if rho == 1.0:
        val = g(t + 1j * hstep)
        return float(np.imag(val)) / hstep
    val = _rl_integral_raw(g, rho - 1.0, t + 1j * hstep, singular_exponent)
    return float(np.imag(val)) / hstep


def rl_limit(g, order_alpha, t0=0.05, levels=5, exponents=None):
    """Gamma(alpha) * lim_{t->0+} t**(1-alpha) g(t) by Richardson extrapolation.

    The extrapolation eliminates correction powers t**e for e in
    ``exponents`` (default alpha * (1, 2, 3, 4), matching Mittag-Leffler-type
    data) from samples at t0 / 2**k.
    """
    a = float(order_alpha)
    if not (0.0 < a < 1.0):
        raise ValueError(f"order_alpha must lie in (0, 1), got {a}")
    if exponents is None:
        exponents = tuple(a * (j + 1) for j in range(levels - 1))
    ts = t0 * 0.5 ** np.arange(levels)
    rows = [np.array([float(np.real(g(t))) * t ** (1.0 - a) for t in ts])]
    for j in range(levels - 1):
        prev = rows[-1]
        fac = 2.0 ** float(exponents[j])
        rows.append(prev[1:] + (prev[1:] - prev[:-1]) / (fac - 1.0))

    first_corr = abs(rows[1][-1] - rows[0][-1]) if levels > 1 else 0.0
    last_corr = abs(rows[-1][-1] - rows[-2][-1]) if levels > 1 else 0.0
    # a settled table kills at least one power per level, so the correction
    # sequence must collapse; a lingering correction means no finite limit
    if levels > 2 and first_corr > 0.0 and last_corr > 1e-9 and last_corr > 0.25 * first_corr:
        raise NoLimitError(
            f"extrapolation did not settle: corrections {first_corr:.3e} -> {last_corr:.3e}"
        )
    return gamma(a) * float(rows[-1][-1])


def _newton2(s0, s1, s2, f0, f1, f2):
    """Newton coefficients of the parabola through three support points."""
    d01 = (f1 - f0) / (s1 - s0)
    d12 = (f2 - f1) / (s2 - s1)
    d012 = (d12 - d01) / (s2 - s0)
    return f0, d01, d012


def _interp2(xi, s0, s1, c0, c1, c2):
    return c0 + (xi - s0) * (c1 + c2 * (xi - s1))


def _cell_moment(tj, a, b, interp, nu, rho, first, last):
    """integral over [a, b] of (tj-xi)**(-rho) xi**nu * interp(xi) dxi.

    ``interp`` evaluates the local polynomial model of the regularized
    samples.  Endpoint singularities are absorbed into Gauss-Jacobi weights
    on the first (xi**nu) and last ((tj-xi)**(-rho)) cells: the affine map
    xi = a + (b-a)(1+x)/2 turns xi**nu into ((b-a)/2)**nu (1+x)**nu exactly
    when a = 0, and (tj-xi)**(-rho) into ((b-a)/2)**(-rho) (1-x)**(-rho)
    exactly when b = tj.
    """
    if first and last:
        x, w = jacobi_rule(8, -rho, nu)
        xi = a + (b - a) * (1.0 + x) / 2.0
        return ((b - a) / 2.0) ** (1.0 - rho + nu) * np.sum(w * interp(xi))
    if first:
        x, w = jacobi_rule(8, 0.0, nu)
        xi = a + (b - a) * (1.0 + x) / 2.0
        vals = (tj - xi) ** (-rho) * interp(xi)
        return ((b - a) / 2.0) ** (1.0 + nu) * np.sum(w * vals)
    if last:
        x, w = jacobi_rule(8, -rho, 0.0)
        xi = a + (b - a) * (1.0 + x) / 2.0
        vals = xi**nu * interp(xi)
        return ((b - a) / 2.0) ** (1.0 - rho) * np.sum(w * vals)
    x, w = legendre_rule(6)
    xi = a + (b - a) * (1.0 + x) / 2.0
    vals = (tj - xi) ** (-rho) * xi**nu * interp(xi)
    return (b - a) / 2.0 * np.sum(w * vals)


def gl_derivative_grid(samples: SingularFunctionSamples, rho):
    """First-order discrete RL derivative on a graded grid (oracle only).

    Product integration of the regularized samples gives J^(rho-1) g at the
    nodes; a nonuniform three-point stencil then differentiates it.  Accuracy
    is first order away from t = 0 and degrades toward the origin, which is
    why callers evaluate comparisons on interior windows.
    """
    if not (0.0 < rho <= 1.0):
        raise ValueError(f"rho must lie in (0, 1], got {rho}")
    t = samples.grid
    n = t.size
    if n < 8:
        raise ValueError(f"need at least 8 nodes, got {n}")
    nu = samples.singular_exponent
    w = np.asarray(samples.regularized)
    if not np.iscomplexobj(w):
        w = w.astype(float)

    # regularized value at 0 by linear extrapolation; the [0, t_1] cell is
    # O(t_1**(1+nu-rho+1)) small on the graded mesh so low order suffices
    w0 = w[0] + (w[1] - w[0]) * (0.0 - t[0]) / (t[1] - t[0])

    if rho == 1.0:
        aj = w * t**nu
    else:
        edges = np.concatenate(([0.0], t))
        wall = np.concatenate(([w0], w))
        coef = float(rgamma(1.0 - rho))
        aj = np.empty(n, dtype=w.dtype)

        xg, wg = legendre_rule(6)
        # interior cells batched per row: quadratic model of w on each cell
        # [edges[i], edges[i+1]] through support points (i-1, i, i+1)
        a_all = edges[:-1]
        b_all = edges[1:]
        halfw = (b_all - a_all) / 2.0
        xi_all = a_all[:, None] + halfw[:, None] * (1.0 + xg)
        idx = np.arange(1, n)  # interior cell numbers
        s0, s1, s2 = edges[idx - 1], edges[idx], edges[idx + 1]
        c0, c1, c2 = _newton2(s0, s1, s2, wall[idx - 1], wall[idx], wall[idx + 1])
        quad_all = np.empty_like(xi_all, dtype=wall.dtype)
        quad_all[idx] = c0[:, None] + (xi_all[idx] - s0[:, None]) * (
            c1[:, None] + c2[:, None] * (xi_all[idx] - s1[:, None])
        )
        base_all = np.empty_like(quad_all)
        base_all[idx] = xi_all[idx] ** nu * quad_all[idx]

        def first_interp(xi):
            return wall[0] + (wall[1] - wall[0]) * (xi - edges[0]) / (edges[1] - edges[0])

        for j in range(n):
            tj = t[j]
            total = _cell_moment(
                tj, edges[0], edges[1], first_interp, nu, rho, first=True, last=(j == 0)
            )
            if j > 0:
                if j >= 2:
                    lc = _newton2(
                        edges[j - 1], edges[j], edges[j + 1],
                        wall[j - 1], wall[j], wall[j + 1],
                    )
                    last_interp = lambda xi, lc=lc, j=j: _interp2(
                        xi, edges[j - 1], edges[j], *lc
                    )
                else:
                    last_interp = lambda xi, j=j: wall[j] + (wall[j + 1] - wall[j]) * (
                        xi - edges[j]
                    ) / (edges[j + 1] - edges[j])
                total += _cell_moment(
                    tj, edges[j], edges[j + 1], last_interp, nu, rho, first=False, last=True
                )
            if j > 1:
                rows = slice(1, j)
                vals = (tj - xi_all[rows]) ** (-rho) * base_all[rows]
                total += np.sum(vals @ wg * halfw[rows])
            aj[j] = coef * total

    # nonuniform 3-point differentiation of A in the variable s = t**rho
    # (A is smoother in s, and the graded mesh is near-uniform there), then
    # chain rule dA/dt = rho t**(rho-1) dA/ds; one-sided at both ends
    s = t**rho
    d = np.empty(n, dtype=aj.dtype)
    h1 = s[1:-1] - s[:-2]
    h2 = s[2:] - s[1:-1]
    d[1:-1] = (
        -h2 / (h1 * (h1 + h2)) * aj[:-2]
        + (h2 - h1) / (h1 * h2) * aj[1:-1]
        + h1 / (h2 * (h1 + h2)) * aj[2:]
    )
    a1, b1 = s[1] - s[0], s[2] - s[0]
    d[0] = (
        -(a1 + b1) / (a1 * b1) * aj[0]
        + b1 / (a1 * (b1 - a1)) * aj[1]
        - a1 / (b1 * (b1 - a1)) * aj[2]
    )
    a2, b2 = s[-1] - s[-2], s[-1] - s[-3]
    d[-1] = (
        (a2 + b2) / (a2 * b2) * aj[-1]
        - b2 / (a2 * (b2 - a2)) * aj[-2]
        + a2 / (b2 * (b2 - a2)) * aj[-3]
    )
    return rho * t ** (rho - 1.0) * d
