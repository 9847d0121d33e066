"""Quadrature engine for weakly singular Volterra convolutions.

Computes integrals of the form

    I(t) = int_0^t (t - tau)**(mu - 1) * kappa((t - tau)**rho) * tau**nu * h(tau) dtau

where ``kappa`` is analytic (a Mittag-Leffler kernel or a constant), ``h`` is
smooth on (0, t], ``nu > -1`` carries the data singularity at ``tau = 0`` and
``mu > 0`` the kernel singularity at ``tau = t``.

The integral is split at ``tau = t/2``:

* left part: Gauss-Jacobi with weight ``tau**nu``; the kernel factors are
  analytic there.
* right part: substituting ``u = (t - tau)**rho`` turns the kernel into an
  analytic function of ``u`` times the explicit power ``u**((mu - rho)/rho)``;
  the remaining ``u**(1/rho)`` composition in the data argument is resolved by
  geometrically graded panels toward ``u = 0`` plus a Gauss-Jacobi stub.

All node maps depend analytically on ``t``, so the engine accepts complex
``t`` (used for complex-step differentiation of the convolution).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

_PANEL_RATIO = 0.25
_N_PANELS = 9
_N_LEFT = 24
_N_PANEL = 16
_N_STUB = 16


@lru_cache(maxsize=256)
def jacobi_rule(n: int, a: float, b: float):
    """Cached Gauss-Jacobi rule for weight (1-x)**a (1+x)**b on [-1, 1]."""
    with np.errstate(invalid="ignore"):
        # scipy evaluates a discarded np.where branch that can raise
        # "invalid value" warnings for some weight exponents
        x, w = roots_jacobi(n, a, b)
    return x.copy(), w.copy()


@lru_cache(maxsize=64)
def legendre_rule(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x.copy(), w.copy()


def convolve_singular(t, mu, rho, kernel_u, nu, h):
    """Evaluate I(t) as defined in the module docstring.

    ``kernel_u`` maps an array of (complex) u-values to kernel values;
    ``h`` maps an array of (complex) times to data values.  ``t`` may be a
    positive real or a complex number near the positive axis.
    """
    if nu <= -1.0:
        raise ValueError(f"data exponent nu must exceed -1, got {nu}")
    if mu <= 0.0:
        raise ValueError(f"kernel exponent mu must be positive, got {mu}")

    half = t / 2.0

    # left part: tau in [0, t/2], weight tau**nu
    x, w = jacobi_rule(_N_LEFT, 0.0, float(nu))
    tau = half * (1.0 + x) / 2.0
    s = t - tau
    vals = s ** (mu - 1.0) * kernel_u(s**rho) * h(tau)
    left = (half / 2.0) ** (nu + 1.0) * np.sum(w * vals)

    # right part: u = (t - tau)**rho in (0, (t/2)**rho]
    pw = (mu - rho) / rho
    cap = half**rho
    edges = cap * _PANEL_RATIO ** np.arange(_N_PANELS + 1)

    right = 0.0
    xg, wg = legendre_rule(_N_PANEL)
    for j in range(_N_PANELS):
        lo, hi = edges[j + 1], edges[j]
        u = lo + (hi - lo) * (1.0 + xg) / 2.0
        tau = t - u ** (1.0 / rho)
        vals = u**pw * kernel_u(u) * tau**nu * h(tau)
        right = right + (hi - lo) / 2.0 * np.sum(wg * vals)

    # stub [0, edges[-1]] with the u**pw weight pulled into the rule
    xs, ws = jacobi_rule(_N_STUB, 0.0, float(pw))
    lo = edges[-1]
    u = lo * (1.0 + xs) / 2.0
    tau = t - u ** (1.0 / rho)
    vals = kernel_u(u) * tau**nu * h(tau)
    right = right + (lo / 2.0) ** (pw + 1.0) * np.sum(ws * vals)

    return left + right / rho


def gauss_legendre_panels(a, b, n_panels, n_nodes):
    """Composite Gauss-Legendre nodes and weights on [a, b]."""
    x, w = legendre_rule(n_nodes)
    edges = np.linspace(a, b, n_panels + 1)
    lo = edges[:-1, None]
    hi = edges[1:, None]
    nodes = (lo + (hi - lo) * (1.0 + x) / 2.0).ravel()
    weights = ((hi - lo) / 2.0 * w).ravel()
    return nodes, weights
