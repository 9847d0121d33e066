"""Two-parameter Mittag-Leffler and three-parameter (Prabhakar) functions.

Evaluation strategy:

* Power series with compensated (Kahan) summation while the series is
  numerically safe.  The safe radius shrinks with ``rho``: the terms of an
  alternating series peak near ``exp(|z|**(1/rho))`` before decaying, and in
  double precision that peak must stay small enough not to wash out the
  answer.
* Elsewhere, numerical inversion of the Laplace representation
  ``E(z) = (2*pi*i)**-1 * integral of exp(p) * p**(rho-mu) / (p**rho - z)``
  on a parabolic contour wrapping the negative real axis.  The contour scale
  is chosen from the pole ``s = z**(1/rho)`` (present when
  ``|arg z| <= pi*rho``) so the quadrature strip stays wide; when the pole
  lies right of the contour its residue ``s**(1-mu) * exp(s) / rho`` is
  added explicitly.

Reciprocal-gamma convention: ``1/Gamma`` is taken as zero at non-positive
integers, so e.g. the ``1/z`` tail of ``E_{rho,mu}`` vanishes when
``rho - mu`` is a non-positive integer.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import rgamma

from .exceptions import AccuracyError

__all__ = [
    "MLQuery",
    "ml_eval",
    "ml_eval_diag",
    "ml_values",
    "prabhakar_eval",
    "prabhakar_values",
    "asymptotic_tail",
]

# Series is used for |z| below min(CAP, max(FLOOR, BASE**rho)); see module
# docstring for why the radius must shrink with rho.
_SERIES_CAP = 5.0
_SERIES_FLOOR = 1.0
_SERIES_BASE = 5.5
_MAX_TERMS = 600

# Contour tuning: target eps, strip-width factor and baseline parabola scale.
_LOG_EPS = 34.5  # -log(1e-15)
_MU_BASE = 2.5
_EPS = 2.2e-16


def series_radius(rho: float) -> float:
    """Largest |z| for which the Taylor series is used at this order."""
    return min(_SERIES_CAP, max(_SERIES_FLOOR, _SERIES_BASE**rho))


@dataclass(frozen=True)
class MLQuery:
    """Parameter bundle (rho, mu, gamma, z) for one evaluation."""

    rho: float
    mu: float
    gamma: int = 1
    z: complex = 0.0

    def __post_init__(self):
        if not (self.rho > 0.0):
            raise ValueError(f"rho must be positive, got {self.rho}")
        if self.gamma not in (1, 2):
            raise ValueError(f"gamma must be 1 or 2, got {self.gamma}")
        if not (math.isfinite(self.mu)):
            raise ValueError("mu must be finite")
        zc = complex(self.z)
        if not (math.isfinite(zc.real) and math.isfinite(zc.imag)):
            raise ValueError("z must be finite")


def _series_vec(rho, mu, zs):
    """Kahan-compensated Taylor sum of the two-parameter series.

    Returns (values, error estimates).  Caller guarantees |z| is inside
    ``series_radius(rho)``.
    """
    zs = np.asarray(zs, dtype=complex)
    tot = np.zeros_like(zs)
    comp = np.zeros_like(zs)
    zpow = np.ones_like(zs)
    max_term = np.zeros(zs.shape)
    abs_term = np.zeros(zs.shape)

    zmax = float(np.max(np.abs(zs))) if zs.size else 0.0
    # Terms peak around k ~ |z|**(1/rho) / rho; never stop before that.
    k_min = int(math.ceil(zmax ** (1.0 / rho) / rho)) + 6 if zmax > 0 else 6

    k = 0
    while k < _MAX_TERMS:
        term = zpow * float(rgamma(rho * k + mu))
        y = term - comp
        tmp = tot + y
        comp = (tmp - tot) - y
        tot = tmp
        np.abs(term, out=abs_term)
        np.maximum(max_term, abs_term, out=max_term)
        zpow = zpow * zs
        k += 1
        if k > k_min and np.all(abs_term <= 1e-17 * (np.abs(tot) + 1e-300)):
            break
    else:
        raise AccuracyError(
            "Mittag-Leffler series did not converge",
            estimate=float(np.max(abs_term)),
        )

    scale = np.abs(tot) + 1e-300
    err = (abs_term + k * _EPS * max_term) / scale
    return tot, err


def _contour_params(rho, z):
    """Choose parabola scale, step, node count and residue flag for one z."""
    th = abs(cmath.phase(z))
    s_star = None
    mu_max = -1.0
    if th <= math.pi * rho:
        s_star = z ** (1.0 / rho)
        mu_max = 0.5 * (s_star.real + abs(s_star))

    candidates = []
    if s_star is not None and mu_max > 0.0:
        # pole strictly right of the contour; residue added
        mu_a = min(_MU_BASE, 0.25 * mu_max)
        candidates.append((mu_a, 1.0, True))
        if mu_max < _MU_BASE:
            # pole left of (inside) the contour; captured by the quadrature
            d_b = 1.0 - math.sqrt(mu_max / _MU_BASE)
            if d_b > 0.05:
                candidates.append((_MU_BASE, d_b, False))
    else:
        candidates.append((_MU_BASE, 1.0, False))

    best = None
    for mu_c, d, with_res in candidates:
        h = 2.0 * math.pi * d / _LOG_EPS
        half_n = int(math.ceil(math.sqrt(1.0 + _LOG_EPS / mu_c) / h))
        if best is None or half_n < best[3]:
            best = (mu_c, h, with_res, half_n)
    mu_c, h, with_res, half_n = best
    return mu_c, h, with_res, min(half_n, 4000), s_star


def _contour_one(rho, mu, z):
    """Parabolic-contour evaluation for one z with Im(z) >= 0."""
    mu_c, h, with_res, half_n, s_star = _contour_params(rho, z)

    sym = z.imag == 0.0
    if sym:
        u = h * np.arange(half_n + 1)
    else:
        u = h * np.arange(-half_n, half_n + 1)
    iu1 = 1.0 + 1j * u
    p = mu_c * iu1 * iu1
    f = np.exp(p) * p ** (rho - mu) / (p**rho - z) * (2j * mu_c * iu1)
    if sym:
        # for real z the mirrored integrand satisfies f(-u) = -conj(f(u)),
        # so pairs contribute 2i*Im(f) and the center node is purely imaginary
        total = complex((h / (2.0 * math.pi)) * (f[0].imag + 2.0 * np.sum(f[1:].imag)))
    else:
        total = (h / (2.0j * math.pi)) * np.sum(f)

    rough = float(np.sum(np.abs(f))) * h / (2.0 * math.pi)
    val = total
    if with_res and s_star is not None:
        try:
            val = val + (s_star ** (1.0 - mu)) * cmath.exp(s_star) / rho
        except OverflowError:
            # growth sector beyond double range: the value itself overflows
            return complex(math.inf, math.inf), math.inf
    err = (1e-15 * abs(rough) + _EPS * rough * half_n**0.5) / (abs(val) + 1e-300)
    return val, err


def _ml_scalar(rho, mu, z):
    z = complex(z)
    if z == 0.0:
        return complex(rgamma(mu)), _EPS
    if rho == 1.0 and mu == 1.0:
        return cmath.exp(z), _EPS
    if abs(z) <= series_radius(rho):
        v, e = _series_vec(rho, mu, np.array([z]))
        return complex(v[0]), float(e[0])
    if z.imag < 0.0:
        v, e = _contour_one(rho, mu, z.conjugate())
        return v.conjugate(), e
    return _contour_one(rho, mu, z)


def ml_values(rho, mu, zs, with_err=False):
    """Vectorized E_{rho,mu} over an array of complex arguments."""
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    out = np.empty(zs.shape, dtype=complex)
    err = np.zeros(zs.shape)

    if rho == 1.0 and mu == 1.0:
        out[:] = np.exp(zs)
        err[:] = _EPS
        if with_err:
            return out, err
        return out

    absz = np.abs(zs)
    small = absz <= series_radius(rho)
    zero = absz == 0.0
    if np.any(small):
        v, e = _series_vec(rho, mu, zs[small])
        out[small] = v
        err[small] = e
    if np.any(zero):
        out[zero] = complex(rgamma(mu))
        err[zero] = _EPS
    big = ~small
    for idx in np.nonzero(big)[0]:
        out[idx], err[idx] = _ml_scalar(rho, mu, zs[idx])
    if with_err:
        return out, err
    return out


def prabhakar_values(rho, mu, zs, with_err=False):
    """Vectorized E^2_{rho,mu} using the reduction to two E evaluations.

    E^2_{rho,mu}(z) = [E_{rho,mu-1}(z) + (1 + rho - mu) * E_{rho,mu}(z)] / rho

    Note the coefficient: the factor multiplying E_{rho,mu} must reduce to
    1/Gamma(mu) at z = 0, which pins it to (1 + rho - mu).
    """
    a, ea = ml_values(rho, mu - 1.0, zs, with_err=True)
    b, eb = ml_values(rho, mu, zs, with_err=True)
    coef = 1.0 + rho - mu
    vals = (a + coef * b) / rho
    if with_err:
        scale = np.abs(vals) + 1e-300
        err = (np.abs(a) * ea + abs(coef) * np.abs(b) * eb) / (abs(rho) * scale)
        return vals, err
    return vals


def ml_eval_diag(q: MLQuery):
    """Evaluate a query, returning (value, relative error estimate)."""
    if q.gamma == 1:
        return _ml_scalar(q.rho, q.mu, q.z)
    v, e = prabhakar_values(q.rho, q.mu, np.array([complex(q.z)]), with_err=True)
    return complex(v[0]), float(e[0])


def ml_eval(q: MLQuery) -> complex:
    """Two-parameter Mittag-Leffler value E_{rho,mu}(z) for a gamma=1 query."""
    if q.gamma != 1:
        raise ValueError("ml_eval expects gamma=1; use prabhakar_eval for gamma=2")
    val, _ = _ml_scalar(q.rho, q.mu, q.z)
    return val


def prabhakar_eval(q: MLQuery) -> complex:
    """Three-parameter value E^gamma_{rho,mu}(z) for gamma in {1, 2}."""
    if q.gamma == 1:
        return ml_eval(q)
    val, _ = ml_eval_diag(q)
    return val


def asymptotic_tail(rho, mu, z):
    """Leading sector asymptotics -1/(z*Gamma(mu-rho)) of E_{rho,mu}.

    Vanishes when mu - rho is a non-positive integer (reciprocal-gamma
    convention), where the true decay is O(1/z**2).  The classical check:
    E_{1/2,1}(-x) = exp(x^2)*erfc(x) ~ 1/(x*sqrt(pi)) forces Gamma(mu-rho).
    """
    return -float(rgamma(mu - rho)) / complex(z)
