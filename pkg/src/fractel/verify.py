"""Theorem-level empirical checks.

Nothing here proves an estimate; these routines measure the quantities the
theory bounds and report fitted constants with their sweep metadata:

* coefficient-decay diagnostics (the absolute-convergence engine behind the
  Fourier construction),
* the stability ratio of the forward problem (solution norms over data
  norms) and its behaviour across admissible sweeps,
* sector-decay constant fits for the Mittag-Leffler bounds,
* convergence studies over mode cutoff and time resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fracops import SingularFunctionSamples, gl_derivative_grid
from .mlf import ml_values
from .scalar_cauchy import branch_pair
from .spectral import (
    ProblemSpec,
    SinePoly,
    assemble_solution,
    evaluate_derivatives,
    residual,
)

__all__ = [
    "RegularitySpec",
    "HolderDecayReport",
    "holder_decay",
    "holder_norm_estimate",
    "stability_ratio",
    "stability_sweep",
    "fit_sector_constant",
    "check_decay_estimate",
    "convergence_study",
    "partial_sum_growth",
    "gl_cross_residual",
    "random_admissible_spec",
]


@dataclass(frozen=True)
class RegularitySpec:
    """Holder exponent a > 1/2 and decay exponent sigma in [0, a - 1/2)."""

    holder_exponent: float
    decay_exponent: float = 0.0
    seminorm: float = float("nan")

    def __post_init__(self):
        a, s = self.holder_exponent, self.decay_exponent
        if not (a > 0.5):
            raise ValueError(f"holder exponent must exceed 1/2, got {a}")
        if not (0.0 <= s < a - 0.5):
            raise ValueError(f"decay exponent must lie in [0, {a - 0.5}), got {s}")


@dataclass(frozen=True)
class HolderDecayReport:
    partial_sums: np.ndarray
    block_sums: np.ndarray
    block_ratios: np.ndarray
    bounded: bool


def holder_decay(coefficients, sigma) -> HolderDecayReport:
    """Partial sums of sum_k k**sigma |g_k| with a dyadic-block verdict.

    Boundedness is judged by the geometric decay of dyadic block sums
    (blocks 2**(n-1)+1 .. 2**n), mirroring how the absolute convergence of
    the series is actually proved.
    """
    if sigma < 0.0:
        raise ValueError("sigma must be nonnegative")
    c = np.abs(np.asarray(coefficients, dtype=float))
    k = np.arange(1, c.size + 1, dtype=float)
    terms = k**sigma * c
    partial = np.cumsum(terms)

    blocks = []
    n = 1
    while 2 ** (n - 1) < c.size:
        lo = 2 ** (n - 1)
        hi = min(2**n, c.size)
        blocks.append(float(np.sum(terms[lo:hi])))
        n += 1
    blocks = np.array(blocks)
    nz = blocks[blocks > 0.0]
    if nz.size < 2:
        bounded = True
        ratios = np.array([])
    else:
        ratios = nz[1:] / nz[:-1]
        tail = ratios[-3:] if ratios.size >= 3 else ratios
        bounded = bool(np.all(tail <= 0.95))
    return HolderDecayReport(partial, blocks, ratios, bounded)


def holder_norm_estimate(values, grid, exponent):
    """sup |g| + max over dyadic spacings of omega_g(delta) / delta**exponent.

    A consistent estimator for sampled data: the modulus of continuity is
    evaluated at spacings delta = 2**j * dx only, which is exact for the
    preset data families and avoids the noise floor of tiny spacings.
    """
    g = np.asarray(values, dtype=float)
    x = np.asarray(grid, dtype=float)
    dx = x[1] - x[0]
    best = 0.0
    j = 0
    while 2**j < g.size:
        step = 2**j
        omega = float(np.max(np.abs(g[step:] - g[:-step])))
        best = max(best, omega / (step * dx) ** exponent)
        j += 1
    return float(np.max(np.abs(g))) + best


@dataclass(frozen=True)
class StabilityResult:
    lhs: float
    rhs: float
    ratio: float
    violation: bool


def stability_ratio(spec: ProblemSpec, field, holder_exponent=0.75) -> StabilityResult:
    """Solution-to-data norm ratio of the stability estimate.

    LHS: sup norms of the regularized fields t^(1-rho)(d^rho)^2 u,
    t^(1-rho) d^rho u, t^(1-rho) u_xx.  RHS: Holder-norm estimates of
    phi0_xx, phi1_xx and sup-over-t of the regularized source's spatial
    Holder norm.  Returns ratio 0 when both sides vanish and flags the
    (impossible under correct assembly) case RHS = 0 < LHS.
    """
    if not field.has_derived:
        raise RuntimeError("derived fields missing; run evaluate_derivatives first")
    lhs = (
        float(np.max(np.abs(field.drho2)))
        + float(np.max(np.abs(field.drho)))
        + float(np.max(np.abs(field.uxx)))
    )
    x = field.x
    rhs = holder_norm_estimate(spec.phi0.second_derivative(x), x, holder_exponent)
    rhs += holder_norm_estimate(spec.phi1.second_derivative(x), x, holder_exponent)
    if field.f_reg is not None and np.any(field.f_reg != 0.0):
        rhs += max(
            holder_norm_estimate(field.f_reg[:, j], x, holder_exponent)
            for j in range(field.f_reg.shape[1])
        )
    if rhs == 0.0:
        return StabilityResult(lhs, rhs, 0.0, violation=lhs > 1e-10)
    return StabilityResult(lhs, rhs, lhs / rhs, violation=False)


def random_admissible_spec(rng, trunc=24, n_time=48, n_space=60, with_source=True):
    """Random problem with data well inside the admissible class.

    Sine polynomials with coefficients decaying like k**-3.5 keep phi_xx
    inside every Holder class used here.
    """
    rho = float(rng.uniform(0.35, 0.9))
    alpha = float(rng.uniform(0.6, 2.5))
    n_modes = int(rng.integers(2, 6))
    ks = rng.choice(np.arange(1, 9), size=n_modes, replace=False)
    phi1 = SinePoly({int(k): float(rng.uniform(-1, 1)) / float(k) ** 3.5 for k in ks})
    phi0 = SinePoly({int(k): float(rng.uniform(-1, 1)) / float(k) ** 3.5 for k in ks})
    sources = {}
    if with_source and rng.uniform() < 0.5:
        from .sources import PowerPoly

        k = int(rng.integers(1, 5))
        sources[k] = PowerPoly(rho - 1.0, (float(rng.uniform(-1, 1)),))
    return ProblemSpec(
        rho=rho, alpha=alpha, phi0=phi0, phi1=phi1, sources=sources,
        trunc=trunc, n_time=n_time, n_space=n_space, tail_tol=math.inf,
    )


def stability_sweep(count=30, seed=20260810, trunc=24, n_time=48, n_space=60):
    """Stability ratios over an admissible sweep at two resolutions.

    Returns per-case ratios at (trunc, n_time) and (2*trunc, 2*n_time); the
    acceptance gate derives max/median statistics from them.
    """
    rng = np.random.default_rng(seed)
    base, doubled = [], []
    for _ in range(count):
        spec = random_admissible_spec(rng, trunc=trunc, n_time=n_time, n_space=n_space)
        for target, (kk, nt) in (
            (base, (trunc, n_time)),
            (doubled, (2 * trunc, 2 * n_time)),
        ):
            s = ProblemSpec(
                rho=spec.rho, alpha=spec.alpha, phi0=spec.phi0, phi1=spec.phi1,
                sources=spec.sources, trunc=kk, n_time=nt, n_space=n_space,
                tail_tol=math.inf,
            )
            f = assemble_solution(s)
            evaluate_derivatives(s, f)
            target.append(stability_ratio(s, f).ratio)
    return np.array(base), np.array(doubled)


def fit_sector_constant(rho, mu, alphas=(0.5, 1.0, 2.0), lams=None, ts=None, horizon=1.0):
    """Fitted sector constant M = max |E_{rho,mu}(z)| (1 + |z|) over the
    branch-value sweep z = -(alpha -/+ sqrt(alpha^2-lam)) t^rho."""
    if lams is None:
        lams = np.arange(1, 401, dtype=float)
    if ts is None:
        ts = np.linspace(0.02, horizon, 25)
    best = 0.0
    for alpha in alphas:
        for lam in lams:
            bp = branch_pair(float(alpha), float(lam))
            for s in (bp.s_minus, bp.s_plus):
                z = -s * ts.astype(complex) ** rho
                vals = np.abs(ml_values(rho, mu, z))
                best = max(best, float(np.max(vals * (1.0 + np.abs(z)))))
    return best


def check_decay_estimate(rho, mu, m_const, eps=0.25, alphas=(0.5, 1.0, 2.0), lams=None,
                         ts=None, horizon=1.0):
    """Largest violation of the decay bound

        |t**(rho-1) E_{rho,mu}(-(alpha - sqrt(alpha^2-lam)) t^rho)|
            <= M lam**(eps-1/2) t**(2 eps rho - 1)

    over the sweep; nonpositive return means the bound holds with ``m_const``.
    """
    if lams is None:
        lams = np.arange(1, 401, dtype=float)
    if ts is None:
        ts = np.linspace(0.02, horizon, 25)
    worst = -math.inf
    for alpha in alphas:
        for lam in lams:
            bp = branch_pair(float(alpha), float(lam))
            z = -bp.s_minus * ts.astype(complex) ** rho
            lhs = ts ** (rho - 1.0) * np.abs(ml_values(rho, mu, z))
            rhs = m_const * lam ** (eps - 0.5) * ts ** (2.0 * eps * rho - 1.0)
            worst = max(worst, float(np.max(lhs - rhs)))
    return worst


def partial_sum_growth(rho, alpha, coeffs, t, x, kind="etilde"):
    """Sup norms of operator partial sums at cutoff K and 2K.

    kinds: 'etilde' for sum_k E(-s_k^- t^rho) g_k sin kx, 'rinv' for the
    (alpha^2 - A)^(-1/2)-weighted version, 'conv' for the mode convolution
    sums with sources g_k t^(rho-1) (closed form via E_{rho,2rho}).
    """
    coeffs = np.asarray(coeffs, dtype=float)
    trunc = coeffs.size // 2
    x = np.asarray(x, dtype=float)

    def sup_at(kk):
        total = np.zeros(x.size)
        for k in range(1, kk + 1):
            g = coeffs[k - 1]
            if g == 0.0:
                continue
            bp = branch_pair(alpha, float(k * k))
            z = np.array([-bp.s_minus * complex(t) ** rho])
            if kind == "etilde":
                amp = g * ml_values(rho, rho, z)[0]
            elif kind == "rinv":
                amp = g * bp.r_inv * ml_values(rho, rho, z)[0]
            elif kind == "conv":
                from scipy.special import gamma as gamma_fn

                amp = (
                    g
                    * bp.r_inv
                    * gamma_fn(rho)
                    * t ** (2.0 * rho - 1.0)
                    * (
                        ml_values(rho, 2.0 * rho, z)[0]
                        - ml_values(rho, 2.0 * rho, np.array([-bp.s_plus * complex(t) ** rho]))[0]
                    )
                )
            else:
                raise ValueError(f"unknown kind {kind!r}")
            total = total + np.real(amp) * np.sin(k * x)
        return float(np.max(np.abs(total)))

    return sup_at(trunc), sup_at(2 * trunc)


def gl_cross_residual(field, window=(0.1, None)):
    """Equation residual of the dominant mode measured by the discrete oracle.

    Applies the graded-mesh derivative oracle twice to the stored trajectory
    samples; refining the trajectory grid should shrink this roughly linearly.
    """
    if not field.trajectories:
        return 0.0
    k, tr = max(
        field.trajectories.items(), key=lambda kv: float(np.max(np.abs(kv[1].reg_values)))
    )
    p = tr.params
    t = tr.grid
    gvals = tr.reg_values * t ** (p.rho - 1.0)
    s1 = SingularFunctionSamples(t, gvals, singular_exponent=p.rho - 1.0)
    d1 = gl_derivative_grid(s1, p.rho)
    s2 = SingularFunctionSamples(t, d1, singular_exponent=p.rho - 1.0)
    d2 = gl_derivative_grid(s2, p.rho)
    if p.source is None:
        src = np.zeros_like(t)
    else:
        from .sources import PowerPoly

        src = p.source(t) if isinstance(p.source, PowerPoly) else np.asarray(p.source(t))
    r = d2 + 2.0 * p.alpha * d1 + p.lam * gvals - src
    lo = window[0]
    hi = window[1] if window[1] is not None else t[-1]
    mask = (t >= lo) & (t <= hi)
    scale = float(np.max(np.abs(gvals[mask]))) + 1e-300
    return float(np.max(np.abs(t[mask] ** (1.0 - p.rho) * r[mask]))) / scale


def convergence_study(spec: ProblemSpec, trunc_list, n_time_list):
    """Table of norms across mode cutoffs and time resolutions.

    Returns a list of row dicts (trunc, n_time, w_sup, residual_sup,
    residual_l2, tail_bound, gl_residual) plus the observed decay exponent
    of the per-mode amplitudes at the finest run.
    """
    rows = []
    finest = None
    for trunc in trunc_list:
        for n_time in n_time_list:
            s = ProblemSpec(
                rho=spec.rho, alpha=spec.alpha, phi0=spec.phi0, phi1=spec.phi1,
                sources=spec.sources, trunc=int(trunc), n_time=int(n_time),
                n_space=spec.n_space, tail_tol=math.inf,
            )
            f = assemble_solution(s)
            evaluate_derivatives(s, f)
            rep = residual(s, f)
            rows.append(
                {
                    "trunc": int(trunc),
                    "n_time": int(n_time),
                    "w_sup": f.scale(),
                    "residual_sup": rep.sup,
                    "residual_l2": rep.l2,
                    "tail_bound": f.tail_bound,
                    "gl_residual": gl_cross_residual(f),
                }
            )
            finest = f
    decay = float("nan")
    if finest is not None and len(finest.trajectories) >= 4:
        ks = np.array(sorted(finest.trajectories))
        amps = np.array(
            [np.max(np.abs(finest.trajectories[k].reg_values)) for k in ks]
        )
        mask = amps > 1e-300
        if mask.sum() >= 3:
            decay = float(-np.polyfit(np.log(ks[mask]), np.log(amps[mask]), 1)[0])
    return {"rows": rows, "amplitude_decay_exponent": decay}
