"""Acceptance gate: one test per criterion, each printing its pass line.

Tolerances are pinned in the assertions; runtime budgets are asserted
directly (they are generous for laptop-class hardware).
"""

import math
import time

import numpy as np
from scipy.special import erfc

from fractel.config import parse_config
from fractel.fracops import SingularFunctionSamples, gl_derivative_grid, graded_grid
from fractel.mlf import ml_values, prabhakar_values
from fractel.laplace_oracle import laplace_symbol, talbot_invert
from fractel.runner import run_solve
from fractel.scalar_cauchy import ConvolutionKernel, ModeParams, ml_convolve, solve_scalar
from fractel.sources import PowerPoly
from fractel.spectral import (
    Bubble,
    ProblemSpec,
    assemble_solution,
    evaluate_derivatives,
    initial_condition_errors,
    residual,
)
from fractel.verify import gl_cross_residual, stability_sweep


def report(name, passed, detail):
    print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
    assert passed, f"{name}: {detail}"


class TestAcceptance:
    def test_01_mittag_leffler_correctness(self):
        from oracles import mp_ml

        start = time.time()
        rng = np.random.default_rng(101)

        # exponential reduction on 50 points with |z| <= 10
        zs = []
        while len(zs) < 50:
            z = complex(rng.uniform(-10, 10), rng.uniform(-10, 10))
            if abs(z) <= 10.0:
                zs.append(z)
        zs = np.array(zs)
        exp_err = float(np.max(np.abs(ml_values(1.0, 1.0, zs) - np.exp(zs)) / np.abs(np.exp(zs))))

        # the generic machinery near order one: E_{1,2}(z) = (e^z - 1)/z
        z12 = zs[np.abs(zs) > 0.5][:20]
        ref12 = (np.exp(z12) - 1.0) / z12
        e12_err = float(np.max(np.abs(ml_values(1.0, 2.0, z12) - ref12) / np.abs(ref12)))

        # classical erfc value
        v = complex(ml_values(0.5, 1.0, np.array([-1.0 + 0.0j]))[0])
        erfc_err = abs(v.real - math.e * erfc(1.0)) / (math.e * erfc(1.0))

        # reduction identity on 100 random points |z| <= 30, judged against
        # the independent extended-precision direct series
        ident_err = 0.0
        n = 0
        while n < 100:
            rho = float(rng.uniform(0.3, 0.99))
            mu = float(rng.uniform(0.2, 2.2))
            z = complex(rng.uniform(-30, 5), rng.uniform(-15, 15))
            # keep the reference series affordable: its terms peak near
            # exp(|z|**(1/rho)), which prices the required extended precision
            if abs(z) > 30.0 or abs(z) ** (1.0 / rho) > 80.0:
                continue
            via_identity = complex(prabhakar_values(rho, mu, np.array([z]))[0])
            direct = mp_ml(rho, mu, z, gamma=2)
            ident_err = max(ident_err, abs(via_identity - direct) / max(abs(direct), 1.0))
            n += 1

        elapsed = time.time() - start
        ok = (
            exp_err <= 1e-12
            and e12_err <= 1e-10
            and erfc_err <= 1e-10
            and ident_err <= 1e-10
            and elapsed < 5.0
        )
        report(
            "criterion 1 (Mittag-Leffler correctness)",
            ok,
            f"exp {exp_err:.2e} (<=1e-12), E_1,2 {e12_err:.2e} (<=1e-10), erfc "
            f"{erfc_err:.2e} (<=1e-10), identity-vs-series {ident_err:.2e} "
            f"(<=1e-10), {elapsed:.1f}s (<5s)",
        )

    def test_02_eigen_relation_suite(self):
        start = time.time()
        worst512 = 0.0
        worst_ratio = 0.0
        window = lambda t: t >= 0.1

        for rho in (0.4, 0.6, 0.8):
            for rate in (-1.0, -9.0, complex(-2.0, 3.0)):
                errs = {}
                for n in (512, 1024):
                    tg = graded_grid(1.0, n, rho)
                    zc = rate * tg.astype(complex) ** rho
                    mask = window(tg)

                    # eigen-relation of the E atom
                    g = tg ** (rho - 1.0) * ml_values(rho, rho, zc)
                    d = gl_derivative_grid(
                        SingularFunctionSamples(tg, g, singular_exponent=rho - 1.0), rho
                    )
                    e1 = np.max(np.abs(d[mask] - rate * g[mask])) / np.max(np.abs(g[mask]))

                    # Prabhakar atom derivative
                    g2 = tg ** (2 * rho - 1.0) * prabhakar_values(rho, 2 * rho, zc)
                    d2 = gl_derivative_grid(
                        SingularFunctionSamples(tg, g2, singular_exponent=2 * rho - 1.0), rho
                    )
                    ref2 = tg ** (rho - 1.0) * prabhakar_values(rho, rho, zc)
                    e2 = np.max(np.abs(d2[mask] - ref2[mask])) / np.max(np.abs(ref2[mask]))

                    # Prabhakar convolution derivative with g = tau^(rho-1)
                    src = PowerPoly(rho - 1.0, (1.0,))
                    conv2 = np.asarray(
                        ml_convolve(ConvolutionKernel(rho, 2 * rho, 2, rate), src, tg),
                        dtype=complex,
                    )
                    convq = np.asarray(
                        ml_convolve(ConvolutionKernel(rho, rho, 2, rate), src, tg),
                        dtype=complex,
                    )
                    d3 = gl_derivative_grid(
                        SingularFunctionSamples(tg, conv2, singular_exponent=2 * rho - 1.0), rho
                    )
                    e3 = np.max(np.abs(d3[mask] - convq[mask])) / np.max(np.abs(convq[mask]))

                    errs[n] = max(e1, e2, e3)
                worst512 = max(worst512, errs[512])
                worst_ratio = max(worst_ratio, errs[1024] / errs[512])

        elapsed = time.time() - start
        ok = worst512 <= 1e-3 and worst_ratio <= 0.7 and elapsed < 60.0
        report(
            "criterion 2 (eigen-relation suite)",
            ok,
            f"worst relerr at N=512 {worst512:.2e} (<=1e-3), doubling ratio "
            f"{worst_ratio:.2f} (<=0.7), {elapsed:.1f}s (<60s)",
        )

    def test_03_solver_oracle_agreement(self):
        start = time.time()
        rng = np.random.default_rng(103)
        ts = np.linspace(0.1, 1.0, 12)
        worst = 0.0
        for trial in range(20):
            rho = float(rng.uniform(0.35, 0.95))
            alpha = float(rng.uniform(0.5, 2.5))
            lam = float(rng.uniform(0.0, 100.0))
            src = PowerPoly(rho - 1.0, (float(rng.uniform(-1, 1)),)) if trial % 2 else None
            p = ModeParams(rho, alpha, lam, float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)), src)
            traj = solve_scalar(p, ts)
            y_solver = traj.reg_values * ts ** (rho - 1.0)
            sym = laplace_symbol(p)
            y_oracle = np.array([talbot_invert(sym, float(t)) for t in ts])
            worst = max(worst, float(np.max(np.abs(y_solver - y_oracle)) / (np.max(np.abs(y_solver)) + 1e-300)))
        elapsed = time.time() - start
        ok = worst <= 1e-6 and elapsed < 30.0
        report(
            "criterion 3 (solver vs Laplace oracle)",
            ok,
            f"worst relerr {worst:.2e} (<=1e-6) over 20 cases, {elapsed:.1f}s (<30s)",
        )

    def test_04_degenerate_continuity(self):
        ts = np.linspace(0.1, 1.0, 24)
        worst = 0.0
        for rho in (0.45, 0.6, 0.8):
            for alpha in (1.0, 2.0):
                base = solve_scalar(ModeParams(rho, alpha, alpha**2, 0.4, 1.0), ts)
                scale = np.max(np.abs(base.reg_values))
                for sgn in (1.0, -1.0):
                    near = solve_scalar(
                        ModeParams(rho, alpha, alpha**2 * (1.0 + sgn * 1e-4), 0.4, 1.0), ts
                    )
                    worst = max(worst, float(np.max(np.abs(near.reg_values - base.reg_values)) / scale))
        ok = worst <= 1e-2
        report(
            "criterion 4 (degenerate-branch continuity)",
            ok,
            f"worst deviation {worst:.2e} (<=1e-2) across rho/alpha grid",
        )

    def test_05_pde_residual(self):
        start = time.time()
        spec = ProblemSpec(
            rho=0.6, alpha=2.0, phi1=Bubble(1.0), trunc=64, n_time=128, n_space=200,
            tail_tol=math.inf,
        )
        f = assemble_solution(spec)
        assert f.degenerate_modes == (2,)
        evaluate_derivatives(spec, f)
        rep = residual(spec, f)

        # discrete-oracle cross residual must decrease under time refinement
        gl_coarse = gl_cross_residual(f)
        spec_fine = ProblemSpec(
            rho=0.6, alpha=2.0, phi1=Bubble(1.0), trunc=64, n_time=256, n_space=200,
            tail_tol=math.inf,
        )
        f_fine = assemble_solution(spec_fine)
        gl_fine = gl_cross_residual(f_fine)

        elapsed = time.time() - start
        ok = rep.sup <= 1e-6 and gl_fine < gl_coarse and elapsed < 120.0
        report(
            "criterion 5 (PDE residual, degenerate k0=2)",
            ok,
            f"residual sup {rep.sup:.2e} (<=1e-6), GL cross-residual {gl_coarse:.2e} -> "
            f"{gl_fine:.2e} under refinement, {elapsed:.1f}s (<120s)",
        )

    def test_06_initial_conditions(self):
        spec = ProblemSpec(
            rho=0.6, alpha=2.0, phi0=Bubble(0.5), phi1=Bubble(1.0), trunc=64,
            n_time=32, n_space=120, tail_tol=math.inf,
        )
        f = assemble_solution(spec)
        errs = initial_condition_errors(spec, f)
        ok = errs["phi1_sup_error"] <= 1e-3 and errs["phi0_sup_error"] <= 1e-3
        report(
            "criterion 6 (weighted initial conditions)",
            ok,
            f"phi1 sup err {errs['phi1_sup_error']:.2e}, phi0 sup err "
            f"{errs['phi0_sup_error']:.2e} (<=1e-3 each)",
        )

    def test_07_uniqueness_probe(self):
        spec = ProblemSpec(rho=0.6, alpha=2.0, trunc=64, n_time=64, n_space=120)
        f = assemble_solution(spec)
        sup = f.scale()
        ok = sup <= 1e-12
        report("criterion 7 (uniqueness probe)", ok, f"zero-data sup {sup:.2e} (<=1e-12)")

    def test_08_stability_sweep(self):
        base, doubled = stability_sweep(count=30, seed=108, trunc=16, n_time=32, n_space=40)
        max_ratio = float(np.max(base))
        median = float(np.median(base))
        drift = float(np.max(np.abs(doubled - base) / np.abs(base)))
        ok = np.all(np.isfinite(base)) and max_ratio <= 10.0 * median and drift <= 0.2
        report(
            "criterion 8 (stability ratios)",
            ok,
            f"max ratio {max_ratio:.3f}, median {median:.3f} (max<=10*median), "
            f"drift under doubling {drift:.2%} (<=20%)",
        )

    def test_09_realness(self):
        worst = 0.0
        for rho, alpha in ((0.6, 1.0), (0.45, 0.8), (0.85, 1.5)):
            spec = ProblemSpec(
                rho=rho, alpha=alpha, phi0=Bubble(-0.3), phi1=Bubble(1.0), trunc=32,
                n_time=48, n_space=60, tail_tol=math.inf,
            )
            f = assemble_solution(spec)
            evaluate_derivatives(spec, f)
            worst = max(worst, f.max_imag / max(f.scale(), 1e-300))
        ok = worst <= 1e-12
        report(
            "criterion 9 (realness of real-data runs)",
            ok,
            f"worst imaginary residue {worst:.2e} of field scale (<=1e-12)",
        )

    def test_10_determinism(self):
        cfg = parse_config(
            """
problem:
  rho: 0.6
  alpha: 2.0
  truncation: 16
  time_nodes: 32
  space_nodes: 40
  tail_tolerance: .inf
  phi1: {preset: bubble}
"""
        )
        r1 = run_solve(cfg)
        r2 = run_solve(cfg)
        ok = r1.files == r2.files and r1.exit_code == 0
        report(
            "criterion 10 (byte-identical reruns)",
            ok,
            f"{len(r1.files)} files compared byte-for-byte",
        )
