"""Fractional integral/derivative operators and the graded-mesh oracle."""

import numpy as np
import pytest
from scipy.special import gamma

from fractel.exceptions import NoLimitError
from fractel.fracops import (
    SingularFunctionSamples,
    gl_derivative_grid,
    graded_grid,
    rl_derivative,
    rl_integral,
    rl_limit,
)
from fractel.mlf import ml_values, prabhakar_values
from fractel.scalar_cauchy import ConvolutionKernel, ml_convolve
from fractel.sources import PowerPoly


def ml_atom(rho, lam):
    """t**(rho-1) E_{rho,rho}(lam t^rho) as a complex-safe callable."""

    def g(t):
        ts = np.atleast_1d(np.asarray(t, dtype=complex))
        vals = ts ** (rho - 1.0) * ml_values(rho, rho, lam * ts**rho)
        return vals.reshape(np.shape(t)) if np.ndim(t) else vals[0]

    return g


class TestRLIntegral:
    def test_classical_antiderivative(self):
        assert rl_integral(1.0, -1.0, 2.0) == pytest.approx(2.0, rel=1e-12)

    def test_power_data_gives_constant(self):
        rho = 0.6
        for t in (0.3, 0.7, 1.4):
            got = rl_integral(
                lambda x: x ** (rho - 1.0), rho - 1.0, t, singular_exponent=rho - 1.0
            )
            assert got == pytest.approx(1.4891922488128173, rel=1e-10)

    def test_linear_data_half_order(self):
        got = rl_integral(lambda x: x, -0.5, 1.0, singular_exponent=1.0)
        assert got == pytest.approx(0.7522527780636751, rel=1e-10)

    def test_power_rule_random(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            mu = float(rng.uniform(0.2, 3.0))
            sigma = -float(rng.uniform(0.1, 2.0))
            t = float(rng.uniform(0.2, 2.0))
            got = rl_integral(
                lambda x, mu=mu: x ** (mu - 1.0), sigma, t, singular_exponent=mu - 1.0
            )
            ref = gamma(mu) / gamma(mu - sigma) * t ** (mu - sigma - 1.0)
            assert abs(got - ref) / abs(ref) <= 1e-8

    def test_powerpoly_fast_path(self):
        poly = PowerPoly(0.5, (2.0, -1.0))
        got = rl_integral(poly, -0.7, 0.9)
        ref = rl_integral(lambda x: 2.0 * x**0.5 - x**1.5, -0.7, 0.9, singular_exponent=0.5)
        assert got == pytest.approx(ref, rel=1e-10)

    def test_complex_sampled_data(self):
        from fractel.fracops import SingularFunctionSamples, graded_grid

        tg = graded_grid(1.0, 64, 0.5)
        s = SingularFunctionSamples(tg, (1.0 + 2.0j) * tg, singular_exponent=0.0)
        got = rl_integral(s, -1.0, 1.0)
        assert got == pytest.approx((0.5 + 1.0j), rel=1e-9)

    def test_semigroup_on_smooth_data(self):
        s1, s2, t = -0.4, -0.7, 0.9

        def inner(x):
            xs = np.atleast_1d(x)
            vals = np.array([rl_integral(np.cos, s2, xx) for xx in xs])
            return vals.reshape(np.shape(x)) if np.ndim(x) else vals[0]

        lhs = rl_integral(inner, s1, t, singular_exponent=-s2)
        rhs = rl_integral(np.cos, s1 + s2, t)
        assert abs(lhs - rhs) / abs(rhs) <= 1e-7

    def test_validation(self):
        with pytest.raises(ValueError):
            rl_integral(1.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            rl_integral(1.0, 0.5, 1.0)
        with pytest.raises(ValueError):
            rl_integral(1.0, -1.0, 0.0)


class TestRLDerivative:
    def test_classical_order_one(self):
        got = rl_derivative(lambda x: x**2, 1.0, 1.0)
        assert got == pytest.approx(2.0, rel=1e-10)

    def test_annihilates_critical_power(self):
        # d^rho t^(rho-1) = 0: J^(rho-1) of it is constant
        for rho in (0.4, 0.6, 0.85):
            got = rl_derivative(
                lambda x, r=rho: x ** (r - 1.0), rho, 0.8, singular_exponent=rho - 1.0
            )
            assert abs(got) <= 1e-10

    def test_power_rule_derivative(self):
        rho = 0.6
        got = rl_derivative(lambda x: x**2, rho, 0.9)
        ref = gamma(3.0) / gamma(3.0 - rho) * 0.9 ** (2.0 - rho)
        assert got == pytest.approx(ref, rel=1e-9)

    def test_powerpoly_path(self):
        poly = PowerPoly(0.0, (0.0, 0.0, 1.0))  # t^2
        assert rl_derivative(poly, 1.0, 1.0) == pytest.approx(2.0, rel=1e-12)

    def test_sampled_data_falls_back_to_discrete_scheme(self):
        rho = 0.5
        tg = graded_grid(1.0, 256, rho)
        gv = tg ** (rho - 1.0) * np.real(ml_values(rho, rho, -tg.astype(complex) ** rho))
        s = SingularFunctionSamples(tg, gv, singular_exponent=rho - 1.0)
        got = rl_derivative(s, rho, 0.8)
        idx = np.argmin(np.abs(tg - 0.8))
        assert got == pytest.approx(-gv[idx], rel=3e-3)

    def test_validation(self):
        with pytest.raises(ValueError):
            rl_derivative(lambda x: x, 1.5, 1.0)
        with pytest.raises(ValueError):
            rl_derivative(lambda x: x, 0.5, -1.0)


class TestRLLimit:
    def test_critical_power(self):
        for rho in (0.4, 0.6, 0.85):
            got = rl_limit(lambda t, r=rho: t ** (r - 1.0), rho)
            assert got == pytest.approx(gamma(rho), rel=1e-12)

    def test_bounded_data_limit_zero(self):
        got = rl_limit(np.cos, 0.5)
        assert abs(got) <= 1e-3

    def test_solver_round_trip(self):
        # solve with phi1 = 1 and recover it through the weighted limit
        from fractel.scalar_cauchy import ModeParams, solve_scalar

        p = ModeParams(0.6, 1.5, 9.0, 0.0, 1.0)
        traj = solve_scalar(p, np.array([0.5, 1.0]))

        def y(t):
            return traj.eval_reg(np.array([t]))[0] * t ** (p.rho - 1.0)

        got = rl_limit(y, p.rho, t0=1e-3)
        assert got == pytest.approx(1.0, abs=1e-3)

    def test_divergence_detected(self):
        with pytest.raises(NoLimitError):
            rl_limit(lambda t: t ** (-0.9), 0.5, t0=0.05)


class TestGLOracle:
    def test_order_one_linear(self):
        tg = graded_grid(1.0, 64, 1.0)
        s = SingularFunctionSamples(tg, tg.copy(), singular_exponent=0.0)
        d = gl_derivative_grid(s, 1.0)
        assert np.max(np.abs(d[5:-1] - 1.0)) <= 1e-10

    def test_critical_power_shrinks_under_refinement(self):
        rho = 0.5
        sups = []
        for n in (64, 128, 256):
            tg = graded_grid(1.0, n, rho)
            s = SingularFunctionSamples(tg, tg ** (rho - 1.0), singular_exponent=rho - 1.0)
            d = gl_derivative_grid(s, rho)
            mask = tg >= 0.1
            sups.append(np.max(np.abs(d[mask])))
        assert sups[1] <= 0.65 * sups[0]
        assert sups[2] <= 0.65 * sups[1]

    def test_ml_atom_derivative_spot_value(self):
        # d^rho g = -g at (rho=0.5, rate=-1, t=0.8) through the oracle
        rho, lam, t_spot = 0.5, -1.0, 0.8
        tg = graded_grid(1.0, 512, rho)
        gv = tg ** (rho - 1.0) * np.real(ml_values(rho, rho, lam * tg.astype(complex) ** rho))
        s = SingularFunctionSamples(tg, gv, singular_exponent=rho - 1.0)
        d = gl_derivative_grid(s, rho)
        idx = np.argmin(np.abs(tg - t_spot))
        assert d[idx] == pytest.approx(lam * gv[idx], rel=2e-3)

    def test_eigen_relation_halving(self):
        # Lemma-type relation d^rho g = lam g for the Mittag-Leffler atom
        rho, lam = 0.5, -1.0
        errs = []
        for n in (256, 512):
            tg = graded_grid(1.0, n, rho)
            gv = tg ** (rho - 1.0) * np.real(ml_values(rho, rho, lam * tg.astype(complex) ** rho))
            s = SingularFunctionSamples(tg, gv, singular_exponent=rho - 1.0)
            d = gl_derivative_grid(s, rho)
            mask = tg >= 0.1
            errs.append(np.max(np.abs(d[mask] - lam * gv[mask])) / np.max(np.abs(gv[mask])))
        assert errs[0] <= 2e-3
        assert errs[1] <= 0.65 * errs[0]

    def test_complex_rate_supported(self):
        rho, lam = 0.6, complex(-0.8, 1.1)
        tg = graded_grid(1.0, 256, rho)
        gv = tg ** (rho - 1.0) * ml_values(rho, rho, lam * tg.astype(complex) ** rho)
        s = SingularFunctionSamples(tg, gv, singular_exponent=rho - 1.0)
        d = gl_derivative_grid(s, rho)
        mask = tg >= 0.1
        err = np.max(np.abs(d[mask] - lam * gv[mask])) / np.max(np.abs(gv[mask]))
        assert err <= 2e-3

    def test_too_few_nodes_rejected(self):
        tg = graded_grid(1.0, 4, 0.5)
        with pytest.raises(ValueError):
            gl_derivative_grid(
                SingularFunctionSamples(tg, np.ones_like(tg), singular_exponent=0.0), 0.5
            )

    def test_samples_validation(self):
        with pytest.raises(ValueError):
            SingularFunctionSamples(np.array([0.0, 0.5]), np.array([1.0, 1.0]))
        with pytest.raises(ValueError):
            SingularFunctionSamples(np.array([0.5, 0.4]), np.array([1.0, 1.0]))


class TestLemmaRelations:
    """Derivative identities for the Prabhakar atoms and convolutions,
    checked through the discrete oracle (independent of the atom algebra)."""

    @pytest.mark.parametrize("rho,lam", [(0.5, -1.0), (0.7, -2.0)])
    def test_prabhakar_atom_derivative(self, rho, lam):
        # d^rho [t^(2rho-1) E^2_{rho,2rho}(lam t^rho)] = t^(rho-1) E^2_{rho,rho}
        n = 1024
        tg = graded_grid(1.0, n, rho)
        zc = lam * tg.astype(complex) ** rho
        gv = tg ** (2.0 * rho - 1.0) * np.real(prabhakar_values(rho, 2.0 * rho, zc))
        s = SingularFunctionSamples(tg, gv, singular_exponent=2.0 * rho - 1.0)
        d = gl_derivative_grid(s, rho)
        ref = tg ** (rho - 1.0) * np.real(prabhakar_values(rho, rho, zc))
        mask = tg >= 0.1
        err = np.max(np.abs(d[mask] - ref[mask])) / np.max(np.abs(ref[mask]))
        assert err <= 1e-5

    def test_prabhakar_convolution_derivative(self):
        # d^rho of the E^2_{rho,2rho} convolution equals the E^2_{rho,rho} one
        rho, lam = 0.6, -1.5
        n = 512
        tg = graded_grid(1.0, n, rho)
        g = PowerPoly(rho - 1.0, (1.0,))
        k2 = ConvolutionKernel(rho, 2.0 * rho, 2, lam)
        kq = ConvolutionKernel(rho, rho, 2, lam)
        conv2 = np.real(np.asarray(ml_convolve(k2, g, tg), dtype=complex))
        convq = np.real(np.asarray(ml_convolve(kq, g, tg), dtype=complex))
        s = SingularFunctionSamples(tg, conv2, singular_exponent=2.0 * rho - 1.0)
        d = gl_derivative_grid(s, rho)
        mask = tg >= 0.1
        err = np.max(np.abs(d[mask] - convq[mask])) / np.max(np.abs(convq[mask]))
        assert err <= 1e-4
