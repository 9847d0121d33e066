"""Time profiles for source terms.

The closed-form machinery (mode solver, Laplace symbols, analytic fractional
derivatives) works with the preset family

    f(t) = t**base * (c_0 + c_1 t + c_2 t**2 + ...)

with ``base > rho - 2`` so that ``t**(1-rho) f`` stays integrable; the usual
choice is ``base = rho - 1``, matching the natural singularity of solutions.
Arbitrary callables are accepted wherever an operation can fall back to
quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma, rgamma

__all__ = ["PowerPoly", "as_time_profile"]


@dataclass(frozen=True)
class PowerPoly:
    """Profile t**base * sum_m coeffs[m] * t**m."""

    base: float
    coeffs: tuple[float, ...]

    def __post_init__(self):
        if not self.coeffs:
            object.__setattr__(self, "coeffs", (0.0,))
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @classmethod
    def zero(cls):
        return cls(0.0, (0.0,))

    @property
    def is_zero(self) -> bool:
        return all(c == 0.0 for c in self.coeffs)

    def __call__(self, t):
        t = np.asarray(t)
        out = np.zeros(t.shape, dtype=np.result_type(t, float))
        for m, c in enumerate(self.coeffs):
            if c != 0.0:
                out = out + c * t ** (self.base + m)
        return out

    def regularized(self, rho, t):
        """Values of t**(1-rho) * f(t)."""
        t = np.asarray(t)
        out = np.zeros(t.shape, dtype=np.result_type(t, float))
        for m, c in enumerate(self.coeffs):
            if c != 0.0:
                out = out + c * t ** (self.base + m + 1.0 - rho)
        return out

    def laplace(self, p):
        """Laplace transform sum_m c_m Gamma(base+m+1) / p**(base+m+1)."""
        p = np.asarray(p, dtype=complex)
        out = np.zeros(p.shape, dtype=complex)
        for m, c in enumerate(self.coeffs):
            if c != 0.0:
                e = self.base + m + 1.0
                out = out + c * gamma(e) * p ** (-e)
        return out

    def rl_derivative(self, rho) -> "PowerPoly":
        """Riemann-Liouville derivative of order rho, again a PowerPoly.

        Power rule: d^rho t**e = Gamma(e+1)/Gamma(e+1-rho) t**(e-rho); terms
        with e + 1 - rho a non-positive integer are annihilated.
        """
        new = []
        for m, c in enumerate(self.coeffs):
            e = self.base + m
            new.append(c * gamma(e + 1.0) * float(rgamma(e + 1.0 - rho)))
        return PowerPoly(self.base - rho, tuple(new))

    def scaled(self, factor) -> "PowerPoly":
        return PowerPoly(self.base, tuple(factor * c for c in self.coeffs))


def as_time_profile(obj):
    """Coerce a source spec into (PowerPoly | callable | None).

    Numbers become constant profiles; PowerPoly and callables pass through;
    None and exact zeros collapse to None.
    """
    if obj is None:
        return None
    if isinstance(obj, PowerPoly):
        return None if obj.is_zero else obj
    if isinstance(obj, (int, float)):
        if obj == 0:
            return None
        return PowerPoly(0.0, (float(obj),))
    if callable(obj):
        return obj
    raise TypeError(f"cannot interpret source profile of type {type(obj).__name__}")
