"""
Moment functions of real order.

A MomentFunction is a finite product of powers of the atoms Γ_s; products
and quotients merge the atoms, so the expression stays in a canonical form
and the order is always Σ power·s.
"""

import math
import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from errors import DomainError, ValidationError
from special_functions import gamma_s, log_gamma_s

logger = logging.getLogger("moments")


def _normalise(atoms):
    # Γ_{-s} = 1/Γ_s, so every atom is stored with s > 0
    merged = {}
    for s, power in atoms:
        if s < 0:
            s, power = -s, -power
        merged[s] = merged.get(s, 0) + power
    return tuple(sorted((s, power) for s, power in merged.items() if power != 0 and s != 0))


@dataclass(frozen=True)
class MomentFunction:
    """
    m(u) = Π Γ_s(u)^power over its atoms.

    Attributes:
        atoms: tuple of (s, power) pairs; s is a Fraction or float
    """
    atoms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'atoms', _normalise(self.atoms))

    @classmethod
    def gamma(cls, s):
        """The atom Γ_s."""
        return cls(((_as_order(s), 1),))

    @classmethod
    def constant(cls):
        """The order-0 moment function m ≡ 1."""
        return cls(())

    @property
    def order(self):
        return sum(s * power for s, power in self.atoms) if self.atoms else Fraction(0)

    @property
    def k(self):
        """Summability level 1/order (None for order <= 0)."""
        order = float(self.order)
        return 1.0 / order if order > 0 else None

    def log(self, u):
        """log m(u); vectorised over u >= 0."""
        u = np.asarray(u, dtype=float)
        if np.any(u < 0):
            raise DomainError(f"Moment functions are evaluated on u >= 0, got {u}")
        total = np.zeros_like(u)
        for s, power in self.atoms:
            total = total + power * log_gamma_s(float(s), u)
        return float(total) if total.ndim == 0 else total

    def __call__(self, u):
        """m(u) through the Lanczos Γ; scalar or numpy array."""
        u_arr = np.asarray(u, dtype=float)
        if np.any(u_arr < 0):
            raise DomainError(f"Moment functions are evaluated on u >= 0, got {u}")
        value = np.ones_like(u_arr)
        for s, power in self.atoms:
            value = value * np.asarray(gamma_s(float(s), u_arr), dtype=float) ** power
        return float(value) if value.ndim == 0 else value

    def __mul__(self, other):
        return moment_product(self, other)

    def __truediv__(self, other):
        return moment_quotient(self, other)

    def power(self, n):
        return MomentFunction(tuple((s, power * n) for s, power in self.atoms))

    def reciprocal(self):
        """1/m, a moment function of order -order."""
        return self.power(-1)

    @property
    def expression(self):
        if not self.atoms:
            return "1"
        parts = []
        for s, power in self.atoms:
            atom = f"Gamma_{s}"
            parts.append(atom if power == 1 else f"{atom}^{power}")
        return "*".join(parts)

    def __str__(self):
        return f"{self.expression} (order {self.order})"


def _as_order(s):
    if isinstance(s, Fraction):
        return s
    if isinstance(s, int):
        return Fraction(s)
    try:
        s = float(s)
    except (TypeError, ValueError):
        raise ValidationError(f"Moment order must be real, got {s!r}")
    if not math.isfinite(s):
        raise ValidationError(f"Moment order must be finite, got {s}")
    frac = Fraction(s).limit_denominator(10000)
    return frac if float(frac) == s else s


def moment_product(m1, m2):
    """m1·m2, of order order(m1) + order(m2)."""
    return MomentFunction(m1.atoms + m2.atoms)


def moment_quotient(m1, m2):
    """m1/m2, of order order(m1) - order(m2)."""
    return MomentFunction(m1.atoms + m2.reciprocal().atoms)


@dataclass(frozen=True)
class GrowthSandwich:
    """Constants with a·c^n·Γ_s(n) <= m(n) <= A·C^n·Γ_s(n) on the fitted range."""
    s: float
    a: float
    c: float
    A: float
    C: float
    slope: float
    holds: bool
    n_max: int


def fit_growth_sandwich(m, n_max=40, s=None):
    """
    Attest the growth sandwich of a moment function.

    Fits log m(n) - log Γ_s(n) ≈ α + β n by least squares over n = 0..n_max
    and widens the fitted line by the extreme residuals.

    Args:
        m: MomentFunction
        n_max: last sample index
        s: comparison order (default: the order of m)
    """
    s = float(m.order) if s is None else float(s)
    n = np.arange(n_max + 1, dtype=float)
    y = m.log(n) - log_gamma_s(s, n)
    design = np.vstack([np.ones_like(n), n]).T
    (alpha, beta), *_ = np.linalg.lstsq(design, y, rcond=None)
    residuals = y - (alpha + beta * n)
    log_lower = alpha + residuals.min()
    log_upper = alpha + residuals.max()
    lower = log_lower + beta * n
    upper = log_upper + beta * n
    slack = 1e-9 * np.maximum(1.0, np.abs(y))
    holds = bool(np.all(lower <= y + slack) and np.all(y <= upper + slack))
    c = math.exp(beta)
    return GrowthSandwich(s, math.exp(log_lower), c, math.exp(log_upper), c, float(beta), holds, n_max)


def fit_order(m, n_max=40):
    """
    Regress log m(n) on n·log n, n, log n and 1 over n = 1..n_max; the
    coefficient of n·log n estimates the order of m.
    """
    n = np.arange(1, n_max + 1, dtype=float)
    y = m.log(n)
    design = np.vstack([n * np.log(n), n, np.log(n), np.ones_like(n)]).T
    coefficients, *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(coefficients[0])
