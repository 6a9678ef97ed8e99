"""
Catalog of initial data φ(z) = u(0, z).

Each variant ships an exact n-th derivative and its singularity metadata,
so the formal solution and the Stokes analysis never differentiate
numerically. Branch variants use the principal branch of (z0 - z)^α and
log(z0 - z) in eval(); eval_continued() follows a straight segment on the
universal cover of C minus z0 instead.
"""

import math
import cmath
import logging
from fractions import Fraction

import numpy as np

from core import parse_complex, complex_to_json
from errors import ValidationError, SingularEvaluationError

logger = logging.getLogger("initial_data")

# Distance to z0 below which a branch variant refuses to evaluate
SINGULAR_GUARD = 1e-14


def _rising(m, n):
    """Rising factorial m(m+1)...(m+n-1) as an exact integer."""
    result = 1
    for i in range(n):
        result *= m + i
    return result


def _falling(alpha, n):
    """alpha(alpha-1)...(alpha-n+1) in floating point."""
    result = 1.0
    for i in range(n):
        result *= alpha - i
    return result


def _is_scalar(w):
    return np.ndim(w) == 0


def _log(value):
    value = complex(value)
    return cmath.log(value) if value != 0 else complex(-math.inf, 0.0)


class InitialDatum:
    """
    Base class for catalog entries.

    Subclasses define eval, derivative, to_json and the metadata
    attributes singular_point (None for entire variants), entire and
    growth_order.
    """

    variant = "InitialDatum"
    singular_point = None
    entire = True
    growth_order = 0.0

    def __call__(self, z):
        return self.eval(z)

    def eval(self, z):
        raise NotImplementedError

    def derivative(self, n):
        raise NotImplementedError

    def log_derivative(self, n, z):
        """
        Complex logarithm of φ^{(n)}(z), -inf where the derivative vanishes.

        Stays finite for orders whose values overflow a float.
        """
        return _log(self.derivative(n).eval(z))

    def eval_at(self, w, arg):
        """Evaluate with (z0 - w) carried at the given cover argument; entire and pole variants ignore arg."""
        return self.eval(w)

    def eval_continued(self, w, base, base_arg=None):
        """
        Analytic continuation of φ from `base` to `w` along the straight segment.

        Args:
            w: target point(s); scalar or numpy array
            base: start of the segment, where the principal branch is used
                unless base_arg fixes arg(z0 - base) on the cover
        """
        if self.singular_point is None:
            return self.eval(w)
        z0 = self.singular_point
        base = complex(base)
        if abs(z0 - base) < SINGULAR_GUARD:
            raise SingularEvaluationError(f"{self.variant}: continuation starts at the singular point {z0}", z0)
        theta = cmath.phase(z0 - base) if base_arg is None else float(base_arg)
        w_arr = np.asarray(w, dtype=complex)
        # segment base -> w passes z0 iff (z0 - w)/(z0 - base) is real and <= 0
        ratio = (z0 - w_arr) / (z0 - base)
        crossing = (np.abs(ratio.imag) < 1e-14 * np.maximum(1.0, np.abs(ratio))) & (ratio.real <= 0)
        if np.any(crossing):
            raise SingularEvaluationError(
                f"{self.variant}: continuation path from {base} crosses the singular point {z0}", z0)
        args = theta + np.angle(ratio)
        result = self.eval_at(w_arr, args)
        return complex(result) if _is_scalar(w) else result

    def to_json(self):
        return {"variant": self.variant, "params": self._params()}

    def _params(self):
        raise NotImplementedError

    def __repr__(self):
        return f"{self.variant}({self._params()})"

    def __eq__(self, other):
        return isinstance(other, InitialDatum) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(repr(self))

    def _guard(self, w):
        z0 = self.singular_point
        if z0 is not None and np.any(np.abs(z0 - np.asarray(w, dtype=complex)) < SINGULAR_GUARD):
            raise SingularEvaluationError(f"{self.variant} evaluated at its singular point {z0}", z0)


class Polynomial(InitialDatum):
    """Σ coeffs[i] z^i; coefficients may be ints, Fractions or complex."""

    variant = "Polynomial"

    def __init__(self, coeffs):
        coeffs = list(coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        self.coeffs = coeffs or [0]

    @property
    def degree(self):
        return 0 if self.coeffs == [0] else len(self.coeffs) - 1

    def eval(self, z):
        z = np.asarray(z, dtype=complex)
        result = np.zeros_like(z)
        for c in reversed(self.coeffs):
            result = result * z + complex(c)
        return complex(result) if result.ndim == 0 else result

    def derivative(self, n):
        if n < 0:
            raise ValidationError(f"Derivative order must be >= 0, got {n}")
        if n >= len(self.coeffs):
            return Polynomial([0])
        return Polynomial([c * math.perm(i, n) for i, c in enumerate(self.coeffs) if i >= n])

    def _params(self):
        return {"coeffs": [complex_to_json(c) for c in self.coeffs]}


class Exp(InitialDatum):
    """scale · e^{λz}."""

    variant = "Exp"
    growth_order = 1.0

    def __init__(self, lam=1.0, scale=1.0):
        self.lam = complex(lam)
        self.scale = complex(scale)

    def eval(self, z):
        if _is_scalar(z):
            return self.scale * cmath.exp(self.lam * complex(z))
        return self.scale * np.exp(self.lam * np.asarray(z, dtype=complex))

    def derivative(self, n):
        if n < 0:
            raise ValidationError(f"Derivative order must be >= 0, got {n}")
        return Exp(self.lam, self.scale * self.lam ** n)

    def log_derivative(self, n, z):
        if self.scale == 0 or (self.lam == 0 and n > 0):
            return complex(-math.inf, 0.0)
        lam_part = n * cmath.log(self.lam) if n else 0j
        return cmath.log(self.scale) + lam_part + self.lam * complex(z)

    def _params(self):
        return {"lam": complex_to_json(self.lam), "scale": complex_to_json(self.scale)}


class Rational(InitialDatum):
    """scale / (z0 - z)^m with m >= 1."""

    variant = "Rational"
    entire = False

    def __init__(self, z0=1.0, m=1, scale=1.0):
        if int(m) != m or m < 1:
            raise ValidationError(f"Rational pole order must be an integer >= 1, got {m}")
        self.singular_point = complex(z0)
        self.m = int(m)
        self.scale = complex(scale)

    def eval(self, z):
        self._guard(z)
        if _is_scalar(z):
            return self.scale / (self.singular_point - complex(z)) ** self.m
        return self.scale / (self.singular_point - np.asarray(z, dtype=complex)) ** self.m

    def derivative(self, n):
        if n < 0:
            raise ValidationError(f"Derivative order must be >= 0, got {n}")
        return Rational(self.singular_point, self.m + n, self.scale * _rising(self.m, n))

    def log_derivative(self, n, z):
        self._guard(z)
        if self.scale == 0:
            return complex(-math.inf, 0.0)
        return (cmath.log(self.scale) + math.lgamma(self.m + n) - math.lgamma(self.m)
                - (self.m + n) * cmath.log(self.singular_point - complex(z)))

    def _params(self):
        return {"z0": complex_to_json(self.singular_point), "m": self.m, "scale": complex_to_json(self.scale)}


class PowerBranch(InitialDatum):
    """scale · (z0 - z)^α with α not a non-negative integer."""

    variant = "PowerBranch"
    entire = False

    def __init__(self, z0=1.0, alpha=0.5, scale=1.0):
        alpha = float(alpha)
        if alpha >= 0 and alpha == int(alpha):
            raise ValidationError(f"PowerBranch exponent must not be a non-negative integer, got {alpha}")
        self.singular_point = complex(z0)
        self.alpha = alpha
        self.scale = complex(scale)

    def eval(self, z):
        w = np.asarray(z, dtype=complex)
        return self.eval_at(z, np.angle(self.singular_point - w))

    def eval_at(self, w, arg):
        self._guard(w)
        modulus = np.abs(self.singular_point - np.asarray(w, dtype=complex))
        result = self.scale * modulus ** self.alpha * np.exp(1j * self.alpha * np.asarray(arg, dtype=float))
        return complex(result) if np.ndim(result) == 0 else result

    def derivative(self, n):
        if n < 0:
            raise ValidationError(f"Derivative order must be >= 0, got {n}")
        if n == 0:
            return self
        factor = (-1) ** n * _falling(self.alpha, n)
        return _ShiftedPowerBranch(self.singular_point, self.alpha - n, self.scale * factor)

    def log_derivative(self, n, z):
        self._guard(z)
        if self.scale == 0:
            return complex(-math.inf, 0.0)
        # (-1)^n α(α-1)...(α-n+1) in modulus/sign form
        negative = n + sum(1 for i in range(n) if self.alpha - i < 0)
        log_factor = math.lgamma(self.alpha + 1.0) - math.lgamma(self.alpha - n + 1.0)
        sign = 1j * math.pi if negative % 2 else 0j
        return (cmath.log(self.scale) + log_factor + sign
                + (self.alpha - n) * cmath.log(self.singular_point - complex(z)))

    def _params(self):
        return {"z0": complex_to_json(self.singular_point), "alpha": self.alpha, "scale": complex_to_json(self.scale)}


class _ShiftedPowerBranch(PowerBranch):
    """Derivative of a PowerBranch; the exponent may be any non-integer real."""

    def __init__(self, z0, alpha, scale):
        self.singular_point = complex(z0)
        self.alpha = float(alpha)
        self.scale = complex(scale)


class LogBranch(InitialDatum):
    """scale · log(z0 - z)."""

    variant = "LogBranch"
    entire = False

    def __init__(self, z0=1.0, scale=1.0):
        self.singular_point = complex(z0)
        self.scale = complex(scale)

    def eval(self, z):
        w = np.asarray(z, dtype=complex)
        return self.eval_at(z, np.angle(self.singular_point - w))

    def eval_at(self, w, arg):
        self._guard(w)
        modulus = np.abs(self.singular_point - np.asarray(w, dtype=complex))
        result = self.scale * (np.log(modulus) + 1j * np.asarray(arg, dtype=float))
        return complex(result) if np.ndim(result) == 0 else result

    def derivative(self, n):
        if n < 0:
            raise ValidationError(f"Derivative order must be >= 0, got {n}")
        if n == 0:
            return self
        # d^n/dz^n log(z0 - z) = -(n-1)! / (z0 - z)^n
        return Rational(self.singular_point, n, -self.scale * math.factorial(n - 1))

    def log_derivative(self, n, z):
        if n == 0:
            return _log(self.eval(z))
        self._guard(z)
        if self.scale == 0:
            return complex(-math.inf, 0.0)
        return cmath.log(-self.scale) + math.lgamma(n) - n * cmath.log(self.singular_point - complex(z))

    def _params(self):
        return {"z0": complex_to_json(self.singular_point), "scale": complex_to_json(self.scale)}


def datum_derivative(phi, n):
    """
    Closed-form n-th derivative of a catalog datum.

    Args:
        phi: an InitialDatum
        n: derivative order, n >= 0

    Returns:
        An InitialDatum evaluating φ^{(n)}
    """
    if n < 0:
        raise ValidationError(f"Derivative order must be >= 0, got {n}")
    return phi.derivative(n)


def _parse_coefficient(value):
    if isinstance(value, str):
        try:
            return Fraction(value)
        except ValueError:
            raise ValidationError(f"Invalid polynomial coefficient {value!r}")
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    c = parse_complex(value, "coefficient")
    return c.real if c.imag == 0 else c


CATALOG = {
    "Polynomial": (Polynomial, {"coeffs"}),
    "Exp": (Exp, {"lam", "scale"}),
    "Rational": (Rational, {"z0", "m", "scale"}),
    "PowerBranch": (PowerBranch, {"z0", "alpha", "scale"}),
    "LogBranch": (LogBranch, {"z0", "scale"}),
}


def datum_from_json(data):
    """
    Build a catalog datum from {"variant": ..., "params": {...}}.

    Complex parameters are numbers or [re, im] pairs. Polynomial
    coefficients may also be strings such as "1/3" for exact arithmetic.
    """
    if not isinstance(data, dict) or "variant" not in data:
        raise ValidationError(f"Initial datum must be an object with a 'variant' field, got {data!r}")
    unknown = set(data) - {"variant", "params"}
    if unknown:
        raise ValidationError(f"Unknown initial datum fields: {sorted(unknown)}")
    variant = data["variant"]
    if variant not in CATALOG:
        raise ValidationError(f"Unknown initial datum variant {variant!r}; expected one of {sorted(CATALOG)}")
    cls, allowed = CATALOG[variant]
    params = data.get("params", {}) or {}
    unknown = set(params) - allowed
    if unknown:
        raise ValidationError(f"Unknown parameters for {variant}: {sorted(unknown)}")

    if variant == "Polynomial":
        coeffs = params.get("coeffs", [1])
        if not isinstance(coeffs, list) or not coeffs:
            raise ValidationError("Polynomial needs a non-empty 'coeffs' list")
        return Polynomial([_parse_coefficient(c) for c in coeffs])

    kwargs = {}
    for key, value in params.items():
        if key == "m":
            if not isinstance(value, int) or isinstance(value, bool):
                raise ValidationError(f"Rational 'm' must be an integer, got {value!r}")
            kwargs[key] = value
        elif key == "alpha":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValidationError(f"PowerBranch 'alpha' must be real, got {value!r}")
            kwargs[key] = float(value)
        else:
            kwargs[key] = parse_complex(value, key)
    return cls(**kwargs)
