"""
Core geometry and formal series.

Directions and points live on the universal cover of C minus the origin: an
argument is a real number that is never reduced modulo 2π. Principal values
(-π, π] are used only for constants such as arg a.
"""

import math
import cmath
import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from errors import ValidationError, DomainError

logger = logging.getLogger("core")

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, order=True)
class Direction:
    """A direction on the universal cover; theta is never reduced mod 2π."""
    theta: float

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ValidationError(f"Direction must be finite, got {self.theta}")

    def shifted(self, delta):
        return Direction(self.theta + float(delta))

    def unit(self):
        return cmath.exp(1j * self.theta)

    def __float__(self):
        return float(self.theta)


def as_direction(d):
    """Accept a Direction or a bare real number."""
    if isinstance(d, Direction):
        return d
    return Direction(float(d))


@dataclass(frozen=True)
class CoverPoint:
    """A point r·e^{i·arg} of the universal cover with its argument carried explicitly."""
    modulus: float
    arg: float

    def __post_init__(self):
        if self.modulus < 0 or not math.isfinite(self.arg):
            raise ValidationError(f"Invalid cover point ({self.modulus}, {self.arg})")

    @classmethod
    def from_complex(cls, z, arg=None):
        """
        Lift a complex number to the cover.

        Args:
            z: the complex value
            arg: cover argument; must agree with z modulo 2π (default: principal arg)
        """
        z = complex(z)
        modulus = abs(z)
        if arg is None:
            return cls(modulus, cmath.phase(z))
        arg = float(arg)
        if modulus > 0 and abs(cmath.exp(1j * arg) - z / modulus) > 1e-9:
            raise ValidationError(f"Cover argument {arg} does not match {z}")
        return cls(modulus, arg)

    @property
    def value(self):
        return self.modulus * cmath.exp(1j * self.arg)

    def rotate(self, phi):
        return CoverPoint(self.modulus, self.arg + phi)

    def scale(self, factor):
        return CoverPoint(self.modulus * factor, self.arg)

    def inverse(self):
        if self.modulus == 0:
            raise DomainError("Cannot invert the origin")
        return CoverPoint(1.0 / self.modulus, -self.arg)

    def power(self, exponent):
        return CoverPoint(self.modulus ** exponent, self.arg * exponent)


def as_cover_point(t, arg=None):
    """Accept a CoverPoint or a complex number (principal argument unless given)."""
    if isinstance(t, CoverPoint):
        return t
    return CoverPoint.from_complex(t, arg)


def cover_power(modulus, arg, exponent):
    """
    Evaluate (r·e^{iθ})^e with the branch fixed by the cover argument θ.

    Works elementwise on numpy arrays; 0^e is 0 for e > 0.
    """
    modulus = np.asarray(modulus, dtype=float)
    with np.errstate(divide='ignore', invalid='ignore'):
        magnitude = np.where(modulus > 0, np.power(np.where(modulus > 0, modulus, 1.0), exponent), 0.0)
    result = magnitude * np.exp(1j * exponent * np.asarray(arg, dtype=float))
    if result.ndim == 0:
        return complex(result)
    return result


def principal_root(a, n):
    """Principal n-th root of a complex constant, arg in (-π/n, π/n]."""
    a = complex(a)
    return abs(a) ** (1.0 / n) * cmath.exp(1j * cmath.phase(a) / n)


@dataclass(frozen=True)
class Sector:
    """
    The sector S_d(opening, radius) on the universal cover.

    Membership is 0 < |t| < radius and arg t in the open interval
    (d - opening/2, d + opening/2), with arg taken on the cover.
    """
    d: Direction
    opening: float
    radius: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, 'd', as_direction(self.d))
        if not self.opening > 0:
            raise ValidationError(f"Sector opening must be positive, got {self.opening}")
        if not self.radius > 0:
            raise ValidationError(f"Sector radius must be positive, got {self.radius}")

    @property
    def bounds(self):
        half = self.opening / 2.0
        return self.d.theta - half, self.d.theta + half

    def contains(self, t):
        return sector_contains(self, t)

    def subsector(self, shrink=0.9):
        """A proper subsector S* ≺ S with the same bisector."""
        radius = self.radius * shrink if math.isfinite(self.radius) else self.radius
        return Sector(self.d, self.opening * shrink, radius)

    def sample(self, n_radii=16, n_args=5, r_min=1e-2, r_max=None):
        """Deterministic grid of cover points strictly inside the sector."""
        lo, hi = self.bounds
        if r_max is None:
            r_max = self.radius * 0.99 if math.isfinite(self.radius) else 50.0
        radii = np.geomspace(r_min, r_max, n_radii)
        args = np.linspace(lo, hi, n_args + 2)[1:-1]
        return [CoverPoint(float(r), float(a)) for r in radii for a in args]


def sector_contains(s, t):
    """
    Membership test for a sector on the cover.

    Args:
        s: the Sector
        t: a CoverPoint (or complex, read with its principal argument)

    Returns:
        True iff 0 < |t| < radius and arg t lies strictly inside the opening
    """
    point = as_cover_point(t)
    if not (0.0 < point.modulus < s.radius):
        return False
    lo, hi = s.bounds
    return lo < point.arg < hi


def disc_sector_contains(s, disc_radius, t):
    """Membership in the disc-sector S ∪ D_r (a point of the disc has any argument)."""
    point = as_cover_point(t)
    return point.modulus < disc_radius or sector_contains(s, point)


@dataclass(frozen=True)
class GrowthAttestation:
    """Fitted constants of log|f(x)| <= C2·|x|^k + log C1 on a sample set."""
    k: float
    C1: float
    C2: float
    holds: bool
    samples: int


@dataclass(frozen=True)
class GrowthClass:
    """Exponential growth of order at most k (the class O^k)."""
    k: float

    def attest(self, f, sector, **sample_kwargs):
        return attest_growth(f, sector, self.k, **sample_kwargs)


def attest_growth(f, sector, k, n_radii=24, n_args=5, r_max=None):
    """
    Fit C1, C2 so that log|f(x)| <= C2|x|^k + log C1 over samples of a proper subsector.

    The attestation holds when the C2 needed on the whole sample set is not
    larger than twice the C2 needed on its inner half (plus a small margin),
    i.e. the growth does not outrun order k as the radius increases.

    Args:
        f: callable taking a CoverPoint and returning a complex value
        sector: the sector on which membership is attested
        k: growth order
    """
    points = sector.subsector().sample(n_radii=n_radii, n_args=n_args, r_max=r_max)
    radii = np.array([p.modulus for p in points])
    logs = np.array([math.log(max(abs(f(p)), 1e-300)) for p in points])

    inner = radii <= 1.0
    log_c1 = max(0.0, float(logs[inner].max()) if inner.any() else 0.0)
    outer = ~inner
    if not outer.any():
        return GrowthAttestation(k, math.exp(log_c1), 0.0, True, len(points))

    needed = np.maximum(logs[outer] - log_c1, 0.0) / radii[outer] ** k
    c2 = float(needed.max())
    split = np.median(radii[outer])
    inner_half = radii[outer] <= split
    c2_inner = float(needed[inner_half].max()) if inner_half.any() else c2
    holds = c2 <= 2.0 * c2_inner + 1e-6
    logger.debug(f"Growth attestation k={k}: C1={math.exp(log_c1):.3e}, C2={c2:.3e}, holds={holds}")
    return GrowthAttestation(k, math.exp(log_c1), c2, bool(holds), len(points))


@dataclass(frozen=True)
class FormalSeries:
    """
    Sparse formal power series in t with z-dependent coefficients.

    Nonzero coefficients sit at the powers n·stride; term(n, z) returns the
    coefficient of t^{n·stride}.
    """
    term: Callable
    stride: int = 1
    label: str = "series"
    convergent: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.stride < 1:
            raise ValidationError(f"Series stride must be >= 1, got {self.stride}")

    def coefficient(self, j, z=0.0):
        """Coefficient of t^j."""
        if j < 0:
            raise ValidationError(f"Negative power {j}")
        if j % self.stride:
            return 0j
        return complex(self.term(j // self.stride, z))

    def terms(self, z, count):
        """The first `count` stride coefficients as a complex array."""
        return np.array([complex(self.term(n, z)) for n in range(count)], dtype=complex)

    def powers(self, count):
        return np.arange(count) * self.stride

    def truncate(self, order):
        """Coefficients of t^0..t^order as a dense list."""
        return [self.coefficient(j) for j in range(order + 1)]

    def map_coefficients(self, fn, label=None, convergent=None):
        """New series with term'(n, z) = fn(n, term(n, z))."""
        base = self.term
        return FormalSeries(
            term=lambda n, z: fn(n, base(n, z)),
            stride=self.stride,
            label=label or self.label,
            convergent=self.convergent if convergent is None else convergent,
            meta=dict(self.meta),
        )

    def partial_sum(self, t, z=0.0, order=None, count=None):
        """
        Sum of the terms with power <= order (or of the first `count` stride terms).
        """
        if count is None:
            if order is None:
                raise ValidationError("partial_sum needs order or count")
            count = order // self.stride + 1
        t = complex(as_cover_point(t).value) if isinstance(t, CoverPoint) else complex(t)
        coefficients = self.terms(z, count)
        powers = t ** self.powers(count)
        return complex(np.sum(coefficients * powers))


def parse_complex(value, name="value"):
    """Read a complex number from JSON: a bare number or a [re, im] pair."""
    if isinstance(value, bool):
        raise ValidationError(f"{name} must be a number or [re, im], got {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
            isinstance(part, (int, float)) and not isinstance(part, bool) for part in value):
        return complex(float(value[0]), float(value[1]))
    raise ValidationError(f"{name} must be a number or [re, im], got {value!r}")


def complex_to_json(z):
    z = complex(z)
    return [z.real, z.imag]
