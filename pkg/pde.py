"""
The Cauchy problem ∂_t u = a(∂_t t)^p t^q ∂_z^r u, u(0, z) = φ(z).

Holds the problem record, its formal solution, the regime classification,
the closed forms available in each regime and the Gevrey-order estimate of
a formal series.
"""

import math
import cmath
import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from core import CoverPoint, FormalSeries, as_cover_point, complex_to_json, cover_power, parse_complex, principal_root
from errors import AccuracyError, DomainError, SingularEvaluationError, ValidationError
from initial_data import InitialDatum, Polynomial, datum_from_json
from kernels import kernel_iterated_case1, kernel_iterated_case2
from moments import MomentFunction
from settings import DEFAULT_CONFIG

logger = logging.getLogger("pde")

ENTIRE_1A = "Entire1a"
CONVERGENT_1B = "Convergent1b"
SUMMABLE_1C = "Summable1c"
TRANSLATION_2A = "Translation2a"
SUMMABLE_2 = "Summable2"

SUMMABLE_REGIMES = (SUMMABLE_1C, SUMMABLE_2)
CLOSED_FORM_REGIMES = (ENTIRE_1A, CONVERGENT_1B, TRANSLATION_2A)

# Denominators of the Case 1 Borel sum below this count as a pole hit
POLE_GUARD = 1e-14
# z values where float coefficients are compared with the exact ones
SHIPPED_CHECK_POINTS = (Fraction(1, 2), Fraction(-5, 4))


def _non_negative_int(value, name):
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ValidationError(f"{name} must be a non-negative integer, got {value!r}")
    return value


@dataclass(frozen=True)
class CauchyProblem:
    """
    One instance of the equation with its initial datum.

    Attributes:
        p, q, r: non-negative integer exponents
        a: nonzero complex coefficient
        phi: catalog InitialDatum
    """
    p: int
    q: int
    r: int
    a: complex
    phi: InitialDatum

    def __post_init__(self):
        for name in ('p', 'q', 'r'):
            _non_negative_int(getattr(self, name), name)
        object.__setattr__(self, 'a', complex(self.a))
        if self.a == 0:
            raise ValidationError("The coefficient a must be nonzero")
        if not isinstance(self.phi, InitialDatum):
            raise ValidationError(f"phi must be a catalog initial datum, got {self.phi!r}")
        if self.r > 1 or (self.r == 1 and self.p >= 1):
            limit = self.r / (self.p - 1 + self.r)
            if self.phi.growth_order > limit:
                raise ValidationError(
                    f"phi of growth order {self.phi.growth_order} exceeds r/(p-1+r) = {limit:.6g}")

    @classmethod
    def from_json(cls, data):
        """Parse {"p": int, "q": int, "r": int, "a": [re, im], "phi": {...}}."""
        if not isinstance(data, dict):
            raise ValidationError(f"Problem must be a JSON object, got {data!r}")
        unknown = set(data) - {"p", "q", "r", "a", "phi"}
        if unknown:
            raise ValidationError(f"Unknown problem fields: {sorted(unknown)}")
        missing = {"p", "q", "r"} - set(data)
        if missing:
            raise ValidationError(f"Missing problem fields: {sorted(missing)}")
        phi = datum_from_json(data.get("phi", {"variant": "Polynomial", "params": {"coeffs": [1]}}))
        return cls(
            p=_non_negative_int(data["p"], "p"),
            q=_non_negative_int(data["q"], "q"),
            r=_non_negative_int(data["r"], "r"),
            a=parse_complex(data.get("a", 1), "a"),
            phi=phi,
        )

    def to_json(self):
        return {"p": self.p, "q": self.q, "r": self.r, "a": complex_to_json(self.a), "phi": self.phi.to_json()}

    @property
    def regime(self):
        return classify(self)

    def summability_index(self):
        """k of the summable regimes, None otherwise."""
        return self.regime.k

    def moment_function(self):
        """
        The moment function of the regime.

        Summable1c: Γ_{1/(q+1)}^{p-1}; Summable2: Γ_{r/(q+1)}·Γ_{1/(q+1)}^{p-1}.
        """
        tag = self.regime.tag
        base = MomentFunction.gamma(Fraction(1, self.q + 1))
        if tag == SUMMABLE_1C:
            return base.power(self.p - 1)
        if tag == SUMMABLE_2:
            return MomentFunction.gamma(Fraction(self.r, self.q + 1)) * base.power(self.p - 1)
        raise DomainError(f"Regime {tag} has no summation moment function")

    def kernel(self, config=DEFAULT_CONFIG):
        """The kernel pair of moment_function()."""
        tag = self.regime.tag
        if tag == SUMMABLE_1C:
            return kernel_iterated_case1(self.p, self.q, 0.0, config)
        if tag == SUMMABLE_2:
            return kernel_iterated_case2(self.p, self.q, self.r, 0.0, config)
        raise DomainError(f"Regime {tag} is summed in closed form, not by a kernel")

    @property
    def borel_coefficient(self):
        """c = a(q+1)^{p-1} of the Case 1 Borel sum; b = c^{1/r} for Case 2."""
        return self.a * (self.q + 1) ** (self.p - 1)


@dataclass(frozen=True)
class Regime:
    """
    Classification of a problem.

    Attributes:
        tag: one of Entire1a, Convergent1b, Summable1c, Translation2a, Summable2
        k: summability index (summable regimes only)
        expected_gevrey_order: Gevrey order of the formal solution in t,
            None when the series terminates
        note: human-readable remark (reported by the CLI)
    """
    tag: str
    k: float = None
    expected_gevrey_order: float = None
    note: str = ""

    @property
    def summable(self):
        return self.tag in SUMMABLE_REGIMES

    def to_dict(self):
        return {"regime": self.tag, "k": self.k, "expected_gevrey_order": self.expected_gevrey_order,
                "note": self.note}


def classify(cp):
    """
    Regime of a problem, determined by (p, r) alone.

    r=0: p=0 Entire1a, p=1 Convergent1b, p>=2 Summable1c.
    r=1: p=0 Translation2a, p>=1 Summable2 with k=(q+1)/p.
    r>1: Summable2 with k=(q+1)/(p-1+r).
    """
    p, q, r = cp.p, cp.q, cp.r
    if r == 0:
        if p == 0:
            tag, k, note = ENTIRE_1A, None, "entire in t, no singular directions"
        elif p == 1:
            tag, k, note = CONVERGENT_1B, None, "convergent, no Stokes analysis"
        else:
            tag, k, note = SUMMABLE_1C, (q + 1) / (p - 1), ""
    elif r == 1 and p == 0:
        tag, k, note = TRANSLATION_2A, None, "translation of phi, no singular directions"
    else:
        tag, k, note = SUMMABLE_2, (q + 1) / (p - 1 + r), ""
        if cp.phi.singular_point is None:
            note = "phi is entire: the Borel sum has no singular directions"

    return Regime(tag, k, _expected_gevrey_order(cp), note)


def _expected_gevrey_order(cp):
    if isinstance(cp.phi, Polynomial):
        if cp.r >= 1 or cp.phi.coeffs == [0]:
            # φ^{(nr)} vanishes for large n
            return None
        singular = 0
    else:
        singular = 0 if cp.phi.singular_point is None else 1
    return (cp.p - 1 + cp.r * singular) / (cp.q + 1)


def formal_solution(cp):
    """
    The unique formal solution Σ a^n (n!)^{p-1} (q+1)^{n(p-1)} φ^{(nr)}(z) t^{n(q+1)}.

    Coefficients are built in log form (meta 'log_term') so Borel
    transforms and Gevrey fits reach far beyond float range.
    """
    p, q, r = cp.p, cp.q, cp.r
    log_a = cmath.log(cp.a)
    log_q1 = math.log(q + 1)

    def log_term(n, z):
        weight = (p - 1) * (math.lgamma(n + 1) + n * log_q1)
        return n * log_a + weight + cp.phi.log_derivative(n * r, z)

    def term(n, z):
        value = log_term(n, z)
        if value.real == -math.inf:
            return 0j
        return cmath.exp(value)

    regime = classify(cp)
    return FormalSeries(
        term=term,
        stride=q + 1,
        label=f"u(p={p},q={q},r={r})",
        convergent=regime.tag in CLOSED_FORM_REGIMES,
        meta={'log_term': log_term, 'problem': cp, 'exact_coefficient': lambda n: exact_coefficient(cp, n)},
    )


def exact_sum(cp, t, z):
    """
    Closed-form solution in the regimes 1a, 1b and 2a.

    Raises:
        DomainError: other regimes, or |a t^{q+1}| >= 1 in Case 1b
    """
    tag = classify(cp).tag
    t = complex(as_cover_point(t).value) if isinstance(t, CoverPoint) else complex(t)
    z = complex(z)
    w = cp.a * t ** (cp.q + 1)
    if tag == ENTIRE_1A:
        return cp.phi(z) * cmath.exp(w / (cp.q + 1))
    if tag == CONVERGENT_1B:
        if abs(w) >= 1.0:
            raise DomainError(f"|a t^(q+1)| = {abs(w):.6g} >= 1: outside the disc of convergence")
        return cp.phi(z) / (1.0 - w)
    if tag == TRANSLATION_2A:
        return complex(cp.phi.eval_continued(z + w / (cp.q + 1), base=z))
    raise DomainError(f"No closed-form sum in regime {tag}")


def _borel_translates(cp, s_modulus, s_arg, z, indices):
    kappa = (cp.q + 1) / cp.r
    b = principal_root(cp.borel_coefficient, cp.r)
    power = cover_power(s_modulus, s_arg, kappa)
    total = 0
    for j in indices:
        omega = cmath.exp(2j * math.pi * j / cp.r)
        total = total + cp.phi.eval_continued(z + omega * b * np.asarray(power, dtype=complex), base=z)
    return total / cp.r


def _case1_borel(cp, s_modulus, s_arg, z):
    w = cp.borel_coefficient * np.asarray(cover_power(s_modulus, s_arg, cp.q + 1), dtype=complex)
    denominator = 1.0 - w
    if np.any(np.abs(denominator) < POLE_GUARD):
        raise SingularEvaluationError("Borel sum evaluated on its pole", None)
    return cp.phi(z) / denominator


def borel_closed_form(cp, s, z):
    """
    Closed-form Borel sum of the formal solution.

    Summable1c: φ(z)/(1 - a(q+1)^{p-1} s^{q+1}).
    Summable2: (1/r) Σ_j φ(z + ω^j a^{1/r}(q+1)^{(p-1)/r} s^{(q+1)/r}), with
    s^{(q+1)/r} taken on the cover (a CoverPoint fixes the sheet).
    """
    tag = classify(cp).tag
    point = as_cover_point(s)
    if tag == SUMMABLE_1C:
        return complex(_case1_borel(cp, point.modulus, point.arg, z))
    if tag == SUMMABLE_2:
        return complex(_borel_translates(cp, point.modulus, point.arg, complex(z), range(cp.r)))
    raise DomainError(f"Regime {tag} has no Borel closed form")


def case1_directions(cp):
    """d_k = (2kπ - arg a)/(q+1) for k = 0..q."""
    arg_a = cmath.phase(cp.a)
    return [(2.0 * math.pi * k - arg_a) / (cp.q + 1) for k in range(cp.q + 1)]


def case2_directions(cp, z):
    """δ_l = (rθ_z - 2πl - arg a)/(q+1) for l = 0..r-1, θ_z = arg(z0 - z); empty for entire φ."""
    z0 = cp.phi.singular_point
    if z0 is None:
        return []
    if abs(z0 - complex(z)) == 0:
        raise DomainError(f"z coincides with the singular point {z0} of phi")
    theta_z = cmath.phase(z0 - complex(z))
    arg_a = cmath.phase(cp.a)
    return [(cp.r * theta_z - 2.0 * math.pi * l - arg_a) / (cp.q + 1) for l in range(cp.r)]


class BorelSum:
    """
    The Borel sum of the formal solution at fixed z, as a ray integrand.

    This class handles:
    - Evaluating the closed form on rays of the cover (on_ray)
    - Restricting a Case 2 sum to one translate (translate)
    - Reporting the singular directions that laplace must avoid
    """

    def __init__(self, cp, z=0.0, indices=None):
        tag = classify(cp).tag
        if tag not in SUMMABLE_REGIMES:
            raise DomainError(f"Regime {tag} has no Borel sum to integrate")
        self.cp = cp
        self.z = complex(z)
        self.tag = tag
        self.indices = tuple(range(cp.r)) if indices is None and tag == SUMMABLE_2 else indices

    def on_ray(self, x, d):
        """Values at s = x·e^{id} for a modulus array x."""
        x = np.asarray(x, dtype=float)
        if self.tag == SUMMABLE_1C:
            return np.broadcast_to(_case1_borel(self.cp, x, d, self.z), x.shape)
        return np.broadcast_to(_borel_translates(self.cp, x, d, self.z, self.indices), x.shape)

    def __call__(self, s):
        point = as_cover_point(s)
        return complex(self.on_ray(np.array([point.modulus]), point.arg)[0])

    def translate(self, l):
        """The l-th translate φ(z + ω^l b s^κ)/r alone."""
        if self.tag != SUMMABLE_2:
            raise DomainError("Only Case 2 Borel sums split into translates")
        if not 0 <= l < self.cp.r:
            raise ValidationError(f"Translate index must lie in 0..{self.cp.r - 1}, got {l}")
        return BorelSum(self.cp, self.z, (l,))

    def singular_directions(self):
        if self.tag == SUMMABLE_1C:
            return case1_directions(self.cp)
        directions = case2_directions(self.cp, self.z)
        return [directions[l] for l in self.indices] if directions else []

    def __repr__(self):
        return f"BorelSum({self.cp.to_json()}, z={self.z}, translates={self.indices})"


@dataclass(frozen=True)
class GevreyEstimate:
    """Fit of log|c_n| ≈ s·j log j + β j + δ log j + γ over j = n·stride."""
    order: float
    beta: float
    samples: int
    degenerate: bool = False

    def __float__(self):
        return float(self.order)


def gevrey_estimate(fs, z=0.0, N=40):
    """
    Least-squares Gevrey order of a formal series.

    Uses the stride coefficients n = 1..N (powers j = n·stride); vanishing
    coefficients are skipped, and fewer than four usable ones give a
    degenerate estimate of 0.
    """
    if N < 20:
        raise ValidationError(f"Gevrey estimation needs N >= 20, got {N}")
    log_term = fs.meta.get('log_term')
    js, logs = [], []
    for n in range(1, N + 1):
        if log_term is not None:
            value = complex(log_term(n, z)).real
        else:
            c = abs(complex(fs.term(n, z)))
            value = math.log(c) if c > 0 else -math.inf
        if math.isfinite(value):
            js.append(n * fs.stride)
            logs.append(value)
    if len(js) < 4:
        logger.debug(f"Gevrey estimate of {fs.label}: only {len(js)} nonzero coefficients")
        return GevreyEstimate(0.0, 0.0, len(js), True)
    j = np.array(js, dtype=float)
    design = np.vstack([j * np.log(j), j, np.log(j), np.ones_like(j)]).T
    coefficients, *_ = np.linalg.lstsq(design, np.array(logs), rcond=None)
    return GevreyEstimate(float(coefficients[0]), float(coefficients[1]), len(js))


def _as_fraction(value, name):
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    c = complex(value)
    if c.imag != 0:
        raise ValidationError(f"{name} must be real for exact arithmetic, got {value!r}")
    return Fraction(c.real)


def _poly_derivative(coeffs, n):
    if n >= len(coeffs):
        return [Fraction(0)]
    return [c * math.perm(i, n) for i, c in enumerate(coeffs) if i >= n]


def _poly_combine(left, right, right_factor):
    size = max(len(left), len(right))
    left = left + [Fraction(0)] * (size - len(left))
    right = right + [Fraction(0)] * (size - len(right))
    return [x + right_factor * y for x, y in zip(left, right)]


def exact_coefficient(cp, n):
    """
    The coefficient of t^{n(q+1)} as an exact polynomial in z.

    Needs a polynomial φ with real coefficients and real a.
    """
    if not isinstance(cp.phi, Polynomial):
        raise ValidationError("Exact coefficients need a polynomial phi")
    a = _as_fraction(cp.a, "a")
    phi = [_as_fraction(c, "phi coefficient") for c in cp.phi.coeffs]
    weight = a ** n * Fraction(math.factorial(n)) ** (cp.p - 1) * Fraction(cp.q + 1) ** (n * (cp.p - 1))
    return [weight * c for c in _poly_derivative(phi, n * cp.r)]


def _check_shipped_coefficient(fs, n, exact):
    for z in SHIPPED_CHECK_POINTS:
        expected = sum(c * z ** i for i, c in enumerate(exact))
        scale = float(sum(abs(c) * abs(z) ** i for i, c in enumerate(exact)))
        shipped = complex(fs.term(n, float(z)))
        if abs(shipped - float(expected)) > 1e-10 * scale:
            raise AccuracyError(
                f"Coefficient {n} of {fs.label} is {shipped} at z = {z}, exact value {float(expected)}",
                estimate=shipped)


def formal_residual(cp, order):
    """
    Coefficients of ∂_t û - a(∂_t t)^p t^q ∂_z^r û for û truncated at t^order.

    û is the series returned by formal_solution: its exact coefficients
    feed the residual, and its float coefficients must agree with them.
    Exact Fraction arithmetic; needs a polynomial φ with real coefficients
    and real a. Returns one coefficient list (in z) per power t^j,
    j = 0..order-q-1; all of them vanish for a correct formal solution.

    Raises:
        AccuracyError: the shipped float coefficients disagree with the exact ones
    """
    fs = formal_solution(cp)
    exact = fs.meta['exact_coefficient']
    a = _as_fraction(cp.a, "a")
    p, q, r = cp.p, cp.q, cp.r
    stride = q + 1
    checked = {}

    def coefficient(i):
        if i % stride:
            return [Fraction(0)]
        n = i // stride
        if n not in checked:
            checked[n] = exact(n)
            _check_shipped_coefficient(fs, n, checked[n])
        return checked[n]

    residual = []
    for j in range(order - q):
        lhs = [(j + 1) * c for c in coefficient(j + 1)]
        rhs = _poly_derivative(coefficient(j - q), r) if j >= q else [Fraction(0)]
        residual.append(_poly_combine(lhs, rhs, -a * Fraction(j + 1) ** p))
    return residual


def roots_of_unity_average(phi, z, w, r):
    """(1/r) Σ_j φ(z + ω_r^j w)."""
    z, w = complex(z), complex(w)
    return sum(complex(phi(z + cmath.exp(2j * math.pi * j / r) * w)) for j in range(r)) / r


def derivative_series(phi, z, w, r, terms=80):
    """Σ_{n<terms} φ^{(nr)}(z) w^{nr}/(nr)!."""
    z, w = complex(z), complex(w)
    if w == 0:
        return complex(phi(z))
    log_w = cmath.log(w)
    parts = []
    for n in range(terms):
        log_t = phi.log_derivative(n * r, z) + n * r * log_w - math.lgamma(n * r + 1)
        if log_t.real > -math.inf:
            parts.append(cmath.exp(log_t))
    return complex(math.fsum(c.real for c in parts), math.fsum(c.imag for c in parts))
