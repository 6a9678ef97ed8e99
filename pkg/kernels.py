"""
Kernel pairs (e_m, E_m) attached to moment functions.

e_m is evaluated along rays of the universal cover: e_ray(x, psi) is
e_m(x·e^{i·psi}) for moduli x >= 0. Three backings exist:

  ClosedFormKernel      e(z) = k z^k exp(-z^k), E = Mittag-Leffler E_{1/k}
  IteratedKernel        Mellin convolution of a closed-form kernel with a
                        previous kernel, computed by quadrature
  InverseContourKernel  quotient moments Γ_{r/(q+1)}/Γ_{1/(q+1)}, computed
                        as an inverse Laplace contour integral

Quadrature-backed kernels are tabulated per ray on a geometric grid and
interpolated by cubic splines of log e against log x; tables live in an
LRU cache and real-ray tables can be persisted to disk.
"""

import math
import cmath
from fractions import Fraction
import logging

import numpy as np
from cachetools.func import lru_cache
from scipy.interpolate import CubicSpline
from scipy.special import gammaln, rgamma

from core import as_cover_point, as_direction, cover_power
from errors import AccuracyError, DomainError, ValidationError
from kernel_cache import RayTableCache, default_store, table_key
from moments import MomentFunction
from quadrature import ContourGammaD, RayQuadratureSpec, contour_integral, integrate_interval, ray_integral
from settings import DEFAULT_CONFIG
from special_functions import mittag_leffler_array

logger = logging.getLogger("kernels")

# Smallest modulus on a kernel table; below it values are extrapolated log-log linearly
TABLE_X_MIN = 1e-8
# Decay exponent past which a closed-form kernel counts as zero
EXTENT_EXPONENT = 90.0
# Table values below this magnitude end the table
TABLE_FLOOR = 1e-300
# Series terms precomputed for the E_m power series
E_SERIES_TERMS = 4000
# Below this modulus contour kernels are summed from their series at the origin
CONTOUR_SERIES_X = 1e-4
# Term cap for that series
CONTOUR_SERIES_TERMS = 60


class KernelTable:
    """Spline of log e_m along one ray, with log-log extrapolation towards 0 and 0 beyond the last point."""

    def __init__(self, x, values):
        x = np.asarray(x, dtype=float)
        values = np.asarray(values, dtype=complex)
        small = np.abs(values) <= TABLE_FLOOR
        cut = int(np.argmax(small)) if small.any() else x.size
        if cut < 4:
            raise AccuracyError(f"Kernel table has only {cut} usable points")
        x, values = x[:cut], values[:cut]
        log_x = np.log(x)
        self.x_min = float(x[0])
        self.x_max = float(x[-1])
        self.x = x
        self.values = values
        self.log_magnitude = CubicSpline(log_x, np.log(np.abs(values)))
        self.phase = CubicSpline(log_x, np.unwrap(np.angle(values)))
        self._log_x0 = float(log_x[0])
        self._slope = complex(self.log_magnitude(self._log_x0, 1), self.phase(self._log_x0, 1))
        self._log_e0 = complex(self.log_magnitude(self._log_x0), self.phase(self._log_x0))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        inside = (x >= self.x_min) & (x <= self.x_max)
        if inside.any():
            lx = np.log(x[inside])
            out[inside] = np.exp(self.log_magnitude(lx) + 1j * self.phase(lx))
        below = (x > 0) & (x < self.x_min)
        if below.any():
            lx = np.log(x[below])
            out[below] = np.exp(self._log_e0 + self._slope * (lx - self._log_x0))
        return out


class ConjugateTable:
    """Mirror image of a KernelTable across the real axis."""

    def __init__(self, table):
        self.table = table
        self.x_min = table.x_min
        self.x_max = table.x_max

    def __call__(self, x):
        return np.conj(self.table(x))


class KernelPair:
    """
    A kernel pair (e_m, E_m) of order k, i.e. m of order 1/k.

    Subclasses implement e_ray and extent; E defaults to the power series
    Σ z^n / m(n).
    """

    def __init__(self, m, k, backing, label):
        if not k > 0:
            raise DomainError(f"Kernel order must be positive, got {k}")
        self.m = m
        self.k = float(k)
        self.backing = backing
        self.label = label
        self._log_m = None

    @property
    def order(self):
        """Order 1/k of the moment function."""
        return 1.0 / self.k

    @property
    def half_opening(self):
        """e_m lives on S_0(π/k): rays with |psi| < π/(2k)."""
        return math.pi / (2.0 * self.k)

    def check_ray(self, psi):
        if abs(psi) >= self.half_opening:
            raise DomainError(
                f"Kernel {self.label} is not flat on the ray arg = {psi:.6g} "
                f"(needs |arg| < {self.half_opening:.6g})")

    def e_ray(self, x, psi):
        raise NotImplementedError

    def extent(self, psi):
        """Modulus beyond which |e_m| on the ray psi is negligible."""
        raise NotImplementedError

    def e(self, z, arg=None):
        """e_m at a complex point (principal argument unless arg or a CoverPoint is given)."""
        point = as_cover_point(z, arg)
        return complex(self.e_ray(np.array([point.modulus]), point.arg)[0])

    def E(self, z):
        """E_m(z) = Σ z^n/m(n); scalar or numpy array."""
        z_arr = np.asarray(z, dtype=complex)
        flat = np.array([self._series_E(complex(w)) for w in z_arr.ravel()], dtype=complex)
        result = flat.reshape(z_arr.shape)
        return complex(result) if result.ndim == 0 else result

    def _series_E(self, w):
        if w == 0:
            return 1.0 + 0j
        if self._log_m is None:
            self._log_m = self.m.log(np.arange(E_SERIES_TERMS, dtype=float))
        log_w = cmath.log(w)
        n = np.arange(E_SERIES_TERMS)
        log_terms = n * log_w - self._log_m
        magnitudes = np.exp(log_terms.real)
        peak = int(np.argmax(magnitudes))
        if magnitudes[-1] > 1e-17 * magnitudes[peak] or peak == E_SERIES_TERMS - 1:
            raise AccuracyError(f"E_m series for {self.label} does not converge within {E_SERIES_TERMS} terms at {w}")
        terms = magnitudes * np.exp(1j * log_terms.imag)
        value = complex(math.fsum(terms.real), math.fsum(terms.imag))
        if magnitudes[peak] > 1e10 * max(abs(value), 1e-300):
            raise AccuracyError(f"E_m series for {self.label} loses all digits to cancellation at {w}",
                                estimate=value)
        return value

    def mellin(self, u, config=DEFAULT_CONFIG):
        """∫_0^∞ x^{u-1} e_m(x) dx, which equals m(u)."""
        spec = RayQuadratureSpec.from_config(0.0, config, scale=1.0)
        return ray_integral(lambda x, d: x ** (u - 1.0) * self.e_ray(x, 0.0), spec, polar=True)

    def flatness(self, psi=None, samples=200):
        """
        Fit (A, B) with |e_m(x e^{i psi})| <= A exp(-(x/B)^k) on sampled x.

        The decay rate is a least-squares fit of log|e| against x^k over the
        samples past the peak; half of it is kept as the rate of the bound,
        and A is 1.1 times the largest ratio on the sample grid.
        """
        if psi is None:
            psi = max(0.0, (math.pi / self.k - 0.2) / 2.0)
        self.check_ray(psi)
        x_max = self.extent(psi)
        x = np.geomspace(1e-3, x_max, samples)
        magnitude = np.abs(self.e_ray(x, psi))
        usable = magnitude > TABLE_FLOOR
        if usable.sum() < 5:
            raise DomainError(f"Kernel {self.label} has too few nonzero samples on arg = {psi:.6g}")
        peak = int(np.argmax(np.where(usable, magnitude, 0.0)))
        branch = usable & (np.arange(samples) >= peak)
        if branch.sum() < 3:
            raise DomainError(f"Kernel {self.label} has no decaying branch on arg = {psi:.6g}")
        slope = np.polyfit(x[branch] ** self.k, np.log(magnitude[branch]), 1)[0]
        if not slope < 0:
            raise DomainError(f"Kernel {self.label} shows no exponential decay on arg = {psi:.6g}")
        rate = -0.5 * float(slope)
        B = rate ** (-1.0 / self.k)
        A = 1.1 * float(np.max(magnitude[usable] * np.exp(rate * x[usable] ** self.k)))
        return A, B

    def __repr__(self):
        return f"{type(self).__name__}({self.label}, k={self.k:.6g}, m={self.m.expression})"


class ClosedFormKernel(KernelPair):
    """e(z) = k z^k exp(-z^k) with m(u) = Γ(1 + u/k) and E = E_{1/k}."""

    def __init__(self, k):
        if not k > 0:
            raise DomainError(f"Kernel order must be positive, got {k}")
        super().__init__(MomentFunction.gamma(1.0 / k), k, "ClosedForm", f"closed(k={float(k):.6g})")

    @property
    def ramification(self):
        """Smallest integer p with k·p > 1/2 (1 when no ramification is needed)."""
        return math.floor(1.0 / (2.0 * self.k)) + 1 if self.k <= 0.5 else 1

    def ramified(self):
        """(p, kernel of order k·p) with e_m(z) = e_{m̃}(z^{1/p})/p."""
        p = self.ramification
        return p, ClosedFormKernel(self.k * p)

    def e_ray(self, x, psi):
        w = cover_power(x, np.broadcast_to(np.asarray(psi, dtype=float), np.shape(x)), self.k)
        w = np.asarray(w, dtype=complex)
        return self.k * w * np.exp(-w)

    def extent(self, psi):
        c = math.cos(self.k * psi)
        if c <= 0:
            raise DomainError(f"Kernel {self.label} is not flat on the ray arg = {psi:.6g}")
        return (EXTENT_EXPONENT / c) ** (1.0 / self.k)

    def E(self, z):
        result = mittag_leffler_array(1.0 / self.k, z)
        return complex(result) if np.ndim(result) == 0 else result


class TabulatedKernel(KernelPair):
    """
    Quadrature-backed kernel, tabulated per ray.

    This class handles:
    - Evaluating the defining integral at single points (exact)
    - Building and caching one spline table per ray direction
    - Persisting the real-ray table through the kernel table store
    """

    def __init__(self, m, k, backing, label, signature, d, config):
        super().__init__(m, k, backing, label)
        self.signature = signature
        self.d = float(d)
        self.config = config
        self.tables = RayTableCache()

    def exact(self, x, psi):
        raise NotImplementedError

    def table(self, psi):
        key = round(float(psi), 9)
        if key < 0 and self.d == 0.0:
            # real on the positive axis: e(conj z) = conj e(z)
            return ConjugateTable(self.table(-key))
        return self.tables.get_or_build(key, lambda: self._build_table(key))

    def e_ray(self, x, psi):
        return self.table(psi)(x)

    def extent(self, psi):
        return self.table(psi).x_max

    def _store_key(self):
        p, q, r = self.signature
        return table_key(p, q, r, self.d, self.config.rel_tol)

    def _build_table(self, psi):
        store = default_store() if psi == 0.0 else None
        if store is not None:
            cached = store.load(self._store_key())
            if cached is not None:
                return KernelTable(*cached)

        x_hi = self._find_extent(psi)
        x = np.geomspace(TABLE_X_MIN, x_hi, self.config.kernel_points)
        values = np.array([self.exact(float(xi), psi) for xi in x], dtype=complex)
        table = KernelTable(x, values)
        logger.info(f"Tabulated {self.label} on arg={psi:.6f}: {table.x.size} points up to x={table.x_max:.4g}")
        if store is not None:
            store.store(self._store_key(), table.x, table.values.real)
        return table

    def _find_extent(self, psi):
        x = 0.25
        peak = 0.0
        previous = math.inf
        for step in range(64):
            value = abs(self.exact(x, psi))
            peak = max(peak, value)
            if step > 2 and value < previous:
                if value < 1e-30 * peak:
                    return x
            elif step > 4 and value < 1e-12 * peak:
                # quadrature noise floor reached
                return x
            previous = value
            x *= 2.0
        raise AccuracyError(f"Kernel {self.label} shows no decay on arg = {psi:.6g} up to x = {x:.3g}")


class IteratedKernel(TabulatedKernel):
    """
    e(z) = ∫_{e^{i·angle}R+} e_outer(u z) e_inner(1/u) du/u.

    The moment function is m_outer·m_inner. The integration ray is chosen
    per evaluation ray psi so that both factors decay equally fast,
    shifted by the configured direction d.
    """

    def __init__(self, outer, inner, d=0.0, signature=(0, 0, 0), config=DEFAULT_CONFIG):
        depth = getattr(inner, 'depth', 0) + 1
        if depth > config.kernel_depth:
            raise ValidationError(f"Iterated kernel depth {depth} exceeds the cap {config.kernel_depth}")
        k = 1.0 / (1.0 / outer.k + 1.0 / inner.k)
        super().__init__(outer.m * inner.m, k, f"IteratedQuadrature({depth})",
                         f"iterated(p={signature[0]},q={signature[1]},r={signature[2]})",
                         signature, d, config)
        self.outer = outer
        self.inner = inner
        self.depth = depth

    def path_angles(self, psi):
        k1, k2 = self.outer.k, self.inner.k
        angle = self.d - psi * k1 / (k1 + k2)
        outer_arg = psi + angle
        inner_arg = -angle
        if abs(outer_arg) * k1 >= math.pi / 2 or abs(inner_arg) * k2 >= math.pi / 2:
            raise DomainError(f"No admissible integration ray for {self.label} at arg = {psi:.6g} with d = {self.d}")
        return outer_arg, inner_arg

    def exact(self, x, psi):
        outer_arg, inner_arg = self.path_angles(psi)
        y_hi = math.log(self.outer.extent(outer_arg) / x)
        y_lo = -math.log(self.inner.extent(inner_arg))
        if y_hi <= y_lo:
            return 0j

        def integrand(y):
            return self.outer.e_ray(np.exp(y) * x, outer_arg) * self.inner.e_ray(np.exp(-y), inner_arg)

        result = integrate_interval(
            integrand, y_lo, y_hi, abs_tol=1e-300, rel_tol=self.config.rel_tol / self.depth,
            max_subdivisions=self.config.max_subdivisions,
            breakpoints=list(np.linspace(y_lo, y_hi, 9)[1:-1]))
        return result.value


class InverseContourKernel(TabulatedKernel):
    """
    Kernel of m = Γ_{r/(q+1)}/Γ_{1/(q+1)}:

        e(u) = -(1/2πi) ∮_{γ} E_{1/(q+1)}(1/(u z)) e_{m2}(1/z) dz/z

    with e_{m2} the closed-form kernel of order (q+1)/r. The contour is
    centred on d - arg u, opens by π/(q+1) plus the configured margin, and
    its radius sits at the saddle of the integrand.

    For |u| < CONTOUR_SERIES_X the saddle runs off to infinity and the
    residues of m at u = -n(q+1)/r are summed instead:

        e(z) = Σ_{n>=1} (q+1)(-1)^{n-1} / (r (n-1)! Γ(1 - n/r)) · z^{n(q+1)/r}
    """

    def __init__(self, q, r, d=0.0, config=DEFAULT_CONFIG):
        if r < 2:
            raise ValidationError(f"Inverse contour kernels need r >= 2, got r={r}")
        m = MomentFunction.gamma(Fraction(r, q + 1)) / MomentFunction.gamma(Fraction(1, q + 1))
        super().__init__(m, (q + 1) / (r - 1), "IteratedQuadrature(1)",
                         f"contour(p=0,q={q},r={r})", (0, q, r), d, config)
        self.q = q
        self.r = r
        self.depth = 1
        self.inner = ClosedFormKernel((q + 1) / r)
        self.alpha = 1.0 / (q + 1)

    def contour_for(self, x, psi):
        kappa = self.inner.k
        q1 = self.q + 1
        saddle = (kappa * x ** q1 / q1) ** (1.0 / (q1 - kappa))
        radius = min(max(1.0 / saddle, 1e-6), 1e6)
        return ContourGammaD(self.d - psi, math.pi / q1 + self.config.contour_margin, radius)

    def exact(self, x, psi):
        if x < CONTOUR_SERIES_X:
            return self.series_value(x, psi)
        return self.contour_value(x, psi)

    def series_value(self, x, psi):
        n = np.arange(1, CONTOUR_SERIES_TERMS + 1, dtype=float)
        exponent = n * (self.q + 1) / self.r
        coeff = (self.q + 1) / self.r * (-1.0) ** (n - 1) * rgamma(1.0 - n / self.r) * np.exp(-gammaln(n))
        terms = coeff * np.exp(exponent * math.log(x) + 1j * exponent * psi)
        magnitudes = np.abs(terms)
        if magnitudes[-1] > 1e-17 * magnitudes.max():
            raise AccuracyError(f"Origin series of {self.label} does not converge at x = {x:.3g}")
        return complex(np.sum(terms))

    def contour_value(self, x, psi):
        contour = self.contour_for(x, psi)

        def integrand(rho, theta):
            w = np.exp(-1j * (psi + theta)) / (x * rho)
            return (mittag_leffler_array(self.alpha, w) * self.inner.e_ray(1.0 / rho, -theta)
                    / (rho * np.exp(1j * theta)))

        result = contour_integral(integrand, contour, abs_tol=1e-300, rel_tol=self.config.rel_tol,
                                  max_subdivisions=self.config.max_subdivisions, graded_levels=12)
        return -result.value / (2j * math.pi)


@lru_cache(maxsize=64)
def kernel_closed_form(k):
    """
    The closed-form kernel of order k > 0.

    Also used for k <= 1/2, where it agrees with the ramified kernel
    through e_m(z) = e_{m̃}(z^{1/p})/p.
    """
    if not k > 0:
        raise DomainError(f"Kernel order must be positive, got {k}")
    return ClosedFormKernel(k)


@lru_cache(maxsize=32)
def _case1_kernel(p, q, d, config):
    if p == 2:
        return kernel_closed_form(q + 1)
    inner = _case1_kernel(p - 1, q, d, config)
    return IteratedKernel(kernel_closed_form(q + 1), inner, d, (p, q, 0), config)


def kernel_iterated_case1(p, q, d=0.0, config=DEFAULT_CONFIG):
    """
    Kernel of m(u) = Γ(1 + u/(q+1))^{p-1}.

    p = 2 is the closed form of order q+1; each further p integrates the
    previous kernel against (q+1)(uz)^{q+1} exp(-(uz)^{q+1}).
    """
    if p < 2:
        raise ValidationError(f"Case 1 kernels need p >= 2, got p={p}")
    if q < 0:
        raise ValidationError(f"q must be >= 0, got q={q}")
    return _case1_kernel(int(p), int(q), float(as_direction(d).theta), config)


@lru_cache(maxsize=32)
def _case2_kernel(p, q, r, d, config):
    if p == 0:
        return InverseContourKernel(q, r, d, config)
    if p == 1:
        return kernel_closed_form((q + 1) / r)
    inner = _case2_kernel(p - 1, q, r, d, config)
    return IteratedKernel(kernel_closed_form(q + 1), inner, d, (p, q, r), config)


def kernel_iterated_case2(p, q, r, d=0.0, config=DEFAULT_CONFIG):
    """
    Kernel of m(u) = Γ(1 + ur/(q+1))·Γ(1 + u/(q+1))^{p-1}.

    p = 0 uses the inverse contour construction, p = 1 the closed form of
    order (q+1)/r, and p >= 2 the same recursion as Case 1.
    """
    if r < 1 or (p == 0 and r < 2):
        raise ValidationError(f"Case 2 kernels need r >= 2 (or r = 1 with p >= 1), got p={p}, r={r}")
    if p < 0 or q < 0:
        raise ValidationError(f"p and q must be >= 0, got p={p}, q={q}")
    return _case2_kernel(int(p), int(q), int(r), float(as_direction(d).theta), config)
