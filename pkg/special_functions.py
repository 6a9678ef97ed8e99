"""
Special functions used by the moment machinery.

gamma/log_gamma: Lanczos approximation (g = 7, nine coefficients) with the
reflection formula for Re z < 1/2; works on scalars and numpy arrays.

mittag_leffler: E_α(z) = Σ z^n / Γ(1 + αn), evaluated by
  - closed forms for α ∈ {1/2, 1, 2},
  - compensated Taylor summation for |z| <= R0^min(α, 1),
  - root-of-unity reduction to index α/m <= 1 for α > 1,
  - the real integral representation of E_α for 0 < α < 1 otherwise,
  - mpmath Taylor summation near the rays |arg z| = απ, where the
    integral representation has a pole on the integration path.
"""

import math
import cmath
import logging

import numpy as np
import mpmath
from scipy import integrate, special

from errors import ValidationError, DomainError, AccuracyError
from settings import ML_TAYLOR_RADIUS

logger = logging.getLogger("special_functions")

LANCZOS_G = 7
LANCZOS_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)

# Half-width of the band around |arg z| = απ handed to the high-precision path
ML_BOUNDARY_BAND = 0.05
# Taylor summation gives up after this many terms
ML_MAX_TERMS = 20000
# mpmath working precision cap (decimal digits)
ML_MAX_DPS = 3000


def _lanczos_log_gamma(z):
    """log Γ(z) for Re z >= 1/2 (numpy complex array)."""
    z = z - 1.0
    x = np.full_like(z, LANCZOS_COEFFICIENTS[0])
    for i, c in enumerate(LANCZOS_COEFFICIENTS[1:]):
        x = x + c / (z + i + 1)
    t = z + LANCZOS_G + 0.5
    return HALF_LOG_TWO_PI + (z + 0.5) * np.log(t) - t + np.log(x)


def log_gamma(z):
    """
    Complex log Γ(z) (imaginary part defined up to 2πi).

    Args:
        z: scalar or numpy array; poles at non-positive integers give inf
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    result = np.empty_like(z)
    right = z.real >= 0.5
    result[right] = _lanczos_log_gamma(z[right])
    left = ~right
    if left.any():
        zl = z[left]
        with np.errstate(divide='ignore', invalid='ignore'):
            result[left] = math.log(math.pi) - np.log(np.sin(np.pi * zl)) - _lanczos_log_gamma(1.0 - zl)
    return complex(result[0]) if scalar else result


def gamma(z):
    """
    Γ(z) through the Lanczos approximation.

    Real input with a real result returns float (or a float array).
    """
    real_input = np.isrealobj(z)
    value = np.exp(log_gamma(z))
    if real_input:
        value = np.real(value)
        # sign on the negative axis comes through the imaginary part of log Γ
        return float(value) if np.ndim(value) == 0 else value
    return value


def gamma_s(s, u):
    """
    The moment function Γ_s(u) of order s.

    Γ(1 + su) for s >= 0 and 1/Γ(1 - su) for s < 0, for u >= 0.
    """
    if np.any(np.asarray(u) < 0):
        raise DomainError(f"gamma_s needs u >= 0, got {u}")
    if s >= 0:
        return gamma(1.0 + s * np.asarray(u, dtype=float))
    return 1.0 / gamma(1.0 - s * np.asarray(u, dtype=float))


def log_gamma_s(s, u):
    """log Γ_s(u), real, for large arguments where Γ_s itself overflows."""
    u = np.asarray(u, dtype=float)
    if s >= 0:
        return special.gammaln(1.0 + s * u)
    return -special.gammaln(1.0 - s * u)


def mittag_leffler_taylor(alpha, z, max_terms=ML_MAX_TERMS, rel_tol=1e-17):
    """
    Compensated Taylor sum of E_α(z).

    Terms are formed as exp(n log z - log Γ(1 + αn)) and accumulated with
    math.fsum separately in real and imaginary parts. Summation stops once
    the terms are past their peak and below rel_tol relative to the running
    magnitude.
    """
    z = complex(z)
    if z == 0:
        return 1.0 + 0j
    log_z = cmath.log(z)
    real_parts = [1.0]
    imag_parts = [0.0]
    scale = 1.0
    previous = math.inf
    for n in range(1, max_terms):
        log_term = n * log_z - math.lgamma(1.0 + alpha * n)
        magnitude = math.exp(log_term.real)
        term = magnitude * cmath.exp(1j * log_term.imag)
        real_parts.append(term.real)
        imag_parts.append(term.imag)
        scale = max(scale, magnitude)
        if magnitude < previous and magnitude <= rel_tol * scale:
            return complex(math.fsum(real_parts), math.fsum(imag_parts))
        previous = magnitude
    raise AccuracyError(
        f"Mittag-Leffler Taylor series did not converge for alpha={alpha}, z={z}",
        estimate=complex(math.fsum(real_parts), math.fsum(imag_parts)))


def mittag_leffler_partial(alpha, z, n_terms):
    """S_N(z) = Σ_{n<N} z^n / Γ(1 + αn)."""
    z = complex(z)
    terms = [z ** n / math.gamma(1.0 + alpha * n) for n in range(n_terms)]
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def _mittag_leffler_mp(alpha, z):
    """High-precision Taylor sum; precision grows with the cancellation exp(|z|^{1/α})."""
    growth = abs(z) ** (1.0 / alpha)
    dps = int(growth / math.log(10.0)) + 30
    if dps > ML_MAX_DPS:
        raise AccuracyError(f"Mittag-Leffler at z={z} needs {dps} digits (cap {ML_MAX_DPS})")
    with mpmath.workdps(dps):
        zz = mpmath.mpc(z.real, z.imag)
        total = mpmath.mpc(1)
        term_power = mpmath.mpc(1)
        n = 0
        while True:
            n += 1
            term_power *= zz
            term = term_power / mpmath.gamma(1 + alpha * mpmath.mpf(n))
            total += term
            size = abs(term)
            if n > growth / alpha and size < mpmath.mpf(10) ** (-20) * max(abs(total), mpmath.mpf(10) ** (-300)):
                break
            if n > 50 * ML_MAX_TERMS:
                raise AccuracyError(f"High-precision Mittag-Leffler sum did not converge at z={z}")
        return complex(total)


def _mittag_leffler_integral(alpha, z, rel_tol):
    """
    E_α(z) for 0 < α < 1 from its real integral representation.

        E_α(z) = -(z sin απ / απ) ∫_0^∞ exp(-r^{1/α}) / (r² - 2rz cos απ + z²) dr
                 + [ (1/α) exp(z^{1/α}) if |arg z| < απ ]
    """
    arg_z = cmath.phase(z)
    c = math.cos(alpha * math.pi)
    prefactor = -z * math.sin(alpha * math.pi) / (alpha * math.pi)

    def integrand(r):
        return math.exp(-r ** (1.0 / alpha)) / (r * r - 2.0 * r * z * c + z * z)

    # exp(-r^{1/α}) < 1e-19 past r = 44^α
    upper = 44.0 ** alpha
    breaks = sorted({0.0, min(abs(z), upper), upper})
    real_total = imag_total = 0.0
    error_total = 0.0
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        if hi <= lo:
            continue
        re, re_err = integrate.quad(lambda r: integrand(r).real, lo, hi, limit=200, epsabs=0.0, epsrel=rel_tol * 1e-2)
        im, im_err = integrate.quad(lambda r: integrand(r).imag, lo, hi, limit=200, epsabs=0.0, epsrel=rel_tol * 1e-2)
        real_total += re
        imag_total += im
        error_total += re_err + im_err
    value = prefactor * complex(real_total, imag_total)
    error = abs(prefactor) * error_total
    if abs(arg_z) < alpha * math.pi:
        value += cmath.exp(z ** (1.0 / alpha)) / alpha
    if error > rel_tol * max(abs(value), 1e-300) and error > 1e-300:
        raise AccuracyError(
            f"Mittag-Leffler integral for alpha={alpha}, z={z} reached only {error:.3e}",
            estimate=value, error=error)
    return value


def mittag_leffler(alpha, z, rel_tol=1e-8, taylor_radius=None):
    """
    Evaluate the Mittag-Leffler function E_α(z).

    Args:
        alpha: index α > 0
        z: complex argument
        rel_tol: relative tolerance
        taylor_radius: R0 of the Taylor region |z| <= R0^min(α,1) (default from settings)

    Returns:
        complex value of E_α(z)
    """
    if not alpha > 0:
        raise ValidationError(f"Mittag-Leffler index must be positive, got {alpha}")
    z = complex(z)
    if alpha == 1.0:
        return cmath.exp(z)
    if alpha == 2.0:
        return cmath.cosh(cmath.sqrt(z))
    if alpha == 0.5:
        return complex(special.wofz(-1j * z))

    radius = (taylor_radius or ML_TAYLOR_RADIUS) ** min(alpha, 1.0)
    if abs(z) <= radius:
        return mittag_leffler_taylor(alpha, z)

    if alpha > 1.0:
        m = math.ceil(alpha)
        root = z ** (1.0 / m)
        total = sum(
            mittag_leffler(alpha / m, root * cmath.exp(2j * math.pi * h / m), rel_tol, taylor_radius)
            for h in range(m))
        return total / m

    if abs(abs(cmath.phase(z)) - alpha * math.pi) < ML_BOUNDARY_BAND:
        logger.debug(f"Mittag-Leffler alpha={alpha}, z={z} on a boundary ray; using mpmath")
        return _mittag_leffler_mp(alpha, z)
    return _mittag_leffler_integral(alpha, z, rel_tol)


def mittag_leffler_array(alpha, z, rel_tol=1e-8, taylor_radius=None):
    """Elementwise E_α over a numpy array, with vectorised closed forms."""
    z = np.asarray(z, dtype=complex)
    if alpha == 1.0:
        return np.exp(z)
    if alpha == 2.0:
        return np.cosh(np.sqrt(z))
    if alpha == 0.5:
        return special.wofz(-1j * z)
    flat = [mittag_leffler(alpha, w, rel_tol, taylor_radius) for w in z.ravel()]
    return np.array(flat, dtype=complex).reshape(z.shape)


def mittag_leffler_tail_bound(alpha, z, n_terms):
    """2|z|^N/Γ(1 + αN): bounds E_α - S_N once the term ratio from N on is at most 1/2."""
    n = n_terms
    return 2.0 * math.exp(n * math.log(abs(complex(z))) - math.lgamma(1.0 + alpha * n)) if z != 0 else 0.0
