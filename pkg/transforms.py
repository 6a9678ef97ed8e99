"""
Moment Borel and Laplace transforms.

borel divides the coefficient of t^j by m(j); laplace integrates
e_m(s/t) v(s) ds/s along a ray; inverse_laplace integrates
E_m(s/t) v(t) dt/t around the contour γ(d); k_sum is laplace applied to a
Borel sum in a nonsingular direction.

Integrands v are either plain callables of complex s or catalog objects
(pde.BorelSum) exposing on_ray(x, d) and singular_directions().
"""

import math
import cmath
import logging

import numpy as np

from core import FormalSeries, as_cover_point, as_direction
from errors import DomainError, SingularRayError, ValidationError
from quadrature import RayQuadratureSpec, contour_integral, ray_integral
from settings import DEFAULT_CONFIG

logger = logging.getLogger("transforms")

# Borel sums give up after this many stride terms
BOREL_MAX_TERMS = 5000
# Two directions closer than this count as the same ray
DIRECTION_MATCH = 1e-9


def _exp_log(log_value):
    if log_value.real == -math.inf:
        return 0j
    if log_value.real > 709.0:
        return complex(math.inf, 0.0)
    return cmath.exp(log_value)


def borel(m, series):
    """
    The m-moment Borel transform: coefficient of t^j divided by m(j).

    Args:
        m: MomentFunction
        series: FormalSeries; when its meta carries a 'log_term' the division
            happens in log form

    Returns:
        FormalSeries with the same stride
    """
    stride = series.stride
    label = f"borel[{m.expression}]({series.label})"
    log_term = series.meta.get('log_term')

    if log_term is None:
        def term(n, z):
            return complex(series.term(n, z)) / m(n * stride)
        return FormalSeries(term, stride, label, True, dict(series.meta))

    def borel_log_term(n, z):
        return log_term(n, z) - m.log(n * stride)

    def term(n, z):
        return _exp_log(borel_log_term(n, z))

    meta = dict(series.meta)
    meta['log_term'] = borel_log_term
    return FormalSeries(term, stride, label, True, meta)


def _log_coefficient(series, n, z):
    log_term = series.meta.get('log_term')
    if log_term is not None:
        return complex(log_term(n, z))
    value = complex(series.term(n, z))
    return cmath.log(value) if value != 0 else complex(-math.inf, 0.0)


def _running_sum(real_parts, imag_parts, modulus):
    try:
        return complex(math.fsum(real_parts), math.fsum(imag_parts))
    except OverflowError:
        raise DomainError(f"Borel series diverges at |s| = {modulus:.6g}")


def borel_sum(m, series, s, z=0.0, rel_tol=1e-15, max_terms=BOREL_MAX_TERMS):
    """
    Numerically summed Borel transform Σ c_j/m(j) s^j.

    Terms are formed in log form; summation stops when the ratio test
    bounds the remaining tail below rel_tol of the running sum.

    Raises:
        DomainError: s lies outside the disc of convergence
    """
    b = borel(m, series)
    point = as_cover_point(s)
    if point.modulus == 0:
        return complex(b.term(0, z))
    log_s = complex(math.log(point.modulus), point.arg) * b.stride

    real_parts = []
    imag_parts = []
    previous = None
    for n in range(max_terms):
        log_t = _log_coefficient(b, n, z) + n * log_s
        term = _exp_log(log_t)
        if not (math.isfinite(term.real) and math.isfinite(term.imag)):
            raise DomainError(f"Borel series diverges at |s| = {point.modulus:.6g}")
        real_parts.append(term.real)
        imag_parts.append(term.imag)
        magnitude = abs(term)
        if previous is not None and n > 4:
            total = abs(_running_sum(real_parts, imag_parts, point.modulus))
            if magnitude == 0 and previous == 0:
                break
            ratio = magnitude / previous if previous > 0 else 0.0
            if ratio < 1.0 and magnitude * ratio / (1.0 - ratio) <= rel_tol * max(total, 1e-300):
                break
        previous = magnitude
    else:
        raise DomainError(f"Borel series does not converge at |s| = {point.modulus:.6g} within {max_terms} terms")
    return _running_sum(real_parts, imag_parts, point.modulus)


def _singular_directions(v):
    finder = getattr(v, 'singular_directions', None)
    return [float(d) for d in finder()] if finder is not None else []


def is_singular_direction(v, d):
    """True when d agrees modulo 2π with a reported singular direction of v."""
    for direction in _singular_directions(v):
        gap = math.remainder(d - direction, 2.0 * math.pi)
        if abs(gap) < DIRECTION_MATCH:
            return True
    return False


def _ray_values(v, d):
    on_ray = getattr(v, 'on_ray', None)
    if on_ray is not None:
        return lambda x: np.asarray(on_ray(x, d), dtype=complex)
    unit = cmath.exp(1j * d)
    return lambda x: np.asarray(v(unit * np.asarray(x, dtype=float)), dtype=complex)


def laplace_integral(kp, d, v, t, config=DEFAULT_CONFIG):
    """
    ∫_{e^{id}R+} e_m(s/t) v(s) ds/s as a QuadratureResult.

    Args:
        kp: KernelPair
        d: integration direction (float or Direction, on the cover)
        v: callable of s, or catalog object with on_ray/singular_directions
        t: complex or CoverPoint

    Raises:
        DomainError: t = 0 or e_m(s/t) does not decay along the ray
        SingularRayError: d is a singular direction of v
    """
    d = float(as_direction(d).theta)
    point = as_cover_point(t)
    if point.modulus == 0:
        raise DomainError("Laplace transform evaluated at t = 0")
    psi = d - point.arg
    kp.check_ray(psi)
    if is_singular_direction(v, d):
        raise SingularRayError(f"Direction {d:.6g} is a singular direction of the integrand", direction=d)

    values = _ray_values(v, d)
    inverse_unit = cmath.exp(-1j * d)
    scale = point.modulus

    def integrand(x, direction):
        # ds/s = dx/x; ray_integral multiplies by e^{id}
        return kp.e_ray(x / scale, psi) * values(x) * inverse_unit / x

    spec = RayQuadratureSpec.from_config(d, config, scale=scale)
    result = ray_integral(integrand, spec, polar=True)
    logger.debug(f"Laplace d={d:.6f} t={point.value:.6g}: {result.value:.10e} (err {result.error:.2e})")
    return result


def laplace(kp, d, v, t, config=DEFAULT_CONFIG):
    """The m-moment Laplace transform T_{m,d}(v)(t)."""
    return laplace_integral(kp, d, v, t, config).value


def inverse_laplace(kp, contour, v, s, config=DEFAULT_CONFIG):
    """
    T⁻_{m,d}(v)(s) = -(1/2πi) ∮_{γ(d)} E_m(s/t) v(t) dt/t.

    Args:
        kp: KernelPair
        contour: ContourGammaD
        v: callable of t, evaluated on the contour
        s: complex point

    Raises:
        DomainError: degenerate contour
        AccuracyError: a contour leg failed its tolerance
    """
    s = complex(as_cover_point(s).value) if not isinstance(s, (int, float, complex)) else complex(s)

    def integrand(modulus, arg):
        t = np.asarray(modulus, dtype=float) * np.exp(1j * np.asarray(arg, dtype=float))
        kernel = np.asarray(kp.E(s / t), dtype=complex)
        values = np.array([complex(v(complex(ti))) for ti in np.ravel(t)], dtype=complex).reshape(np.shape(t))
        return kernel * values / t

    result = contour_integral(integrand, contour, abs_tol=config.abs_tol, rel_tol=config.rel_tol,
                              max_subdivisions=config.max_subdivisions)
    return -result.value / (2j * math.pi)


def k_sum(kp, d, borel_sum, t, theta=None, window=None, config=DEFAULT_CONFIG):
    """
    The k-sum of a formal series in direction d from its Borel sum.

    Args:
        theta: integration direction inside the window (default d)
        window: width ε of the admissible window (d - ε/2, d + ε/2); when
            given, a singular direction inside it is an error

    Raises:
        DomainError: theta outside the window, or a singular direction in it
    """
    d = float(as_direction(d).theta)
    theta = d if theta is None else float(as_direction(theta).theta)
    if window is not None:
        if not window > 0:
            raise ValidationError(f"Direction window must be positive, got {window}")
        half = 0.5 * window
        if abs(theta - d) >= half:
            raise DomainError(f"theta = {theta:.6g} lies outside the window ({d - half:.6g}, {d + half:.6g})")
        for direction in _singular_directions(borel_sum):
            gap = math.remainder(direction - d, 2.0 * math.pi)
            if abs(gap) < half:
                raise DomainError(f"Singular direction {direction:.6g} lies inside the window around d = {d:.6g}")
    return laplace(kp, theta, borel_sum, t, config)
