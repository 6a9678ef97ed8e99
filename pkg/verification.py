"""
Invariant suites run by the `verify` command.

Each suite measures one deviation and compares it against its threshold;
sample counts are reduced so the whole set runs at desk scale.
"""

import math
import cmath
import time
import logging
from fractions import Fraction
from dataclasses import dataclass

import numpy as np

from core import CoverPoint
from errors import StokesSummaError
from initial_data import Exp, Polynomial, Rational
from kernels import kernel_closed_form, kernel_iterated_case1, kernel_iterated_case2
from pde import (CauchyProblem, BorelSum, classify, exact_sum, formal_residual, formal_solution,
                 gevrey_estimate)
from settings import DEFAULT_CONFIG
from special_functions import mittag_leffler
from stokes import (hyperfunction_pairing, jump_closed_form_case1, lateral_difference, product_identity,
                    singular_directions)
from transforms import borel_sum, k_sum, laplace

logger = logging.getLogger("verification")


@dataclass
class SuiteResult:
    name: str
    passed: bool
    deviation: float
    threshold: float
    seconds: float
    detail: str = ""

    def to_dict(self):
        return {"suite": self.name, "passed": self.passed, "deviation": self.deviation,
                "threshold": self.threshold, "detail": self.detail}


def _relative(x, y):
    scale = max(abs(x), abs(y))
    return abs(x - y) / scale if scale > 0 else 0.0


def euler_problem():
    return CauchyProblem(2, 0, 0, 1.0, Polynomial([1]))


def monomial_laplace(config):
    """T_{m,d}(s^n) = m(n) t^n for three closed-form kernels and three directions."""
    worst = 0.0
    for k in (1.0, 2.0, 0.5):
        kp = kernel_closed_form(k)
        for d in (0.0, math.pi / 4, math.pi):
            t = CoverPoint(0.5, d)
            for n in (0, 2, 4, 6):
                value = laplace(kp, d, lambda s, n=n: s ** n, t, config)
                expected = kp.m(n) * cmath.exp(n * complex(math.log(t.modulus), t.arg))
                worst = max(worst, _relative(value, expected))
    return worst, 1e-7


def series_borel_sum(m, series, z=0.0):
    """Vectorised numerically summed Borel transform of a series."""
    def v(s):
        s = np.asarray(s, dtype=complex)
        flat = [borel_sum(m, series, complex(w), z) for w in s.ravel()]
        return np.array(flat, dtype=complex).reshape(s.shape)
    return v


def borel_laplace_roundtrip(config, samples=6, seed=7):
    """k_sum(borel(û)) equals the closed-form sum for convergent formal solutions."""
    rng = np.random.default_rng(seed)
    kp = kernel_closed_form(1)
    problems = [
        CauchyProblem(0, 0, 0, 1.0, Exp(1.0)),
        CauchyProblem(0, 0, 1, 1.0, Polynomial([1, -2, 0, 3])),
    ]
    worst = 0.0
    z = 0.2
    for cp in problems:
        v = series_borel_sum(kp.m, formal_solution(cp), z)
        for _ in range(samples):
            d = float(rng.uniform(-math.pi, math.pi))
            t = CoverPoint(float(rng.uniform(0.05, 0.3)), d + float(rng.uniform(-0.5, 0.5)))
            value = k_sum(kp, d, v, t, config=config)
            worst = max(worst, _relative(value, exact_sum(cp, t.value, z)))
    return worst, 1e-7


def euler_jump(config):
    """Closed form, lateral difference and pairing agree for the Euler series."""
    cp = euler_problem()
    line = singular_directions(cp)[0]
    kp = cp.kernel(config)
    worst = 0.0
    for modulus in (0.1, 0.15, 0.2, 0.3):
        closed = jump_closed_form_case1(cp, 0, modulus, 0.0, config)
        lateral, _ = lateral_difference(cp, line, modulus, 0.0, 0.25, config)
        pairing = hyperfunction_pairing(BorelSum(cp), 0.0, kp, modulus, config=config)
        worst = max(worst, _relative(closed, lateral), _relative(closed, pairing), _relative(lateral, pairing))
    return worst, 1e-4


def product_identities(config):
    worst = max(abs(product_identity(q, k) - (q + 1)) for q in range(1, 7) for k in range(q + 1))
    return worst, 1e-12


def case2_routes(config):
    """Pairing of the selected translate against the lateral difference, (p,r,q)=(0,2,0)."""
    cp = CauchyProblem(0, 0, 2, 1.0, Rational(1.0))
    line = singular_directions(cp)[0]
    kp = cp.kernel(config)
    translate = BorelSum(cp).translate(0)
    other = BorelSum(cp).translate(1)
    worst = 0.0
    spurious = 0.0
    for modulus in (0.1, 0.15, 0.2):
        pairing = hyperfunction_pairing(translate, line.direction, kp, modulus, config=config)
        lateral, _ = lateral_difference(cp, line, modulus, 0.0, 0.2, config)
        worst = max(worst, _relative(pairing, lateral))
        spurious = max(spurious, abs(hyperfunction_pairing(other, line.direction, kp, modulus, config=config)))
    if spurious > 1e-8:
        return math.inf, 1e-3
    return worst, 1e-3


def gevrey_classification(config):
    """Fitted Gevrey order of the formal solution against 1/k."""
    singular = Rational(1.0)
    worst = 0.0
    for p, q, r in ((2, 0, 0), (3, 0, 0), (2, 1, 0), (0, 0, 2), (1, 0, 2)):
        cp = CauchyProblem(p, q, r, 1.0, singular if r else Polynomial([1]))
        k = classify(cp).k
        estimate = gevrey_estimate(formal_solution(cp), 0.0, 40)
        worst = max(worst, abs(estimate.order - 1.0 / k))
    return worst, 0.1


def gevrey_asymptotics(config):
    """|u^d(t) - Σ_{n<N} n! t^n| / (N! |t|^N) over N ∈ {4, 6, 8} at |t| = 0.08, d = π/2."""
    cp = euler_problem()
    t = CoverPoint(0.08, math.pi / 2)
    value = laplace(cp.kernel(config), math.pi / 2, BorelSum(cp), t, config)
    constants = []
    for N in (4, 6, 8):
        partial = sum(math.factorial(n) * t.value ** n for n in range(N))
        constants.append(abs(value - partial) / (math.factorial(N) * t.modulus ** N))
    return max(constants), 10.0


def kernel_mellin(config):
    """∫ x^{u-1} e_m(x) dx = m(u) for closed-form, iterated and contour kernels."""
    worst_closed = 0.0
    for k in (1.0, 2.0, 0.5):
        kp = kernel_closed_form(k)
        for u in (1, 2, 3):
            worst_closed = max(worst_closed, _relative(kp.mellin(u, config).value, kp.m(u)))
    worst_tabulated = 0.0
    for kp in (kernel_iterated_case1(3, 0, 0.0, config), kernel_iterated_case2(0, 0, 2, 0.0, config)):
        for u in (1, 2, 3):
            worst_tabulated = max(worst_tabulated, _relative(kp.mellin(u, config).value, kp.m(u)))
    # deviations in units of each family's tolerance
    return max(worst_closed / 1e-5, worst_tabulated / 1e-4), 1.0


def pde_residual(config):
    """Exact residual of truncated formal solutions for (p,q,r) <= (3,2,3)."""
    phi = Polynomial([1, 2, Fraction(-1, 3), 1, Fraction(1, 5)])
    nonzero = 0
    for p in range(4):
        for q in range(3):
            for r in range(4):
                cp = CauchyProblem(p, q, r, 1, phi)
                for coefficients in formal_residual(cp, 4 * (q + 1) + q):
                    nonzero += sum(1 for c in coefficients if c != 0)
    return float(nonzero), 0.0


def mittag_leffler_sanity(config):
    worst = 0.0
    for z in np.linspace(-3.0, 3.0, 5).tolist() + [1j, -2j, 1 + 1j, -1.5 + 0.5j, 2.5 - 1j]:
        worst = max(worst, _relative(mittag_leffler(1.0, z), cmath.exp(z)))
        worst = max(worst, _relative(mittag_leffler(2.0, z * z), cmath.cosh(z)))
    return worst, 1e-8


SUITES = {
    "monomial_laplace": monomial_laplace,
    "borel_laplace_roundtrip": borel_laplace_roundtrip,
    "euler_jump": euler_jump,
    "product_identity": product_identities,
    "case2_routes": case2_routes,
    "gevrey_classification": gevrey_classification,
    "gevrey_asymptotics": gevrey_asymptotics,
    "kernel_mellin": kernel_mellin,
    "pde_residual": pde_residual,
    "mittag_leffler": mittag_leffler_sanity,
}


def run_suite(name, config=DEFAULT_CONFIG):
    """Run one suite; numerical failures count as a failed suite with infinite deviation."""
    start = time.time()
    try:
        deviation, threshold = SUITES[name](config)
        detail = ""
    except StokesSummaError as e:
        logger.error(f"Suite {name} raised {type(e).__name__}: {e}")
        deviation, threshold, detail = math.inf, 0.0, f"{type(e).__name__}: {e}"
    passed = deviation <= threshold
    seconds = time.time() - start
    logger.info(f"Suite {name}: {'pass' if passed else 'FAIL'} (deviation {deviation:.3e}, {seconds:.1f}s)")
    return SuiteResult(name, passed, float(deviation), float(threshold), seconds, detail)


def run_suites(names=None, config=DEFAULT_CONFIG):
    """Run the named suites (all by default) in a fixed order."""
    names = list(SUITES) if names is None else list(names)
    return [run_suite(name, config) for name in names]
