"""Complex special functions used by the L-function and kernel machinery.

Everything here is double precision with explicit error targets:

* ``log_gamma`` / ``gamma``: Lanczos rational approximation in the right
  half-plane, upward recurrence elsewhere.  The recurrence
  logGamma(z) = logGamma(z+1) - Log(z) preserves the principal branch on the
  cut plane, so no reflection-formula branch repair is needed.
* ``polygamma``: recurrence shift to the region where the Bernoulli
  asymptotic series applies, then the series truncated at its smallest term.
* ``tail_integral``: exponentially weighted tail integrals
  int_1^inf e^{-xv} (log v)^p v^{s-1} dv via the substitution v = e^t and
  adaptive Gauss-Legendre panels.
* ``kummer_reg``: the Beta-regularized confluent hypergeometric function
  int_0^1 e^{zu} u^{s-1} (1-u)^{k-s-1} du and its derivatives in s, by
  quadrature with both endpoints resolved by u = e^t substitutions.
* ``KummerSeriesEvaluator``: the same function through its power series in z,
  with full Taylor data in s.  Series and quadrature act as independent
  cross-checks of each other.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _taylor
from ._quad import adaptive_quad

LOG_TWO_PI = math.log(2.0 * math.pi)
HALF_LOG_TWO_PI = 0.5 * LOG_TWO_PI


class PoleError(ValueError):
    """Evaluation exactly at a pole of the function."""


class GammaOverflowError(OverflowError):
    """gamma() magnitude exceeds double range; use log_gamma instead."""


# ----------------------------------------------------------------------
# Bernoulli numbers B_2, B_4, ... as exact rationals cast to double
# ----------------------------------------------------------------------

_BERNOULLI_PAIRS = (
    (1, 6), (-1, 30), (1, 42), (-1, 30), (5, 66), (-691, 2730),
    (7, 6), (-3617, 510), (43867, 798), (-174611, 330), (854513, 138),
    (-236364091, 2730),
)


@dataclass(frozen=True)
class BernoulliTable:
    """B_{2*nu} for nu = 1, 2, ...; immutable after construction."""

    values: tuple = tuple(p / q for p, q in _BERNOULLI_PAIRS)

    def b2n(self, nu):
        if nu < 1 or nu > len(self.values):
            raise ValueError(f"B_{2 * nu} not tabulated")
        return self.values[nu - 1]


BERNOULLI = BernoulliTable()

# ----------------------------------------------------------------------
# Gamma and log-Gamma
# ----------------------------------------------------------------------

# Lanczos coefficients, g = 7, 9 terms; ~1e-14 relative in Re(z) >= 0.5.
_LANCZOS_G = 7.0
_LANCZOS_C = (
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


def _is_nonpositive_integer(z):
    z = complex(z)
    return z.imag == 0.0 and z.real <= 0.0 and z.real == round(z.real)


def _lanczos_log_gamma(z):
    # Valid for Re(z) >= 0.5; A(z) stays in the right half-plane there,
    # so the principal log of the series term is safe.
    zm1 = z - 1.0
    x = _LANCZOS_C[0]
    for i in range(1, 9):
        x += _LANCZOS_C[i] / (zm1 + i)
    t = zm1 + _LANCZOS_G + 0.5
    return HALF_LOG_TWO_PI + (zm1 + 0.5) * np.log(t) - t + np.log(x)


def log_gamma(z):
    """Principal branch of log Gamma, continuous on C minus (-inf, 0]."""
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"log_gamma pole at z = {z}")
    if z.real >= 0.5:
        return complex(_lanczos_log_gamma(z))
    # logGamma(z) = logGamma(z+n) - sum Log(z+j); exact on the cut plane.
    n = int(math.ceil(0.5 - z.real))
    shift = 0.0 + 0.0j
    for j in range(n):
        shift += np.log(z + j)
    return complex(_lanczos_log_gamma(z + n) - shift)


def gamma(z):
    """Gamma function; poles and overflow are signaled distinctly."""
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"gamma pole at z = {z}")
    lg = log_gamma(z)
    if lg.real > 709.0:
        raise GammaOverflowError(f"gamma({z}) overflows double precision")
    return complex(np.exp(lg))


def gamma_taylor(z, order, sign=1.0):
    """Taylor series of Gamma(z + sign*h) around h = 0, length order+1.

    Built as Gamma(z) * exp(sum_m psi^(m-1)(z) (sign h)^m / m!).
    """
    g = np.zeros(order + 1, dtype=complex)
    for m in range(1, order + 1):
        g[m] = polygamma(m - 1, z) * (sign ** m) / math.factorial(m)
    series = _taylor.series_exp(g)
    return gamma(z) * series


# ----------------------------------------------------------------------
# Polygamma
# ----------------------------------------------------------------------

_PG_MAX_ORDER = 8
_PG_SHIFT_RADIUS = 20.0
_PG_SERIES_TERMS = 10


def polygamma(order, z):
    """psi^(order)(z); order 0 is the digamma function.

    Recurrence-shifts z until the Bernoulli asymptotic series applies, then
    sums it truncated at nu = 10 (past the smallest term for |z| >= 20).
    """
    if order < 0 or order > _PG_MAX_ORDER:
        raise ValueError(f"polygamma order must be in [0, {_PG_MAX_ORDER}]")
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"polygamma pole at z = {z}")
    n = order
    shift = 0.0 + 0.0j
    w = z
    sign_term = (-1.0) ** n * math.factorial(n)
    while not (w.real >= 0.5 and abs(w) >= _PG_SHIFT_RADIUS):
        shift += sign_term * w ** (-(n + 1))
        w += 1.0
    if n == 0:
        acc = np.log(w) - 0.5 / w
        w2 = w * w
        wp = w2
        for nu in range(1, _PG_SERIES_TERMS + 1):
            acc -= BERNOULLI.b2n(nu) / (2 * nu * wp)
            wp *= w2
    else:
        acc = math.factorial(n - 1) * w ** (-n)
        acc += math.factorial(n) * 0.5 * w ** (-(n + 1))
        w2 = w * w
        wp = w ** (-(n + 2))  # starts the nu = 1 term: w^-(2+n)
        for nu in range(1, _PG_SERIES_TERMS + 1):
            coef = BERNOULLI.b2n(nu) * math.factorial(2 * nu + n - 1) / math.factorial(2 * nu)
            acc += coef * wp
            wp /= w2
        acc *= (-1.0) ** (n - 1)
    return complex(acc - shift)


def digamma(z):
    return polygamma(0, z)


# ----------------------------------------------------------------------
# Exponentially weighted tail integrals
# ----------------------------------------------------------------------

_TI_MAX_LOG_ORDER = 8


def _tail_cutoff(x, sigma, p):
    # Smallest T with x e^T - max(sigma,0) T - p log T >= x + 43.
    t = 1.0
    for _ in range(40):
        t_new = math.log((43.0 + x + max(sigma, 0.0) * t + p * math.log(max(t, 2.0))) / x + 1.0)
        if abs(t_new - t) < 1e-3:
            t = t_new
            break
        t = t_new
    return max(t, 0.25)


def tail_integral(s, x, log_order=0, tol=1e-14):
    """int_1^inf e^{-x v} (log v)^log_order v^{s-1} dv.

    log_order 0 equals x^{-s} Gamma(s, x).  Evaluated as
    int_0^inf exp(s t - x e^t) t^log_order dt after v = e^t.
    """
    if x <= 0.0:
        raise ValueError("tail_integral requires x > 0")
    if log_order < 0 or log_order > _TI_MAX_LOG_ORDER:
        raise ValueError(f"log_order must be in [0, {_TI_MAX_LOG_ORDER}]")
    s = complex(s)
    p = log_order
    T = _tail_cutoff(x, s.real, p)

    def integrand(t):
        val = np.exp(s * t - x * np.exp(t))
        if p:
            val = val * t ** p
        return val

    # Scale-aware tolerance keeps the adaptive loop near machine precision
    # without recursing on round-off.
    probe = np.abs(integrand(np.linspace(0.0, T, 17)))
    scale = float(probe.max()) * T
    tol_abs = max(tol * math.exp(-x) * max(1.0, abs(s)), 3e-16 * scale)
    value, _err = adaptive_quad(integrand, 0.0, T, tol_abs)
    return complex(value)


# ----------------------------------------------------------------------
# Regularized Kummer function and s-derivatives
# ----------------------------------------------------------------------

_KUMMER_MAX_ORDER = 5


def _check_kummer_domain(order, s, k, z):
    if order < 0 or order > _KUMMER_MAX_ORDER:
        raise ValueError(f"kummer order must be in [0, {_KUMMER_MAX_ORDER}]")
    s = complex(s)
    k = complex(k)
    z = complex(z)
    if not (0.0 < s.real < k.real):
        raise ValueError(f"kummer requires 0 < Re(s) < Re(k); got s={s}, k={k}")
    if abs(z.real) > 1e-12 * max(1.0, abs(z)):
        raise ValueError("kummer argument must be purely imaginary or zero")
    return s, k, z


def kummer_reg(order, s, k, z, tol=1e-11):
    """d^order/ds^order of int_0^1 e^{zu} u^{s-1} (1-u)^{k-s-1} du.

    Differentiation brings down (log u - log(1-u))^order; both endpoint
    power/log singularities are integrable and resolved by u = e^t (left
    half) and 1-u = e^t (right half).
    """
    s, k, z = _check_kummer_domain(order, s, k, z)
    p = order
    scale = math.exp(
        log_gamma(s.real).real + log_gamma(k.real - s.real).real - log_gamma(k.real).real
    )
    tol_abs = tol * scale

    log_half = math.log(0.5)

    def half_integral(alpha, beta, zz):
        # int over u in (0, 1/2] of e^{zz u} (log u - log(1-u))^p u^{alpha-1} (1-u)^{beta-1}
        # after u = e^t; derivative log factor carried with correct sign by caller.
        t_min = log_half
        a_re = alpha.real
        for _ in range(40):
            t_new = -(43.0 + p * math.log(max(abs(t_min), 2.0))) / a_re
            if abs(t_new - t_min) < 1e-3:
                t_min = t_new
                break
            t_min = t_new
        t_min = min(t_min, log_half - 1.0)

        def integrand(t):
            u = np.exp(t)
            one_minus = 1.0 - u
            val = np.exp(zz * u + alpha * t) * one_minus ** (beta - 1.0)
            if p:
                val = val * (t - np.log(one_minus)) ** p
            return val

        value, _ = adaptive_quad(integrand, t_min, log_half, tol_abs)
        return value

    left = half_integral(s, k - s, z)
    # Right half via u -> 1-u: swaps exponents, flips the log-factor sign,
    # and e^{zu} becomes e^z e^{-z t'}-type.
    right = (-1.0) ** p * np.exp(z) * half_integral(k - s, s, -z)
    return complex(left + right)


class KummerSeriesEvaluator:
    """Power-series route to the regularized Kummer function.

    Precomputes, for fixed (s, k) and derivative order, the s-Taylor data of
    the term Gamma(s+j) Gamma(k-s) / Gamma(k+j); ``taylor(z)`` then sums the
    series over j.  Independent of the quadrature path in :func:`kummer_reg`.
    """

    def __init__(self, s, k, order, tol=1e-13):
        s, k, _ = _check_kummer_domain(order, s, k, 0.0)
        self.s = s
        self.k = k
        self.order = order
        self.tol = tol
        # unit-normalized Gamma(k-s-h) series; the log-scale prefactor is
        # applied per term so large j never overflows gamma()
        g = np.zeros(order + 1, dtype=complex)
        for m in range(1, order + 1):
            g[m] = polygamma(m - 1, k - s) * ((-1.0) ** m) / math.factorial(m)
        self._gk_unit = _taylor.series_exp(g)
        self._lg_k_minus_s = log_gamma(k - s)
        self._terms = []  # j -> Taylor array of Gamma(s+j)Gamma(k-s-h)/Gamma(k+j)

    def _term(self, j):
        while len(self._terms) <= j:
            jj = len(self._terms)
            scale = np.exp(
                log_gamma(self.s + jj) + self._lg_k_minus_s - log_gamma(self.k + jj)
            )
            g = np.zeros(self.order + 1, dtype=complex)
            for m in range(1, self.order + 1):
                g[m] = polygamma(m - 1, self.s + jj) / math.factorial(m)
            num_unit = _taylor.series_exp(g)
            self._terms.append(scale * _taylor.mul(num_unit, self._gk_unit))
        return self._terms[j]

    def taylor(self, z):
        """Taylor array (length order+1) of 1f1(s+h, k; z) around h = 0."""
        z = complex(z)
        acc = np.zeros(self.order + 1, dtype=complex)
        zpow = 1.0 + 0.0j
        small = 0
        j = 0
        while j < 400:
            term = self._term(j) * zpow
            acc += term
            if abs(term[0]) < self.tol * max(abs(acc[0]), 1e-300):
                small += 1
                if small >= 3 and j > abs(z):
                    break
            else:
                small = 0
            j += 1
            zpow *= z / j
        return acc

    def value(self, z, order=None):
        order = self.order if order is None else order
        return complex(_taylor.nth_derivative(self.taylor(z), order))


def kummer_series(order, s, k, z):
    """Series-route value of d^order/ds^order 1f1(s, k; z)."""
    return KummerSeriesEvaluator(s, k, order).value(z)
