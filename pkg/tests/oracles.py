"""Independent brute-force oracles for the test suite.

Everything here is deliberately implemented by a different method from the
library code it checks: Stirling series instead of the rational gamma
approximation, raw Hurwitz sums with elementary tail corrections instead of
the shifted Bernoulli series, dense trapezoid quadrature instead of adaptive
panels, and a from-scratch hypergeometric series for the Kummer function.
"""

import cmath
import math

import numpy as np

_STIRLING_B = (
    1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730,
    7.0 / 6, -3617.0 / 510, 43867.0 / 798, -174611.0 / 330, 854513.0 / 138,
    -236364091.0 / 2730, 8553103.0 / 6, -23749461029.0 / 870,
    8615841276005.0 / 14322,
)

EULER_GAMMA_LIMIT_N = 2_000_000


def euler_gamma_limit(n_terms=EULER_GAMMA_LIMIT_N):
    """gamma = lim (sum 1/k - log N), accelerated only by the 1/(2N) term."""
    acc = 0.0
    for k in range(1, n_terms + 1):
        acc += 1.0 / k
    return acc - math.log(n_terms) - 0.5 / n_terms + 1.0 / (12.0 * n_terms ** 2)


def log_gamma_stirling(z):
    """log Gamma via the Stirling series after shifting Re(z) >= 40."""
    z = complex(z)
    shift = 0.0 + 0.0j
    while z.real < 40.0:
        shift += cmath.log(z)
        z += 1.0
    out = (z - 0.5) * cmath.log(z) - z + 0.5 * math.log(2.0 * math.pi)
    zp = z
    for idx, b in enumerate(_STIRLING_B, start=1):
        out += b / (2 * idx * (2 * idx - 1) * zp)
        zp *= z * z
    return out - shift


def gamma_stirling(z):
    return cmath.exp(log_gamma_stirling(z))


def digamma_hurwitz(z, n_terms=200_000):
    """psi(z) = -gamma + sum_m (1/(m+1) - 1/(z+m)), Euler-Maclaurin closure."""
    z = complex(z)
    gamma0 = 0.57721566490153286554942724
    acc = -gamma0
    for m in range(n_terms):
        acc += 1.0 / (m + 1.0) - 1.0 / (z + m)
    m0 = n_terms
    # exact integral of the remainder plus half-endpoint and slope terms
    acc += cmath.log((z + m0) / (m0 + 1.0))
    acc += 0.5 * (1.0 / (m0 + 1.0) - 1.0 / (z + m0))
    acc -= (1.0 / (z + m0) ** 2 - 1.0 / (m0 + 1.0) ** 2) / 12.0
    return acc


def polygamma_hurwitz(order, z, n_terms=120_000):
    """psi^(n)(z) = (-1)^(n+1) n! sum (z+m)^-(n+1) with integral tail."""
    if order == 0:
        return digamma_hurwitz(z, n_terms)
    z = complex(z)
    n = order
    acc = 0.0 + 0.0j
    for m in range(n_terms):
        acc += (z + m) ** (-(n + 1))
    # Euler-Maclaurin closure of the tail: integral + half endpoint + slope.
    w = z + n_terms
    acc += w ** (-n) / n + 0.5 * w ** (-(n + 1)) + (n + 1) / 12.0 * w ** (-(n + 2))
    return (-1.0) ** (n + 1) * math.factorial(n) * acc


def tail_integral_trapezoid(s, x, log_order=0, n_points=1_000_000):
    """Dense trapezoid for int_1^inf e^{-xv} (log v)^p v^{s-1} dv."""
    s = complex(s)
    v_top = 1.0
    # march out until the integrand magnitude is negligible
    while x * v_top - max(s.real - 1.0, 0.0) * math.log(v_top) < x + 46.0:
        v_top *= 1.25
    h = (v_top - 1.0) / n_points
    total = 0.0 + 0.0j
    for q in range(n_points + 1):
        v = 1.0 + q * h
        val = cmath.exp(-x * v + (s - 1.0) * math.log(v))
        if log_order:
            val *= math.log(v) ** log_order
        total += val if 0 < q < n_points else 0.5 * val
    return total * h


def kummer_series_reference(order, s, k, z, tol=1e-16):
    """Beta-regularized 1F1 and first two s-derivatives, termwise.

    T_j = Gamma(s+j) Gamma(k-s) / Gamma(k+j); the derivative factors are
    g = psi(s+j) - psi(k-s) and g^2 + psi'(s+j) + psi'(k-s).
    """
    if order > 2:
        raise ValueError("reference oracle implements orders 0..2")
    s = complex(s)
    k = complex(k)
    z = complex(z)
    acc = 0.0 + 0.0j
    zpow = 1.0 + 0.0j
    j = 0
    psi_ks = polygamma_hurwitz(0, k - s, 40_000) if order >= 1 else 0.0
    psi1_ks = polygamma_hurwitz(1, k - s, 40_000) if order >= 2 else 0.0
    while j < 500:
        t_j = cmath.exp(
            log_gamma_stirling(s + j) + log_gamma_stirling(k - s) - log_gamma_stirling(k + j)
        )
        if order >= 1:
            g = polygamma_hurwitz(0, s + j, 40_000) - psi_ks
            if order == 1:
                t_j *= g
            else:
                t_j *= g * g + polygamma_hurwitz(1, s + j, 40_000) + psi1_ks
        term = t_j * zpow
        acc += term
        if abs(term) < tol * max(abs(acc), 1e-300) and j > abs(z) + 4:
            break
        j += 1
        zpow *= z / j
    return acc


def polygamma_hurwitz_fast(order, z, n_terms=150_000):
    """Vectorized twin of polygamma_hurwitz for the bulk acceptance suite."""
    z = complex(z)
    m = np.arange(n_terms)
    if order == 0:
        gamma0 = 0.57721566490153286554942724
        acc = -gamma0 + np.sum(1.0 / (m + 1.0) - 1.0 / (z + m))
        m0 = n_terms
        acc += cmath.log((z + m0) / (m0 + 1.0))
        acc += 0.5 * (1.0 / (m0 + 1.0) - 1.0 / (z + m0))
        acc -= (1.0 / (z + m0) ** 2 - 1.0 / (m0 + 1.0) ** 2) / 12.0
        return complex(acc)
    n = order
    acc = np.sum((z + m) ** (-(n + 1)))
    w = z + n_terms
    acc += w ** (-n) / n + 0.5 * w ** (-(n + 1)) + (n + 1) / 12.0 * w ** (-(n + 2))
    return complex((-1.0) ** (n + 1) * math.factorial(n) * acc)


def tail_integral_simpson(s, x, log_order=0, n_points=400_000):
    """Vectorized Simpson rule for int_1^inf e^{-xv} (log v)^p v^{s-1} dv."""
    s = complex(s)
    v_top = 1.0
    while x * v_top - max(s.real - 1.0, 0.0) * math.log(v_top) < x + 46.0:
        v_top *= 1.25
    if n_points % 2:
        n_points += 1
    v = np.linspace(1.0, v_top, n_points + 1)
    vals = np.exp(-x * v + (s - 1.0) * np.log(v))
    if log_order:
        vals = vals * np.log(v) ** log_order
    h = (v_top - 1.0) / n_points
    weights = np.ones(n_points + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return complex(np.dot(weights, vals) * h / 3.0)


def kummer_series_reference_fast(order, s, k, z, tol=1e-16):
    """kummer_series_reference with the vectorized polygamma oracle."""
    if order > 2:
        raise ValueError("reference oracle implements orders 0..2")
    s = complex(s)
    k = complex(k)
    z = complex(z)
    acc = 0.0 + 0.0j
    zpow = 1.0 + 0.0j
    j = 0
    psi_ks = polygamma_hurwitz_fast(0, k - s, 60_000) if order >= 1 else 0.0
    psi1_ks = polygamma_hurwitz_fast(1, k - s, 60_000) if order >= 2 else 0.0
    while j < 500:
        t_j = cmath.exp(
            log_gamma_stirling(s + j) + log_gamma_stirling(k - s) - log_gamma_stirling(k + j)
        )
        if order >= 1:
            g = polygamma_hurwitz_fast(0, s + j, 60_000) - psi_ks
            if order == 1:
                t_j *= g
            else:
                t_j *= g * g + polygamma_hurwitz_fast(1, s + j, 60_000) + psi1_ks
        term = t_j * zpow
        acc += term
        if abs(term) < tol * max(abs(acc), 1e-300) and j > abs(z) + 4:
            break
        j += 1
        zpow *= z / j
    return acc


def naive_tau(n_max):
    """Ramanujan tau by multiplying out (1 - q^n) factors, then 24th power."""
    series = [1] + [0] * n_max
    for n in range(1, n_max + 1):
        new = list(series)
        for i in range(n_max + 1 - n):
            if series[i]:
                new[i + n] -= series[i]
        series = new
    out = [1] + [0] * n_max
    for _ in range(24):
        acc = [0] * (n_max + 1)
        for i, a in enumerate(out):
            if a == 0:
                continue
            for jdx in range(n_max + 1 - i):
                if series[jdx]:
                    acc[i + jdx] += a * series[jdx]
        out = acc
    return {n + 1: out[n] for n in range(n_max)}


def sigma_power(n, p):
    return sum(d ** p for d in range(1, n + 1) if n % d == 0)


def eta_product_at_i(n_terms=60):
    """eta(i) = e^{-pi/12} prod (1 - e^{-2 pi n})."""
    out = math.exp(-math.pi / 12.0)
    for n in range(1, n_terms + 1):
        out *= 1.0 - math.exp(-2.0 * math.pi * n)
    return out


def dirichlet_l(f_coeffs, s, n_terms=None):
    """Plain Dirichlet sum of a scalar coefficient dict at large Re(s)."""
    acc = 0.0 + 0.0j
    for n, v in sorted(f_coeffs.items()):
        if n_terms and n > n_terms:
            break
        acc += complex(v) * cmath.exp(-complex(s) * math.log(n))
    return acc
