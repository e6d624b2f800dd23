"""Truncated Taylor-series arithmetic in one complex variable.

A series is a numpy array ``c`` of length order+1 with ``c[m] = f^(m)(s0)/m!``,
so products are plain truncated convolutions.  All derivative bookkeeping in
the kernel-coefficient and L-derivative code runs through these helpers, which
keeps the product-rule expansions in one place.
"""

import math

import numpy as np


def constant(value, order):
    c = np.zeros(order + 1, dtype=complex)
    c[0] = value
    return c


def mul(a, b):
    """Truncated product of two series of equal length."""
    n = len(a)
    out = np.zeros(n, dtype=complex)
    for m in range(n):
        out[m] = np.dot(a[: m + 1], b[m::-1])
    return out


def mul_many(series_list):
    out = series_list[0]
    for s in series_list[1:]:
        out = mul(out, s)
    return out


def exp_affine(value, alpha, order):
    """Series of value * exp(alpha*h): coefficients value * alpha^m / m!."""
    c = np.empty(order + 1, dtype=complex)
    c[0] = value
    for m in range(1, order + 1):
        c[m] = c[m - 1] * alpha / m
    return c


def series_exp(g):
    """exp of a series g (any constant term)."""
    n = len(g)
    b = np.zeros(n, dtype=complex)
    b[0] = np.exp(g[0])
    for m in range(1, n):
        acc = 0.0 + 0.0j
        for j in range(1, m + 1):
            acc += j * g[j] * b[m - j]
        b[m] = acc / m
    return b


def nth_derivative(series, n):
    """Read the n-th derivative off a Taylor series."""
    return series[n] * math.factorial(n)
